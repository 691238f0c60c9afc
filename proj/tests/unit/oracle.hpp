#pragma once

// Brute-force Newtonian oracle: explicit body positions linear in (q1, q2),
// pairwise potential, kinetic energy from body velocities. Shares nothing
// with the library beyond the Configuration struct.

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "symorb/dynamics.hpp"

namespace oracle {

using P3 = std::array<double, 3>;

struct Body {
  double m;
  P3 a;  // position = q1 a + q2 b
  P3 b;
};

struct System {
  std::vector<Body> bodies;
  double normalization;  // energies are divided by this
};

inline System make_system(const symorb::ProblemSpec& p) {
  constexpr double pi = std::numbers::pi;
  System s;
  const int n = p.n;
  switch (p.kind) {
    case symorb::ProblemKind::pyramidal: {
      const double mu = p.mu;
      for (int k = 0; k < n; ++k)
        s.bodies.push_back({1.0, {std::cos(2 * pi * k / n), std::sin(2 * pi * k / n), 0.0}, {0, 0, -mu / (n + mu)}});
      s.bodies.push_back({mu, {0, 0, 0}, {0, 0, n / (n + mu)}});
      s.normalization = n;
      break;
    }
    case symorb::ProblemKind::spatial_double_polygon:
      for (int k = 0; k < n; ++k) {
        s.bodies.push_back({1.0, {std::cos(2 * pi * k / n), std::sin(2 * pi * k / n), 0.0}, {0, 0, 0.5}});
        s.bodies.push_back(
            {1.0, {std::cos(2 * pi * k / n + pi / n), std::sin(2 * pi * k / n + pi / n), 0.0}, {0, 0, -0.5}});
      }
      s.normalization = 2 * n;
      break;
    case symorb::ProblemKind::planar_double_polygon:
      for (int k = 0; k < n; ++k) {
        s.bodies.push_back({1.0, {std::cos(2 * pi * k / n), std::sin(2 * pi * k / n), 0.0}, {0, 0, 0}});
        s.bodies.push_back(
            {1.0, {0, 0, 0}, {std::cos(2 * pi * k / n + pi / n), std::sin(2 * pi * k / n + pi / n), 0.0}});
      }
      s.normalization = n;
      break;
  }
  return s;
}

inline P3 at(const Body& b, double q1, double q2) {
  return {q1 * b.a[0] + q2 * b.b[0], q1 * b.a[1] + q2 * b.b[1], q1 * b.a[2] + q2 * b.b[2]};
}

/// Normalized force function U = sum m_i m_j / |x_i - x_j| / N.
inline double force_function(const System& s, double q1, double q2) {
  double u = 0.0;
  for (std::size_t i = 0; i < s.bodies.size(); ++i)
    for (std::size_t j = i + 1; j < s.bodies.size(); ++j) {
      const P3 x = at(s.bodies[i], q1, q2), y = at(s.bodies[j], q1, q2);
      u += s.bodies[i].m * s.bodies[j].m / std::hypot(x[0] - y[0], x[1] - y[1], x[2] - y[2]);
    }
  return u / s.normalization;
}

inline double kinetic(const System& s, double dq1, double dq2) {
  double t = 0.0;
  for (const auto& b : s.bodies) {
    const P3 v = at(b, dq1, dq2);
    t += 0.5 * b.m * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  }
  return t / s.normalization;
}

inline double energy(const System& s, const symorb::Configuration& q) {
  return kinetic(s, q.dq1, q.dq2) - force_function(s, q.q1, q.q2);
}

/// Configuration at mass-weighted radius 1 and shape angle phi.
inline std::array<double, 2> unit_shape(const symorb::ProblemSpec& p, double phi) {
  const auto A = symorb::mass_matrix(p);
  return {std::cos(phi) / std::sqrt(A[0]), std::sin(phi) / std::sqrt(A[1])};
}

}  // namespace oracle
