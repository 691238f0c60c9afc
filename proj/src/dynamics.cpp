#include "symorb/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "symorb/error.hpp"

namespace symorb {

namespace {

constexpr double pi = std::numbers::pi;

void check_finite(const Vec4& d) {
  static const char* names[4] = {"dr/ds", "dv/ds", "dangle/ds", "dw/ds"};
  for (int i = 0; i < 4; ++i)
    if (!std::isfinite(d[i])) fail(ErrorKind::evaluation, std::string("non-finite ") + names[i]);
}

}  // namespace

std::string to_string(Chart chart) { return chart == Chart::devaney ? "devaney" : "newcoords"; }

ChartData chart_eval(ChartKind kind, double theta) {
  const double s = std::sin(theta), c = std::cos(theta);
  ChartData d;
  if (kind == ChartKind::half_circle) {
    const double q = 1 + s * s;
    d.c1 = c * c / q;
    d.c2 = 2 * s / q;
    d.dc1 = -4 * s * c / (q * q);
    d.dc2 = 2 * c * c * c / (q * q);
    d.c = q * q / 4;
    d.dc = q * s * c;
    d.quotient = q;
  } else {
    const double root = std::sqrt(c * c + 1);
    d.c1 = (root - s) / 2;
    d.c2 = (root + s) / 2;
    const double droot = -c * s / root;
    d.dc1 = (droot - c) / 2;
    d.dc2 = (droot + c) / 2;
    d.c = 1 + c * c;
    d.dc = -2 * s * c;
    d.quotient = -2;
  }
  return d;
}

double phi_of_theta(const ProblemSpec& problem, double theta) {
  if (problem.chart == ChartKind::half_circle) return 2 * std::atan(std::sin(theta));
  const ChartData d = chart_eval(problem.chart, theta);
  return std::atan2(d.c2, d.c1);
}

double dphi_dtheta(const ProblemSpec& problem, double theta) {
  const double s = std::sin(theta), c = std::cos(theta);
  if (problem.chart == ChartKind::half_circle) return 2 * c / (1 + s * s);
  return c / std::sqrt(1 + c * c);
}

double theta_of_phi(const ProblemSpec& problem, double phi) {
  if (problem.chart == ChartKind::half_circle) return std::asin(std::clamp(std::tan(phi / 2), -1.0, 1.0));
  return std::asin(std::clamp(std::sin(phi) - std::cos(phi), -1.0, 1.0));
}

RegularizedPotential regularized_potential(const ProblemSpec& problem, double theta) {
  const double s = std::sin(theta), c = std::cos(theta);
  const double phi = phi_of_theta(problem, theta);
  const double W = problem.W(phi), dW = problem.dW(phi);
  if (problem.chart == ChartKind::half_circle) return {(1 + s * s) * W, 2 * s * c * W + 2 * c * dW};
  return {2 * W, 2 * dW * c / std::sqrt(1 + c * c)};
}

double V_theta(const ProblemSpec& problem, double theta) {
  const double c = std::cos(theta);
  if (std::abs(c) < 1e-300) fail(ErrorKind::singularity, "V is singular at a partial collision");
  return regularized_potential(problem, theta).W / (c * c);
}

double theta_star(const ProblemSpec& problem) {
  const CriticalPointSet cps = critical_points(problem);
  return theta_of_phi(problem, cps.phi_R());
}

Vec4 newcoords_rhs(const ProblemSpec& problem, const State& st) {
  const double th = st.angle, s = std::sin(th), c = std::cos(th), c2 = c * c;
  const ChartData cd = chart_eval(problem.chart, th);
  const RegularizedPotential P = regularized_potential(problem, th);
  const double r = st.r, v = st.v, w = st.w;
  Vec4 d;
  d[0] = r * v * c2;
  d[1] = 0.5 * v * v * c2 + w * w * cd.c - P.W;
  d[2] = w * cd.c;
  d[3] = P.dW - 0.5 * v * w * c2 + c * s * (-2 * st.h * r + v * v - 0.5 * w * w * cd.quotient);
  check_finite(d);
  return d;
}

Vec4 devaney_rhs(const ProblemSpec& problem, const State& st) {
  const double phi = st.angle;
  const double f = problem.f(phi), df = problem.df(phi);
  const double W = problem.W(phi), dW = problem.dW(phi);
  const double sqW = std::sqrt(W), F = f / sqW;
  const double r = st.r, v = st.v, w = st.w, h = st.h;
  Vec4 d;
  d[0] = r * v * F;
  d[1] = F * (2 * h * r - 0.5 * v * v) + sqW;
  d[2] = w;
  d[3] = -0.5 * v * w * F + dW / W * (f - 0.5 * w * w) + df * (1 + f / W * (2 * h * r - v * v));
  check_finite(d);
  return d;
}

Vec4 rhs(const ProblemSpec& problem, const State& s) {
  return s.chart == Chart::newcoords ? newcoords_rhs(problem, s) : devaney_rhs(problem, s);
}

double energy_residual(const ProblemSpec& problem, const State& st) {
  if (st.chart == Chart::newcoords) {
    const double c = std::cos(st.angle), c2 = c * c;
    const ChartData cd = chart_eval(problem.chart, st.angle);
    const double W = regularized_potential(problem, st.angle).W;
    return 0.5 * st.v * st.v * c2 + 0.5 * st.w * st.w * cd.c - W - st.h * st.r * c2;
  }
  const double f = problem.f(st.angle), W = problem.W(st.angle);
  if (f == 0.0) return 0.5 * st.w * st.w;
  return st.w * st.w / (2 * f) - 1 - f / W * (st.r * st.h - 0.5 * st.v * st.v);
}

SymmetryImage apply_symmetry(Symmetry op, const State& s) {
  if (s.chart != Chart::newcoords) fail(ErrorKind::domain, "symmetries act on the new chart");
  State out = s;
  switch (op) {
    case Symmetry::R1:
      out.v = -s.v;
      out.w = -s.w;
      return {out, true};
    case Symmetry::R2:
      out.v = -s.v;
      out.angle = -s.angle;
      return {out, true};
    case Symmetry::T1:
      out.angle = s.angle + pi;
      return {out, false};
  }
  return {out, false};
}

SymmetryImage reflect_about(double theta_bar, const State& s) {
  State out = s;
  out.v = -s.v;
  out.angle = 2 * theta_bar - s.angle;
  return {out, true};
}

std::string to_string(Region region) {
  switch (region) {
    case Region::R_I: return "R_I";
    case Region::R_II: return "R_II";
    case Region::R_III: return "R_III";
    case Region::Q_I: return "Q_I";
    case Region::Q_II: return "Q_II";
    case Region::outside: return "outside";
  }
  return "outside";
}

Region classify_region(const ProblemSpec& problem, const State& s) {
  const double ts = theta_star(problem);
  const double th = s.angle;
  if (th >= ts - pi && th <= -pi / 2) return s.w >= 0 ? Region::R_I : Region::Q_I;
  if (th >= -pi / 2 && th <= -ts) return s.w >= 0 ? Region::R_II : Region::Q_II;
  if (th >= -ts && th <= 0 && s.w >= 0) return Region::R_III;
  return Region::outside;
}

std::array<double, 2> mass_matrix(const ProblemSpec& problem) {
  switch (problem.kind) {
    case ProblemKind::pyramidal: return {1.0, problem.mu / (problem.n + problem.mu)};
    case ProblemKind::spatial_double_polygon: return {1.0, 0.25};
    case ProblemKind::planar_double_polygon: return {1.0, 1.0};
  }
  return {1.0, 1.0};
}

Configuration to_configuration(const ProblemSpec& problem, const State& st) {
  if (!(st.r > 0)) fail(ErrorKind::total_collision, "no configuration velocities at total collision");
  const auto A = mass_matrix(problem);
  const double sa1 = std::sqrt(A[0]), sa2 = std::sqrt(A[1]);
  const double r = st.r, rdot = st.v / std::sqrt(r), r32 = r * std::sqrt(r);
  double b1, b2, db1, db2;  // unit-circle point and its time derivative
  if (st.chart == Chart::newcoords) {
    const ChartData cd = chart_eval(problem.chart, st.angle);
    const double c = std::cos(st.angle);
    if (std::abs(c) < 1e-300) fail(ErrorKind::singularity, "infinite shape velocity at a partial collision");
    const double thdot = st.w * cd.c / (r32 * c * c);
    b1 = cd.c1;
    b2 = cd.c2;
    db1 = cd.dc1 * thdot;
    db2 = cd.dc2 * thdot;
  } else {
    const double f = problem.f(st.angle);
    if (std::abs(f) < 1e-300) fail(ErrorKind::singularity, "infinite shape velocity at a partial collision");
    const double phidot = st.w / r32 * std::sqrt(problem.W(st.angle)) / f;
    b1 = std::cos(st.angle);
    b2 = std::sin(st.angle);
    db1 = -b2 * phidot;
    db2 = b1 * phidot;
  }
  Configuration q;
  q.q1 = r * b1 / sa1;
  q.q2 = r * b2 / sa2;
  q.dq1 = (rdot * b1 + r * db1) / sa1;
  q.dq2 = (rdot * b2 + r * db2) / sa2;
  return q;
}

namespace {

// Representative of the theta branch closest to `hint` among all preimages
// of the principal value theta0 (theta0 + 2 pi k and pi - theta0 + 2 pi k).
double nearest_branch(double theta0, double hint) {
  auto closest = [&](double base) { return base + 2 * pi * std::round((hint - base) / (2 * pi)); };
  const double a = closest(theta0), b = closest(pi - theta0);
  return std::abs(a - hint) <= std::abs(b - hint) ? a : b;
}

}  // namespace

State from_configuration(const ProblemSpec& problem, const Configuration& q, double h, double theta_hint) {
  const auto A = mass_matrix(problem);
  const double sa1 = std::sqrt(A[0]), sa2 = std::sqrt(A[1]);
  const double x1 = sa1 * q.q1, x2 = sa2 * q.q2, dx1 = sa1 * q.dq1, dx2 = sa2 * q.dq2;
  const double r = std::hypot(x1, x2);
  if (!(r > 0)) fail(ErrorKind::total_collision, "configuration at total collision");
  const double b1 = x1 / r, b2 = x2 / r;
  const double rdot = (x1 * dx1 + x2 * dx2) / r;
  const double db1 = (dx1 - rdot * b1) / r, db2 = (dx2 - rdot * b2) / r;
  const double phi = std::atan2(b2, b1);
  const double theta = nearest_branch(theta_of_phi(problem, phi), theta_hint);
  const ChartData cd = chart_eval(problem.chart, theta);
  State s;
  s.chart = Chart::newcoords;
  s.r = r;
  s.v = std::sqrt(r) * rdot;
  s.angle = theta;
  s.w = r * std::sqrt(r) * (db1 * cd.dc1 + db2 * cd.dc2);
  s.h = h;
  return s;
}

State convert_chart(const ProblemSpec& problem, const State& s, double theta_hint) {
  State out = s;
  if (s.chart == Chart::newcoords) {
    const double c = std::cos(s.angle);
    const double phi = phi_of_theta(problem, s.angle);
    const double sqW = std::sqrt(problem.W(phi));
    const double scale = problem.chart == ChartKind::half_circle ? c / (2 * sqW)
                                                                  : c * std::sqrt(1 + c * c) / (2 * sqW);
    out.chart = Chart::devaney;
    out.angle = phi;
    out.w = scale * s.w;
    return out;
  }
  const double f = problem.f(s.angle);
  if (std::abs(f) < 1e-300) fail(ErrorKind::singularity, "Devaney state at a partial collision");
  const double theta = nearest_branch(theta_of_phi(problem, s.angle), theta_hint);
  const double c = std::cos(theta);
  const double sqW = std::sqrt(problem.W(s.angle));
  const double scale = problem.chart == ChartKind::half_circle ? c / (2 * sqW)
                                                                : c * std::sqrt(1 + c * c) / (2 * sqW);
  out.chart = Chart::newcoords;
  out.angle = theta;
  out.w = s.w / scale;
  return out;
}

double time_rate(const ProblemSpec& problem, const State& s) {
  const double r32 = s.r * std::sqrt(std::max(s.r, 0.0));
  if (s.chart == Chart::newcoords) {
    const double c = std::cos(s.angle);
    return r32 * c * c;
  }
  return r32 * problem.F(s.angle);
}

}  // namespace symorb
