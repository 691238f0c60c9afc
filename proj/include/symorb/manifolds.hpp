#pragma once

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symorb/odeint.hpp"

namespace symorb {

enum class EquilibriumKind { lagrange, euler };

struct Equilibrium {
  EquilibriumKind kind = EquilibriumKind::euler;
  std::string label;  // "L+", "L-", "L'+", "L'-", "L''+", "L''-", "E+", "E-"
  State state;
  std::array<std::complex<double>, 4> eigenvalues{};
  std::array<std::array<std::complex<double>, 4>, 4> eigenvectors{};  // columns, (r, v, angle, w)
};

/// All Lagrange and Euler points of the chart. New chart: L at theta*-pi,
/// L' at -theta*, E at 0. Devaney chart: L' at phi_L, L'' at phi_R, E at phi_m.
std::vector<Equilibrium> equilibria(const ProblemSpec& problem, Chart chart);

/// Central-difference Jacobian of the full field, step 1e-6 relative per component.
std::array<std::array<double, 4>, 4> numerical_jacobian(const ProblemSpec& problem, const State& s);

enum class BranchId {
  gamma,                // unstable branch of L- with w >= 0 (new chart)
  gamma_prime,          // unstable branch of L'- with w >= 0
  gamma_dprime,         // unstable branch of L''- with w >= 0, Devaney chart
  gamma_minus,          // unstable branch of L- with w <= 0
  gamma_prime_minus,    // unstable branch of L'- with w <= 0
  stable_L_prime_minus  // stable branch of L'- with w >= 0, traced in backward time
};

std::string to_string(BranchId id);
/// Name of the same branch in the other chart.
std::string alias(BranchId id);

enum class BranchTermination { hole_a_plus, hole_a_minus, hole_b_plus, hole_b_minus, equilibrium, cap };
std::string to_string(BranchTermination t);

struct BranchTrace {
  BranchId branch = BranchId::gamma;
  std::string base;  // equilibrium label
  double epsilon = 0.0;
  double eigenvalue = 0.0;
  std::array<double, 3> direction{};  // unit eigenvector in (v, angle, w)
  Trajectory trajectory;
  std::map<std::string, double> landmarks;  // v0..v5, absent when not reached
  BranchTermination termination = BranchTermination::cap;
  std::string limit_label;  // equilibrium reached, when termination == equilibrium

  std::optional<double> landmark(const std::string& name) const;
};

struct BranchControls {
  double epsilon = 0.0;  // 0 selects 1e-7 |v_eq|
  double max_s = 200.0;
  double rtol = 1e-11;
  double atol = 1e-13;
};

/// Traces one branch on the collision manifold and fills its landmarks:
/// gamma gives v1 (first theta=-pi/2), v2 (next theta=0) and, for the planar
/// problem, v4 (next theta=pi/2); gamma' gives v3 (first theta=0) and, planar,
/// v5 (next theta=pi/2); the backward stable branch gives v0 (theta=-pi/2);
/// gamma'' gives v1 at its turn at phi=pi/2.
BranchTrace trace_branch(const ProblemSpec& problem, BranchId branch, const BranchControls& controls = {});

struct N4Result {
  double v2 = 0.0, v3 = 0.0;
  double separation = 0.0;
  bool pass = false;
};

N4Result check_N4(double v2, double v3);
N4Result check_N4(const ProblemSpec& problem, const BranchControls& controls = {});

struct LandmarkSet {
  std::map<std::string, double> values;
  std::optional<double> get(const std::string& name) const;
};

/// v0..v5 from gamma, gamma' and the backward stable branch of L'-.
LandmarkSet landmarks(const ProblemSpec& problem, const BranchControls& controls = {});

}  // namespace symorb
