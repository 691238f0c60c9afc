#pragma once

#include <array>
#include <string>

#include "symorb/problems.hpp"

namespace symorb {

using Vec4 = std::array<double, 4>;

enum class Chart { devaney, newcoords };

/// A phase point. `angle` is phi in the Devaney chart and theta in the new
/// chart; theta is kept unwrapped.
struct State {
  Chart chart = Chart::newcoords;
  double r = 0.0;
  double v = 0.0;
  double angle = 0.0;
  double w = 0.0;
  double h = -1.0;

  Vec4 vec() const { return {r, v, angle, w}; }
  static State from_vec(const Vec4& x, Chart chart, double h) { return {chart, x[0], x[1], x[2], x[3], h}; }
};

std::string to_string(Chart chart);

struct ChartData {
  double c1 = 0.0, c2 = 0.0;    // point on the unit circle
  double dc1 = 0.0, dc2 = 0.0;  // derivatives with respect to theta
  double c = 0.0;               // c(theta)
  double dc = 0.0;              // c'(theta)
  double quotient = 0.0;        // c'(theta) / (sin theta cos theta), analytically continued
};

ChartData chart_eval(ChartKind kind, double theta);

/// phi(theta) and dphi/dtheta for the problem's chart.
double phi_of_theta(const ProblemSpec& problem, double theta);
double dphi_dtheta(const ProblemSpec& problem, double theta);
/// Principal-branch inverse, theta in [-pi/2, pi/2].
double theta_of_phi(const ProblemSpec& problem, double phi);

/// cos^2(theta) V(theta) and its theta-derivative, regular at partial collisions.
struct RegularizedPotential {
  double W = 0.0;
  double dW = 0.0;
};
RegularizedPotential regularized_potential(const ProblemSpec& problem, double theta);

/// V as a function of theta; the zero-velocity curve is r = V(theta) at h = -1.
double V_theta(const ProblemSpec& problem, double theta);

/// Critical point theta* of V(theta) in (0, pi/2); throws structure error if
/// the potential has a single critical point.
double theta_star(const ProblemSpec& problem);

Vec4 newcoords_rhs(const ProblemSpec& problem, const State& s);
Vec4 devaney_rhs(const ProblemSpec& problem, const State& s);
/// Chart-dispatching field.
Vec4 rhs(const ProblemSpec& problem, const State& s);

double energy_residual(const ProblemSpec& problem, const State& s);

enum class Symmetry { R1, R2, T1 };

struct SymmetryImage {
  State state;
  bool time_reversing = false;
};

SymmetryImage apply_symmetry(Symmetry op, const State& s);

/// Reflection about the line theta = theta_bar (a multiple of pi/2):
/// (r, -v, 2 theta_bar - theta, w), time-reversing.
SymmetryImage reflect_about(double theta_bar, const State& s);

enum class Region { R_I, R_II, R_III, Q_I, Q_II, outside };
std::string to_string(Region region);

Region classify_region(const ProblemSpec& problem, const State& s);

struct Configuration {
  double q1 = 0.0, q2 = 0.0;
  double dq1 = 0.0, dq2 = 0.0;
};

/// Diagonal of the mass matrix A of the kinetic energy (1/2) qdot^T A qdot.
std::array<double, 2> mass_matrix(const ProblemSpec& problem);

Configuration to_configuration(const ProblemSpec& problem, const State& s);
/// Inverse of to_configuration into the new chart; theta is chosen on the
/// branch nearest to `theta_hint`.
State from_configuration(const ProblemSpec& problem, const Configuration& q, double h = -1.0,
                         double theta_hint = 0.0);

/// Maps a state to the other chart at equal (r, v) and the same shape.
/// Devaney states at phi_a or phi_b are rejected with a singularity error.
State convert_chart(const ProblemSpec& problem, const State& s, double theta_hint = 0.0);

/// dt/ds for the state's chart.
double time_rate(const ProblemSpec& problem, const State& s);

}  // namespace symorb
