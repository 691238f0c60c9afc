#pragma once

#include <numbers>
#include <string>
#include <vector>

namespace symorb {

enum class ProblemKind { pyramidal, spatial_double_polygon, planar_double_polygon };

/// Shape-circle parametrization used by the regularized chart.
enum class ChartKind { half_circle, quarter_circle };

enum class Quantity { V, dV, f, W, dW, F };

std::string to_string(ProblemKind kind);
std::string to_string(ChartKind kind);

/// One of the three two-degree-of-freedom sub-problems together with the
/// constants derived from it.
///
/// The shape potential V(phi) is singular at the domain endpoints; every
/// evaluation here is routed through the regularized product W = f V, which
/// is finite and positive on the closed interval [phi_a, phi_b].
struct ProblemSpec {
  ProblemKind kind = ProblemKind::pyramidal;
  int n = 2;
  double mu = 1.0;  // apex mass, pyramidal only
  double phi_a = -std::numbers::pi / 2;
  double phi_b = std::numbers::pi / 2;
  ChartKind chart = ChartKind::half_circle;
  double s_n = 1.0;  // sum of csc(pi k / n), k = 1..n-1

  static ProblemSpec pyramidal(int n, double mu = 1.0);
  static ProblemSpec spatial_double_polygon(int n);
  static ProblemSpec planar_double_polygon(int n);

  double phi_m() const { return 0.5 * (phi_a + phi_b); }
  std::string label() const;

  // Unchecked closed forms. W, dW, f, df are regular on the closed domain;
  // V and dV require phi strictly inside it.
  double W(double phi) const;
  double dW(double phi) const;
  double f(double phi) const;
  double df(double phi) const;
  double V(double phi) const;
  double dV(double phi) const;
  double F(double phi) const;

 private:
  // spatial: c_k^2 = cos^2(pi (2k-1) / 2n); planar: cos(pi (2k-1) / n)
  std::vector<double> coeff_;
};

/// S_n = sum_{k=1}^{n-1} csc(pi k / n) by direct summation.
double csc_sum(int n);

/// Large-n expansion of S_n / 4.
double csc_sum_asymptotic(int n);

/// Checked evaluation of one of the potential-related quantities.
double potential(const ProblemSpec& problem, double phi, Quantity quantity);

struct CriticalPoint {
  double phi = 0.0;
  int second_derivative_sign = 0;  // +1 minimum, -1 maximum
};

struct CriticalPointSet {
  std::vector<CriticalPoint> points;  // increasing phi
  int count() const { return static_cast<int>(points.size()); }
  /// Right critical point phi_R (requires count() == 3).
  double phi_R() const;
};

/// Roots of V' on the open domain: sign-change scan over `grid` samples
/// followed by bisection. Throws structure error unless 1 or 3 are found.
CriticalPointSet critical_points(const ProblemSpec& problem, int grid = 10000);

/// arctan sqrt((mu/(n+mu)) ((4n/S_n)^{2/3} - 1)), the pyramidal off-center minimum.
double phi_R_closed_form(int n, double mu);

}  // namespace symorb
