#include "symorb/problems.hpp"

#include <cmath>
#include <sstream>

#include "symorb/error.hpp"

namespace symorb {

namespace {

constexpr double pi = std::numbers::pi;

}  // namespace

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::pyramidal: return "pyramidal";
    case ProblemKind::spatial_double_polygon: return "spatial-double-polygon";
    case ProblemKind::planar_double_polygon: return "planar-double-polygon";
  }
  return "unknown";
}

std::string to_string(ChartKind kind) {
  return kind == ChartKind::half_circle ? "half-circle" : "quarter-circle";
}

double csc_sum(int n) {
  double s = 0.0;
  for (int k = 1; k < n; ++k) s += 1.0 / std::sin(pi * k / n);
  return s;
}

double csc_sum_asymptotic(int n) {
  const double x = static_cast<double>(n);
  const double x3 = x * x * x;
  return x / (2 * pi) * (std::numbers::egamma + std::log(2 * x / pi)) - pi / (144 * x) +
         7 * std::pow(pi, 3) / (86400 * x3) - 31 * std::pow(pi, 5) / (7620480 * x3 * x * x);
}

ProblemSpec ProblemSpec::pyramidal(int n, double mu) {
  if (n < 2) fail(ErrorKind::domain, "pyramidal problem requires n >= 2");
  if (!(mu > 0) || !std::isfinite(mu)) fail(ErrorKind::domain, "apex mass must be positive");
  ProblemSpec p;
  p.kind = ProblemKind::pyramidal;
  p.n = n;
  p.mu = mu;
  p.phi_a = -pi / 2;
  p.phi_b = pi / 2;
  p.chart = ChartKind::half_circle;
  p.s_n = csc_sum(n);
  return p;
}

ProblemSpec ProblemSpec::spatial_double_polygon(int n) {
  if (n < 2) fail(ErrorKind::domain, "double polygon requires n >= 2");
  ProblemSpec p;
  p.kind = ProblemKind::spatial_double_polygon;
  p.n = n;
  p.mu = 1.0;
  p.phi_a = -pi / 2;
  p.phi_b = pi / 2;
  p.chart = ChartKind::half_circle;
  p.s_n = csc_sum(n);
  for (int k = 1; k <= n; ++k) {
    const double c = std::cos(pi * (2 * k - 1) / (2.0 * n));
    p.coeff_.push_back(c * c);
  }
  return p;
}

ProblemSpec ProblemSpec::planar_double_polygon(int n) {
  if (n < 3) fail(ErrorKind::domain, "planar double polygon requires n >= 3");
  ProblemSpec p;
  p.kind = ProblemKind::planar_double_polygon;
  p.n = n;
  p.mu = 1.0;
  p.phi_a = 0.0;
  p.phi_b = pi / 2;
  p.chart = ChartKind::quarter_circle;
  p.s_n = csc_sum(n);
  for (int k = 1; k <= n; ++k) p.coeff_.push_back(std::cos(pi * (2 * k - 1) / n));
  return p;
}

std::string ProblemSpec::label() const {
  std::ostringstream os;
  os << to_string(kind) << " n=" << n;
  if (kind == ProblemKind::pyramidal) os << " mu=" << mu;
  return os.str();
}

double ProblemSpec::f(double phi) const {
  if (kind == ProblemKind::planar_double_polygon) return std::sin(phi) * std::cos(phi);
  return std::cos(phi);
}

double ProblemSpec::df(double phi) const {
  if (kind == ProblemKind::planar_double_polygon) return std::cos(2 * phi);
  return -std::sin(phi);
}

double ProblemSpec::W(double phi) const {
  const double s = std::sin(phi), c = std::cos(phi);
  switch (kind) {
    case ProblemKind::pyramidal: {
      return s_n / 4 + mu * c / std::sqrt(1 + (n / mu) * s * s);
    }
    case ProblemKind::spatial_double_polygon: {
      double sum = 0.0;
      for (double ck2 : coeff_) sum += 1.0 / std::sqrt(1 - ck2 * c * c);
      return s_n / 4 + c / 4 * sum;
    }
    case ProblemKind::planar_double_polygon: {
      const double s2 = 2 * s * c;
      double sum = 0.0;
      for (double ck : coeff_) sum += 1.0 / std::sqrt(1 - s2 * ck);
      return s_n / 4 * (s + c) + s * c * sum;
    }
  }
  return 0.0;
}

double ProblemSpec::dW(double phi) const {
  const double s = std::sin(phi), c = std::cos(phi);
  switch (kind) {
    case ProblemKind::pyramidal: {
      const double q = 1 + (n / mu) * s * s;
      return -(n + mu) * s / (q * std::sqrt(q));
    }
    case ProblemKind::spatial_double_polygon: {
      double sum = 0.0;
      for (double ck2 : coeff_) {
        const double sig = std::sqrt(1 - ck2 * c * c);
        sum += 1.0 / (sig * sig * sig);
      }
      return -s / 4 * sum;
    }
    case ProblemKind::planar_double_polygon: {
      const double s2 = 2 * s * c;
      double sum = 0.0;
      for (double ck : coeff_) {
        const double rho = std::sqrt(1 - s2 * ck);
        sum += 1.0 / rho + 0.5 * s2 * ck / (rho * rho * rho);
      }
      return s_n / 4 * (c - s) + std::cos(2 * phi) * sum;
    }
  }
  return 0.0;
}

double ProblemSpec::V(double phi) const { return W(phi) / f(phi); }

double ProblemSpec::dV(double phi) const {
  const double ff = f(phi);
  return (dW(phi) * ff - W(phi) * df(phi)) / (ff * ff);
}

double ProblemSpec::F(double phi) const { return f(phi) / std::sqrt(W(phi)); }

double potential(const ProblemSpec& problem, double phi, Quantity quantity) {
  if (!std::isfinite(phi)) fail(ErrorKind::domain, "angle is not finite");
  const double slack = 1e-12;
  if (phi < problem.phi_a - slack || phi > problem.phi_b + slack)
    fail(ErrorKind::domain, "angle outside the shape domain");
  const bool interior = phi > problem.phi_a && phi < problem.phi_b;
  switch (quantity) {
    case Quantity::V:
    case Quantity::dV:
      if (!interior) fail(ErrorKind::singularity, "V is singular at the domain endpoints");
      return quantity == Quantity::V ? problem.V(phi) : problem.dV(phi);
    case Quantity::f: return problem.f(phi);
    case Quantity::W: return problem.W(phi);
    case Quantity::dW: return problem.dW(phi);
    case Quantity::F: return problem.F(phi);
  }
  return 0.0;
}

double CriticalPointSet::phi_R() const {
  if (points.size() != 3) fail(ErrorKind::structure, "phi_R requires three critical points");
  return points[2].phi;
}

CriticalPointSet critical_points(const ProblemSpec& problem, int grid) {
  if (grid < 4) fail(ErrorKind::domain, "critical point grid too small");
  const double a = problem.phi_a, b = problem.phi_b, m = problem.phi_m();
  const double h = (b - a) / grid;
  auto node = [&](int i) { return a + (i + 0.5) * h; };

  std::vector<double> roots;
  auto bisect = [&](double lo, double hi) {
    double flo = problem.dV(lo);
    for (int it = 0; it < 200 && hi - lo > 4e-16 * std::max(1.0, std::abs(lo)); ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = problem.dV(mid);
      if (fm == 0.0) return mid;
      if ((fm > 0) == (flo > 0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  double prev = problem.dV(node(0));
  for (int i = 1; i < grid; ++i) {
    const double cur = problem.dV(node(i));
    if (cur == 0.0 || (cur > 0) != (prev > 0)) {
      roots.push_back(cur == 0.0 ? node(i) : bisect(node(i - 1), node(i)));
      if (cur == 0.0 && i + 1 < grid) {
        prev = problem.dV(node(++i));
        continue;
      }
    }
    prev = cur;
  }

  // V is symmetric about phi_m; snap the central root and mirror the outer ones.
  if (roots.size() == 3) {
    roots[1] = m;
    const double d = 0.5 * ((roots[2] - m) + (m - roots[0]));
    roots[0] = m - d;
    roots[2] = m + d;
  } else if (roots.size() == 1) {
    roots[0] = m;
  } else {
    fail(ErrorKind::structure, "expected 1 or 3 critical points, found " + std::to_string(roots.size()));
  }

  CriticalPointSet out;
  for (double r : roots) {
    const double step = 1e-5 * (b - a);
    double lo = std::max(r - step, a + 0.5 * step), hi = std::min(r + step, b - 0.5 * step);
    const double d2 = (problem.dV(hi) - problem.dV(lo)) / (hi - lo);
    out.points.push_back({r, d2 > 0 ? 1 : -1});
  }
  return out;
}

double phi_R_closed_form(int n, double mu) {
  const double ratio = 4.0 * n / csc_sum(n);
  const double t2 = mu / (n + mu) * (std::pow(ratio, 2.0 / 3.0) - 1);
  if (n < 2) fail(ErrorKind::domain, "n must be at least 2");
  if (t2 <= 0) fail(ErrorKind::domain, "no off-center critical point for these parameters");
  return std::atan(std::sqrt(t2));
}

}  // namespace symorb
