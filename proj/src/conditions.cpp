#include "symorb/conditions.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "symorb/error.hpp"
#include "symorb/kernels.hpp"
#include "symorb/rk45.hpp"

namespace symorb {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double half_pi = pi / 2;

// 2 t^2 / sin(t^2), finite at t = 0.
double two_t2_over_sin(double t) {
  const double u = t * t;
  if (u < 1e-4) {
    const double u2 = u * u;
    return 2 * (1 + u2 / 6 + 7 * u2 * u2 / 360);
  }
  return 2 * u / std::sin(u);
}

// sqrt(1/(2 cos phi) - g^2/4) scaled by 2t, with phi = pi/2 - t^2.
double scaled_root(double t, double g) {
  double A = two_t2_over_sin(t) - t * t * g * g;
  if (A < 0) {
    const double arg = t > 0 ? A / (4 * t * t) : A;
    if (arg < -1e-10) fail(ErrorKind::manifold_departure, "square-root argument negative in g comparison ODE");
    A = 0;
  }
  return std::sqrt(A);
}

bool half_circle_domain(const ProblemSpec& p) { return p.chart == ChartKind::half_circle; }

double quad(const std::function<double(double)>& f, double a, double b) {
  double err = 0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-15, &err);
}

}  // namespace

std::string to_string(GKind kind) {
  switch (kind) {
    case GKind::gamma: return "gamma";
    case GKind::g1: return "g1";
    case GKind::g2: return "g2";
    case GKind::g3: return "g3";
  }
  return "unknown";
}

std::string to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::not_applicable: return "not-applicable";
  }
  return "not-applicable";
}

std::vector<std::pair<double, double>> gamma_dprime_g_curve(const ProblemSpec& problem) {
  if (!half_circle_domain(problem)) fail(ErrorKind::domain, "gamma'' comparison needs the domain (-pi/2, pi/2)");
  const BranchTrace t = trace_branch(problem, BranchId::gamma_dprime);
  std::vector<std::pair<double, double>> out;
  for (const Sample& s : t.trajectory.samples) {
    if (s.state.w < 0) break;
    out.emplace_back(s.state.angle, s.state.v / std::sqrt(problem.W(s.state.angle)));
  }
  return out;
}

GComparisonResult integrate_g(const ProblemSpec& problem, GKind kind, const GOptions& options) {
  GComparisonResult out;
  out.kind = kind;
  switch (kind) {
    case GKind::g1:
      out.start_phi = 0.0;
      out.start_g = -std::sqrt(2.0);
      break;
    case GKind::g2:
    case GKind::g3:
      out.start_phi = pi / 4;
      out.start_g = -std::pow(2.0, 0.75);
      break;
    case GKind::gamma: {
      const auto curve = gamma_dprime_g_curve(problem);
      const double phi_R = critical_points(problem).phi_R();
      const double target = phi_R + 0.1 * (half_pi - phi_R);
      std::size_t i = 0;
      while (i + 1 < curve.size() && curve[i].first < target) ++i;
      out.start_phi = curve[i].first;
      out.start_g = curve[i].second;
      break;
    }
  }
  if ((kind == GKind::g3 || kind == GKind::gamma) && !half_circle_domain(problem))
    fail(ErrorKind::domain, "comparison ODE needs the domain (-pi/2, pi/2)");

  const double t0 = std::sqrt(half_pi - out.start_phi);
  const double alpha = options.alpha;
  auto field = [&](const rk45::Vec<2>& y) {
    const double t = std::max(t0 - y[1], 0.0);
    const double phi = half_pi - t * t;
    const double g = y[0];
    double extra = 0.0;
    if (kind == GKind::g2) extra = alpha * g / 2;
    if (kind == GKind::g3 || kind == GKind::gamma) extra = -g / 2 * problem.dW(phi) / problem.W(phi);
    return rk45::Vec<2>{scaled_root(t, g) + 2 * t * extra, 1.0};
  };
  rk45::StepControl sc;
  sc.rtol = options.rtol;
  sc.atol = options.atol;
  sc.hmax = t0 / 50;
  auto stepper = rk45::make_stepper<2>(field, sc);
  stepper.init(0.0, {out.start_g, 0.0});
  out.samples.emplace_back(out.start_phi, out.start_g);
  while (stepper.s() < t0) {
    if (stepper.advance(t0) != rk45::StepStatus::accepted)
      fail(ErrorKind::evaluation, "comparison ODE step failure");
    ++out.steps;
    const double t = std::max(t0 - stepper.s(), 0.0);
    out.samples.emplace_back(half_pi - t * t, stepper.y()[0]);
  }
  out.samples.back().first = half_pi;
  out.endpoint_phi = half_pi;
  out.endpoint_g = stepper.y()[0];
  return out;
}

double elliptic_K(double m) {
  if (!(m <= 1)) fail(ErrorKind::domain, "elliptic parameter must be <= 1");
  if (m == 1) fail(ErrorKind::divergence, "K diverges at m = 1");
  return quad([m](double x) { const double c = std::cos(x); return 1.0 / std::sqrt(1 - m * c * c); }, 0, half_pi);
}

double elliptic_E(double m) {
  if (!(m <= 1)) fail(ErrorKind::domain, "elliptic parameter must be <= 1");
  if (m == 1) return 1.0;
  return quad([m](double x) { const double s = std::sin(x); return std::sqrt(1 - m * s * s); }, 0, half_pi);
}

Elliptic elliptic(double m) {
  Elliptic e;
  e.K = elliptic_K(m);
  e.E = elliptic_E(m);
  double a = 1.0, b = std::sqrt(1 - m), sum = 0.5 * m, w = 0.5;
  for (int it = 0; it < 64; ++it) {
    const double c = 0.5 * (a - b);
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
    w *= 2;
    sum += w * c * c;
    if (std::abs(c) < 1e-17 * a) break;
  }
  e.K_agm = pi / (2 * a);
  e.E_agm = e.K_agm * (1 - sum);
  return e;
}

CertificateResult v2_certificate(double beta_hat) {
  if (0.5 - beta_hat * beta_hat / 4 < 0)
    fail(ErrorKind::bound_too_weak, "certificate integrand negative near phi = 0");
  CertificateResult r;
  r.beta_hat = beta_hat;
  // phi = pi/2 - t^2 turns the endpoint singularity into a smooth integrand.
  r.integral = quad(
      [beta_hat](double t) {
        const double A = two_t2_over_sin(t) - t * t * beta_hat * beta_hat;
        return std::sqrt(std::max(A, 0.0));
      },
      0.0, std::sqrt(half_pi));
  r.lower_bound_g_at_0 = beta_hat + r.integral;
  r.pass = r.lower_bound_g_at_0 > 0;
  return r;
}

CertificateResult v2_certificate(const ProblemSpec& problem, const ConditionOptions& options) {
  const ConditionEntry n3 = check_condition(problem, "N3", options);
  const GKind kind = n3.status == Status::pass ? GKind::g2 : GKind::g3;
  return v2_certificate(integrate_g(problem, kind, options.g).endpoint_g);
}

double spatial_h(double phi) {
  const double ct = std::cos(phi) / std::sin(phi);
  return 2 * elliptic_E(-ct * ct);
}

WprimeBound spatial_Wprime_bound(int n, double delta, std::size_t grid) {
  const ProblemSpec p = ProblemSpec::spatial_double_polygon(n);
  WprimeBound b;
  b.max_4Wprime = kernels::grid_max([&](double phi) { return 4 * std::abs(p.dW(phi)); }, pi / 4, half_pi, grid).value;
  b.h_max = spatial_h(pi / 4);
  b.bound = delta * n / pi;
  b.pass = b.max_4Wprime <= b.bound && b.h_max < delta;
  return b;
}

ConditionEntry check_condition(const ProblemSpec& problem, const std::string& which,
                               const ConditionOptions& options) {
  ConditionEntry e;
  const bool half = half_circle_domain(problem);
  if (which == "N1") {
    if (!half) {
      e.method = "requires the domain (-pi/2, pi/2)";
      return e;
    }
    const auto g = kernels::grid_max([&](double phi) { return problem.dW(phi); }, 0.0, half_pi, options.grid);
    const double h = half_pi / static_cast<double>(options.grid);
    e.status = g.value <= 1e-12 ? Status::pass : Status::fail;
    e.evidence = {{"max_Wprime", g.value},
                  {"argmax_phi", g.arg},
                  {"lipschitz", g.lipschitz},
                  {"between_node_ceiling", g.value + 0.5 * g.lipschitz * h}};
    e.method = "numerical evidence: W' <= 1e-12 on a uniform grid of [0, pi/2)";
    return e;
  }
  if (which == "N2") {
    const CriticalPointSet cps = critical_points(problem);
    if (cps.count() != 3) {
      e.status = Status::fail;
      e.evidence = {{"critical_points", static_cast<double>(cps.count())}};
      e.method = "requires three critical points";
      return e;
    }
    const double pr = cps.phi_R(), pm = problem.phi_m();
    const double s = std::sin((pr - pm) / 2);
    const double margin = problem.V(pr) - s * s * problem.V(pm);
    e.status = margin > 0 ? Status::pass : Status::fail;
    e.evidence = {{"margin", margin}, {"phi_R", pr}, {"V_phi_R", problem.V(pr)}, {"V_phi_m", problem.V(pm)}};
    e.method = "numerical evidence: V(phi_R) - sin^2((phi_R - phi_m)/2) V(phi_m) > 0";
    return e;
  }
  if (which == "N3") {
    if (!half) {
      e.method = "requires the domain (-pi/2, pi/2)";
      return e;
    }
    const double Wend = problem.W(half_pi);
    const auto g = kernels::grid_max([&](double phi) { return std::abs(problem.dW(phi) / problem.W(phi)); },
                                     pi / 4, half_pi, options.grid);
    const bool endpoint_ok = std::abs(Wend - problem.s_n / 4) <= 1e-10;
    e.status = endpoint_ok && g.value <= options.g.alpha ? Status::pass : Status::fail;
    e.evidence = {{"max_abs_Wprime_over_W", g.value}, {"W_half_pi", Wend}, {"S_n_over_4", problem.s_n / 4}};
    if (problem.kind == ProblemKind::spatial_double_polygon) {
      e.evidence.emplace_back("S_n_over_n", problem.s_n / problem.n);
      e.evidence.emplace_back("delta_n_over_pi_S_n", 3.83 * problem.n / (pi * problem.s_n));
    }
    e.method = "numerical evidence: W(pi/2) = S_n/4 and max |W'/W| <= 4/5 on a grid of [pi/4, pi/2)";
    return e;
  }
  if (which == "N3prime") {
    if (!half) {
      e.method = "requires the domain (-pi/2, pi/2)";
      return e;
    }
    const GComparisonResult g3 = integrate_g(problem, GKind::g3, options.g);
    e.status = g3.endpoint_g >= options.beta ? Status::pass : Status::fail;
    e.evidence = {{"g3_half_pi", g3.endpoint_g}, {"beta", options.beta}};
    e.method = "numerical evidence: integrated g3(pi/2) >= beta";
    return e;
  }
  if (which == "N4") {
    const N4Result r = check_N4(problem, options.branch);
    e.status = r.pass ? Status::pass : Status::fail;
    e.evidence = {{"separation", r.separation}, {"v2", r.v2}, {"v3", r.v3}};
    e.method = "numerical evidence: |v2 + v3| > 1e-6 from traced branches";
    return e;
  }
  fail(ErrorKind::usage, "unknown condition " + which);
}

const ConditionEntry* ConditionReport::find(const std::string& name) const {
  for (const auto& [k, v] : entries)
    if (k == name) return &v;
  return nullptr;
}

bool ConditionReport::overall_pass() const {
  auto ok = [&](const char* name) {
    const ConditionEntry* e = find(name);
    return !e || e->status != Status::fail;
  };
  const ConditionEntry* n3 = find("N3");
  const ConditionEntry* n3p = find("N3prime");
  const bool n3_na = (!n3 || n3->status == Status::not_applicable) && (!n3p || n3p->status == Status::not_applicable);
  const bool n3_ok = n3_na || (n3 && n3->status == Status::pass) || (n3p && n3p->status == Status::pass);
  return ok("N1") && ok("N2") && ok("N4") && n3_ok;
}

ConditionReport check_all(const ProblemSpec& problem, const ConditionOptions& options) {
  ConditionReport r;
  r.problem = problem;
  for (const char* name : {"N1", "N2", "N3", "N3prime", "N4"}) {
    ConditionEntry e;
    try {
      e = check_condition(problem, name, options);
    } catch (const Error& err) {
      e.status = Status::fail;
      e.method = std::string("error: ") + std::string(to_string(err.kind())) + ": " + err.what();
      e.evidence = {{"error", 1.0}};
    }
    r.entries.emplace_back(name, std::move(e));
  }
  return r;
}

}  // namespace symorb
