#include "symorb/manifolds.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "symorb/error.hpp"

namespace symorb {

namespace {

constexpr double pi = std::numbers::pi;

Equilibrium make_equilibrium(const ProblemSpec& problem, EquilibriumKind kind, const std::string& label,
                             Chart chart, double angle, double v) {
  Equilibrium e;
  e.kind = kind;
  e.label = label;
  e.state = State{chart, 0.0, v, angle, 0.0, -1.0};
  const auto J = numerical_jacobian(problem, e.state);
  Eigen::Matrix4d M;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) M(i, j) = J[i][j];
  Eigen::EigenSolver<Eigen::Matrix4d> es(M);
  if (es.info() != Eigen::Success) fail(ErrorKind::linearization, "eigen-decomposition failed at " + label);
  for (int i = 0; i < 4; ++i) {
    e.eigenvalues[i] = es.eigenvalues()(i);
    for (int j = 0; j < 4; ++j) e.eigenvectors[i][j] = es.eigenvectors()(j, i);
  }
  return e;
}

const Equilibrium& find_label(const std::vector<Equilibrium>& eqs, const std::string& label) {
  for (const auto& e : eqs)
    if (e.label == label) return e;
  fail(ErrorKind::structure, "equilibrium " + label + " does not exist");
}

// Reduced (v, angle, w) Jacobian on r = 0.
Eigen::Matrix3d reduced_jacobian(const ProblemSpec& problem, const State& s) {
  const auto J = numerical_jacobian(problem, s);
  Eigen::Matrix3d M;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) M(i, j) = J[i + 1][j + 1];
  return M;
}

Eigen::Vector3d energy_gradient(const ProblemSpec& problem, const State& s) {
  Eigen::Vector3d g;
  for (int j = 0; j < 3; ++j) {
    State a = s, b = s;
    double* pa = j == 0 ? &a.v : (j == 1 ? &a.angle : &a.w);
    double* pb = j == 0 ? &b.v : (j == 1 ? &b.angle : &b.w);
    const double base = j == 0 ? s.v : (j == 1 ? s.angle : s.w);
    const double h = 1e-6 * std::max(1.0, std::abs(base));
    *pa += h;
    *pb -= h;
    g(j) = (energy_residual(problem, a) - energy_residual(problem, b)) / (2 * h);
  }
  return g;
}

struct Direction {
  double eigenvalue;
  Eigen::Vector3d vec;
};

// Real eigen-direction with the requested sign that is tangent to the energy
// level set; the transverse direction is discarded.
Direction select_direction(const ProblemSpec& problem, const State& s, int sign) {
  const Eigen::Matrix3d J = reduced_jacobian(problem, s);
  Eigen::EigenSolver<Eigen::Matrix3d> es(J);
  if (es.info() != Eigen::Success) fail(ErrorKind::linearization, "reduced eigen-decomposition failed");
  const Eigen::Vector3d grad = energy_gradient(problem, s);
  const double gnorm = grad.norm();
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  int best = -1;
  double best_tangency = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const auto lam = es.eigenvalues()(i);
    if (std::abs(lam.imag()) > 1e-8 * scale) continue;
    if (sign * lam.real() <= 1e-8 * scale) continue;
    Eigen::Vector3d vec = es.eigenvectors().col(i).real();
    vec.normalize();
    const double tangency = gnorm > 0 ? std::abs(vec.dot(grad)) / gnorm : 0.0;
    if (tangency < best_tangency) {
      best_tangency = tangency;
      best = i;
    }
  }
  if (best < 0) fail(ErrorKind::linearization, "no real eigen-direction of the requested type");
  Eigen::Vector3d vec = es.eigenvectors().col(best).real().normalized();
  // The eigenvector must be well conditioned for the seed to be meaningful.
  const Eigen::Vector3d resid = J * vec - es.eigenvalues()(best).real() * vec;
  if (resid.norm() > 1e-6 * scale) fail(ErrorKind::linearization, "defective linearization");
  return {es.eigenvalues()(best).real(), vec};
}

// Moves w onto the energy level r = 0 keeping its sign.
State project_w(const ProblemSpec& problem, State s) {
  if (s.chart == Chart::newcoords) {
    const double c = std::cos(s.angle);
    const double W = regularized_potential(problem, s.angle).W;
    const double cc = chart_eval(problem.chart, s.angle).c;
    const double w2 = 2 * (W - 0.5 * s.v * s.v * c * c) / cc;
    if (w2 >= 0) s.w = std::copysign(std::sqrt(w2), s.w);
  } else {
    const double f = problem.f(s.angle), W = problem.W(s.angle);
    const double w2 = 2 * f * (1 - f / W * 0.5 * s.v * s.v);
    if (w2 >= 0) s.w = std::copysign(std::sqrt(w2), s.w);
  }
  return s;
}

bool is_partial_line(double line) {
  const double k = line / (pi / 2);
  return std::abs(std::round(k)) == std::abs(k) && static_cast<long>(std::llround(k)) % 2 != 0;
}

}  // namespace

std::array<std::array<double, 4>, 4> numerical_jacobian(const ProblemSpec& problem, const State& s) {
  std::array<std::array<double, 4>, 4> J{};
  const Vec4 x = s.vec();
  for (int j = 0; j < 4; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
    Vec4 a = x, b = x;
    a[j] += h;
    b[j] -= h;
    const Vec4 fa = rhs(problem, State::from_vec(a, s.chart, s.h));
    const Vec4 fb = rhs(problem, State::from_vec(b, s.chart, s.h));
    for (int i = 0; i < 4; ++i) J[i][j] = (fa[i] - fb[i]) / (2 * h);
  }
  return J;
}

std::vector<Equilibrium> equilibria(const ProblemSpec& problem, Chart chart) {
  const CriticalPointSet cps = critical_points(problem);
  std::vector<Equilibrium> out;
  if (chart == Chart::newcoords) {
    if (cps.count() == 3) {
      const double ts = theta_of_phi(problem, cps.phi_R());
      const double vstar = std::sqrt(2 * V_theta(problem, ts));
      out.push_back(make_equilibrium(problem, EquilibriumKind::lagrange, "L+", chart, ts - pi, vstar));
      out.push_back(make_equilibrium(problem, EquilibriumKind::lagrange, "L-", chart, ts - pi, -vstar));
      out.push_back(make_equilibrium(problem, EquilibriumKind::lagrange, "L'+", chart, -ts, vstar));
      out.push_back(make_equilibrium(problem, EquilibriumKind::lagrange, "L'-", chart, -ts, -vstar));
    }
    const double ve = std::sqrt(2 * V_theta(problem, 0.0));
    out.push_back(make_equilibrium(problem, EquilibriumKind::euler, "E+", chart, 0.0, ve));
    out.push_back(make_equilibrium(problem, EquilibriumKind::euler, "E-", chart, 0.0, -ve));
  } else {
    if (cps.count() == 3) {
      const double pl = cps.points[0].phi, pr = cps.points[2].phi;
      const double vl = std::sqrt(2 * problem.V(pl)), vr = std::sqrt(2 * problem.V(pr));
      out.push_back(make_equilibrium(problem, EquilibriumKind::lagrange, "L'+", chart, pl, vl));
      out.push_back(make_equilibrium(problem, EquilibriumKind::lagrange, "L'-", chart, pl, -vl));
      out.push_back(make_equilibrium(problem, EquilibriumKind::lagrange, "L''+", chart, pr, vr));
      out.push_back(make_equilibrium(problem, EquilibriumKind::lagrange, "L''-", chart, pr, -vr));
    }
    const double pm = problem.phi_m();
    const double ve = std::sqrt(2 * problem.V(pm));
    out.push_back(make_equilibrium(problem, EquilibriumKind::euler, "E+", chart, pm, ve));
    out.push_back(make_equilibrium(problem, EquilibriumKind::euler, "E-", chart, pm, -ve));
  }
  return out;
}

std::string to_string(BranchId id) {
  switch (id) {
    case BranchId::gamma: return "gamma";
    case BranchId::gamma_prime: return "gamma'";
    case BranchId::gamma_dprime: return "gamma''";
    case BranchId::gamma_minus: return "gamma_-";
    case BranchId::gamma_prime_minus: return "gamma'_-";
    case BranchId::stable_L_prime_minus: return "stable(L'-)";
  }
  return "unknown";
}

std::string alias(BranchId id) {
  switch (id) {
    case BranchId::gamma: return "T1 image of Devaney gamma''";
    case BranchId::gamma_dprime: return "T1 image of new-chart gamma";
    case BranchId::gamma_prime: return "Devaney gamma'";
    default: return "";
  }
}

std::string to_string(BranchTermination t) {
  switch (t) {
    case BranchTermination::hole_a_plus: return "hole B_a+";
    case BranchTermination::hole_a_minus: return "hole B_a-";
    case BranchTermination::hole_b_plus: return "hole B_b+";
    case BranchTermination::hole_b_minus: return "hole B_b-";
    case BranchTermination::equilibrium: return "equilibrium";
    case BranchTermination::cap: return "cap";
  }
  return "cap";
}

std::optional<double> BranchTrace::landmark(const std::string& name) const {
  auto it = landmarks.find(name);
  if (it == landmarks.end()) return std::nullopt;
  return it->second;
}

std::optional<double> LandmarkSet::get(const std::string& name) const {
  auto it = values.find(name);
  if (it == values.end()) return std::nullopt;
  return it->second;
}

BranchTrace trace_branch(const ProblemSpec& problem, BranchId branch, const BranchControls& controls) {
  const bool devaney = branch == BranchId::gamma_dprime;
  const Chart chart = devaney ? Chart::devaney : Chart::newcoords;
  const auto eqs = equilibria(problem, chart);
  std::string base;
  int sign = +1;      // +1 unstable, -1 stable
  double wsign = +1;  // orientation of the w-component
  switch (branch) {
    case BranchId::gamma: base = "L-"; break;
    case BranchId::gamma_prime: base = "L'-"; break;
    case BranchId::gamma_dprime: base = "L''-"; break;
    case BranchId::gamma_minus: base = "L-"; wsign = -1; break;
    case BranchId::gamma_prime_minus: base = "L'-"; wsign = -1; break;
    case BranchId::stable_L_prime_minus: base = "L'-"; sign = -1; break;
  }
  const Equilibrium& eq = find_label(eqs, base);
  Direction dir = select_direction(problem, eq.state, sign);
  if (std::abs(dir.vec(2)) < 1e-8) fail(ErrorKind::orientation, "eigenvector has no w-component");
  if (dir.vec(2) * wsign < 0) dir.vec = -dir.vec;

  BranchTrace out;
  out.branch = branch;
  out.base = base;
  out.eigenvalue = dir.eigenvalue;
  out.direction = {dir.vec(0), dir.vec(1), dir.vec(2)};
  out.epsilon = controls.epsilon > 0 ? controls.epsilon : 1e-7 * std::abs(eq.state.v);

  State seed = eq.state;
  seed.v += out.epsilon * dir.vec(0);
  seed.angle += out.epsilon * dir.vec(1);
  seed.w += out.epsilon * dir.vec(2);
  seed = project_w(problem, seed);

  IntegrationControls ic;
  ic.rtol = controls.rtol;
  ic.atol = controls.atol;
  ic.max_s = controls.max_s;
  ic.backward = sign < 0;

  const bool planar = problem.kind == ProblemKind::planar_double_polygon;
  std::vector<EventSpec> events;
  Observer observer;
  bool landmarks_done = false;
  std::optional<Event> hole;

  if (devaney) {
    events.push_back(EventSpec::w_zero(0, EventAction::stop));
  } else {
    events.push_back(EventSpec::angle_lattice());
  }

  // Landmarks are read at successive target lines; the mirrored branches
  // carry the values of their mirror images under theta -> -pi - theta.
  std::vector<std::pair<double, std::string>> targets;
  switch (branch) {
    case BranchId::gamma: targets = {{-pi / 2, "v1"}, {0.0, "v2"}, {pi / 2, "v4"}}; break;
    case BranchId::gamma_prime: targets = {{0.0, "v3"}, {pi / 2, "v5"}}; break;
    case BranchId::gamma_minus: targets = {{-pi, "v3"}, {-3 * pi / 2, "v5"}}; break;
    case BranchId::gamma_prime_minus: targets = {{-pi / 2, "v1"}, {-pi, "v2"}, {-3 * pi / 2, "v4"}}; break;
    case BranchId::stable_L_prime_minus: targets = {{-pi / 2, "v0"}}; break;
    case BranchId::gamma_dprime: break;
  }
  if (!planar)
    std::erase_if(targets, [](const auto& t) { return t.second == "v4" || t.second == "v5"; });
  std::size_t stage = 0;
  landmarks_done = targets.empty();
  observer = [&](const Event& ev) {
    if (devaney) {
      out.landmarks["v1"] = ev.state.v;
      return true;
    }
    if (!landmarks_done) {
      if (std::abs(ev.line - targets[stage].first) < 1e-9) {
        out.landmarks[targets[stage].second] = ev.state.v;
        landmarks_done = ++stage == targets.size();
      }
      return false;
    }
    if (is_partial_line(ev.line)) {
      hole = ev;
      return true;
    }
    return false;
  };

  out.trajectory = integrate_collision_manifold(problem, seed, events, ic, observer);

  if (devaney) {
    out.termination = out.trajectory.termination == Termination::event_stop
                          ? (out.trajectory.final_state().v > 0 ? BranchTermination::hole_b_plus
                                                                : BranchTermination::hole_b_minus)
                          : BranchTermination::cap;
    if (out.trajectory.termination == Termination::event_stop && out.trajectory.final_state().angle < 0)
      out.termination = out.trajectory.final_state().v > 0 ? BranchTermination::hole_a_plus
                                                           : BranchTermination::hole_a_minus;
    return out;
  }
  if (hole) {
    const bool b_side = std::sin(hole->line) > 0;
    const bool up = hole->state.v > 0;
    out.termination = b_side ? (up ? BranchTermination::hole_b_plus : BranchTermination::hole_b_minus)
                             : (up ? BranchTermination::hole_a_plus : BranchTermination::hole_a_minus);
    return out;
  }
  // Otherwise the branch either settled on an equilibrium or ran out of time.
  const State& fin = out.trajectory.final_state();
  out.termination = BranchTermination::cap;
  if (std::abs(fin.w) < 1e-6) {
    const Vec4 d = rhs(problem, fin);
    if (std::hypot(d[1], d[2], d[3]) < 1e-6) {
      const double k = fin.angle / pi;
      out.termination = BranchTermination::equilibrium;
      out.limit_label = std::string(fin.v > 0 ? "E+" : "E-");
      if (std::abs(k - std::round(k)) > 1e-4) out.limit_label = fin.v > 0 ? "Lagrange+" : "Lagrange-";
      out.limit_label += "@theta=" + std::to_string(fin.angle);
    }
  }
  return out;
}

N4Result check_N4(double v2, double v3) {
  N4Result r;
  r.v2 = v2;
  r.v3 = v3;
  r.separation = std::abs(v2 + v3);
  r.pass = r.separation > 1e-6;
  return r;
}

N4Result check_N4(const ProblemSpec& problem, const BranchControls& controls) {
  const BranchTrace g = trace_branch(problem, BranchId::gamma, controls);
  const BranchTrace gp = trace_branch(problem, BranchId::gamma_prime, controls);
  const auto v2 = g.landmark("v2"), v3 = gp.landmark("v3");
  if (!v2 || !v3) fail(ErrorKind::unavailable, "v2 or v3 landmark not reached");
  return check_N4(*v2, *v3);
}

LandmarkSet landmarks(const ProblemSpec& problem, const BranchControls& controls) {
  LandmarkSet out;
  for (BranchId id : {BranchId::gamma, BranchId::gamma_prime, BranchId::stable_L_prime_minus}) {
    const BranchTrace t = trace_branch(problem, id, controls);
    for (const auto& [k, v] : t.landmarks) out.values[k] = v;
  }
  return out;
}

}  // namespace symorb
