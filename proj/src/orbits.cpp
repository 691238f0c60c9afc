#include "symorb/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "symorb/error.hpp"

namespace symorb {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double half_pi = pi / 2;

long lattice_index(double line) { return std::lround(line / half_pi); }
bool is_partial_line(double line) { return lattice_index(line) % 2 != 0; }

std::string fmt_line(double line) {
  const long k = lattice_index(line);
  if (k == 0) return "0";
  std::ostringstream os;
  if (k % 2 == 0) {
    const long m = k / 2;
    if (m == 1) os << "pi";
    else if (m == -1) os << "-pi";
    else os << m << "pi";
  } else {
    os << k << "pi/2";
  }
  return os.str();
}

// Tracks the crossing pattern of one shot and decides when it is over.
struct Tracker {
  FamilySpec fam;
  bool generic = false;
  int max_crossings = 64;
  double P = 0.0;
  int phase = 0;
  int lattice_count = 0;
  double Pp = 0.0;
  ShotResult* out = nullptr;

  bool finish(ShotOutcome o, const Event& e) {
    out->outcome = o;
    out->terminal = e.state;
    out->terminal_s = e.s;
    out->residual = e.state.v;
    return true;
  }

  bool on_event(const Event& e) {
    if (e.kind == EventKind::r_exceeds || e.kind == EventKind::r_below) return true;
    if (e.kind == EventKind::angle_lattice) {
      out->signature.entries.push_back(
          {is_partial_line(e.line) ? LineKind::partial : LineKind::euler, e.line, e.s, e.state.v, e.direction});
      if (++lattice_count > max_crossings) {
        finish(ShotOutcome::cap, e);
        return true;
      }
      if (generic) return false;
      return on_line(e);
    }
    if (generic) return false;
    if (e.kind == EventKind::w_zero && phase == 1 && fam.terminal() == Terminal::brake && out->count_b == fam.j) {
      out->signature.entries.push_back({LineKind::brake, e.state.angle, e.s, e.state.v, 0});
      return finish(ShotOutcome::terminal, e);
    }
    return false;
  }

  bool on_line(const Event& e) {
    const double L = e.line;
    const Terminal term = fam.terminal();
    if (is_partial_line(L)) {
      if (phase == 0) {
        if (lattice_index(L) == lattice_index(P)) {
          ++out->count_a;
          return false;
        }
        return finish(ShotOutcome::mismatch, e);
      }
      if (lattice_index(L) != lattice_index(Pp)) return finish(ShotOutcome::mismatch, e);
      ++out->count_b;
      if (term == Terminal::partial_hit && out->count_b == fam.j + 1) return finish(ShotOutcome::terminal, e);
      if (term == Terminal::brake && out->count_b > fam.j) return finish(ShotOutcome::mismatch, e);
      return false;
    }
    if (phase == 0) {
      out->euler_line = L;
      out->euler_v = e.state.v;
      if (out->count_a != fam.i) return finish(ShotOutcome::mismatch, e);
      if (term == Terminal::euler_hit) return finish(ShotOutcome::terminal, e);
      phase = 1;
      Pp = 2 * L - P;
      return false;
    }
    return finish(ShotOutcome::mismatch, e);
  }
};

ShotResult run_shot(const ProblemSpec& problem, const State& seed, Tracker& tracker, std::vector<EventSpec> events,
                    const ShotOptions& options) {
  ShotResult res;
  tracker.out = &res;
  tracker.max_crossings = options.max_crossings;
  tracker.P = (2 * std::floor(seed.angle / pi) + 1) * half_pi;
  events.push_back(EventSpec::angle_lattice());
  events.push_back(EventSpec::v_zero());
  events.push_back(EventSpec::w_zero());
  events.push_back(EventSpec::r_exceeds(options.r_max));
  events.push_back(EventSpec::r_below(1e-10));
  IntegrationControls ctl = options.controls;
  ctl.record_samples = options.keep_trajectory;
  res.outcome = ShotOutcome::time_limit;
  bool finished = false;
  try {
    res.trajectory = integrate(problem, seed, events, ctl, [&](const Event& e) {
      const bool stop = tracker.on_event(e);
      if (stop) finished = true;
      if (e.kind == EventKind::r_exceeds) res.outcome = ShotOutcome::escape;
      if (e.kind == EventKind::r_below) res.outcome = ShotOutcome::collision_asymptotic;
      if ((e.kind == EventKind::r_exceeds || e.kind == EventKind::r_below)) {
        res.terminal = e.state;
        res.terminal_s = e.s;
        res.residual = e.state.v;
      }
      return stop;
    });
  } catch (const Error&) {
    res.outcome = ShotOutcome::collision_asymptotic;
    return res;
  }
  if (!finished) {
    const Trajectory& t = res.trajectory;
    res.terminal = t.final_state();
    res.terminal_s = t.final_s();
    res.residual = res.terminal.v;
    if (t.termination == Termination::step_failure) res.outcome = ShotOutcome::collision_asymptotic;
    else res.outcome = ShotOutcome::time_limit;
  }
  return res;
}

State shoot_seed(const ProblemSpec& problem, Locus locus, double p) { return seed_state(problem, locus, p); }

int sign_of(double x) { return (x > 0) - (x < 0); }

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::B: return "B";
    case Family::LessSymB: return "LessSymB";
    case Family::ZB: return "ZB";
    case Family::Z1: return "Z1";
    case Family::Z5: return "Z5";
    case Family::PP: return "PP";
    case Family::Z2: return "Z2";
  }
  return "unknown";
}

std::string to_string(Locus l) { return l == Locus::S_partial ? "S(-pi/2)" : "Z"; }

std::string to_string(LineKind k) {
  switch (k) {
    case LineKind::partial: return "partial";
    case LineKind::euler: return "euler";
    case LineKind::brake: return "brake";
  }
  return "unknown";
}

std::string to_string(ShotOutcome o) {
  switch (o) {
    case ShotOutcome::terminal: return "terminal";
    case ShotOutcome::mismatch: return "mismatch";
    case ShotOutcome::escape: return "escape";
    case ShotOutcome::collision_asymptotic: return "collision-asymptotic";
    case ShotOutcome::cap: return "cap";
    case ShotOutcome::time_limit: return "time-limit";
  }
  return "unknown";
}

void FamilySpec::validate() const {
  if (i < 0 || j < 0) fail(ErrorKind::domain, "family indices must be nonnegative");
  const bool pair = family == Family::LessSymB || family == Family::ZB || family == Family::Z5;
  if (pair && (i < 1 || j < 1)) fail(ErrorKind::domain, label() + " needs i >= 1 and j >= 1");
  if (family == Family::Z2 && j != 0) fail(ErrorKind::domain, "Z2 takes a single index");
}

std::string FamilySpec::label() const {
  std::ostringstream os;
  os << to_string(family);
  if (family == Family::B || family == Family::Z1 || family == Family::Z2) os << "(" << i << ")";
  else os << "(" << i << "," << j << ")";
  return os.str();
}

Locus FamilySpec::locus() const {
  switch (family) {
    case Family::B:
    case Family::LessSymB:
    case Family::PP: return Locus::S_partial;
    default: return Locus::Z;
  }
}

Terminal FamilySpec::terminal() const {
  switch (family) {
    case Family::B:
    case Family::Z1: return Terminal::euler_hit;
    case Family::Z5: return Terminal::brake;
    default: return Terminal::partial_hit;
  }
}

std::string CrossingSignature::str() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (k) os << " ";
    const Crossing& c = entries[k];
    if (c.kind == LineKind::brake) os << "brake";
    else os << (c.kind == LineKind::partial ? "P[" : "E[") << fmt_line(c.theta_bar) << "]";
  }
  return os.str();
}

State seed_state(const ProblemSpec& problem, Locus locus, double param) {
  if (!std::isfinite(param)) fail(ErrorKind::domain, "seed parameter must be finite");
  State s;
  s.chart = Chart::newcoords;
  if (locus == Locus::S_partial) {
    if (!(param > 0)) fail(ErrorKind::domain, "S(-pi/2) seed needs r > 0");
    const double th = -half_pi;
    const RegularizedPotential rp = regularized_potential(problem, th);
    const ChartData cd = chart_eval(problem.chart, th);
    s.r = param;
    s.angle = th;
    s.v = 0.0;
    s.w = std::sqrt(2 * rp.W / cd.c);
    return s;
  }
  if (std::abs(std::cos(param)) < 1e-12) fail(ErrorKind::domain, "zero-velocity seed on a partial-collision line");
  s.r = V_theta(problem, param);
  s.angle = param;
  return s;
}

ShotResult shoot(const ProblemSpec& problem, const State& seed, const FamilySpec& family, const ShotOptions& options) {
  family.validate();
  Tracker tr;
  tr.fam = family;
  return run_shot(problem, seed, tr, {}, options);
}

ShotResult shoot(const ProblemSpec& problem, const State& seed, const EventSpec& stop, int max_crossings,
                 const ShotOptions& options) {
  Tracker tr;
  tr.generic = true;
  ShotOptions o = options;
  o.max_crossings = max_crossings;
  EventSpec st = stop;
  st.action = EventAction::stop;
  ShotResult res = run_shot(problem, seed, tr, {st}, o);
  if (res.trajectory.termination == Termination::event_stop && !res.trajectory.events.empty() &&
      res.trajectory.events.back().spec_index == 0 && res.outcome != ShotOutcome::cap) {
    const Event& e = res.trajectory.events.back();
    res.outcome = ShotOutcome::terminal;
    res.terminal = e.state;
    res.terminal_s = e.s;
    res.residual = e.state.v;
    if (st.kind == EventKind::w_zero) res.signature.entries.push_back({LineKind::brake, e.state.angle, e.s, e.state.v, 0});
  }
  return res;
}

std::pair<double, double> default_range(const FamilySpec& family) {
  if (family.locus() == Locus::S_partial) return {1e-3, 1e2};
  // odd i starts beyond the first partial line so the Euler line reached is theta = 0
  if (family.i % 2 == 0) return {-half_pi, 0.0};
  return {-pi, -half_pi};
}

double state_gap(const State& a, const State& b, bool angle_mod_2pi) {
  double dth = a.angle - b.angle;
  if (angle_mod_2pi) dth = std::remainder(dth, 2 * pi);
  return std::max({std::abs(a.r - b.r), std::abs(a.v - b.v), std::abs(dth), std::abs(a.w - b.w)});
}

namespace {

bool z5_acceptable(const ShotResult& r) {
  for (const Crossing& c : r.signature.entries) {
    if (c.kind == LineKind::brake) {
      const double off = std::abs(std::remainder(c.theta_bar, half_pi));
      if (off <= 1e-6) return false;
    } else if (std::abs(c.v) <= 1e-6) {
      return false;
    }
  }
  return true;
}

struct Converged {
  double param = 0.0;
  ShotResult shot;
  int steps = 0;
};

}  // namespace

SearchResult search_orbits(const ProblemSpec& problem, const FamilySpec& family, const SearchOptions& options) {
  family.validate();
  const Locus locus = family.locus();
  auto [lo, hi] = default_range(family);
  if (options.param_lo) lo = *options.param_lo;
  if (options.param_hi) hi = *options.param_hi;
  if (!(lo < hi)) fail(ErrorKind::domain, "search range must have lo < hi");
  if (locus == Locus::S_partial && !(lo > 0)) fail(ErrorKind::domain, "S(-pi/2) search needs r > 0");
  const std::size_t N = std::max<std::size_t>(options.grid_points, 2);
  const bool logscale = locus == Locus::S_partial;

  SearchResult out;
  out.lo = lo;
  out.hi = hi;
  std::vector<double> params(N);
  for (std::size_t k = 0; k < N; ++k) {
    const double u = static_cast<double>(k) / static_cast<double>(N - 1);
    if (logscale) params[k] = std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)));
    else params[k] = lo + (static_cast<double>(k) + 0.5) * (hi - lo) / static_cast<double>(N);
  }

  ShotOptions so = options.shot;
  so.keep_trajectory = false;
  auto eval = [&](double p) {
    try {
      return shoot(problem, shoot_seed(problem, locus, p), family, so);
    } catch (const Error&) {
      ShotResult r;
      r.outcome = ShotOutcome::collision_asymptotic;
      return r;
    }
  };
  auto matched = [](const ShotResult& r) { return r.outcome == ShotOutcome::terminal && std::isfinite(r.residual); };

  const std::vector<ShotResult> shots = kernels::map(N, [&](std::size_t k) { return eval(params[k]); }, options.exec);
  for (std::size_t k = 0; k < N; ++k)
    out.scan.push_back({params[k], shots[k].outcome, matched(shots[k]), shots[k].residual, shots[k].signature.str()});

  auto midpoint = [&](double a, double b) { return logscale ? std::sqrt(a * b) : 0.5 * (a + b); };

  // Bisection on the terminal residual; one refinement retry when the signature
  // changes inside the bracket.
  auto converge = [&](double a, double b, double ra) -> Converged {
    Converged best;
    double best_abs = std::numeric_limits<double>::infinity();
    bool retried = false;
    for (int it = 0; it < 200; ++it) {
      const double m = midpoint(a, b);
      if (!(m > std::min(a, b) && m < std::max(a, b))) break;
      ShotResult R = eval(m);
      best.steps = it + 1;
      if (!matched(R)) {
        if (retried) fail(ErrorKind::ambiguous_bracket, "signature changes inside the bracket after refinement");
        retried = true;
        const int M = 16;
        std::vector<double> sub(M + 1);
        std::vector<ShotResult> subr(M + 1);
        for (int q = 0; q <= M; ++q) {
          const double u = static_cast<double>(q) / M;
          sub[q] = logscale ? std::exp(std::log(a) + u * (std::log(b) - std::log(a))) : a + u * (b - a);
          subr[q] = eval(sub[q]);
        }
        bool found = false;
        for (int q = 0; q < M && !found; ++q) {
          if (matched(subr[q]) && matched(subr[q + 1]) && sign_of(subr[q].residual) * sign_of(subr[q + 1].residual) < 0) {
            a = sub[q];
            b = sub[q + 1];
            ra = subr[q].residual;
            found = true;
          }
        }
        if (!found) fail(ErrorKind::ambiguous_bracket, "no consistent sub-bracket after refinement");
        continue;
      }
      if (std::abs(R.residual) < best_abs) {
        best_abs = std::abs(R.residual);
        best.param = m;
        best.shot = R;
      }
      if (R.residual == 0.0) break;
      if (sign_of(R.residual) == sign_of(ra)) {
        a = m;
        ra = R.residual;
      } else {
        b = m;
      }
      if (best_abs <= 1e-3 * options.residual_tol &&
          std::abs(b - a) <= 1e3 * std::numeric_limits<double>::epsilon() * std::abs(m))
        break;
      if (std::abs(b - a) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(m)) break;
    }
    return best;
  };

  for (std::size_t k = 0; k + 1 < N; ++k) {
    const ShotResult& A = shots[k];
    const ShotResult& B = shots[k + 1];
    if (!matched(A) || !matched(B) || sign_of(A.residual) * sign_of(B.residual) >= 0) continue;
    std::ostringstream why;
    why << "[" << params[k] << ", " << params[k + 1] << "]: ";
    Converged c;
    try {
      c = converge(params[k], params[k + 1], A.residual);
    } catch (const Error& e) {
      out.rejected.push_back(why.str() + e.what());
      continue;
    }
    if (!(std::abs(c.shot.residual) <= options.residual_tol) || c.shot.outcome != ShotOutcome::terminal) {
      why << "residual " << std::abs(c.shot.residual) << " above tolerance (jump, not a root)";
      out.rejected.push_back(why.str());
      continue;
    }
    const double euler_speed = c.shot.euler_line ? std::abs(c.shot.euler_v) : 0.0;
    if (family.family == Family::LessSymB && euler_speed <= 1e-6) {
      out.rejected.push_back(why.str() + "orthogonal Euler crossing (member of the B family)");
      continue;
    }
    if (family.family == Family::Z5 && !z5_acceptable(c.shot)) {
      out.rejected.push_back(why.str() + "orthogonal line hit or brake on a line");
      continue;
    }

    PeriodicOrbit orb;
    orb.family = family;
    orb.seed_parameter = c.param;
    orb.seed = shoot_seed(problem, locus, c.param);
    orb.signature = c.shot.signature;
    orb.residual = std::abs(c.shot.residual);
    orb.bracket_lo = params[k];
    orb.bracket_hi = params[k + 1];
    orb.euler_speed = euler_speed;
    orb.bisection_steps = c.steps;
    const Terminal term = family.terminal();
    orb.quarter = term == Terminal::euler_hit || (term == Terminal::partial_hit && locus == Locus::Z);

    const double sT = c.shot.terminal_s;
    IntegrationControls fc = options.shot.controls;
    fc.max_s = sT;
    fc.sample_interval = sT / static_cast<double>(std::max<std::size_t>(options.uniform_samples, 2));
    orb.fundamental = integrate(problem, orb.seed, {}, fc);
    orb.fundamental.samples.back() = {sT, c.shot.terminal};
    orb.full_period_s = (orb.quarter ? 4 : 2) * sT;
    orb.reconstructed = reconstruct_full(orb);
    out.orbits.push_back(std::move(orb));
    if (!options.exhaustive) break;
  }
  return out;
}

PeriodicOrbit find_orbit(const ProblemSpec& problem, const FamilySpec& family, const SearchOptions& options) {
  SearchResult r = search_orbits(problem, family, options);
  if (r.orbits.empty()) {
    std::ostringstream os;
    os << family.label() << " not found for " << problem.label() << " on [" << r.lo << ", " << r.hi << "]";
    if (!r.rejected.empty()) os << "; rejected brackets: " << r.rejected.size();
    fail(ErrorKind::not_found, os.str());
  }
  return r.orbits.front();
}

Trajectory reconstruct_full(const PeriodicOrbit& orbit) {
  const Trajectory& f = orbit.fundamental;
  if (f.samples.empty()) fail(ErrorKind::domain, "empty fundamental segment");
  const Terminal term = orbit.family.terminal();
  const Locus locus = orbit.family.locus();
  const State& end = f.samples.back().state;
  const double line = std::round(end.angle / half_pi) * half_pi;

  // Appends the time-reversed image of `seg` about its final sample.
  auto extend = [](const Trajectory& seg, auto op) {
    Trajectory t = seg;
    const double s_mid = seg.samples.back().s;
    for (std::size_t k = seg.samples.size() - 1; k-- > 0;) {
      const Sample& smp = seg.samples[k];
      t.samples.push_back({2 * s_mid - smp.s, op(smp.state)});
    }
    return t;
  };
  auto reflect = [](double th) { return [th](const State& s) { return reflect_about(th, s).state; }; };
  auto r1 = [](const State& s) { return apply_symmetry(Symmetry::R1, s).state; };

  Trajectory out;
  if (term == Terminal::brake) {
    out = extend(f, r1);
  } else if (!orbit.quarter) {
    out = extend(f, reflect(line));
  } else {
    const Trajectory half = extend(f, reflect(line));
    if (locus == Locus::S_partial) out = extend(half, reflect(2 * line - orbit.seed.angle));
    else out = extend(half, r1);
  }
  out.events.clear();
  out.termination = Termination::time_limit;
  return out;
}

PeriodicityCheck verify_periodicity(const ProblemSpec& problem, const PeriodicOrbit& orbit,
                                    const IntegrationControls& controls) {
  PeriodicityCheck pc;
  IntegrationControls c = controls;
  c.max_s = orbit.full_period_s;
  const std::size_t n = orbit.reconstructed.samples.size();
  c.sample_interval = n > 1 ? orbit.full_period_s / static_cast<double>(n - 1) : 0.0;
  c.record_samples = true;
  pc.trajectory = integrate(problem, orbit.seed, {}, c);
  const bool mod2pi = orbit.family.locus() == Locus::S_partial;
  pc.closure_error = state_gap(pc.trajectory.final_state(), orbit.seed, mod2pi);
  for (const Sample& s : pc.trajectory.samples) {
    pc.energy_drift = std::max(pc.energy_drift, std::abs(energy_residual(problem, s.state)));
    pc.max_r = std::max(pc.max_r, s.state.r);
  }
  return pc;
}

std::vector<double> physical_time(const ProblemSpec& problem, const Trajectory& traj) {
  std::vector<double> t(traj.samples.size(), 0.0);
  for (std::size_t k = 1; k < traj.samples.size(); ++k) {
    const double ds = traj.samples[k].s - traj.samples[k - 1].s;
    const double a = time_rate(problem, traj.samples[k - 1].state);
    const double b = time_rate(problem, traj.samples[k].state);
    t[k] = t[k - 1] + 0.5 * ds * (a + b);
  }
  return t;
}

}  // namespace symorb
