#include "symorb/odeint.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "symorb/error.hpp"
#include "symorb/rk45.hpp"

namespace symorb {

namespace {

constexpr double half_pi = std::numbers::pi / 2;

double event_value(const EventSpec& e, const State& s) {
  switch (e.kind) {
    case EventKind::angle_crossing: return s.angle - e.value;
    case EventKind::angle_lattice: return s.angle;  // handled separately
    case EventKind::v_zero: return s.v;
    case EventKind::w_zero: return s.w;
    case EventKind::r_exceeds:
    case EventKind::r_below: return s.r - e.value;
  }
  return 0.0;
}

int sgn(double x) { return (x > 0) - (x < 0); }

struct Candidate {
  double s;
  int spec;
  double line;
  int direction;
  State state;
};

template <std::size_t N, class Field, class ToState>
Trajectory drive(Field field, ToState to_state, const rk45::Vec<N>& y0, const std::vector<EventSpec>& specs,
                 const IntegrationControls& ctl, const Observer& observer) {
  if (!(ctl.max_s > 0)) fail(ErrorKind::domain, "max_s must be positive");
  rk45::StepControl sc;
  sc.rtol = ctl.rtol;
  sc.atol = ctl.atol;
  sc.hmax = ctl.hmax > 0 ? ctl.hmax : std::numeric_limits<double>::infinity();
  sc.h0 = ctl.h0;
  sc.fixed_step = ctl.fixed_step;
  auto f = [&](const rk45::Vec<N>& y) {
    rk45::Vec<N> d = field(y);
    if (ctl.backward)
      for (auto& x : d) x = -x;
    return d;
  };
  auto stepper = rk45::make_stepper<N>(f, sc);
  stepper.init(0.0, y0);

  Trajectory traj;
  traj.backward = ctl.backward;
  traj.samples.push_back({0.0, to_state(y0)});
  long sample_index = 1;
  double next_sample = ctl.sample_interval;

  for (;;) {
    if (stepper.s() >= ctl.max_s) {
      traj.termination = Termination::time_limit;
      break;
    }
    if (traj.steps >= ctl.max_steps) {
      traj.termination = Termination::step_limit;
      break;
    }
    const rk45::StepStatus st = stepper.advance(ctl.max_s);
    if (st != rk45::StepStatus::accepted) {
      if (st == rk45::StepStatus::non_finite) fail(ErrorKind::evaluation, "non-finite state during integration");
      traj.termination = Termination::step_failure;
      break;
    }
    ++traj.steps;
    const auto& dense = stepper.dense();
    const double s0 = stepper.s_prev(), s1 = stepper.s();

    // Events: sign changes on a sub-sampled dense output, bisected on the
    // interpolant, then polished with true steps from the step start.
    std::vector<Candidate> found;
    if (!specs.empty()) {
      constexpr int sub = 4;
      std::array<double, sub + 1> ss;
      std::array<State, sub + 1> xs;
      for (int j = 0; j <= sub; ++j) {
        ss[j] = j == sub ? s1 : s0 + (s1 - s0) * j / sub;
        xs[j] = j == 0 ? to_state(stepper.y_prev()) : (j == sub ? to_state(stepper.y()) : to_state(dense(ss[j])));
      }
      auto locate = [&](auto&& g, double a, double b, double ga) {
        auto gd = [&](double s) { return g(to_state(dense(s))); };
        double lo = a, hi = b, glo = ga;
        for (int it = 0; it < 200; ++it) {
          const double tol = std::max(1e-13, 4 * std::numeric_limits<double>::epsilon() * std::abs(hi));
          if (hi - lo <= tol) break;
          const double mid = 0.5 * (lo + hi);
          const double gm = gd(mid);
          if (gm == 0.0) {
            lo = hi = mid;
            break;
          }
          if (sgn(gm) == sgn(glo)) {
            lo = mid;
            glo = gm;
          } else {
            hi = mid;
          }
        }
        double s = 0.5 * (lo + hi);
        // Secant polish on the 5th-order solution.
        auto gx = [&](double t) { return g(to_state(stepper.exact_from_prev(t))); };
        double sa = s, fa = gx(sa);
        double slope = (gd(b) - gd(a)) / (b - a);
        for (int it = 0; it < 4 && fa != 0.0 && slope != 0.0 && std::isfinite(slope); ++it) {
          const double sb = std::clamp(sa - fa / slope, s0, s1);
          const double fb = gx(sb);
          if (!(std::abs(fb) < std::abs(fa))) break;
          if (sb != sa) slope = (fb - fa) / (sb - sa);
          sa = sb;
          fa = fb;
        }
        return std::pair<double, State>{sa, to_state(stepper.exact_from_prev(sa))};
      };

      for (std::size_t k = 0; k < specs.size(); ++k) {
        const EventSpec& e = specs[k];
        if (e.kind == EventKind::angle_lattice) {
          for (int j = 0; j < sub; ++j) {
            const double p0 = xs[j].angle / half_pi, p1 = xs[j + 1].angle / half_pi;
            if (p1 == p0) continue;
            std::vector<long> lines;
            if (p1 > p0) {
              for (long m = static_cast<long>(std::floor(p0)) + 1; m <= static_cast<long>(std::floor(p1)); ++m)
                lines.push_back(m);
            } else {
              for (long m = static_cast<long>(std::ceil(p0)) - 1; m >= static_cast<long>(std::ceil(p1)); --m)
                lines.push_back(m);
            }
            for (long m : lines) {
              const double line = m * half_pi;
              auto g = [line](const State& x) { return x.angle - line; };
              const double ga = g(xs[j]);
              auto [s, x] = locate(g, ss[j], ss[j + 1], ga);
              found.push_back({s, static_cast<int>(k), line, p1 > p0 ? 1 : -1, x});
            }
          }
          continue;
        }
        auto g = [&e](const State& x) { return event_value(e, x); };
        for (int j = 0; j < sub; ++j) {
          const double ga = g(xs[j]), gb = g(xs[j + 1]);
          if (ga == 0.0) continue;
          if (gb != 0.0 && sgn(gb) == sgn(ga)) continue;
          const int dir = -sgn(ga);
          if (e.direction != 0 && dir != e.direction) continue;
          auto [s, x] = locate(g, ss[j], ss[j + 1], ga);
          const bool has_level = e.kind == EventKind::angle_crossing || e.kind == EventKind::r_exceeds || e.kind == EventKind::r_below;
          const double line = has_level ? e.value : 0.0;
          found.push_back({s, static_cast<int>(k), line, dir, x});
        }
      }
      std::stable_sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
        if (a.s != b.s) return a.s < b.s;
        return a.spec < b.spec;
      });
    }

    auto push_samples_until = [&](double s_lim, bool inclusive_end) {
      if (!ctl.record_samples) return;
      if (ctl.sample_interval > 0) {
        while (next_sample < s_lim || (inclusive_end && next_sample == s_lim)) {
          if (next_sample > s0) traj.samples.push_back({next_sample, to_state(dense(next_sample))});
          next_sample = static_cast<double>(++sample_index) * ctl.sample_interval;
        }
      }
    };

    bool stop = false;
    for (const Candidate& c : found) {
      Event ev{c.s, c.spec, specs[c.spec].kind, c.line, c.direction, c.state};
      traj.events.push_back(ev);
      const bool observed_stop = observer && observer(ev);
      const bool halt = specs[c.spec].action == EventAction::stop || observed_stop;
      if (halt) {
        push_samples_until(c.s, false);
        if (traj.samples.back().s < c.s) traj.samples.push_back({c.s, c.state});
        else traj.samples.back().state = c.state;
        traj.termination = Termination::event_stop;
        stop = true;
        break;
      }
    }
    if (stop) break;

    if (ctl.record_samples) {
      if (ctl.sample_interval > 0) push_samples_until(s1, false);
      else traj.samples.push_back({s1, to_state(stepper.y())});
    }
  }

  if (traj.termination != Termination::event_stop && traj.samples.back().s < stepper.s()) {
    // a grid point a few ulps short of the end is replaced by the end itself
    const bool near_dup = ctl.sample_interval > 0 && traj.samples.size() > 1 &&
                          stepper.s() - traj.samples.back().s < 1e-9 * ctl.sample_interval;
    if (near_dup) traj.samples.back() = {stepper.s(), to_state(stepper.y())};
    else traj.samples.push_back({stepper.s(), to_state(stepper.y())});
  }
  traj.rejected = stepper.rejected();
  return traj;
}

}  // namespace

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::angle_crossing: return "angle-crossing";
    case EventKind::angle_lattice: return "angle-lattice";
    case EventKind::v_zero: return "v-zero";
    case EventKind::w_zero: return "w-zero";
    case EventKind::r_exceeds: return "r-exceeds";
    case EventKind::r_below: return "r-below";
  }
  return "unknown";
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::event_stop: return "event-stop";
    case Termination::time_limit: return "time-limit";
    case Termination::step_failure: return "step-failure";
    case Termination::step_limit: return "step-limit";
  }
  return "unknown";
}

Trajectory integrate(const ProblemSpec& problem, const State& seed, const std::vector<EventSpec>& events,
                     const IntegrationControls& controls, const Observer& observer) {
  const Chart chart = seed.chart;
  const double h = seed.h;
  auto to_state = [chart, h](const rk45::Vec<4>& y) { return State::from_vec(y, chart, h); };
  auto field = [&problem, chart, h](const rk45::Vec<4>& y) { return rhs(problem, State::from_vec(y, chart, h)); };
  return drive<4>(field, to_state, seed.vec(), events, controls, observer);
}

Trajectory integrate_collision_manifold(const ProblemSpec& problem, const State& seed,
                                        const std::vector<EventSpec>& events,
                                        const IntegrationControls& controls, const Observer& observer) {
  if (seed.r != 0.0) fail(ErrorKind::domain, "collision-manifold seed must have r = 0");
  const Chart chart = seed.chart;
  const double h = seed.h;
  auto to_state = [chart, h](const rk45::Vec<3>& y) { return State{chart, 0.0, y[0], y[1], y[2], h}; };
  auto field = [&problem, chart, h](const rk45::Vec<3>& y) {
    const Vec4 d = rhs(problem, State{chart, 0.0, y[0], y[1], y[2], h});
    // New chart: v' with the energy relation substituted. The residual then
    // has zero growth rate instead of v cos^2, which blows up near E+.
    if (chart == Chart::newcoords) return rk45::Vec<3>{0.5 * y[2] * y[2] * chart_eval(problem.chart, y[1]).c, d[2], d[3]};
    return rk45::Vec<3>{d[1], d[2], d[3]};
  };
  return drive<3>(field, to_state, rk45::Vec<3>{seed.v, seed.angle, seed.w}, events, controls, observer);
}

}  // namespace symorb
