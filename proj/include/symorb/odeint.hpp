#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "symorb/dynamics.hpp"

namespace symorb {

enum class EventKind {
  angle_crossing,  // angle == value
  angle_lattice,   // angle crosses any multiple of pi/2
  v_zero,
  w_zero,
  r_exceeds,  // r == value from below
  r_below,    // r == value from above
};

enum class EventAction { record, stop };

struct EventSpec {
  EventKind kind = EventKind::v_zero;
  double value = 0.0;
  int direction = 0;  // +1 increasing, -1 decreasing, 0 either
  EventAction action = EventAction::record;

  static EventSpec angle_crossing(double theta, int direction = 0, EventAction a = EventAction::record) {
    return {EventKind::angle_crossing, theta, direction, a};
  }
  static EventSpec angle_lattice(EventAction a = EventAction::record) {
    return {EventKind::angle_lattice, 0.0, 0, a};
  }
  static EventSpec v_zero(int direction = 0, EventAction a = EventAction::record) {
    return {EventKind::v_zero, 0.0, direction, a};
  }
  static EventSpec w_zero(int direction = 0, EventAction a = EventAction::record) {
    return {EventKind::w_zero, 0.0, direction, a};
  }
  static EventSpec r_exceeds(double r_max, EventAction a = EventAction::stop) {
    return {EventKind::r_exceeds, r_max, +1, a};
  }
  static EventSpec r_below(double r_floor, EventAction a = EventAction::stop) {
    return {EventKind::r_below, r_floor, -1, a};
  }
};

std::string to_string(EventKind kind);

struct Event {
  double s = 0.0;
  int spec_index = 0;
  EventKind kind = EventKind::v_zero;
  double line = 0.0;  // crossed angle for angle events, threshold for r events
  int direction = 0;  // sign of d(event function)/ds at the root
  State state;
};

struct Sample {
  double s = 0.0;
  State state;
};

enum class Termination { event_stop, time_limit, step_failure, step_limit };
std::string to_string(Termination t);

struct Trajectory {
  std::vector<Sample> samples;  // strictly increasing s
  std::vector<Event> events;    // ordered by s
  Termination termination = Termination::time_limit;
  long steps = 0;
  long rejected = 0;
  bool backward = false;  // s measures elapsed time of the reversed field

  const State& final_state() const { return samples.back().state; }
  double final_s() const { return samples.back().s; }
};

struct IntegrationControls {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_s = 1e3;
  long max_steps = 2'000'000;
  double hmax = 0.25;
  double h0 = 0.0;
  double fixed_step = 0.0;       // > 0: constant step, no error control
  double sample_interval = 0.0;  // > 0: uniform output grid instead of accepted steps
  bool record_samples = true;    // false keeps only the seed, events and final state
  bool backward = false;         // integrate the time-reversed field
};

/// Called for each event in order; returning true stops the integration there.
using Observer = std::function<bool(const Event&)>;

/// Integrates the problem's field for the seed's chart.
Trajectory integrate(const ProblemSpec& problem, const State& seed, const std::vector<EventSpec>& events,
                     const IntegrationControls& controls = {}, const Observer& observer = {});

/// Same on the invariant set r = 0 with the reduced three-dimensional field;
/// r stays exactly zero.
Trajectory integrate_collision_manifold(const ProblemSpec& problem, const State& seed,
                                        const std::vector<EventSpec>& events,
                                        const IntegrationControls& controls = {},
                                        const Observer& observer = {});

}  // namespace symorb
