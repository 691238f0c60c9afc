#pragma once

#include <optional>
#include <string>
#include <vector>

#include "symorb/dynamics.hpp"
#include "symorb/kernels.hpp"
#include "symorb/odeint.hpp"

namespace symorb {

enum class Family { B, LessSymB, ZB, Z1, Z5, PP, Z2 };
std::string to_string(Family f);

enum class Locus { S_partial, Z };  // S(-pi/2) or the zero-velocity curve
std::string to_string(Locus l);

/// How a fundamental segment ends.
enum class Terminal { euler_hit, partial_hit, brake };

struct FamilySpec {
  Family family = Family::B;
  int i = 0;  // B and Z1 use i as k
  int j = 0;

  static FamilySpec B(int k) { return {Family::B, k, 0}; }
  static FamilySpec Z1(int k) { return {Family::Z1, k, 0}; }
  static FamilySpec LessSymB(int i, int j) { return {Family::LessSymB, i, j}; }
  static FamilySpec ZB(int i, int j) { return {Family::ZB, i, j}; }
  static FamilySpec Z5(int i, int j) { return {Family::Z5, i, j}; }
  static FamilySpec PP(int i, int j) { return {Family::PP, i, j}; }
  static FamilySpec Z2(int i = 0) { return {Family::Z2, i, 0}; }

  /// Throws a domain error on invalid indices.
  void validate() const;
  std::string label() const;
  Locus locus() const;
  Terminal terminal() const;
  bool has_middle_euler() const { return terminal() != Terminal::euler_hit; }
  bool experimental() const { return family == Family::PP || family == Family::Z2; }
};

enum class LineKind { partial, euler, brake };
std::string to_string(LineKind k);

struct Crossing {
  LineKind kind = LineKind::partial;
  double theta_bar = 0.0;  // line crossed; the brake angle for brake entries
  double s = 0.0;
  double v = 0.0;
  int direction = 0;  // sign of dtheta/ds at the crossing
};

struct CrossingSignature {
  std::vector<Crossing> entries;
  std::string str() const;
};

enum class ShotOutcome { terminal, mismatch, escape, collision_asymptotic, cap, time_limit };
std::string to_string(ShotOutcome o);

struct ShotOptions {
  IntegrationControls controls = default_controls();
  double r_max = 1e3;
  int max_crossings = 64;
  bool keep_trajectory = false;

  static IntegrationControls default_controls() {
    IntegrationControls c;
    c.rtol = 1e-12;
    c.atol = 1e-14;
    c.max_s = 1e3;
    c.hmax = 0.1;
    return c;
  }
};

struct ShotResult {
  CrossingSignature signature;
  ShotOutcome outcome = ShotOutcome::time_limit;
  State terminal;            // state at the terminal event, else the last state
  double terminal_s = 0.0;
  double residual = 0.0;     // v at the terminal event
  int count_a = 0;           // crossings of the first partial line before the Euler line
  int count_b = 0;           // crossings of the mirrored partial line after it
  std::optional<double> euler_line;
  double euler_v = 0.0;      // v at the first Euler crossing
  Trajectory trajectory;     // filled when keep_trajectory
};

State seed_state(const ProblemSpec& problem, Locus locus, double param);

/// Records crossings of the pi/2 lattice and brake points until the family's
/// terminal event or a structural mismatch.
ShotResult shoot(const ProblemSpec& problem, const State& seed, const FamilySpec& family,
                 const ShotOptions& options = {});

/// Generic form: records lattice, v-zero and w-zero events until `stop`, escape
/// or the crossing cap.
ShotResult shoot(const ProblemSpec& problem, const State& seed, const EventSpec& stop, int max_crossings,
                 const ShotOptions& options = {});

struct SearchOptions {
  std::optional<double> param_lo, param_hi;  // defaults depend on the locus
  std::size_t grid_points = 400;
  bool exhaustive = false;
  double residual_tol = 1e-8;
  std::size_t uniform_samples = 400;  // samples per fundamental segment
  ShotOptions shot;
  kernels::Exec exec = kernels::Exec::parallel;
};

struct ScanPoint {
  double param = 0.0;
  ShotOutcome outcome = ShotOutcome::time_limit;
  bool matches = false;
  double residual = 0.0;
  std::string signature;
};

struct PeriodicOrbit {
  FamilySpec family;
  State seed;
  double seed_parameter = 0.0;
  bool quarter = true;  // fundamental segment is a quarter (else a half) period
  Trajectory fundamental;
  CrossingSignature signature;
  double residual = 0.0;
  double full_period_s = 0.0;
  Trajectory reconstructed;
  double bracket_lo = 0.0, bracket_hi = 0.0;  // scan bracket the bisection started from
  double euler_speed = 0.0;                   // |v| at the middle Euler crossing, if any
  int bisection_steps = 0;
};

struct SearchResult {
  std::vector<ScanPoint> scan;
  std::vector<PeriodicOrbit> orbits;  // first one unless exhaustive
  std::vector<std::string> rejected;  // brackets that did not converge, with reasons
  double lo = 0.0, hi = 0.0;
};

/// Default scan range for the family's locus.
std::pair<double, double> default_range(const FamilySpec& family);

/// Scan plus bisection; never throws not-found.
SearchResult search_orbits(const ProblemSpec& problem, const FamilySpec& family, const SearchOptions& options = {});

/// Throws a not-found error when search_orbits comes back empty.
PeriodicOrbit find_orbit(const ProblemSpec& problem, const FamilySpec& family, const SearchOptions& options = {});

/// Full period from the fundamental segment by the family's reflections.
Trajectory reconstruct_full(const PeriodicOrbit& orbit);

struct PeriodicityCheck {
  double closure_error = 0.0;
  double energy_drift = 0.0;
  double max_r = 0.0;
  Trajectory trajectory;  // one-pass integration, uniformly sampled like the reconstruction
};

PeriodicityCheck verify_periodicity(const ProblemSpec& problem, const PeriodicOrbit& orbit,
                                    const IntegrationControls& controls = ShotOptions::default_controls());

/// Max coordinate gap between two states, with the angle compared modulo 2 pi.
double state_gap(const State& a, const State& b, bool angle_mod_2pi);

/// Physical time along a trajectory by the trapezoidal rule on dt/ds.
std::vector<double> physical_time(const ProblemSpec& problem, const Trajectory& traj);

}  // namespace symorb
