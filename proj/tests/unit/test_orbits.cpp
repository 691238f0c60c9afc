#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "symorb/error.hpp"
#include "symorb/orbits.hpp"

using namespace symorb;
using std::numbers::pi;

namespace {

const ProblemSpec& pyr2() {
  static const ProblemSpec p = ProblemSpec::pyramidal(2, 1.0);
  return p;
}

const PeriodicOrbit& orbit_of(const FamilySpec& f) {
  static std::map<std::string, PeriodicOrbit> cache;
  auto it = cache.find(f.label());
  if (it == cache.end()) it = cache.emplace(f.label(), find_orbit(pyr2(), f)).first;
  return it->second;
}

int count_kind(const CrossingSignature& sig, LineKind k) {
  int c = 0;
  for (const auto& e : sig.entries) c += e.kind == k;
  return c;
}

}  // namespace

TEST_CASE("family validation and labels") {
  CHECK_NOTHROW(FamilySpec::B(0).validate());
  CHECK_THROWS_AS(FamilySpec::Z5(0, 1).validate(), Error);
  CHECK_THROWS_AS(FamilySpec::LessSymB(1, 0).validate(), Error);
  CHECK_THROWS_AS(FamilySpec::B(-1).validate(), Error);
  CHECK(FamilySpec::B(0).locus() == Locus::S_partial);
  CHECK(FamilySpec::Z1(0).locus() == Locus::Z);
  CHECK(FamilySpec::Z5(1, 1).terminal() == Terminal::brake);
  CHECK(FamilySpec::PP(1, 1).experimental());
  CHECK(FamilySpec::Z1(2).label() != FamilySpec::Z1(1).label());
}

TEST_CASE("seed states") {
  const State z = seed_state(pyr2(), Locus::Z, 0.0);
  CHECK(z.r == doctest::Approx(1.25));
  CHECK(z.v == 0.0);
  CHECK(z.w == 0.0);
  for (double r : {0.1, 1.0, 10.0}) {
    const State s = seed_state(pyr2(), Locus::S_partial, r);
    CHECK(s.angle == doctest::Approx(-pi / 2));
    CHECK(std::abs(energy_residual(pyr2(), s)) <= 1e-12);
  }
  // the Lagrange brake point is at rest in shape
  const State L = seed_state(pyr2(), Locus::Z, theta_star(pyr2()));
  const Vec4 d = rhs(pyr2(), L);
  CHECK(std::abs(d[2]) <= 1e-12);
  CHECK(std::abs(d[3]) <= 1e-12);
  CHECK_THROWS_AS(seed_state(pyr2(), Locus::S_partial, -1.0), Error);
  CHECK_THROWS_AS(seed_state(pyr2(), Locus::Z, pi / 2), Error);
}

TEST_CASE("shots at the ends of the S range") {
  const ShotResult far = shoot(pyr2(), seed_state(pyr2(), Locus::S_partial, 100.0), FamilySpec::B(0));
  // a tight binary with the third body far out: the partial line is re-crossed
  // at every binary collision, so the shot may hit the crossing cap first
  CHECK((far.outcome == ShotOutcome::escape || far.outcome == ShotOutcome::cap));
  CHECK_FALSE(far.euler_line.has_value());
  const ShotResult near = shoot(pyr2(), seed_state(pyr2(), Locus::S_partial, 1e-3), FamilySpec::B(0));
  const bool ok = near.outcome == ShotOutcome::collision_asymptotic ||
                  (near.outcome == ShotOutcome::terminal && near.residual > 0);
  CHECK(ok);
}

TEST_CASE("B(0): found, closed, and consistent") {
  const PeriodicOrbit& o = orbit_of(FamilySpec::B(0));
  CHECK(std::abs(o.residual) <= 1e-8);
  CHECK(o.quarter);
  CHECK(o.fundamental.final_state().angle == doctest::Approx(0.0).scale(1.0));
  CHECK(count_kind(o.signature, LineKind::partial) == 0);
  CHECK(count_kind(o.signature, LineKind::euler) == 1);

  const Trajectory& full = o.reconstructed;
  CHECK(state_gap(full.final_state(), o.seed, true) <= 1e-6);
  CHECK(full.final_s() == doctest::Approx(o.full_period_s));

  const PeriodicityCheck chk = verify_periodicity(pyr2(), o);
  CHECK(chk.closure_error <= 1e-6);
  CHECK(chk.energy_drift <= 1e-8 * (1 + chk.max_r));

  // one-pass integration and reflection recipe agree sample by sample
  REQUIRE(chk.trajectory.samples.size() == full.samples.size());
  double worst = 0;
  for (std::size_t i = 0; i < full.samples.size(); ++i)
    worst = std::max(worst, state_gap(full.samples[i].state, chk.trajectory.samples[i].state, true));
  CHECK(worst <= 1e-6);

  // two binary collisions per period
  int partial = 0;
  for (std::size_t i = 1; i < full.samples.size(); ++i) {
    const double a = full.samples[i - 1].state.angle, b = full.samples[i].state.angle;
    for (double line = -3 * pi / 2; line <= 5 * pi / 2; line += pi)
      if ((a - line) * (b - line) < 0 || b == line) ++partial;
  }
  CHECK(partial == 2);
}

TEST_CASE("B(0) is isolated in its parameter") {
  const PeriodicOrbit& o = orbit_of(FamilySpec::B(0));
  PeriodicOrbit moved = o;
  moved.seed = seed_state(pyr2(), Locus::S_partial, o.seed_parameter + 1e-3);
  CHECK(verify_periodicity(pyr2(), moved).closure_error > 1e-4);
}

TEST_CASE("signature reproduced at the converged parameter") {
  for (const FamilySpec& f : {FamilySpec::B(0), FamilySpec::B(1), FamilySpec::Z1(1)}) {
    const PeriodicOrbit& o = orbit_of(f);
    const ShotResult r = shoot(pyr2(), o.seed, f);
    CAPTURE(f.label());
    CHECK(r.outcome == ShotOutcome::terminal);
    CHECK(r.signature.str() == o.signature.str());
    CHECK(std::abs(r.residual) <= 1e-8);
  }
}

TEST_CASE("B(k) and Z1(k) cross the partial line k times before the Euler hit") {
  CHECK(count_kind(orbit_of(FamilySpec::B(1)).signature, LineKind::partial) == 1);
  CHECK(count_kind(orbit_of(FamilySpec::Z1(1)).signature, LineKind::partial) == 1);
  CHECK(count_kind(orbit_of(FamilySpec::Z1(2)).signature, LineKind::partial) == 2);
}

TEST_CASE("angle crossings move by at most one lattice step") {
  for (const FamilySpec& f : {FamilySpec::B(1), FamilySpec::Z1(2)}) {
    const auto& e = orbit_of(f).signature.entries;
    for (std::size_t i = 1; i < e.size(); ++i) {
      if (e[i].kind == LineKind::brake || e[i - 1].kind == LineKind::brake) continue;
      const double d = std::abs(e[i].theta_bar - e[i - 1].theta_bar);
      CHECK((d < 1e-12 || std::abs(d - pi / 2) < 1e-12));
    }
  }
}

TEST_CASE("Z1 orbits start and turn at brake points") {
  const PeriodicOrbit& o = orbit_of(FamilySpec::Z1(1));
  CHECK(o.seed.v * o.seed.v + o.seed.w * o.seed.w <= 1e-16);
  const PeriodicityCheck chk = verify_periodicity(pyr2(), o);
  CHECK(chk.closure_error <= 1e-6);
  const auto& smp = chk.trajectory.samples;
  const State& half = smp[(smp.size() - 1) / 2].state;
  CHECK(half.v * half.v + half.w * half.w <= 1e-16);
}

TEST_CASE("terminal residual is monotone across the bisection bracket") {
  for (const FamilySpec& f : {FamilySpec::B(0), FamilySpec::Z1(1)}) {
    const PeriodicOrbit& o = orbit_of(f);
    double prev = NAN;
    int sign = 0;
    for (int k = 1; k <= 5; ++k) {
      const double t = k / 6.0;
      const double param = f.locus() == Locus::S_partial
                               ? o.bracket_lo * std::pow(o.bracket_hi / o.bracket_lo, t)
                               : o.bracket_lo + (o.bracket_hi - o.bracket_lo) * t;
      const ShotResult r = shoot(pyr2(), seed_state(pyr2(), f.locus(), param), f);
      REQUIRE(r.outcome == ShotOutcome::terminal);
      if (k > 1) {
        const int s = r.residual > prev ? 1 : -1;
        if (sign != 0) CHECK(s == sign);
        sign = s;
      }
      prev = r.residual;
    }
  }
}

TEST_CASE("searches that come back empty") {
  const auto planar = ProblemSpec::planar_double_polygon(10);
  SearchOptions o;
  o.grid_points = 100;
  const SearchResult r = search_orbits(planar, FamilySpec::Z1(0), o);
  CHECK(r.orbits.empty());
  CHECK(r.scan.size() == 100);
  try {
    find_orbit(planar, FamilySpec::Z1(0), o);
    FAIL("expected not-found");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_found);
  }
  SearchOptions bad;
  bad.param_lo = 1.0;
  bad.param_hi = 0.5;
  CHECK_THROWS_AS(search_orbits(pyr2(), FamilySpec::B(0), bad), Error);
}

TEST_CASE("serial and parallel scans agree") {
  SearchOptions a, b;
  a.grid_points = b.grid_points = 60;
  a.exec = kernels::Exec::serial;
  b.exec = kernels::Exec::parallel;
  const SearchResult ra = search_orbits(pyr2(), FamilySpec::B(0), a), rb = search_orbits(pyr2(), FamilySpec::B(0), b);
  REQUIRE(ra.scan.size() == rb.scan.size());
  for (std::size_t i = 0; i < ra.scan.size(); ++i) {
    CHECK(ra.scan[i].residual == rb.scan[i].residual);
    CHECK(ra.scan[i].signature == rb.scan[i].signature);
  }
  REQUIRE(ra.orbits.size() == rb.orbits.size());
  if (!ra.orbits.empty()) CHECK(ra.orbits[0].seed_parameter == rb.orbits[0].seed_parameter);
}

TEST_CASE("physical time is increasing") {
  const PeriodicOrbit& o = orbit_of(FamilySpec::B(0));
  const auto t = physical_time(pyr2(), o.reconstructed);
  REQUIRE(t.size() == o.reconstructed.samples.size());
  CHECK(t.front() == 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] > t[i - 1]);
}
