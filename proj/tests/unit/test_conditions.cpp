#include <doctest.h>

#include <cmath>
#include <numbers>

#include "symorb/conditions.hpp"
#include "symorb/error.hpp"

using namespace symorb;
using std::numbers::pi;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::usage;
}

// Simpson on [a, b] with n (even) panels.
double simpson(auto&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * f(a + i * h);
  return s * h / 3;
}

}  // namespace

TEST_CASE("g1 follows its closed form") {
  const auto r = integrate_g(ProblemSpec::pyramidal(2, 1.0), GKind::g1);
  CHECK(r.start_phi == 0.0);
  CHECK(r.start_g == doctest::Approx(-std::sqrt(2.0)));
  CHECK(r.endpoint_phi == doctest::Approx(pi / 2));
  CHECK(std::abs(r.endpoint_g) <= 1e-6);
  for (const auto& [phi, g] : r.samples) CHECK(std::abs(g + std::sqrt(2 * std::max(0.0, std::cos(phi)))) <= 1e-6);
  for (std::size_t i = 1; i < r.samples.size(); ++i) CHECK(r.samples[i].first > r.samples[i - 1].first);
}

TEST_CASE("g2 endpoint and start") {
  const auto r = integrate_g(ProblemSpec::pyramidal(2, 1.0), GKind::g2);
  CHECK(r.start_phi == doctest::Approx(pi / 4));
  CHECK(r.start_g == doctest::Approx(-std::pow(2.0, 0.75)));
  CHECK(r.endpoint_g == doctest::Approx(-1.315705).epsilon(1e-4 / 1.3));
  GOptions o;
  o.alpha = 0.0;
  // without the extra term it is the g1 field restarted at pi/4, which lies below g1
  CHECK(integrate_g(ProblemSpec::pyramidal(2, 1.0), GKind::g2, o).endpoint_g < 0);
}

TEST_CASE("g3 values") {
  CHECK(integrate_g(ProblemSpec::spatial_double_polygon(4), GKind::g3).endpoint_g ==
        doctest::Approx(-1.28340).epsilon(5e-4 / 1.28));
  CHECK(integrate_g(ProblemSpec::pyramidal(3, 1.0), GKind::g3).endpoint_g ==
        doctest::Approx(-1.2328676).epsilon(5e-4 / 1.23));
  // g3 bounds the traced branch from below
  for (const auto& p : {ProblemSpec::pyramidal(3, 1.0), ProblemSpec::spatial_double_polygon(5)})
    CHECK(integrate_g(p, GKind::g3).endpoint_g <= integrate_g(p, GKind::gamma).endpoint_g);
}

TEST_CASE("certificate integral") {
  const auto c = v2_certificate(-1.32);
  CHECK(c.integral == doctest::Approx(1.379875).epsilon(1e-4 / 1.38));
  CHECK(c.lower_bound_g_at_0 > 0);
  CHECK(c.pass);
  // independent quadrature after phi = pi/2 - u^2 (removes the endpoint singularity)
  const double b = -1.32;
  const double ref = simpson(
      [&](double u) {
        const double phi = pi / 2 - u * u;
        return u == 0 ? 2.0 * std::sqrt(0.5) : 2 * u * std::sqrt(1 / (2 * std::cos(phi)) - b * b / 4);
      },
      0.0, std::sqrt(pi / 2), 20000);
  CHECK(c.integral == doctest::Approx(ref).epsilon(1e-9));
  const auto zero = v2_certificate(0.0);
  CHECK(zero.pass);
  CHECK(zero.integral > 0);
  CHECK(kind_of([] { v2_certificate(-1.5); }) == ErrorKind::bound_too_weak);
}

TEST_CASE("elliptic integrals") {
  CHECK(elliptic_E(1.0) == doctest::Approx(1.0));
  CHECK(elliptic_E(0.0) == doctest::Approx(pi / 2));
  CHECK(elliptic_K(0.0) == doctest::Approx(pi / 2));
  CHECK(kind_of([] { elliptic_K(1.0); }) == ErrorKind::divergence);
  CHECK(kind_of([] { elliptic_K(1.5); }) == ErrorKind::domain);
  const double two_e = 2 * elliptic_E(-1.0);
  CHECK(two_e > 3.81);
  CHECK(two_e < 3.83);
  for (double m : {-4.0, -1.0, -0.2, 0.4, 0.95}) {
    const Elliptic e = elliptic(m);
    CHECK(std::abs(e.K - e.K_agm) <= 1e-10);
    CHECK(std::abs(e.E - e.E_agm) <= 1e-10);
    const double E_ref = simpson([&](double t) { return std::sqrt(1 - m * std::sin(t) * std::sin(t)); }, 0, pi / 2, 4000);
    CHECK(e.E == doctest::Approx(E_ref).epsilon(1e-11));
  }
}

TEST_CASE("spatial W' bound") {
  CHECK(spatial_h(pi / 4) == doctest::Approx(2 * elliptic_E(-1.0)));
  const auto b = spatial_Wprime_bound(10);
  CHECK(b.pass);
  CHECK(b.max_4Wprime < b.bound);
  CHECK(b.bound == doctest::Approx(3.83 * 10 / pi));
  CHECK(b.h_max <= 3.83);
}

TEST_CASE("condition statuses") {
  const auto p2 = check_all(ProblemSpec::pyramidal(2, 1.0));
  CHECK(p2.find("N1")->status == Status::pass);
  CHECK(p2.find("N2")->status == Status::pass);
  CHECK(p2.find("N3")->status == Status::fail);
  CHECK(p2.find("N4")->status == Status::pass);
  const auto p4 = check_all(ProblemSpec::pyramidal(4, 1.0));
  CHECK(p4.overall_pass());
  CHECK(p4.find("N3")->status == Status::pass);
  const auto* n3 = p4.find("N3");
  for (const auto& [k, v] : n3->evidence)
    if (k == "max_abs_Wprime_over_W") CHECK(v < 0.8);
  const auto p3 = check_all(ProblemSpec::pyramidal(3, 1.0));
  CHECK(p3.find("N3prime")->status == Status::pass);
  CHECK(p3.overall_pass());
  const auto s10 = check_all(ProblemSpec::spatial_double_polygon(10));
  CHECK(s10.find("N3")->status == Status::pass);
  const auto pl = check_all(ProblemSpec::planar_double_polygon(10));
  CHECK(pl.find("N1")->status == Status::not_applicable);
  CHECK(pl.find("N3")->status == Status::not_applicable);
  CHECK(pl.find("N3prime")->status == Status::not_applicable);
  CHECK(pl.find("nonsense") == nullptr);
}

TEST_CASE("report aggregation") {
  ConditionReport r;
  auto add = [&](const char* name, Status s) {
    ConditionEntry e;
    e.status = s;
    r.entries.emplace_back(name, e);
  };
  add("N1", Status::pass);
  add("N2", Status::pass);
  add("N3", Status::fail);
  add("N3prime", Status::pass);
  add("N4", Status::pass);
  CHECK(r.overall_pass());
  r.entries[3].second.status = Status::fail;
  CHECK_FALSE(r.overall_pass());
  r.entries[2].second.status = Status::not_applicable;
  r.entries[3].second.status = Status::not_applicable;
  CHECK(r.overall_pass());
  r.entries[4].second.status = Status::fail;
  CHECK_FALSE(r.overall_pass());
}
