#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "symorb/error.hpp"
#include "symorb/manifolds.hpp"

using namespace symorb;
using std::numbers::pi;

namespace {

const Equilibrium& find(const std::vector<Equilibrium>& eqs, const std::string& label) {
  for (const auto& e : eqs)
    if (e.label == label) return e;
  FAIL("missing equilibrium " << label);
  return eqs.front();
}

double norm(const Vec4& d) { return std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3]); }

}  // namespace

TEST_CASE("equilibria are zeros of the field") {
  for (const auto& p : {ProblemSpec::pyramidal(2, 1.0), ProblemSpec::spatial_double_polygon(3),
                        ProblemSpec::planar_double_polygon(10)}) {
    for (Chart chart : {Chart::newcoords, Chart::devaney}) {
      const auto eqs = equilibria(p, chart);
      CHECK(eqs.size() >= 6);
      for (const auto& e : eqs) {
        CAPTURE(e.label);
        CHECK(e.state.r == 0.0);
        CHECK(e.state.w == 0.0);
        CHECK(norm(rhs(p, e.state)) <= 1e-10);
      }
    }
  }
}

TEST_CASE("Euler point velocity") {
  const auto p = ProblemSpec::pyramidal(2, 1.0);
  const auto eqs = equilibria(p, Chart::newcoords);
  CHECK(find(eqs, "E+").state.v == doctest::Approx(std::sqrt(2.5)));
  CHECK(find(eqs, "E-").state.v == doctest::Approx(-std::sqrt(2.5)));
  CHECK(find(eqs, "L-").state.angle == doctest::Approx(theta_star(p) - pi));
}

TEST_CASE("L- has a single unstable direction on the collision manifold") {
  for (const auto& p : {ProblemSpec::pyramidal(2, 1.0), ProblemSpec::pyramidal(7, 1.0),
                        ProblemSpec::spatial_double_polygon(5)}) {
    const auto& L = find(equilibria(p, Chart::newcoords), "L-");
    // the r-column is decoupled; restrict to (v, angle, w)
    int positive = 0;
    for (int k = 0; k < 4; ++k) {
      const auto& vec = L.eigenvectors[k];
      const bool radial = std::abs(vec[0]) > 0.5;
      if (!radial && L.eigenvalues[k].real() > 1e-9) ++positive;
    }
    CHECK(positive == 1);
    const BranchTrace t = trace_branch(p, BranchId::gamma);
    CHECK(t.eigenvalue > 0);
  }
}

TEST_CASE("homothetic connection from L+ to L-") {
  const auto p = ProblemSpec::pyramidal(2, 1.0);
  const auto eqs = equilibria(p, Chart::newcoords);
  const State Lp = find(eqs, "L+").state, Lm = find(eqs, "L-").state;
  // the line (theta, w) = (theta* - pi, 0) is invariant on the energy surface
  for (double r : {0.0, 0.2, 0.7}) {
    State s = Lp;
    s.r = r;
    s.v = -std::sqrt(2 * (V_theta(p, s.angle) - r));
    const Vec4 d = rhs(p, s);
    CHECK(std::abs(d[2]) <= 1e-12);
    CHECK(std::abs(d[3]) <= 1e-12);
  }
  // follow (r, v) on it with theta, w frozen (classical RK4), starting just above L+
  auto f = [&](double r, double v) {
    State s = Lp;
    s.r = r;
    s.v = v;
    const Vec4 d = rhs(p, s);
    return std::array<double, 2>{d[0], d[1]};
  };
  double r = 1e-9, v = std::sqrt(2 * (V_theta(p, Lp.angle) - r)), r_max = 0;
  const double h = 1e-3;
  for (int k = 0; k < 200000 && !(v < 0 && r < 1e-9); ++k) {
    const auto k1 = f(r, v);
    const auto k2 = f(r + h / 2 * k1[0], v + h / 2 * k1[1]);
    const auto k3 = f(r + h / 2 * k2[0], v + h / 2 * k2[1]);
    const auto k4 = f(r + h * k3[0], v + h * k3[1]);
    r += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    v += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
    r_max = std::max(r_max, r);
  }
  CHECK(r < 1e-9);
  CHECK(v == doctest::Approx(Lm.v).epsilon(1e-6));
  CHECK(r_max == doctest::Approx(V_theta(p, Lp.angle)).epsilon(1e-6));
}

TEST_CASE("pyramidal landmark signs and bound") {
  for (int n = 2; n <= 10; ++n) {
    const auto p = ProblemSpec::pyramidal(n, 1.0);
    const auto lm = landmarks(p);
    CAPTURE(n);
    REQUIRE(lm.get("v1"));
    REQUIRE(lm.get("v2"));
    REQUIRE(lm.get("v3"));
    CHECK(*lm.get("v1") < 0);
    CHECK(*lm.get("v2") > 0);
    CHECK(*lm.get("v3") < 0);
    // the beta / 2 sqrt(S_n) bound holds from n = 3 with this labelling
    if (n >= 3) CHECK(-1.32 / 2 * std::sqrt(p.s_n) < *lm.get("v1"));
    REQUIRE(lm.get("v0"));
    CHECK(*lm.get("v0") < 0);
    CHECK(0 < -*lm.get("v1"));
  }
}

TEST_CASE("planar landmarks") {
  const auto lm = landmarks(ProblemSpec::planar_double_polygon(10));
  CHECK(*lm.get("v2") < 0);
  CHECK(*lm.get("v3") < 0);
  CHECK(*lm.get("v4") > 0);
  CHECK(*lm.get("v5") < 0);
}

TEST_CASE("heavy apex flips the sign of v2") {
  CHECK(*trace_branch(ProblemSpec::pyramidal(2, 3.0), BranchId::gamma).landmark("v2") < 0);
  CHECK(*trace_branch(ProblemSpec::pyramidal(2, 2.0), BranchId::gamma).landmark("v2") > 0);
}

TEST_CASE("branch traces stay on r = 0 and landmarks match recorded crossings") {
  const auto p = ProblemSpec::pyramidal(3, 1.0);
  const BranchTrace t = trace_branch(p, BranchId::gamma);
  for (const auto& s : t.trajectory.samples) CHECK(s.state.r == 0.0);
  bool v1_seen = false, v2_seen = false;
  for (const auto& e : t.trajectory.events) {
    if (e.kind != EventKind::angle_crossing && e.kind != EventKind::angle_lattice) continue;
    if (std::abs(e.state.v - *t.landmark("v1")) < 1e-14) v1_seen = std::abs(e.line + pi / 2) < 1e-12;
    if (std::abs(e.state.v - *t.landmark("v2")) < 1e-14) v2_seen = std::abs(e.line) < 1e-12;
  }
  CHECK(v1_seen);
  CHECK(v2_seen);
}

TEST_CASE("the Devaney-chart branch gives the same v1") {
  for (const auto& p : {ProblemSpec::pyramidal(2, 1.0), ProblemSpec::spatial_double_polygon(3)}) {
    const double a = *trace_branch(p, BranchId::gamma).landmark("v1");
    const double b = *trace_branch(p, BranchId::gamma_dprime).landmark("v1");
    CHECK(a == doctest::Approx(b).epsilon(1e-6));
  }
  CHECK(alias(BranchId::gamma) != to_string(BranchId::gamma));
}

TEST_CASE("mirror branch reproduces the landmarks of gamma") {
  for (const auto& p : {ProblemSpec::pyramidal(2, 1.0), ProblemSpec::planar_double_polygon(10)}) {
    const auto a = trace_branch(p, BranchId::gamma), b = trace_branch(p, BranchId::gamma_prime_minus);
    for (const auto& [name, v] : a.landmarks) {
      REQUIRE(b.landmark(name));
      CHECK(std::abs(*b.landmark(name) - v) <= 1e-6);
    }
  }
}

TEST_CASE("property: landmarks are robust to the seed offset") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  for (const auto& p : {ProblemSpec::pyramidal(2, 1.0), ProblemSpec::spatial_double_polygon(3),
                        ProblemSpec::planar_double_polygon(10)}) {
    const double v_eq = std::sqrt(2 * V_theta(p, -theta_star(p)));
    for (int k = 0; k < 100; ++k) {
      BranchControls a, b;
      a.epsilon = 1e-7 * v_eq * scale(rng);
      b.epsilon = a.epsilon / 10;
      const BranchId id = k % 2 ? BranchId::gamma : BranchId::gamma_prime;
      const auto ta = trace_branch(p, id, a), tb = trace_branch(p, id, b);
      for (const auto& [name, v] : ta.landmarks) {
        REQUIRE(tb.landmark(name));
        CHECK(std::abs(*tb.landmark(name) - v) <= 1e-6);
      }
    }
  }
}

TEST_CASE("N4 separation") {
  const N4Result r = check_N4(ProblemSpec::pyramidal(2, 1.0));
  CHECK(r.pass);
  CHECK(r.separation > 1e-6);
  CHECK(r.separation == doctest::Approx(std::abs(r.v2 + r.v3)));
  CHECK_FALSE(check_N4(0.3, -0.3).pass);
  CHECK(check_N4(0.3, -0.2).pass);
  const N4Result planar = check_N4(ProblemSpec::planar_double_polygon(10));
  CHECK(planar.v2 < 0);
  CHECK(planar.v3 < 0);
}

TEST_CASE("Jacobian matches the field") {
  const auto p = ProblemSpec::pyramidal(2, 1.0);
  State s{Chart::newcoords, 0.3, 0.2, -0.4, 0.5, -1.0};
  const auto J = numerical_jacobian(p, s);
  const double h = 1e-5;
  for (int j = 0; j < 4; ++j) {
    Vec4 a = s.vec(), b = s.vec();
    a[j] -= h;
    b[j] += h;
    const Vec4 fa = rhs(p, State::from_vec(a, s.chart, s.h)), fb = rhs(p, State::from_vec(b, s.chart, s.h));
    for (int i = 0; i < 4; ++i) CHECK(J[i][j] == doctest::Approx((fb[i] - fa[i]) / (2 * h)).epsilon(1e-6).scale(1.0));
  }
}
