#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "symorb/kernels.hpp"

using namespace symorb::kernels;

TEST_CASE("map: serial and parallel paths are bit-identical") {
  auto f = [](std::size_t i) { return std::sin(0.37 * static_cast<double>(i)) * std::exp(-1e-3 * i); };
  const auto a = map(5000, f, Exec::serial), b = map(5000, f, Exec::parallel);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  CHECK(map(0, f).empty());
  CHECK(map(1, f, Exec::parallel).size() == 1);
}

TEST_CASE("map rethrows worker exceptions") {
  auto f = [](std::size_t i) -> int {
    if (i == 17) throw std::runtime_error("boom");
    return static_cast<int>(i);
  };
  CHECK_THROWS_WITH(map(40, f, Exec::parallel), "boom");
  CHECK_THROWS_WITH(map(40, f, Exec::serial), "boom");
}

TEST_CASE("grid_max") {
  auto f = [](double x) { return -(x - 0.3) * (x - 0.3); };
  const GridExtremum s = grid_max(f, 0.0, 1.0, 1000, Exec::serial), p = grid_max(f, 0.0, 1.0, 1000, Exec::parallel);
  CHECK(s.value == p.value);
  CHECK(s.arg == p.arg);
  CHECK(s.lipschitz == p.lipschitz);
  CHECK(s.arg == doctest::Approx(0.3));
  CHECK(s.points == 1000);
  CHECK(s.lipschitz == doctest::Approx(1.4).epsilon(1e-2));
  // right endpoint excluded
  const GridExtremum e = grid_max([](double x) { return x; }, 0.0, 1.0, 10, Exec::serial);
  CHECK(e.arg == doctest::Approx(0.9));
}

TEST_CASE("worker count override") {
  set_workers(1);
  CHECK(workers() == 1);
  set_workers(0);
  CHECK(workers() >= 1);
}
