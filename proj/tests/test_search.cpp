#include <catch2/catch.hpp>

#include <cmath>

#include "mfedge/search.hpp"

using namespace mfedge;

TEST_CASE("golden section finds a quadratic minimum", "[search]") {
  auto f = [](double x) { return (x - 0.3) * (x - 0.3); };
  CHECK(golden_section_minimize(f, 0.0, 1.0, 1e-7) == Approx(0.3).margin(1e-6));
}

TEST_CASE("golden section handles an edge minimum", "[search]") {
  auto f = [](double x) { return x; };
  CHECK(golden_section_minimize(f, 0.0, 1.0, 1e-7) == Approx(0.0).margin(1e-6));
}

TEST_CASE("bisection root", "[search]") {
  auto f = [](double x) { return std::cos(x); };
  CHECK(bisect_root(f, 0.0, 3.0, 1e-10) == Approx(std::acos(0.0)).margin(1e-9));
  CHECK_THROWS_AS(bisect_root([](double x) { return x + 2.0; }, 0.0, 1.0, 1e-8),
                  std::invalid_argument);
}

TEST_CASE("bisection accepts a root at an endpoint", "[search]") {
  auto f = [](double x) { return x - 1.0; };
  CHECK(bisect_root(f, 1.0, 2.0, 1e-10) == 1.0);
}
