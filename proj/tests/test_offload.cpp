#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "mfedge/offload.hpp"

using namespace mfedge;

namespace {

const DegreeProfile kUniform = DegreeProfile::uniform(6, 9);
const SystemParams kDefaults{};  // the evaluated configuration

}  // namespace

TEST_CASE("task delay endpoints", "[offload]") {
  CHECK(kDefaults.tx_time() == Approx(1.6));
  CHECK(task_delay(1.0, kDefaults, kUniform) == Approx(1.8).margin(1e-12));

  SystemParams fast = kDefaults;
  fast.data_size_bits = 1e-6;
  fast.gamma = 1e12;
  CHECK(task_delay(1.0, fast, kUniform) == Approx(0.0).margin(1e-9));
}

TEST_CASE("task delay matches the reference critical points", "[offload]") {
  CHECK(task_delay(0.26586, kDefaults, kUniform) == Approx(1.6).margin(5e-3));
  CHECK(task_delay(0.72978, kDefaults, kUniform) == Approx(1.6).margin(5e-3));
}

TEST_CASE("delay components are monotone", "[offload]") {
  double prev_dq = 1e18;
  for (int g = 0; g <= 10; ++g) {
    double x = g / 10.0;
    double d_offload = x * (kDefaults.tx_time() + 1.0 / kDefaults.gamma);
    double dq = task_delay(x, kDefaults, kUniform) - d_offload;
    CHECK(dq <= prev_dq + 1e-9);
    prev_dq = dq;
  }
}

TEST_CASE("delay interval at the reference caps", "[offload]") {
  Interval iv = find_delay_interval(kDefaults, kUniform);
  CHECK(iv.lo == Approx(0.26586).margin(5e-3));
  CHECK(iv.hi == Approx(0.72978).margin(5e-3));
}

TEST_CASE("slack delay cap never binds", "[offload]") {
  SystemParams loose = kDefaults;
  loose.d_bar = 5.0;
  Interval iv = find_delay_interval(loose, kUniform);
  CHECK(iv.lo == 0.0);
  CHECK(iv.hi == 1.0);
}

TEST_CASE("tight delay cap pins the interval to the minimizer", "[offload]") {
  SystemParams tight = kDefaults;
  tight.d_bar = 1.507;  // just above the interior minimum ~1.504
  Interval iv = find_delay_interval(tight, kUniform);
  CHECK(iv.hi - iv.lo < 0.15);
  CHECK(iv.lo < 0.45);
  CHECK(iv.hi > 0.45);
  // grid oracle: delay is within the cap strictly inside, above it outside
  for (int g = 0; g <= 20; ++g) {
    double x = g / 20.0;
    double d = task_delay(x, tight, kUniform);
    if (x >= iv.lo + 0.02 && x <= iv.hi - 0.02) CHECK(d <= tight.d_bar + 1e-3);
    if (x < iv.lo - 0.02 || x > iv.hi + 0.02) CHECK(d > tight.d_bar - 1e-3);
  }
}

TEST_CASE("impossible delay cap is infeasible", "[offload]") {
  SystemParams impossible = kDefaults;
  impossible.d_bar = 1.2;
  CHECK_THROWS_AS(find_delay_interval(impossible, kUniform), infeasible_error);
}

TEST_CASE("fairness gap endpoints and reference values", "[offload]") {
  CHECK(fairness_gap(1.0, kDefaults, kUniform) == 0.0);
  // collaboration load 0.7 at x = 1 - 0.7/0.9
  CHECK(fairness_gap(1.0 - 0.7 / 0.9, kDefaults, kUniform) == Approx(0.06791).margin(2e-3));
  CHECK(fairness_gap(0.08505, kDefaults, kUniform) == Approx(0.06).margin(5e-3));
  CHECK(fairness_gap(0.49953, kDefaults, kUniform) == Approx(0.06).margin(5e-3));
}

TEST_CASE("fairness gap is continuous on the grid", "[offload]") {
  double prev = fairness_gap(0.0, kDefaults, kUniform);
  for (int g = 1; g <= 25; ++g) {
    double cur = fairness_gap(g / 25.0, kDefaults, kUniform);
    CHECK(std::abs(cur - prev) < 0.02);  // grid-scale Lipschitz estimate
    prev = cur;
  }
}

TEST_CASE("fairness region at the reference cap", "[offload]") {
  FairnessRegion region = find_fairness_region(kDefaults, kUniform);
  CHECK_FALSE(region.full);
  CHECK(region.x_prime_l == Approx(0.08505).margin(5e-3));
  CHECK(region.x_prime_u == Approx(0.49953).margin(5e-3));
}

TEST_CASE("slack fairness cap yields the full region", "[offload]") {
  SystemParams loose = kDefaults;
  loose.s_bar = 0.08;  // peak gap is ~0.0683
  FairnessRegion region = find_fairness_region(loose, kUniform);
  CHECK(region.full);
}

TEST_CASE("near-peak fairness cap brackets the argmax", "[offload]") {
  SystemParams tight = kDefaults;
  tight.s_bar = 0.067;
  FairnessRegion region = find_fairness_region(tight, kUniform);
  REQUIRE_FALSE(region.full);
  // grid oracle for the peak location
  double best_x = 0.0, best = -1.0;
  for (int g = 0; g <= 50; ++g) {
    double x = g / 50.0;
    double gap = fairness_gap(x, kDefaults, kUniform);
    if (gap > best) {
      best = gap;
      best_x = x;
    }
  }
  CHECK(region.x_prime_l <= best_x);
  CHECK(region.x_prime_u >= best_x);
}

TEST_CASE("feasible region at the reference configuration", "[offload]") {
  FeasibleRegion region = feasible_region(kDefaults, kUniform);
  CHECK(region.x_l == Approx(0.49953).margin(5e-3));
  CHECK(region.x_u == Approx(0.72978).margin(5e-3));
  REQUIRE(region.intersection.size() == 1);
  CHECK(region.warnings.empty());
}

TEST_CASE("unconstrained caps give the unit interval", "[offload]") {
  SystemParams loose = kDefaults;
  loose.d_bar = 5.0;
  loose.s_bar = 0.08;
  FeasibleRegion region = feasible_region(loose, kUniform);
  CHECK(region.x_l == 0.0);
  CHECK(region.x_u == 1.0);
}

TEST_CASE("two-component intersections honor the interval choice", "[offload]") {
  SystemParams loose = kDefaults;
  loose.d_bar = 5.0;  // delay never binds, fairness splits the unit interval
  FeasibleRegion high = feasible_region(loose, kUniform, 1e-3, 1e-5);
  REQUIRE(high.intersection.size() == 2);
  CHECK(high.x_l == Approx(0.49953).margin(5e-3));
  CHECK(high.x_u == 1.0);
  FeasibleRegion low =
      feasible_region(loose, kUniform, 1e-3, 1e-5, IntervalChoice::LowestX);
  CHECK(low.x_l == 0.0);
  CHECK(low.x_u == Approx(0.08505).margin(5e-3));
}

TEST_CASE("disjoint constraints are infeasible", "[offload]") {
  SystemParams caps = kDefaults;
  caps.d_bar = 1.53;  // delay interval ~ [0.35, 0.59]
  caps.s_bar = 0.05;  // fairness region ~ [0, 0.01] U [0.62, 1]
  CHECK_THROWS_AS(feasible_region(caps, kUniform), infeasible_error);
}

TEST_CASE("threshold offload decision", "[offload]") {
  FeasibleRegion region;
  region.x_l = 0.49953;
  region.x_u = 0.72978;
  // indifference price: 0.9/1 - 0.3*1.6 = 0.42; ties go to the upper endpoint
  CHECK(offload_decision(0.42, region, kDefaults) == region.x_u);
  CHECK(offload_decision(0.5, region, kDefaults) == region.x_l);
  CHECK(offload_decision(1e-9, region, kDefaults) == region.x_u);
}

TEST_CASE("system cost arithmetic", "[offload]") {
  CHECK(system_cost(0.0, 0.42, kDefaults) == Approx(0.81).margin(1e-12));
  CHECK(system_cost(1.0, 0.42, kDefaults) == Approx(0.81).margin(1e-12));
  SystemParams idle = kDefaults;
  idle.lambda = 1e-12;
  CHECK(system_cost(0.5, 0.42, idle) == Approx(0.0).margin(1e-11));
}

TEST_CASE("the decision beats the other endpoint", "[offload]") {
  FeasibleRegion region;
  region.x_l = 0.49953;
  region.x_u = 0.72978;
  for (int g = 1; g <= 10; ++g) {
    double p = 0.05 * g;
    double chosen = offload_decision(p, region, kDefaults);
    double other = chosen == region.x_u ? region.x_l : region.x_u;
    CHECK(system_cost(chosen, p, kDefaults) <= system_cost(other, p, kDefaults) + 1e-12);
  }
}
