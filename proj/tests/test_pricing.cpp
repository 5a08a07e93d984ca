#include <catch2/catch.hpp>

#include <cmath>

#include "mfedge/pricing.hpp"

using namespace mfedge;

namespace {

const SystemParams kDefaults{};

// Reference feasible region, fixed here so the pricing arithmetic is checked
// independently of the searches.
FeasibleRegion reference_region() {
  FeasibleRegion r;
  r.x_l = 0.49953;
  r.x_u = 0.72978;
  return r;
}

}  // namespace

TEST_CASE("virtual queue update", "[pricing]") {
  CHECK(queue_update(0.0, 0.49953, kDefaults) == 0.0);  // 0.4496 - 0.6 clamps at zero
  CHECK(queue_update(0.0, 0.72978, kDefaults) == Approx(0.72978 * 0.9 - 0.6).margin(1e-12));
  CHECK_THROWS_AS(queue_update(-1.0, 0.5, kDefaults), std::invalid_argument);

  SystemParams slack = kDefaults;
  slack.x_bar = 0.95;  // departures dominate any arrival
  double backlog = 0.0;
  for (int n = 0; n < 50; ++n) backlog = queue_update(backlog, 1.0, slack);
  CHECK(backlog == 0.0);
}

TEST_CASE("drift bound constant", "[pricing]") {
  CHECK(drift_bound_constant(kDefaults) == Approx(0.18).margin(1e-12));
  SystemParams equal = kDefaults;
  equal.x_bar = equal.lambda;
  CHECK(drift_bound_constant(equal) == Approx(0.5 * 0.9 * 0.9).margin(1e-12));
  SystemParams tiny = kDefaults;
  tiny.x_bar = 1e-12;
  CHECK(drift_bound_constant(tiny) == Approx(0.5 * 0.9 * 0.9).margin(1e-9));
}

TEST_CASE("backlog threshold arithmetic", "[pricing]") {
  FeasibleRegion region = reference_region();
  CHECK(indifference_price(kDefaults) == Approx(0.42).margin(1e-12));
  // X* = V (x_u 0.42 - x_l 0.5) / (x_u - x_l) - V 0.2, by hand for V = 20
  double by_hand =
      20.0 * (0.72978 * 0.42 - 0.49953 * 0.5) / (0.72978 - 0.49953) - 20.0 * 0.2;
  CHECK(backlog_threshold(20.0, region, kDefaults) == Approx(by_hand).margin(1e-12));
  CHECK(by_hand == Approx(0.9287).margin(1e-3));
}

TEST_CASE("optimal price thresholds on the backlog", "[pricing]") {
  FeasibleRegion region = reference_region();
  CHECK(optimal_price(0.0, 20.0, region, kDefaults) == Approx(0.42));
  double x_star = backlog_threshold(20.0, region, kDefaults);
  CHECK(optimal_price(x_star, 20.0, region, kDefaults) == Approx(0.42));  // tie -> low price
  CHECK(optimal_price(x_star + 1e-9, 20.0, region, kDefaults) == Approx(0.5));
  CHECK(optimal_price(1e6, 20.0, region, kDefaults) == Approx(0.5));
  // V -> 0+ collapses the threshold; any positive backlog pays p_u
  CHECK(optimal_price(1e-9, 1e-9, region, kDefaults) == Approx(0.5));
}

TEST_CASE("threshold structure requires a usable low price", "[pricing]") {
  FeasibleRegion region = reference_region();
  SystemParams broken = kDefaults;
  broken.rho_c_m = 0.1;  // indifference price 0.1 - 0.48 < 0
  CHECK_THROWS_AS(backlog_threshold(20.0, region, broken), std::invalid_argument);
}

TEST_CASE("service utility arithmetic", "[pricing]") {
  CHECK(service_utility(0.0, 0.42, kDefaults) == 0.0);
  CHECK(service_utility(0.72978, 0.42, kDefaults) ==
        Approx(0.9 * 0.72978 * 0.22).margin(1e-12));
  CHECK(service_utility(0.6, 0.2, kDefaults) == Approx(0.0).margin(1e-12));  // margin zero
}

TEST_CASE("queue bound composition and V scaling", "[pricing]") {
  FeasibleRegion region = reference_region();
  double x_star = backlog_threshold(20.0, region, kDefaults);
  CHECK(queue_bound(20.0, region, kDefaults) ==
        Approx(x_star + 0.72978 * 0.9 - 0.6).margin(1e-12));
  CHECK(queue_bound(40.0, region, kDefaults) - queue_bound(20.0, region, kDefaults) ==
        Approx(x_star).margin(1e-12));
  CHECK(queue_bound(1e-12, region, kDefaults) ==
        Approx(0.72978 * 0.9 - 0.6).margin(1e-9));
}

TEST_CASE("constant pricing keeps the queue empty", "[pricing]") {
  SlotTrace tr =
      run_horizon(200, 20.0, PricingPolicy::ConstantPO, reference_region(), kDefaults);
  for (int n = 0; n < 200; ++n) {
    CHECK(tr.x[n] == Approx(0.49953));
    CHECK(tr.backlog[n] == 0.0);
  }
}

TEST_CASE("threshold policy respects the backlog bound", "[pricing]") {
  FeasibleRegion region = reference_region();
  for (double v : {5.0, 20.0, 100.0}) {
    SlotTrace tr = run_horizon(2000, v, PricingPolicy::OptimalPO, region, kDefaults);
    double bound = queue_bound(v, region, kDefaults);
    CHECK(tr.max_backlog() <= bound);
    // the recurrence is reproduced exactly
    for (int n = 0; n + 1 < 2000; ++n)
      CHECK(tr.backlog[n + 1] == queue_update(tr.backlog[n], tr.x[n], kDefaults));
  }
}

TEST_CASE("long-run offload rate meets the overload cap", "[pricing]") {
  FeasibleRegion region = reference_region();
  SlotTrace tr = run_horizon(10000, 20.0, PricingPolicy::OptimalPO, region, kDefaults);
  CHECK(tr.avg_offload_rate(kDefaults.lambda) <= kDefaults.x_bar + 1e-3);
  SlotTrace cp = run_horizon(10000, 20.0, PricingPolicy::ConstantPO, region, kDefaults);
  CHECK(cp.avg_offload_rate(kDefaults.lambda) <= kDefaults.x_bar + 1e-3);
}

TEST_CASE("randomized policy needs the cap inside the offload range", "[pricing]") {
  FeasibleRegion region = reference_region();
  SystemParams outside = kDefaults;
  outside.x_bar = 0.2;  // below x_l lambda
  CHECK_THROWS_AS(run_horizon(10, 20.0, PricingPolicy::AdaptedPO, region, outside),
                  std::invalid_argument);
}

TEST_CASE("per-slot drift-minus-utility bound holds", "[pricing]") {
  FeasibleRegion region = reference_region();
  double d_const = drift_bound_constant(kDefaults);
  for (PricingPolicy policy :
       {PricingPolicy::OptimalPO, PricingPolicy::ConstantPO, PricingPolicy::AdaptedPO}) {
    SlotTrace tr = run_horizon(500, 20.0, policy, region, kDefaults, 9);
    for (int n = 0; n < 500; ++n) {
      double x_next = queue_update(tr.backlog[n], tr.x[n], kDefaults);
      double lhs = 0.5 * x_next * x_next - 0.5 * tr.backlog[n] * tr.backlog[n] -
                   20.0 * tr.utility[n];
      double rhs = tr.backlog[n] * (tr.x[n] * kDefaults.lambda - kDefaults.x_bar) -
                   20.0 * (tr.x[n] * kDefaults.lambda * tr.price[n] -
                           tr.x[n] * kDefaults.lambda * kDefaults.rho_c_s / kDefaults.gamma) +
                   d_const;
      CHECK(lhs <= rhs + 1e-12);
    }
  }
}

TEST_CASE("randomized baseline expectations", "[pricing]") {
  FeasibleRegion region = reference_region();
  // q = (0.6 - 0.49953*0.9) / ((0.72978 - 0.49953) * 0.9)
  double q = (0.6 - 0.49953 * 0.9) / ((0.72978 - 0.49953) * 0.9);
  CHECK(low_price_probability(region, kDefaults) == Approx(q).margin(1e-12));
  double eu = q * service_utility(0.72978, 0.42, kDefaults) +
              (1 - q) * service_utility(0.49953, 0.5, kDefaults);
  CHECK(adapted_expected_utility(region, kDefaults) == Approx(eu).margin(1e-12));
  double ec = q * system_cost(0.72978, 0.42, kDefaults) +
              (1 - q) * system_cost(0.49953, 0.5, kDefaults);
  CHECK(adapted_expected_cost(region, kDefaults) == Approx(ec).margin(1e-12));

  // the long-horizon sample mean approaches the expectation
  SlotTrace tr = run_horizon(200000, 20.0, PricingPolicy::AdaptedPO, region, kDefaults, 5);
  CHECK(tr.avg_utility() == Approx(eu).margin(2e-4));
  CHECK(tr.avg_cost() == Approx(ec).margin(2e-3));
}

TEST_CASE("analytic slot cost agrees with a measured run", "[pricing]") {
  auto profile = DegreeProfile::uniform(6, 9);
  SlotCostCrossCheck check =
      cross_check_slot_cost(0.5, 0.45, kDefaults, profile, 400, 120.0, 11);
  CHECK(check.busy_measured == Approx(0.45).margin(0.02));          // x_c lambda / mu
  CHECK(check.offload_rate_measured == Approx(0.45).margin(0.02));  // x lambda
  CHECK(check.simulated == Approx(check.analytic).margin(0.03));
}

TEST_CASE("policy ordering at a fixed weight", "[pricing]") {
  FeasibleRegion region = reference_region();
  const int t_slots = 100;
  SlotTrace opt = run_horizon(t_slots, 50.0, PricingPolicy::OptimalPO, region, kDefaults);
  SlotTrace con = run_horizon(t_slots, 50.0, PricingPolicy::ConstantPO, region, kDefaults);
  double adapted_utility = 0.0, adapted_cost = 0.0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    SlotTrace ad = run_horizon(t_slots, 50.0, PricingPolicy::AdaptedPO, region, kDefaults, seed);
    adapted_utility += ad.avg_utility() / 8.0;
    adapted_cost += ad.avg_cost() / 8.0;
  }
  CHECK(opt.avg_utility() > con.avg_utility());
  CHECK(opt.avg_utility() > adapted_utility);
  CHECK(opt.avg_cost() < con.avg_cost());
  CHECK(opt.avg_cost() < adapted_cost);
}
