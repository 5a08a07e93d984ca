// Compute the feasible offloading region, then run the three pricing
// policies for a short horizon and compare their averages.

#include <cstdio>

#include "mfedge/offload.hpp"
#include "mfedge/pricing.hpp"

int main() {
  using namespace mfedge;
  SystemParams params;
  auto profile = DegreeProfile::uniform(6, 9);

  FeasibleRegion region = feasible_region(params, profile, 1e-4);
  std::printf("delay interval [%.5f, %.5f], fairness crossings %.5f / %.5f\n", region.x_l_star,
              region.x_u_star, region.x_prime_l, region.x_prime_u);
  std::printf("selected region [%.5f, %.5f]\n", region.x_l, region.x_u);

  const double v = 20.0;
  const int t_slots = 100;
  std::printf("%-10s %12s %12s %10s %10s\n", "policy", "avg utility", "avg cost", "max X",
              "bound");
  for (PricingPolicy policy :
       {PricingPolicy::OptimalPO, PricingPolicy::ConstantPO, PricingPolicy::AdaptedPO}) {
    SlotTrace tr = run_horizon(t_slots, v, policy, region, params, 1);
    std::printf("%-10s %12.5f %12.5f %10.4f %10.4f\n", policy_name(policy), tr.avg_utility(),
                tr.avg_cost(), tr.max_backlog(), queue_bound(v, region, params));
  }
  return 0;
}
