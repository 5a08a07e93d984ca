#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "mfedge/errors.hpp"
#include "mfedge/offload.hpp"
#include "mfedge/rng.hpp"
#include "mfedge/simulator.hpp"

namespace mfedge {

// Virtual queue buffering the overload constraint: arrivals x[n] lambda,
// departures x_bar, clamped at zero.
inline double queue_update(double backlog, double x, const SystemParams& params) {
  if (backlog < 0.0) throw std::invalid_argument("queue_update: backlog must be >= 0");
  return std::max(backlog + x * params.lambda - params.x_bar, 0.0);
}

// Constant D = max( (lambda - x_bar)^2 / 2, x_bar^2 / 2 ) bounding the
// quadratic part of the per-slot drift.
inline double drift_bound_constant(const SystemParams& params) {
  double a = params.lambda - params.x_bar;
  return std::max(0.5 * a * a, 0.5 * params.x_bar * params.x_bar);
}

// Price at which offloading and local processing cost the same per task.
inline double indifference_price(const SystemParams& params) {
  return params.rho_c_m / (params.mu * params.mu) - params.rho_t_m * params.tx_time();
}

// Backlog threshold X* of the drift-minus-utility minimizer.
inline double backlog_threshold(double v_weight, const FeasibleRegion& region,
                                const SystemParams& params) {
  if (!(v_weight > 0.0)) throw std::invalid_argument("backlog_threshold: V must be positive");
  if (!(region.x_l < region.x_u))
    throw std::invalid_argument("backlog_threshold: requires x_l < x_u");
  double low = indifference_price(params);
  if (low <= 0.0 || low > params.p_u)
    throw std::invalid_argument(
        "backlog_threshold: indifference price must lie in (0, p_u] for the threshold policy");
  return v_weight * (region.x_u * low - region.x_l * params.p_u) / (region.x_u - region.x_l) -
         v_weight * params.rho_c_s / params.gamma;
}

// Leader's slot price: the low (indifference) price while the backlog is at
// or below X*, the highest acceptable price once it exceeds it.
inline double optimal_price(double backlog, double v_weight, const FeasibleRegion& region,
                            const SystemParams& params) {
  return backlog <= backlog_threshold(v_weight, region, params) ? indifference_price(params)
                                                                : params.p_u;
}

// Server utility rate: offload revenue minus server processing energy.
inline double service_utility(double x, double price, const SystemParams& params) {
  return x * params.lambda * price - x * params.lambda * params.rho_c_s / params.gamma;
}

// Deterministic backlog cap of the threshold policy: X* plus one maximal
// arrival overshoot.
inline double queue_bound(double v_weight, const FeasibleRegion& region,
                          const SystemParams& params) {
  return backlog_threshold(v_weight, region, params) + region.x_u * params.lambda - params.x_bar;
}

enum class PricingPolicy { OptimalPO, ConstantPO, AdaptedPO };

// Probability that the randomized baseline posts the low price; balances the
// expected offload rate with the overload cap.
inline double low_price_probability(const FeasibleRegion& region, const SystemParams& params) {
  double lo = region.x_l * params.lambda, hi = region.x_u * params.lambda;
  double q = (params.x_bar - lo) / (hi - lo);
  if (q < 0.0 || q > 1.0)
    throw std::invalid_argument(
        "low_price_probability: requires x_bar in [x_l lambda, x_u lambda]");
  return q;
}

// Exact per-slot expectations of the randomized baseline (its only noise is
// the two-valued price draw, so the average is a closed form).
inline double adapted_expected_utility(const FeasibleRegion& region, const SystemParams& params) {
  double q = low_price_probability(region, params);
  return q * service_utility(region.x_u, indifference_price(params), params) +
         (1.0 - q) * service_utility(region.x_l, params.p_u, params);
}

inline double adapted_expected_cost(const FeasibleRegion& region, const SystemParams& params) {
  double q = low_price_probability(region, params);
  return q * system_cost(region.x_u, indifference_price(params), params) +
         (1.0 - q) * system_cost(region.x_l, params.p_u, params);
}

inline const char* policy_name(PricingPolicy p) {
  switch (p) {
    case PricingPolicy::OptimalPO: return "OptimalPO";
    case PricingPolicy::ConstantPO: return "ConstantPO";
    case PricingPolicy::AdaptedPO: return "AdaptedPO";
  }
  return "?";
}

// Per-slot record of the pricing game; backlog[n] is the start-of-slot value
// and obeys the virtual-queue recurrence exactly.
struct SlotTrace {
  PricingPolicy policy = PricingPolicy::OptimalPO;
  double v_weight = 0.0;
  std::vector<double> price, x, backlog, utility, cost;
  double final_backlog = 0.0;

  double avg_utility() const { return avg(utility); }
  double avg_cost() const { return avg(cost); }
  double avg_offload_rate(double lambda) const { return avg(x) * lambda; }
  double max_backlog() const {
    double m = final_backlog;
    for (double b : backlog) m = std::max(m, b);
    return m;
  }

 private:
  static double avg(const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e;
    return v.empty() ? 0.0 : s / v.size();
  }
};

// Optional cross-check of the analytic slot cost: run the Po2 simulator at
// offload probability x and recompute the cost from measured quantities
// (late-window busy fraction, observed offload rate) instead of the
// stationary-point identities.
struct SlotCostCrossCheck {
  double analytic = 0.0;
  double simulated = 0.0;
  double busy_measured = 0.0;
  double offload_rate_measured = 0.0;
};

inline SlotCostCrossCheck cross_check_slot_cost(double x, double price,
                                                const SystemParams& params,
                                                const DegreeProfile& profile, int n_users,
                                                double t_end, std::uint64_t seed) {
  SimConfig sim;
  sim.n_users = n_users;
  sim.profile = profile;
  sim.lambda = params.lambda;
  sim.mu = params.mu;
  sim.x = x;
  sim.t_end = t_end;
  sim.seed = seed;
  SimResult run = run_simulation(sim);

  SlotCostCrossCheck check;
  check.analytic = system_cost(x, price, params);
  double busy = 0.0, weight = 0.0;
  for (const auto& [k, members] : run.snapshots.back().s_hat) {
    (void)members;
    int size = run.snapshots.back().class_size.at(k);
    busy += size * late_window_average(run, k, 1);
    weight += size;
  }
  check.busy_measured = busy / weight;
  check.offload_rate_measured =
      static_cast<double>(run.totals.offloaded) / (n_users * run.snapshots.back().time);
  check.simulated = check.offload_rate_measured * price +
                    check.busy_measured * params.rho_c_m / params.mu +
                    check.offload_rate_measured * params.rho_t_m * params.tx_time();
  return check;
}

// Run the pricing game for T slots.  OptimalPO follows the backlog
// threshold, ConstantPO always posts p_u, AdaptedPO randomizes between the
// two prices at the rate that balances the overload constraint.  Users
// respond with the endpoint decision each slot.
inline SlotTrace run_horizon(int t_slots, double v_weight, PricingPolicy policy,
                             const FeasibleRegion& region, const SystemParams& params,
                             std::uint64_t seed = 1) {
  if (t_slots < 1) throw std::invalid_argument("run_horizon: t_slots must be >= 1");
  double low_price_prob = 0.0;
  if (policy == PricingPolicy::AdaptedPO) {
    low_price_prob = low_price_probability(region, params);
    double low = indifference_price(params);
    if (low <= 0.0 || low > params.p_u)
      throw std::invalid_argument("run_horizon: indifference price must lie in (0, p_u]");
  }

  Rng rng(seed);
  SlotTrace trace;
  trace.policy = policy;
  trace.v_weight = v_weight;
  trace.price.reserve(t_slots);
  double backlog = 0.0;
  for (int n = 0; n < t_slots; ++n) {
    double price = 0.0;
    switch (policy) {
      case PricingPolicy::OptimalPO:
        price = optimal_price(backlog, v_weight, region, params);
        break;
      case PricingPolicy::ConstantPO:
        price = params.p_u;
        break;
      case PricingPolicy::AdaptedPO:
        price = coin(rng, low_price_prob) ? indifference_price(params) : params.p_u;
        break;
    }
    double x = offload_decision(price, region, params);
    trace.price.push_back(price);
    trace.x.push_back(x);
    trace.backlog.push_back(backlog);
    trace.utility.push_back(service_utility(x, price, params));
    trace.cost.push_back(system_cost(x, price, params));
    backlog = queue_update(backlog, x, params);
  }
  trace.final_backlog = backlog;
  return trace;
}

}  // namespace mfedge
