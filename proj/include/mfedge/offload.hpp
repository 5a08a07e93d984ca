#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mfedge/degree_profile.hpp"
#include "mfedge/errors.hpp"
#include "mfedge/meanfield.hpp"
#include "mfedge/search.hpp"

namespace mfedge {

// Scalar rates, costs and caps of the offloading game.  Rates and times are
// in normalized units (1 = one mean device service time); B/r must come out
// in the same units.
struct SystemParams {
  double lambda = 0.9;  // task generation rate per user
  double mu = 1.0;      // device service rate
  double gamma = 5.0;   // edge server service rate
  double data_size_bits = 1.6e7;  // B, mean task data size
  double uplink_rate = 1.0e7;     // r, cellular uplink in bits per unit time
  double rho_c_m = 0.9;  // device compute energy cost
  double rho_t_m = 0.3;  // device transmit energy cost
  double rho_c_s = 1.0;  // server compute energy cost
  double d_bar = 1.6;    // task delay cap
  double s_bar = 0.06;   // fairness cap on the busy-probability gap
  double x_bar = 0.6;    // server overload cap (offloaded tasks per unit time)
  double p_u = 0.5;      // highest price users accept

  double tx_time() const { return data_size_bits / uplink_rate; }  // B/r

  void validate() const {
    auto pos = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!pos(lambda) || !pos(mu) || !pos(gamma) || !pos(data_size_bits) || !pos(uplink_rate) ||
        !pos(rho_c_m) || !pos(rho_t_m) || !pos(rho_c_s) || !pos(d_bar) || !pos(s_bar) ||
        !pos(x_bar) || !pos(p_u))
      throw std::invalid_argument("SystemParams: all fields must be positive and finite");
    if (lambda >= mu) throw std::invalid_argument("SystemParams: requires lambda < mu");
  }
};

// Average task delay at offload probability x: transmission plus server time
// for the offloaded share, queueing sojourn of the collaborative share.
inline double task_delay(double x, const SystemParams& params, const DegreeProfile& profile,
                         double sp_tol = 1e-6) {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("task_delay: x must be in [0,1]");
  double d_offload = x * (params.tx_time() + 1.0 / params.gamma);
  if (x == 1.0) return d_offload;
  StationaryPoint sp = stationary_point(profile, params.lambda, params.mu, 1.0 - x, sp_tol);
  return d_offload + sp.mean_workload / params.lambda;
}

// Busy-probability spread s*_{k_max,1} - s*_{k_min,1}; the extremes sit at
// the extreme degrees because larger-degree users carry heavier workloads.
inline double fairness_gap(double x, const SystemParams& params, const DegreeProfile& profile,
                           double sp_tol = 1e-6) {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("fairness_gap: x must be in [0,1]");
  if (x == 1.0) return 0.0;
  StationaryPoint sp = stationary_point(profile, params.lambda, params.mu, 1.0 - x, sp_tol);
  int last = sp.s_star.n_classes - 1;
  return sp.s_star.at(last, 1) - sp.s_star.at(0, 1);
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Offload probabilities meeting the delay cap: golden-section search finds
// the interior minimum of d(x), then bisection on each monotone side locates
// the crossings with d_bar.
inline Interval find_delay_interval(const SystemParams& params, const DegreeProfile& profile,
                                    double tol = 1e-4, double sp_tol = 1e-6) {
  auto d = [&](double x) { return task_delay(x, params, profile, sp_tol); };
  double x_min = golden_section_minimize(d, 0.0, 1.0, tol * 0.1);
  if (d(x_min) > params.d_bar)
    throw infeasible_error("find_delay_interval: delay cap is below the minimum achievable delay");
  Interval iv;
  double d0 = d(0.0), d1 = d(1.0);
  iv.lo = d0 <= params.d_bar
              ? 0.0
              : bisect_root([&](double x) { return d(x) - params.d_bar; }, 0.0, x_min, tol);
  iv.hi = d1 <= params.d_bar
              ? 1.0
              : bisect_root([&](double x) { return d(x) - params.d_bar; }, x_min, 1.0, tol);
  return iv;
}

// Fairness-feasible set [0, x_prime_l] U [x_prime_u, 1]; `full` marks the
// degenerate case where the cap never binds.
struct FairnessRegion {
  double x_prime_l = 1.0;
  double x_prime_u = 1.0;
  bool full = false;
  std::vector<std::string> warnings;
};

inline FairnessRegion find_fairness_region(const SystemParams& params,
                                           const DegreeProfile& profile, double tol = 1e-4,
                                           double sp_tol = 1e-6, int grid_points = 101) {
  auto g = [&](double x) { return fairness_gap(x, params, profile, sp_tol) - params.s_bar; };

  // Grid scan: locates crossing brackets and validates the single-peak
  // assumption; multiple crossing pairs are reported, not hidden.
  std::vector<double> xs(grid_points), gs(grid_points);
  for (int j = 0; j < grid_points; ++j) {
    xs[j] = static_cast<double>(j) / (grid_points - 1);
    gs[j] = g(xs[j]);
  }
  if (gs.front() > 0.0 || gs.back() > 0.0)
    throw infeasible_error("find_fairness_region: fairness cap violated at an endpoint");

  std::vector<double> crossings;
  for (int j = 0; j + 1 < grid_points; ++j) {
    if ((gs[j] > 0.0) == (gs[j + 1] > 0.0)) continue;
    crossings.push_back(bisect_root(g, xs[j], xs[j + 1], tol));
  }

  FairnessRegion region;
  if (crossings.empty()) {
    region.full = true;
    region.x_prime_l = 1.0;
    region.x_prime_u = 1.0;
    return region;
  }
  if (crossings.size() > 2)
    region.warnings.push_back("fairness gap crosses the cap more than twice; using the outermost pair");
  region.x_prime_l = crossings.front();
  region.x_prime_u = crossings.back();
  return region;
}

// Which component of the delay/fairness intersection to expose when it has
// two pieces.
enum class IntervalChoice { HighestX, LowestX };

struct FeasibleRegion {
  double x_l_star = 0.0, x_u_star = 1.0;    // delay interval
  double x_prime_l = 1.0, x_prime_u = 1.0;  // fairness crossings
  bool fairness_full = false;
  std::vector<Interval> intersection;
  double x_l = 0.0, x_u = 1.0;  // endpoints of the selected interval
  std::vector<std::string> warnings;
};

inline FeasibleRegion feasible_region(const SystemParams& params, const DegreeProfile& profile,
                                      double tol = 1e-4, double sp_tol = 1e-6,
                                      IntervalChoice choice = IntervalChoice::HighestX) {
  params.validate();
  Interval delay = find_delay_interval(params, profile, tol, sp_tol);
  FairnessRegion fair = find_fairness_region(params, profile, tol, sp_tol);

  FeasibleRegion region;
  region.x_l_star = delay.lo;
  region.x_u_star = delay.hi;
  region.x_prime_l = fair.x_prime_l;
  region.x_prime_u = fair.x_prime_u;
  region.fairness_full = fair.full;
  region.warnings = fair.warnings;

  if (fair.full) {
    region.intersection.push_back(delay);
  } else {
    if (delay.lo <= fair.x_prime_l)
      region.intersection.push_back({delay.lo, std::min(delay.hi, fair.x_prime_l)});
    if (delay.hi >= fair.x_prime_u)
      region.intersection.push_back({std::max(delay.lo, fair.x_prime_u), delay.hi});
  }
  if (region.intersection.empty())
    throw infeasible_error("feasible_region: delay and fairness constraints cannot both hold");

  const Interval& picked = choice == IntervalChoice::HighestX ? region.intersection.back()
                                                              : region.intersection.front();
  region.x_l = picked.lo;
  region.x_u = picked.hi;
  return region;
}

// Followers' best response: the per-task offload cost p + rho_t_m B/r is
// weighed against the local processing cost rho_c_m / mu^2; the optimum of
// the affine cost sits at an endpoint of the feasible interval.
inline double offload_decision(double price, const FeasibleRegion& region,
                               const SystemParams& params) {
  double local_cost = params.rho_c_m / (params.mu * params.mu);
  return local_cost >= price + params.rho_t_m * params.tx_time() ? region.x_u : region.x_l;
}

// Per-user system cost rate: charged fee + local processing + uplink energy.
inline double system_cost(double x, double price, const SystemParams& params) {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("system_cost: x must be in [0,1]");
  return x * params.lambda * price +
         (1.0 - x) * params.lambda * params.rho_c_m / (params.mu * params.mu) +
         x * params.lambda * params.rho_t_m * params.tx_time();
}

}  // namespace mfedge
