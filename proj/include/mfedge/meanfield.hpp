#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mfedge/degree_profile.hpp"
#include "mfedge/errors.hpp"
#include "mfedge/rng.hpp"

namespace mfedge {

// Workload tail matrix: entry (k, i) is the probability that a user of
// degree class k holds at least i tasks.  Row i = 0 is identically 1 and the
// tails are non-increasing in i.  Entries beyond the truncation depth are
// treated as 0.
struct MeanFieldState {
  int n_classes = 0;
  int i_max = 0;
  std::vector<double> tails;  // [kc * (i_max + 1) + i]

  double at(int kc, int i) const {
    return i > i_max ? 0.0 : tails[static_cast<std::size_t>(kc) * (i_max + 1) + i];
  }
  double& ref(int kc, int i) { return tails[static_cast<std::size_t>(kc) * (i_max + 1) + i]; }

  // All queues empty: s_{k,0} = 1, s_{k,i} = 0 for i >= 1.
  static MeanFieldState empty(int n_classes, int i_max) {
    MeanFieldState s{n_classes, i_max, std::vector<double>((i_max + 1) * n_classes, 0.0)};
    for (int kc = 0; kc < n_classes; ++kc) s.ref(kc, 0) = 1.0;
    return s;
  }

  // All queues at least i_max deep: every tail equals 1.
  static MeanFieldState saturated(int n_classes, int i_max) {
    return MeanFieldState{n_classes, i_max, std::vector<double>((i_max + 1) * n_classes, 1.0)};
  }

  double sup_distance(const MeanFieldState& other) const {
    double d = 0.0;
    for (std::size_t j = 0; j < tails.size(); ++j)
      d = std::max(d, std::abs(tails[j] - other.tails[j]));
    return d;
  }

  // Largest violation of the tail invariants (range and monotonicity).
  double invariant_violation() const {
    double v = 0.0;
    for (int kc = 0; kc < n_classes; ++kc) {
      v = std::max(v, std::abs(at(kc, 0) - 1.0));
      for (int i = 0; i <= i_max; ++i) {
        double s = at(kc, i);
        v = std::max({v, -s, s - 1.0, at(kc, i + 1) - s});
      }
    }
    return v;
  }
};

// Time derivative of the state; row i = 0 is identically zero.
struct Drift {
  int n_classes = 0;
  int i_max = 0;
  std::vector<double> f;

  double at(int kc, int i) const {
    return f[static_cast<std::size_t>(kc) * (i_max + 1) + i];
  }
  double sup_norm() const {
    double m = 0.0;
    for (double x : f) m = std::max(m, std::abs(x));
    return m;
  }
};

namespace detail {

// Per-level aggregates a_i = sum_k p(k) s_{k,i} and b_i = sum_k p(k) k s_{k,i};
// level i_max + 1 is the truncation closure (zeros).
struct Aggregates {
  std::vector<double> a, b;
};

inline Aggregates level_aggregates(const MeanFieldState& s, const DegreeProfile& profile) {
  Aggregates agg;
  agg.a.assign(s.i_max + 2, 0.0);
  agg.b.assign(s.i_max + 2, 0.0);
  for (int i = 0; i <= s.i_max; ++i)
    for (int kc = 0; kc < s.n_classes; ++kc) {
      double w = profile.pmf()[kc] * s.at(kc, i);
      agg.a[i] += w;
      agg.b[i] += w * profile.support()[kc];
    }
  return agg;
}

// Poll factor z_{k,i} = 0.5 sum_{k'} ((k'+k)/k_bar) p(k') (s_{k',i-1} + s_{k',i}).
inline double poll_factor(const Aggregates& agg, double k, double k_bar, int i) {
  return 0.5 * ((agg.b[i - 1] + agg.b[i]) + k * (agg.a[i - 1] + agg.a[i])) / k_bar;
}

inline void check_shape(const MeanFieldState& s, const DegreeProfile& profile) {
  if (s.n_classes != static_cast<int>(profile.size()))
    throw std::invalid_argument("mean field state shape does not match degree profile");
}

}  // namespace detail

// Drift of the tail ODE system.  For i >= 1:
//   F_{k,i} = -mu (s_{k,i} - s_{k,i+1}) + x_c lambda (s_{k,i-1} - s_{k,i}) z_{k,i}
// with s_{k,i_max+1} == 0 as the truncation closure.
inline Drift drift(const MeanFieldState& s, const DegreeProfile& profile, double lambda,
                   double mu, double x_c) {
  detail::check_shape(s, profile);
  if (x_c < 0.0 || x_c > 1.0) throw std::invalid_argument("drift: x_c must be in [0,1]");
  if (lambda <= 0.0 || mu <= 0.0) throw std::invalid_argument("drift: rates must be positive");
  const double k_bar = profile.mean_degree();
  const auto agg = detail::level_aggregates(s, profile);
  Drift d{s.n_classes, s.i_max, std::vector<double>(s.tails.size(), 0.0)};
  for (int i = 1; i <= s.i_max; ++i)
    for (int kc = 0; kc < s.n_classes; ++kc) {
      double z = detail::poll_factor(agg, profile.support()[kc], k_bar, i);
      double arrive = x_c * lambda * (s.at(kc, i - 1) - s.at(kc, i)) * z;
      double serve = mu * (s.at(kc, i) - s.at(kc, i + 1));
      d.f[static_cast<std::size_t>(kc) * (s.i_max + 1) + i] = arrive - serve;
    }
  return d;
}

namespace detail {

// One classical RK4 step in place; returns the pre-projection invariant
// violation of the new state.
inline double rk4_step(MeanFieldState& s, const DegreeProfile& profile, double lambda, double mu,
                       double x_c, double dt) {
  auto axpy = [&](const MeanFieldState& base, const Drift& k, double c) {
    MeanFieldState out = base;
    for (std::size_t j = 0; j < out.tails.size(); ++j) out.tails[j] += c * k.f[j];
    return out;
  };
  Drift k1 = drift(s, profile, lambda, mu, x_c);
  Drift k2 = drift(axpy(s, k1, dt / 2), profile, lambda, mu, x_c);
  Drift k3 = drift(axpy(s, k2, dt / 2), profile, lambda, mu, x_c);
  Drift k4 = drift(axpy(s, k3, dt), profile, lambda, mu, x_c);
  for (std::size_t j = 0; j < s.tails.size(); ++j)
    s.tails[j] += dt / 6.0 * (k1.f[j] + 2 * k2.f[j] + 2 * k3.f[j] + k4.f[j]);

  double violation = s.invariant_violation();
  for (double x : s.tails)
    if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
  // Project back onto the valid set (row 0 pinned at 1, tails monotone in [0,1]).
  for (int kc = 0; kc < s.n_classes; ++kc) {
    s.ref(kc, 0) = 1.0;
    for (int i = 1; i <= s.i_max; ++i)
      s.ref(kc, i) = std::clamp(s.at(kc, i), 0.0, s.at(kc, i - 1));
  }
  return violation;
}

template <class OnSample>
inline void rk4_run(MeanFieldState& s, const DegreeProfile& profile, double lambda, double mu,
                    double x_c, double t_end, double dt, OnSample&& on_sample) {
  if (dt <= 0.0 || t_end <= 0.0)
    throw std::invalid_argument("integrate: t_end and dt must be positive");
  const long n_steps = static_cast<long>(std::ceil(t_end / dt - 1e-12));
  for (long step = 0; step < n_steps; ++step) {
    double violation = rk4_step(s, profile, lambda, mu, x_c, dt);
    if (!std::isfinite(violation))
      throw numerical_error("integrate: state blew up (NaN/Inf)");
    if (violation > 1e-9)
      throw numerical_error("integrate: tail invariant violated by " + std::to_string(violation));
    on_sample((step + 1) * dt, s);
  }
}

}  // namespace detail

// Fixed-step RK4 trajectory; returns the state at t = 0, dt, 2 dt, ...
// covering t_end.  Throws numerical_error on blow-up or invariant violations
// beyond projection tolerance.
inline std::vector<MeanFieldState> integrate(const MeanFieldState& state0,
                                             const DegreeProfile& profile, double lambda,
                                             double mu, double x_c, double t_end, double dt) {
  detail::check_shape(state0, profile);
  std::vector<MeanFieldState> trajectory;
  trajectory.reserve(static_cast<std::size_t>(t_end / dt) + 2);
  trajectory.push_back(state0);
  MeanFieldState s = state0;
  detail::rk4_run(s, profile, lambda, mu, x_c, t_end, dt,
                  [&](double, const MeanFieldState& cur) { trajectory.push_back(cur); });
  return trajectory;
}

inline double stability_margin(const DegreeProfile& profile, double lambda, double mu,
                               double x_c) {
  return (1.0 + profile.delta1()) / 2.0 * x_c * lambda / mu;
}

// Closed-form sandwich for the stationary tails:
//   ((1+delta2)/2 * rho)^(2^i - 1)  <=  s*_{k,i}  <=  ((1+delta1)/2 * rho)^(2^i - 1).
inline std::pair<double, double> stationary_tail_bounds(const DegreeProfile& profile,
                                                        double lambda, double mu, double x_c,
                                                        int i) {
  double rho = x_c * lambda / mu;
  double hi_base = (1.0 + profile.delta1()) / 2.0 * rho;
  double lo_base = (1.0 + profile.delta2()) / 2.0 * rho;
  if (hi_base >= 1.0)
    throw infeasible_error("stationary_tail_bounds: stability requires (1+delta1)/2 * rho < 1");
  double e = std::pow(2.0, i) - 1.0;
  return {std::pow(lo_base, e), std::pow(hi_base, e)};
}

// Truncation depth at which the upper tail bound drops below 1e-12
// (floor 4, cap 32); tails decay doubly exponentially past it.
inline int suggested_truncation(const DegreeProfile& profile, double lambda, double mu,
                                double x_c) {
  double hi_base = stability_margin(profile, lambda, mu, x_c);
  for (int i = 4; i < 32; ++i) {
    if (std::pow(hi_base, std::pow(2.0, i) - 1.0) < 1e-12) return i;
  }
  return 32;
}

// Zero-drift state with its aggregates.  s_i = sum_k p(k) s*_{k,i} and
// s_k_i = sum_k p(k) k s*_{k,i} per level.
struct StationaryPoint {
  MeanFieldState s_star;
  double x_c = 0.0;
  std::vector<double> s_i;
  std::vector<double> s_k_i;
  double busy = 0.0;           // s_1
  double mean_workload = 0.0;  // sum_{i>=1} s_i
  double residual = 0.0;       // ||F(s*)||_inf
  double ode_gap = 0.0;        // sup distance to the long-horizon ODE solve
  int iterations = 0;
};

// Stationary point by fixed-point iteration
//   s_{k,i} <- (x_c lambda s_{k,i-1} z_{k,i} + mu s_{k,i+1}) / (x_c lambda z_{k,i} + mu)
// from the empty state, cross-checked against an adaptive-horizon RK4 solve;
// the two routes must agree within 10*tol.
inline StationaryPoint stationary_point(const DegreeProfile& profile, double lambda, double mu,
                                        double x_c, double tol = 1e-9, int i_max = 0,
                                        double dt = 0.01) {
  if (tol <= 0.0) throw std::invalid_argument("stationary_point: tol must be positive");
  if (x_c < 0.0 || x_c > 1.0) throw std::invalid_argument("stationary_point: x_c in [0,1]");
  if (lambda <= 0.0 || mu <= 0.0)
    throw std::invalid_argument("stationary_point: rates must be positive");
  if (stability_margin(profile, lambda, mu, x_c) >= 1.0)
    throw infeasible_error("stationary_point: stability requires (1+delta1)/2 * x_c*lambda/mu < 1");
  if (i_max <= 0) i_max = suggested_truncation(profile, lambda, mu, x_c);

  const int n_classes = static_cast<int>(profile.size());
  const double k_bar = profile.mean_degree();
  const int max_iterations = 100000;

  MeanFieldState s = MeanFieldState::empty(n_classes, i_max);
  MeanFieldState next = s;
  double residual = std::numeric_limits<double>::infinity();
  int iter = 0;
  bool converged = false;
  while (iter < max_iterations) {
    ++iter;
    const auto agg = detail::level_aggregates(s, profile);
    double change = 0.0;
    for (int i = 1; i <= i_max; ++i)
      for (int kc = 0; kc < n_classes; ++kc) {
        double z = detail::poll_factor(agg, profile.support()[kc], k_bar, i);
        double updated =
            (x_c * lambda * s.at(kc, i - 1) * z + mu * s.at(kc, i + 1)) / (x_c * lambda * z + mu);
        change = std::max(change, std::abs(updated - s.at(kc, i)));
        next.ref(kc, i) = updated;
      }
    std::swap(s, next);
    if (change < tol / 10.0) {
      residual = drift(s, profile, lambda, mu, x_c).sup_norm();
      if (residual < tol) {
        converged = true;
        break;
      }
    }
  }
  if (!converged)
    throw numerical_error("stationary_point: no convergence in " +
                          std::to_string(max_iterations) + " iterations");

  // Independent route: integrate the ODE from the empty (dominated) state
  // until the flow settles, then compare.  The contraction rate scales like
  // mu - x_c lambda, so the horizon is adaptive with a rate-aware cap.
  MeanFieldState ode = MeanFieldState::empty(n_classes, i_max);
  const double cross_dt = std::max(dt, 0.02);
  const double chunk = 10.0;
  const double t_cap =
      std::max(100.0, 4.0 * std::log(1.0 / tol) / std::max(1e-3, mu - x_c * lambda));
  double t = 0.0;
  while (t < t_cap) {
    MeanFieldState before = ode;
    detail::rk4_run(ode, profile, lambda, mu, x_c, chunk, cross_dt,
                    [](double, const MeanFieldState&) {});
    t += chunk;
    if (ode.sup_distance(before) < tol / 20.0) break;
  }
  double gap = s.sup_distance(ode);
  if (gap > 10.0 * tol)
    throw numerical_error("stationary_point: fixed-point and ODE routes disagree by " +
                          std::to_string(gap));

  StationaryPoint sp;
  sp.s_star = std::move(s);
  sp.x_c = x_c;
  sp.residual = residual;
  sp.ode_gap = gap;
  sp.iterations = iter;
  const auto agg = detail::level_aggregates(sp.s_star, profile);
  sp.s_i.assign(agg.a.begin(), agg.a.begin() + i_max + 1);
  sp.s_k_i.assign(agg.b.begin(), agg.b.begin() + i_max + 1);
  sp.busy = sp.s_i[1];
  sp.mean_workload = 0.0;
  for (int i = 1; i <= i_max; ++i) sp.mean_workload += sp.s_i[i];
  return sp;
}

// Aggregate busy probability sum_k p(k) s*_{k,1}; equals x_c lambda / mu at
// any stationary point.
inline double busy_probability(const StationaryPoint& sp, const DegreeProfile& profile) {
  detail::check_shape(sp.s_star, profile);
  double b = 0.0;
  for (int kc = 0; kc < sp.s_star.n_classes; ++kc) b += profile.pmf()[kc] * sp.s_star.at(kc, 1);
  return b;
}

// Max over i >= 1 of | s_i - (x_c lambda / (k_bar mu)) s_{i-1} s_{(k),i-1} |;
// the aggregate tails satisfy this recursion exactly at a stationary point.
inline double aggregate_recursion_residual(const StationaryPoint& sp,
                                           const DegreeProfile& profile, double lambda, double mu,
                                           double x_c) {
  detail::check_shape(sp.s_star, profile);
  const double c = x_c * lambda / (profile.mean_degree() * mu);
  double worst = 0.0;
  for (int i = 1; i <= sp.s_star.i_max; ++i)
    worst = std::max(worst, std::abs(sp.s_i[i] - c * sp.s_i[i - 1] * sp.s_k_i[i - 1]));
  return worst;
}

// Distance to the stationary point in the level-weighted metric
//   phi(s) = sum_{i>=0} | sum_k p(k) (s_{k,i} - s*_{k,i}) | / 2^i.
inline double lyapunov_distance(const MeanFieldState& state, const StationaryPoint& sp,
                                const DegreeProfile& profile) {
  detail::check_shape(state, profile);
  if (state.i_max != sp.s_star.i_max)
    throw std::invalid_argument("lyapunov_distance: truncation depths differ");
  double phi = 0.0;
  double w = 1.0;
  for (int i = 0; i <= state.i_max; ++i, w *= 0.5) {
    double diff = 0.0;
    for (int kc = 0; kc < state.n_classes; ++kc)
      diff += profile.pmf()[kc] * (state.at(kc, i) - sp.s_star.at(kc, i));
    phi += std::abs(diff) * w;
  }
  return phi;
}

// Lipschitz constant of the drift in the sup norm:
//   C = 3 x_c lambda (1 + k_max / k_bar) + 2 mu.
inline double drift_lipschitz_bound(const DegreeProfile& profile, double lambda, double mu,
                                    double x_c) {
  return 3.0 * x_c * lambda * (1.0 + profile.k_max() / profile.mean_degree()) + 2.0 * mu;
}

// Random valid tail state (row 0 = 1, descending tails in [0,1]).
inline MeanFieldState random_tail_state(int n_classes, int i_max, Rng& rng) {
  MeanFieldState s = MeanFieldState::empty(n_classes, i_max);
  std::vector<double> row(i_max);
  for (int kc = 0; kc < n_classes; ++kc) {
    for (double& x : row) x = uniform_draw(rng);
    std::sort(row.begin(), row.end(), std::greater<>());
    for (int i = 1; i <= i_max; ++i) s.ref(kc, i) = row[i - 1];
  }
  return s;
}

// Largest observed ||F(s) - F(s_hat)||_inf / ||s - s_hat||_inf over random
// valid state pairs; coincident pairs are skipped.
inline double max_lipschitz_ratio(const DegreeProfile& profile, double lambda, double mu,
                                  double x_c, int trials, std::uint64_t seed, int i_max = 8) {
  if (trials < 1) throw std::invalid_argument("max_lipschitz_ratio: trials must be >= 1");
  Rng rng(seed);
  const int n_classes = static_cast<int>(profile.size());
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    MeanFieldState a = random_tail_state(n_classes, i_max, rng);
    MeanFieldState b = random_tail_state(n_classes, i_max, rng);
    double dist = a.sup_distance(b);
    if (dist < 1e-15) continue;
    Drift fa = drift(a, profile, lambda, mu, x_c);
    Drift fb = drift(b, profile, lambda, mu, x_c);
    double fdist = 0.0;
    for (std::size_t j = 0; j < fa.f.size(); ++j)
      fdist = std::max(fdist, std::abs(fa.f[j] - fb.f[j]));
    worst = std::max(worst, fdist / dist);
  }
  return worst;
}

}  // namespace mfedge
