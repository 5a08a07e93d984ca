#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mfedge/config.hpp"
#include "mfedge/csv.hpp"
#include "mfedge/degree_profile.hpp"
#include "mfedge/meanfield.hpp"
#include "mfedge/offload.hpp"
#include "mfedge/pricing.hpp"
#include "mfedge/simulator.hpp"

namespace mfedge {

namespace detail {

// Flat worker pool over independent jobs; results must go into
// preallocated slots so output order never depends on scheduling.
template <class Fn>
void parallel_for(std::size_t n_jobs, int workers, Fn&& fn) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(n_jobs)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n_jobs; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n_jobs; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline std::string timestamp_string() {
  using namespace std::chrono;
  auto now = system_clock::now();
  std::time_t t = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d%02d%02d-%02d%02d%02d-%03d", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(ms));
  return buf;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline SimConfig make_sim_config(const RunConfig& cfg, GraphMode mode, double xc_lambda,
                                 std::uint64_t seed) {
  SimConfig sim;
  sim.mode = mode;
  sim.n_users = mode == GraphMode::Static ? cfg.sim.n_users_static : cfg.sim.n_users_dynamic;
  sim.profile = cfg.profile;
  sim.lambda = cfg.params.lambda;
  sim.mu = cfg.params.mu;
  sim.x = 1.0 - xc_lambda / cfg.params.lambda;
  sim.regeneration_rate = cfg.sim.regeneration_rate;
  sim.t_end = cfg.sim.t_end;
  sim.sample_every = cfg.sim.sample_every;
  sim.tail_depth = cfg.sim.tail_depth;
  sim.seed = seed;
  return sim;
}

inline IntervalChoice interval_choice_from(const RunConfig& cfg) {
  return cfg.solver.interval_choice == "lowest_x" ? IntervalChoice::LowestX
                                                  : IntervalChoice::HighestX;
}

inline std::vector<GraphMode> modes_from(const std::string& mode) {
  if (mode == "static") return {GraphMode::Static};
  if (mode == "dynamic") return {GraphMode::Dynamic};
  return {GraphMode::Static, GraphMode::Dynamic};
}

inline const char* mode_name(GraphMode m) {
  return m == GraphMode::Static ? "static" : "dynamic";
}

inline void write_snapshots_csv(const std::filesystem::path& path, const SimResult& run) {
  CsvWriter csv(path.string(), {"time", "k", "i", "s_hat", "n_class"});
  for (const auto& snap : run.snapshots)
    for (const auto& [k, tails] : snap.s_hat)
      for (std::size_t i = 0; i < tails.size(); ++i)
        csv.cell(snap.time)
            .cell(k)
            .cell(static_cast<int>(i))
            .cell(tails[i])
            .cell(snap.class_size.at(k))
            .end_row();
}

inline void write_sim_sidecar(const std::filesystem::path& path, const SimConfig& sim,
                              const SimResult& run) {
  nlohmann::json j;
  j["mode"] = mode_name(sim.mode);
  j["n_users"] = sim.n_users;
  j["lambda"] = sim.lambda;
  j["mu"] = sim.mu;
  j["x"] = sim.x;
  j["regeneration_rate"] = sim.regeneration_rate;
  j["t_end"] = sim.t_end;
  j["sample_every"] = sim.sample_every;
  j["tail_depth"] = sim.tail_depth;
  j["seed"] = sim.seed;
  j["warnings"] = run.warnings;
  j["component_count"] = run.initial_component_count;
  j["totals"] = {{"generated", run.totals.generated},
                 {"offloaded", run.totals.offloaded},
                 {"completed", run.totals.completed},
                 {"in_queue_at_end", run.totals.in_queue_at_end}};
  std::ofstream(path) << j.dump(2) << '\n';
}

inline void write_stationary_csvs(const std::filesystem::path& dir, const std::string& stem,
                                  const StationaryPoint& sp, const DegreeProfile& profile) {
  CsvWriter points((dir / (stem + ".csv")).string(), {"k", "i", "s_star"});
  for (int kc = 0; kc < sp.s_star.n_classes; ++kc)
    for (int i = 0; i <= sp.s_star.i_max; ++i)
      points.cell(profile.support()[kc]).cell(i).cell(sp.s_star.at(kc, i)).end_row();
  CsvWriter agg((dir / (stem + "_aggregates.csv")).string(), {"i", "s_i", "s_k_i"});
  for (int i = 0; i <= sp.s_star.i_max; ++i)
    agg.cell(i).cell(sp.s_i[i]).cell(sp.s_k_i[i]).end_row();
}

}  // namespace detail

struct RunOutcome {
  std::filesystem::path out_dir;
  std::vector<std::string> warnings;
};

namespace experiments {

inline void stationary_sweep(const RunConfig& cfg, const std::filesystem::path& dir, int workers,
                             std::vector<std::string>& warnings) {
  const auto& grid = cfg.sweep.xc_lambda;
  std::vector<StationaryPoint> points(grid.size());
  detail::parallel_for(grid.size(), workers, [&](std::size_t j) {
    points[j] = stationary_point(cfg.profile, grid[j], cfg.params.mu, 1.0, cfg.solver.sweep_tol,
                                 cfg.solver.i_max, cfg.solver.dt);
  });

  CsvWriter csv((dir / "stationary_points.csv").string(), {"xc_lambda", "k", "i", "s_star"});
  for (std::size_t j = 0; j < grid.size(); ++j)
    for (int kc = 0; kc < points[j].s_star.n_classes; ++kc)
      for (int i = 0; i <= points[j].s_star.i_max; ++i)
        csv.cell(grid[j])
            .cell(cfg.profile.support()[kc])
            .cell(i)
            .cell(points[j].s_star.at(kc, i))
            .end_row();
  CsvWriter agg((dir / "aggregates.csv").string(), {"xc_lambda", "i", "s_i", "s_k_i"});
  for (std::size_t j = 0; j < grid.size(); ++j)
    for (int i = 0; i <= points[j].s_star.i_max; ++i)
      agg.cell(grid[j]).cell(i).cell(points[j].s_i[i]).cell(points[j].s_k_i[i]).end_row();

  for (int kc = 0; kc < static_cast<int>(cfg.profile.size()); ++kc) {
    std::vector<std::pair<double, double>> series;
    for (std::size_t j = 0; j < grid.size(); ++j)
      series.emplace_back(grid[j], points[j].s_star.at(kc, 1));
    write_xy_series(
        (dir / ("theory_tail1_vs_load_k" + std::to_string(cfg.profile.support()[kc]) + ".dat"))
            .string(),
        series);
  }
  std::vector<std::pair<double, double>> busy_series;
  for (std::size_t j = 0; j < grid.size(); ++j) busy_series.emplace_back(grid[j], points[j].busy);
  write_xy_series((dir / "busy_vs_load.dat").string(), busy_series);
  (void)warnings;
}

inline void table1(const RunConfig& cfg, const std::filesystem::path& dir, int workers,
                   std::vector<std::string>& warnings) {
  const double xcl = cfg.sweep.table_xc_lambda;
  StationaryPoint theory = stationary_point(cfg.profile, xcl, cfg.params.mu, 1.0, cfg.solver.tol,
                                            cfg.solver.i_max, cfg.solver.dt);
  detail::write_stationary_csvs(dir, "stationary_theory", theory, cfg.profile);

  struct Job {
    GraphMode mode;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (GraphMode mode : detail::modes_from(cfg.sim.mode))
    for (std::uint64_t seed : cfg.seeds) jobs.push_back({mode, seed});
  std::vector<SimResult> runs(jobs.size());
  detail::parallel_for(jobs.size(), workers, [&](std::size_t j) {
    runs[j] = run_simulation(detail::make_sim_config(cfg, jobs[j].mode, xcl, jobs[j].seed));
  });

  for (std::size_t j = 0; j < jobs.size(); ++j) {
    std::string stem = std::string("sim_") + detail::mode_name(jobs[j].mode) + "_seed" +
                       std::to_string(jobs[j].seed);
    detail::write_snapshots_csv(dir / (stem + ".csv"), runs[j]);
    detail::write_sim_sidecar(dir / (stem + ".json"),
                              detail::make_sim_config(cfg, jobs[j].mode, xcl, jobs[j].seed),
                              runs[j]);
    for (const auto& w : runs[j].warnings) warnings.push_back(stem + ": " + w);
  }

  auto sim_average = [&](GraphMode mode, int k, int i) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      if (jobs[j].mode != mode) continue;
      sum += late_window_average(runs[j], k, i, cfg.sim.late_window_fraction);
      ++count;
    }
    return count ? sum / count : std::nan("");
  };

  const bool has_static = cfg.sim.mode != "dynamic";
  const bool has_dynamic = cfg.sim.mode != "static";
  CsvWriter csv((dir / "table1.csv").string(),
                {"k", "i", "theory", "static_sim", "dynamic_sim", "err_static", "err_dynamic"});
  for (int kc = 0; kc < static_cast<int>(cfg.profile.size()); ++kc)
    for (int i = 1; i <= 2; ++i) {
      int k = cfg.profile.support()[kc];
      double th = theory.s_star.at(kc, i);
      double st = has_static ? sim_average(GraphMode::Static, k, i) : 0.0;
      double dy = has_dynamic ? sim_average(GraphMode::Dynamic, k, i) : 0.0;
      csv.cell(k).cell(i).cell(th);
      csv.cell(has_static ? detail::fmt(st) : std::string());
      csv.cell(has_dynamic ? detail::fmt(dy) : std::string());
      csv.cell(has_static ? detail::fmt(std::abs(st - th)) : std::string());
      csv.cell(has_dynamic ? detail::fmt(std::abs(dy - th)) : std::string());
      csv.end_row();
    }
}

inline void convergence_study_experiment(const RunConfig& cfg, const std::filesystem::path& dir,
                                         int workers, std::vector<std::string>& warnings) {
  const double xcl = cfg.sweep.table_xc_lambda;
  StationaryPoint theory = stationary_point(cfg.profile, xcl, cfg.params.mu, 1.0,
                                            cfg.solver.sweep_tol, cfg.solver.i_max, cfg.solver.dt);
  const double s_star = theory.s_star.at(0, 1);  // busy tail of the smallest degree class
  const int k_min = cfg.profile.k_min();

  CsvWriter traj((dir / "trajectories.csv").string(), {"mode", "n", "seed", "time", "s_hat"});
  CsvWriter summary((dir / "summary.csv").string(),
                    {"mode", "n", "late_window_variance", "mean_late_abs_dev"});
  for (GraphMode mode : detail::modes_from(cfg.sim.mode)) {
    struct Job {
      int size;
      std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (int n : cfg.sweep.sizes)
      for (std::uint64_t seed : cfg.seeds) jobs.push_back({n, seed});
    std::vector<SimResult> runs(jobs.size());
    detail::parallel_for(jobs.size(), workers, [&](std::size_t j) {
      SimConfig sc = detail::make_sim_config(cfg, mode, xcl, jobs[j].seed);
      sc.n_users = jobs[j].size;
      runs[j] = run_simulation(sc);
    });

    for (int n : cfg.sweep.sizes) {
      double var_sum = 0.0, dev_sum = 0.0;
      int run_count = 0;
      std::map<double, std::pair<double, int>> mean_series;
      for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (jobs[j].size != n) continue;
        double t_from = cfg.sim.t_end * (1.0 - cfg.sim.late_window_fraction);
        double sum = 0.0, sq = 0.0;
        int count = 0;
        for (const auto& snap : runs[j].snapshots) {
          auto it = snap.s_hat.find(k_min);
          if (it == snap.s_hat.end()) continue;
          double v = it->second[1];
          traj.cell(detail::mode_name(mode))
              .cell(n)
              .cell(static_cast<unsigned long long>(jobs[j].seed))
              .cell(snap.time)
              .cell(v)
              .end_row();
          auto& acc = mean_series[snap.time];
          acc.first += v;
          acc.second += 1;
          if (snap.time >= t_from) {
            sum += v;
            sq += v * v;
            ++count;
          }
        }
        if (count > 1) {
          double mean = sum / count;
          var_sum += std::max(0.0, sq / count - mean * mean);
          dev_sum += std::abs(mean - s_star);
          ++run_count;
        }
      }
      summary.cell(detail::mode_name(mode))
          .cell(n)
          .cell(var_sum / std::max(1, run_count))
          .cell(dev_sum / std::max(1, run_count))
          .end_row();
      std::vector<std::pair<double, double>> series;
      for (auto& [t, acc] : mean_series) series.emplace_back(t, acc.first / acc.second);
      write_xy_series((dir / (std::string("conv_") + detail::mode_name(mode) + "_n" +
                              std::to_string(n) + ".dat"))
                          .string(),
                      series);
    }
  }
  (void)warnings;
}

inline void workload_comparison(const RunConfig& cfg, const std::filesystem::path& dir,
                                int workers, std::vector<std::string>& warnings) {
  const auto& grid = cfg.sweep.xc_lambda;
  std::vector<StationaryPoint> points(grid.size());
  detail::parallel_for(grid.size(), workers, [&](std::size_t j) {
    points[j] = stationary_point(cfg.profile, grid[j], cfg.params.mu, 1.0, cfg.solver.sweep_tol,
                                 cfg.solver.i_max, cfg.solver.dt);
  });
  CsvWriter csv((dir / "workload.csv").string(),
                {"xc_lambda", "meanfield_avg", "meanfield_kmax", "mm1", "reduction"});
  std::vector<std::pair<double, double>> avg_series, kmax_series, mm1_series;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double kmax_workload = 0.0;
    int kc_last = points[j].s_star.n_classes - 1;
    for (int i = 1; i <= points[j].s_star.i_max; ++i)
      kmax_workload += points[j].s_star.at(kc_last, i);
    double mm1 = mm1_mean_workload(grid[j], cfg.params.mu);
    double reduction = 1.0 - points[j].mean_workload / mm1;
    csv.cell(grid[j])
        .cell(points[j].mean_workload)
        .cell(kmax_workload)
        .cell(mm1)
        .cell(reduction)
        .end_row();
    avg_series.emplace_back(grid[j], points[j].mean_workload);
    kmax_series.emplace_back(grid[j], kmax_workload);
    mm1_series.emplace_back(grid[j], mm1);
  }
  write_xy_series((dir / "workload_meanfield_avg.dat").string(), avg_series);
  write_xy_series((dir / "workload_meanfield_kmax.dat").string(), kmax_series);
  write_xy_series((dir / "workload_mm1.dat").string(), mm1_series);
  (void)warnings;
}

inline void feasibility(const RunConfig& cfg, const std::filesystem::path& dir, int workers,
                        std::vector<std::string>& warnings) {
  FeasibleRegion region = feasible_region(cfg.params, cfg.profile, cfg.solver.root_tol,
                                          cfg.solver.sweep_tol, detail::interval_choice_from(cfg));
  nlohmann::json j;
  j["x_l_star"] = region.x_l_star;
  j["x_u_star"] = region.x_u_star;
  j["x_prime_l"] = region.x_prime_l;
  j["x_prime_u"] = region.x_prime_u;
  j["fairness_full"] = region.fairness_full;
  j["x_l"] = region.x_l;
  j["x_u"] = region.x_u;
  j["warnings"] = region.warnings;
  std::ofstream(dir / "region.json") << j.dump(2) << '\n';
  for (const auto& w : region.warnings) warnings.push_back("feasibility: " + w);

  const int grid_points = 101;
  std::vector<double> delays(grid_points), gaps(grid_points);
  detail::parallel_for(grid_points, workers, [&](std::size_t g) {
    double x = static_cast<double>(g) / (grid_points - 1);
    delays[g] = task_delay(x, cfg.params, cfg.profile, cfg.solver.sweep_tol);
    gaps[g] = fairness_gap(x, cfg.params, cfg.profile, cfg.solver.sweep_tol);
  });
  CsvWriter csv((dir / "constraint_curves.csv").string(), {"x", "delay", "fairness_gap"});
  std::vector<std::pair<double, double>> delay_series, gap_series;
  for (int g = 0; g < grid_points; ++g) {
    double x = static_cast<double>(g) / (grid_points - 1);
    csv.cell(x).cell(delays[g]).cell(gaps[g]).end_row();
    delay_series.emplace_back(x, delays[g]);
    gap_series.emplace_back(x, gaps[g]);
  }
  write_xy_series((dir / "delay_vs_x.dat").string(), delay_series);
  write_xy_series((dir / "gap_vs_x.dat").string(), gap_series);
}

inline void pricing_sweep(const RunConfig& cfg, const std::filesystem::path& dir, int workers,
                          std::vector<std::string>& warnings) {
  FeasibleRegion region = feasible_region(cfg.params, cfg.profile, cfg.solver.root_tol,
                                          cfg.solver.sweep_tol, detail::interval_choice_from(cfg));
  for (const auto& w : region.warnings) warnings.push_back("pricing_sweep: " + w);

  const auto& vs = cfg.sweep.v_weights;
  const int t_slots = cfg.sweep.time_slots;
  const std::vector<PricingPolicy> policies = {PricingPolicy::OptimalPO, PricingPolicy::ConstantPO,
                                               PricingPolicy::AdaptedPO};
  struct Row {
    double avg_utility = 0.0, avg_cost = 0.0, max_backlog = 0.0, bound = 0.0;
  };
  std::vector<Row> rows(vs.size() * policies.size());
  detail::parallel_for(rows.size(), workers, [&](std::size_t idx) {
    double v = vs[idx / policies.size()];
    PricingPolicy policy = policies[idx % policies.size()];
    Row row;
    row.bound = queue_bound(v, region, cfg.params);
    if (policy == PricingPolicy::AdaptedPO) {
      for (std::uint64_t seed : cfg.seeds) {
        SlotTrace tr = run_horizon(t_slots, v, policy, region, cfg.params, seed);
        row.avg_utility += tr.avg_utility() / cfg.seeds.size();
        row.avg_cost += tr.avg_cost() / cfg.seeds.size();
        row.max_backlog = std::max(row.max_backlog, tr.max_backlog());
      }
    } else {
      SlotTrace tr = run_horizon(t_slots, v, policy, region, cfg.params, cfg.seeds.front());
      row.avg_utility = tr.avg_utility();
      row.avg_cost = tr.avg_cost();
      row.max_backlog = tr.max_backlog();
    }
    rows[idx] = row;
  });

  CsvWriter csv((dir / "sweep_summary.csv").string(),
                {"V", "policy", "avg_utility", "avg_cost", "max_X", "bound"});
  for (std::size_t idx = 0; idx < rows.size(); ++idx) {
    csv.cell(vs[idx / policies.size()])
        .cell(policy_name(policies[idx % policies.size()]))
        .cell(rows[idx].avg_utility)
        .cell(rows[idx].avg_cost)
        .cell(rows[idx].max_backlog)
        .cell(rows[idx].bound)
        .end_row();
  }
  for (std::size_t pi = 0; pi < policies.size(); ++pi) {
    std::vector<std::pair<double, double>> util_series, cost_series;
    for (std::size_t vi = 0; vi < vs.size(); ++vi) {
      util_series.emplace_back(vs[vi], rows[vi * policies.size() + pi].avg_utility);
      cost_series.emplace_back(vs[vi], rows[vi * policies.size() + pi].avg_cost);
    }
    std::string name = policy_name(policies[pi]);
    write_xy_series((dir / ("utility_vs_v_" + name + ".dat")).string(), util_series);
    write_xy_series((dir / ("cost_vs_v_" + name + ".dat")).string(), cost_series);
  }
}

inline void queue_trace(const RunConfig& cfg, const std::filesystem::path& dir, int workers,
                        std::vector<std::string>& warnings) {
  FeasibleRegion region = feasible_region(cfg.params, cfg.profile, cfg.solver.root_tol,
                                          cfg.solver.sweep_tol, detail::interval_choice_from(cfg));
  for (const auto& w : region.warnings) warnings.push_back("queue_trace: " + w);
  const double v = cfg.sweep.trace_v_weight;
  const int t_slots = cfg.sweep.trace_slots;
  const double bound = queue_bound(v, region, cfg.params);

  CsvWriter csv((dir / "slot_trace.csv").string(), {"n", "policy", "V", "p", "x", "X", "u", "c"});
  std::vector<std::pair<double, double>> backlog_series;
  for (PricingPolicy policy :
       {PricingPolicy::OptimalPO, PricingPolicy::ConstantPO, PricingPolicy::AdaptedPO}) {
    SlotTrace tr = run_horizon(t_slots, v, policy, region, cfg.params, cfg.seeds.front());
    for (int n = 0; n < t_slots; ++n) {
      csv.cell(n)
          .cell(policy_name(policy))
          .cell(v)
          .cell(tr.price[n])
          .cell(tr.x[n])
          .cell(tr.backlog[n])
          .cell(tr.utility[n])
          .cell(tr.cost[n])
          .end_row();
      if (policy == PricingPolicy::OptimalPO)
        backlog_series.emplace_back(static_cast<double>(n), tr.backlog[n]);
    }
  }
  write_xy_series((dir / "backlog_OptimalPO.dat").string(), backlog_series);
  write_xy_series((dir / "backlog_bound.dat").string(),
                  {{0.0, bound}, {static_cast<double>(t_slots - 1), bound}});
  (void)workers;
}

inline void property_suite(const RunConfig& cfg, const std::filesystem::path& dir, int workers,
                           std::vector<std::string>& warnings) {
  const double xcl = cfg.sweep.table_xc_lambda;
  const double mu = cfg.params.mu;
  const DegreeProfile& profile = cfg.profile;
  StationaryPoint sp = stationary_point(profile, xcl, mu, 1.0, cfg.solver.tol, cfg.solver.i_max,
                                        cfg.solver.dt);
  CsvWriter csv((dir / "property_report.csv").string(),
                {"check", "statistic", "threshold", "pass"});
  auto report = [&](const std::string& name, double stat, double threshold) {
    bool pass = stat <= threshold;
    csv.cell(name).cell(stat).cell(threshold).cell(pass ? "true" : "false").end_row();
    if (!pass) warnings.push_back("property_suite: " + name + " failed");
  };

  // Larger degree classes carry pointwise heavier tails.
  double mono_violation = 0.0;
  for (int kc = 1; kc < sp.s_star.n_classes; ++kc)
    for (int i = 0; i <= sp.s_star.i_max; ++i)
      mono_violation = std::max(mono_violation, sp.s_star.at(kc - 1, i) - sp.s_star.at(kc, i));
  report("tail_monotone_in_degree", mono_violation, 1e-9);

  double sandwich_violation = 0.0;
  for (int i = 1; i <= sp.s_star.i_max; ++i) {
    auto [lo, hi] = stationary_tail_bounds(profile, xcl, mu, 1.0, i);
    for (int kc = 0; kc < sp.s_star.n_classes; ++kc) {
      sandwich_violation = std::max(sandwich_violation, lo - sp.s_star.at(kc, i));
      sandwich_violation = std::max(sandwich_violation, sp.s_star.at(kc, i) - hi);
    }
  }
  report("tail_bounds_sandwich", sandwich_violation, 1e-9);

  report("aggregate_recursion_residual",
         aggregate_recursion_residual(sp, profile, xcl, mu, 1.0), 1e-6);

  double busy_err = 0.0;
  for (double g : cfg.sweep.xc_lambda) {
    StationaryPoint p =
        stationary_point(profile, g, mu, 1.0, cfg.solver.tol, cfg.solver.i_max, cfg.solver.dt);
    busy_err = std::max(busy_err, std::abs(busy_probability(p, profile) - g / mu));
  }
  report("busy_probability_conservation", busy_err, 1e-6);

  double c_bound = drift_lipschitz_bound(profile, xcl, mu, 1.0);
  report("drift_lipschitz_ratio_minus_bound",
         max_lipschitz_ratio(profile, xcl, mu, 1.0, 100, cfg.seeds.front()) - c_bound, 0.0);

  // Dominance of ordered initial pairs is preserved along the flow.
  Rng rng(cfg.seeds.front());
  const int i_max = 8;
  double dominance_violation = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    MeanFieldState lower = random_tail_state(static_cast<int>(profile.size()), i_max, rng);
    MeanFieldState upper = lower;
    double lift = 0.1 + 0.8 * uniform_draw(rng);
    for (int kc = 0; kc < upper.n_classes; ++kc)
      for (int i = 1; i <= i_max; ++i)
        upper.ref(kc, i) = upper.at(kc, i) + lift * (1.0 - upper.at(kc, i));
    auto lower_traj = integrate(lower, profile, xcl, mu, 1.0, 5.0, cfg.solver.dt);
    auto upper_traj = integrate(upper, profile, xcl, mu, 1.0, 5.0, cfg.solver.dt);
    for (std::size_t t = 0; t < lower_traj.size(); ++t)
      for (std::size_t e = 0; e < lower_traj[t].tails.size(); ++e)
        dominance_violation =
            std::max(dominance_violation, lower_traj[t].tails[e] - upper_traj[t].tails[e]);
  }
  report("dominance_preserved", dominance_violation, 1e-9);

  // Exponential contraction of the weighted distance from ordered starts.
  StationaryPoint sp8 =
      stationary_point(profile, xcl, mu, 1.0, cfg.solver.tol, i_max, cfg.solver.dt);
  double decay_violation = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    MeanFieldState start = sp8.s_star;
    double c = 0.1 + 0.8 * uniform_draw(rng);
    bool dominating = trial % 2 == 0;
    for (int kc = 0; kc < start.n_classes; ++kc)
      for (int i = 1; i <= i_max; ++i)
        start.ref(kc, i) =
            dominating ? start.at(kc, i) + c * (1.0 - start.at(kc, i)) : c * start.at(kc, i);
    double phi0 = lyapunov_distance(start, sp8, profile);
    auto traj = integrate(start, profile, xcl, mu, 1.0, 10.0, cfg.solver.dt);
    for (std::size_t t = 1; t < traj.size(); ++t) {
      double bound_t = phi0 * std::exp(-0.5 * t * cfg.solver.dt) + 1e-9;
      decay_violation =
          std::max(decay_violation, lyapunov_distance(traj[t], sp8, profile) - bound_t);
    }
  }
  report("lyapunov_decay_rate_half", decay_violation, 0.0);

  report("fixed_point_vs_ode_gap", sp.ode_gap, 10.0 * cfg.solver.tol);
  (void)workers;
}

}  // namespace experiments

// Run one named experiment; artifacts land in <out_base>/<experiment>/<timestamp>/.
// Throws std::invalid_argument for config errors, infeasible_error /
// numerical_error from the solvers.
inline RunOutcome run_experiment(const RunConfig& cfg, const std::filesystem::path& out_base,
                                 int workers = 1) {
  auto issues = validate_config(cfg);
  if (!issues.empty()) {
    std::string all;
    for (const auto& s : issues) all += (all.empty() ? "" : "; ") + s;
    throw std::invalid_argument(all);
  }

  std::filesystem::path dir = out_base / cfg.experiment / detail::timestamp_string();
  try {
    std::filesystem::create_directories(dir);
  } catch (const std::filesystem::filesystem_error& e) {
    throw std::invalid_argument("output_dir is not writable: " + std::string(e.what()));
  }

  auto t0 = std::chrono::steady_clock::now();
  RunOutcome outcome;
  outcome.out_dir = dir;

  if (cfg.experiment == "stationary_sweep")
    experiments::stationary_sweep(cfg, dir, workers, outcome.warnings);
  else if (cfg.experiment == "table1")
    experiments::table1(cfg, dir, workers, outcome.warnings);
  else if (cfg.experiment == "convergence_study")
    experiments::convergence_study_experiment(cfg, dir, workers, outcome.warnings);
  else if (cfg.experiment == "workload_comparison")
    experiments::workload_comparison(cfg, dir, workers, outcome.warnings);
  else if (cfg.experiment == "feasibility")
    experiments::feasibility(cfg, dir, workers, outcome.warnings);
  else if (cfg.experiment == "pricing_sweep")
    experiments::pricing_sweep(cfg, dir, workers, outcome.warnings);
  else if (cfg.experiment == "queue_trace")
    experiments::queue_trace(cfg, dir, workers, outcome.warnings);
  else if (cfg.experiment == "property_suite")
    experiments::property_suite(cfg, dir, workers, outcome.warnings);

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  nlohmann::json meta;
  meta["config"] = config_to_json(cfg);
  meta["seeds"] = cfg.seeds;
  meta["wall_time_seconds"] = wall;
  meta["warnings"] = outcome.warnings;
  meta["tool"] = "mfedge 0.1.0";
  std::ofstream(dir / "metadata.json") << meta.dump(2) << '\n';
  return outcome;
}

}  // namespace mfedge
