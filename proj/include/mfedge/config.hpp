#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfedge/degree_profile.hpp"
#include "mfedge/offload.hpp"
#include "mfedge/simulator.hpp"

namespace mfedge {

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "stationary_sweep", "table1",      "convergence_study", "workload_comparison",
      "feasibility",      "pricing_sweep", "queue_trace",     "property_suite"};
  return names;
}

struct SimSettings {
  std::string mode = "both";  // "static" | "dynamic" | "both"
  int n_users_static = 800;
  int n_users_dynamic = 1000;
  double t_end = 200.0;
  double sample_every = 1.0;
  double regeneration_rate = 1.0;
  int tail_depth = 8;
  double late_window_fraction = 0.25;
};

struct SweepSettings {
  std::vector<double> xc_lambda = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  double table_xc_lambda = 0.7;  // load point of the table1 experiment
  std::vector<double> v_weights = {5, 10, 20, 30, 50, 70, 100};
  std::vector<int> sizes = {100, 300, 800};
  int time_slots = 100;
  double trace_v_weight = 20.0;  // queue_trace experiment
  int trace_slots = 10000;
};

struct SolverSettings {
  double tol = 1e-9;        // theory-table residual
  double sweep_tol = 1e-6;  // parameter sweeps
  double root_tol = 1e-4;   // x tolerance of the feasibility searches
  double dt = 0.01;
  int i_max = 16;
  // which component to expose when the feasible set splits in two
  std::string interval_choice = "highest_x";  // "highest_x" | "lowest_x"
};

struct RunConfig {
  std::string experiment = "table1";
  SystemParams params;
  DegreeProfile profile = DegreeProfile::uniform(6, 9);
  SimSettings sim;
  SweepSettings sweep;
  SolverSettings solver;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8};
  std::string output_dir = "out";
};

// The evaluation defaults: lambda 0.9, mu 1, gamma 5, B 2000 KB at 10 Mbps
// (B/r = 1.6 time units), caps d_bar 1.6, s_bar 0.06, x_bar 0.6, p_u 0.5,
// energy costs (0.9, 0.3, 1), degrees uniform on {6..9}.
inline RunConfig default_config() { return RunConfig{}; }

namespace detail {

template <class T>
void get_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

// JSON schema (all fields optional, defaults above):
// {
//   "experiment": "table1",
//   "params": { "lambda":0.9, "mu":1.0, "gamma":5.0, "data_size_kb":2000,
//               "uplink_mbps":10, "rho_c_m":0.9, "rho_t_m":0.3, "rho_c_s":1.0,
//               "d_bar":1.6, "s_bar":0.06, "x_bar":0.6, "p_u":0.5 },
//   "profile": { "support":[6,7,8,9], "pmf":[0.25,0.25,0.25,0.25] },
//   "sim":    { "mode":"static", "n_users_static":800, "n_users_dynamic":1000,
//               "t_end":200, "sample_every":1.0, "regeneration_rate":1.0,
//               "tail_depth":8, "late_window_fraction":0.25 },
//   "sweep":  { "xc_lambda":[...], "table_xc_lambda":0.7, "v_weights":[...],
//               "sizes":[...], "time_slots":100, "trace_v_weight":20,
//               "trace_slots":10000 },
//   "solver": { "tol":1e-9, "sweep_tol":1e-6, "root_tol":1e-4, "dt":0.01, "i_max":16,
//               "interval_choice":"highest_x" },
//   "seeds":  [1,2,3,4,5,6,7,8],
//   "output_dir": "out"
// }
inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  detail::get_if(j, "experiment", cfg.experiment);
  detail::get_if(j, "output_dir", cfg.output_dir);
  detail::get_if(j, "seeds", cfg.seeds);
  if (j.contains("params")) {
    const auto& p = j.at("params");
    detail::get_if(p, "lambda", cfg.params.lambda);
    detail::get_if(p, "mu", cfg.params.mu);
    detail::get_if(p, "gamma", cfg.params.gamma);
    if (p.contains("data_size_kb"))
      cfg.params.data_size_bits = p.at("data_size_kb").get<double>() * 8000.0;
    if (p.contains("uplink_mbps"))
      cfg.params.uplink_rate = p.at("uplink_mbps").get<double>() * 1e6;
    detail::get_if(p, "rho_c_m", cfg.params.rho_c_m);
    detail::get_if(p, "rho_t_m", cfg.params.rho_t_m);
    detail::get_if(p, "rho_c_s", cfg.params.rho_c_s);
    detail::get_if(p, "d_bar", cfg.params.d_bar);
    detail::get_if(p, "s_bar", cfg.params.s_bar);
    detail::get_if(p, "x_bar", cfg.params.x_bar);
    detail::get_if(p, "p_u", cfg.params.p_u);
  }
  if (j.contains("profile")) {
    std::vector<int> support = cfg.profile.support();
    std::vector<double> pmf = cfg.profile.pmf();
    detail::get_if(j.at("profile"), "support", support);
    detail::get_if(j.at("profile"), "pmf", pmf);
    cfg.profile = DegreeProfile(support, pmf);  // validates
  }
  if (j.contains("sim")) {
    const auto& s = j.at("sim");
    detail::get_if(s, "mode", cfg.sim.mode);
    detail::get_if(s, "n_users_static", cfg.sim.n_users_static);
    detail::get_if(s, "n_users_dynamic", cfg.sim.n_users_dynamic);
    detail::get_if(s, "t_end", cfg.sim.t_end);
    detail::get_if(s, "sample_every", cfg.sim.sample_every);
    detail::get_if(s, "regeneration_rate", cfg.sim.regeneration_rate);
    detail::get_if(s, "tail_depth", cfg.sim.tail_depth);
    detail::get_if(s, "late_window_fraction", cfg.sim.late_window_fraction);
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    detail::get_if(s, "xc_lambda", cfg.sweep.xc_lambda);
    detail::get_if(s, "table_xc_lambda", cfg.sweep.table_xc_lambda);
    detail::get_if(s, "v_weights", cfg.sweep.v_weights);
    detail::get_if(s, "sizes", cfg.sweep.sizes);
    detail::get_if(s, "time_slots", cfg.sweep.time_slots);
    detail::get_if(s, "trace_v_weight", cfg.sweep.trace_v_weight);
    detail::get_if(s, "trace_slots", cfg.sweep.trace_slots);
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    detail::get_if(s, "tol", cfg.solver.tol);
    detail::get_if(s, "sweep_tol", cfg.solver.sweep_tol);
    detail::get_if(s, "root_tol", cfg.solver.root_tol);
    detail::get_if(s, "dt", cfg.solver.dt);
    detail::get_if(s, "i_max", cfg.solver.i_max);
    detail::get_if(s, "interval_choice", cfg.solver.interval_choice);
  }
  return cfg;
}

inline nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["experiment"] = cfg.experiment;
  j["params"] = {{"lambda", cfg.params.lambda},
                 {"mu", cfg.params.mu},
                 {"gamma", cfg.params.gamma},
                 {"data_size_kb", cfg.params.data_size_bits / 8000.0},
                 {"uplink_mbps", cfg.params.uplink_rate / 1e6},
                 {"rho_c_m", cfg.params.rho_c_m},
                 {"rho_t_m", cfg.params.rho_t_m},
                 {"rho_c_s", cfg.params.rho_c_s},
                 {"d_bar", cfg.params.d_bar},
                 {"s_bar", cfg.params.s_bar},
                 {"x_bar", cfg.params.x_bar},
                 {"p_u", cfg.params.p_u}};
  j["profile"] = {{"support", cfg.profile.support()}, {"pmf", cfg.profile.pmf()}};
  j["sim"] = {{"mode", cfg.sim.mode},
              {"n_users_static", cfg.sim.n_users_static},
              {"n_users_dynamic", cfg.sim.n_users_dynamic},
              {"t_end", cfg.sim.t_end},
              {"sample_every", cfg.sim.sample_every},
              {"regeneration_rate", cfg.sim.regeneration_rate},
              {"tail_depth", cfg.sim.tail_depth},
              {"late_window_fraction", cfg.sim.late_window_fraction}};
  j["sweep"] = {{"xc_lambda", cfg.sweep.xc_lambda},
                {"table_xc_lambda", cfg.sweep.table_xc_lambda},
                {"v_weights", cfg.sweep.v_weights},
                {"sizes", cfg.sweep.sizes},
                {"time_slots", cfg.sweep.time_slots},
                {"trace_v_weight", cfg.sweep.trace_v_weight},
                {"trace_slots", cfg.sweep.trace_slots}};
  j["solver"] = {{"tol", cfg.solver.tol},
                 {"sweep_tol", cfg.solver.sweep_tol},
                 {"root_tol", cfg.solver.root_tol},
                 {"dt", cfg.solver.dt},
                 {"i_max", cfg.solver.i_max},
                 {"interval_choice", cfg.solver.interval_choice}};
  j["seeds"] = cfg.seeds;
  j["output_dir"] = cfg.output_dir;
  return j;
}

// Field-by-field validation; returns human-readable issues, empty when valid.
inline std::vector<std::string> validate_config(const RunConfig& cfg) {
  std::vector<std::string> issues;
  bool known = false;
  for (const auto& name : experiment_names()) known = known || name == cfg.experiment;
  if (!known) {
    std::string valid;
    for (const auto& name : experiment_names()) valid += (valid.empty() ? "" : ", ") + name;
    issues.push_back("experiment: unknown name '" + cfg.experiment + "'; valid names: " + valid);
  }
  try {
    cfg.params.validate();
  } catch (const std::exception& e) {
    issues.push_back(std::string("params: ") + e.what());
  }
  if (cfg.sim.mode != "static" && cfg.sim.mode != "dynamic" && cfg.sim.mode != "both")
    issues.push_back("sim.mode: must be static, dynamic or both");
  if (cfg.sim.n_users_static < 2 || cfg.sim.n_users_dynamic < 2)
    issues.push_back("sim: user counts must be >= 2");
  if (!(cfg.sim.t_end > 0)) issues.push_back("sim.t_end: must be positive");
  if (!(cfg.sim.sample_every > 0)) issues.push_back("sim.sample_every: must be positive");
  if (!(cfg.sim.late_window_fraction > 0) || cfg.sim.late_window_fraction > 1)
    issues.push_back("sim.late_window_fraction: must be in (0,1]");
  if (cfg.sweep.xc_lambda.empty()) issues.push_back("sweep.xc_lambda: grid must be nonempty");
  for (double v : cfg.sweep.xc_lambda)
    if (!(v > 0) || v >= cfg.params.mu) {
      issues.push_back("sweep.xc_lambda: entries must satisfy 0 < xc_lambda < mu");
      break;
    }
  if (!(cfg.sweep.table_xc_lambda > 0) || cfg.sweep.table_xc_lambda > cfg.params.lambda)
    issues.push_back("sweep.table_xc_lambda: must be in (0, params.lambda]");
  if (cfg.sweep.v_weights.empty()) issues.push_back("sweep.v_weights: grid must be nonempty");
  if (cfg.sweep.sizes.empty()) issues.push_back("sweep.sizes: grid must be nonempty");
  for (std::size_t i = 1; i < cfg.sweep.sizes.size(); ++i)
    if (cfg.sweep.sizes[i] <= cfg.sweep.sizes[i - 1]) {
      issues.push_back("sweep.sizes: must be strictly ascending");
      break;
    }
  if (cfg.sweep.time_slots < 1 || cfg.sweep.trace_slots < 1)
    issues.push_back("sweep: slot counts must be >= 1");
  if (cfg.seeds.empty()) issues.push_back("seeds: must be nonempty");
  if (!(cfg.solver.tol > 0) || !(cfg.solver.sweep_tol > 0) || !(cfg.solver.root_tol > 0))
    issues.push_back("solver: tolerances must be positive");
  if (!(cfg.solver.dt > 0)) issues.push_back("solver.dt: must be positive");
  if (cfg.solver.i_max < 2 || cfg.solver.i_max > 64)
    issues.push_back("solver.i_max: must be in [2, 64]");
  if (cfg.solver.interval_choice != "highest_x" && cfg.solver.interval_choice != "lowest_x")
    issues.push_back("solver.interval_choice: must be highest_x or lowest_x");
  if (cfg.output_dir.empty()) issues.push_back("output_dir: must be nonempty");
  return issues;
}

}  // namespace mfedge
