#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <string>
#include <vector>

#include "mfedge/degree_profile.hpp"
#include "mfedge/errors.hpp"
#include "mfedge/graph.hpp"
#include "mfedge/meanfield.hpp"
#include "mfedge/rng.hpp"

namespace mfedge {

enum class GraphMode { Static, Dynamic };

struct SimConfig {
  int n_users = 800;
  GraphMode mode = GraphMode::Static;
  DegreeProfile profile = DegreeProfile::uniform(6, 9);
  double lambda = 0.9;
  double mu = 1.0;
  double x = 0.0;  // offload probability; 1 - x of tasks stay for collaboration
  double regeneration_rate = 1.0;
  double t_end = 200.0;
  double sample_every = 1.0;
  int tail_depth = 8;  // deepest tail index recorded in snapshots
  std::uint64_t seed = 1;

  void validate() const {
    if (n_users < 2) throw std::invalid_argument("SimConfig: n_users must be >= 2");
    if (!(lambda > 0.0) || !(mu > 0.0))
      throw std::invalid_argument("SimConfig: rates must be positive");
    if (lambda >= mu) throw std::invalid_argument("SimConfig: requires lambda < mu");
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("SimConfig: x must be in [0,1]");
    if (!(t_end > 0.0)) throw std::invalid_argument("SimConfig: t_end must be positive");
    if (!(sample_every > 0.0))
      throw std::invalid_argument("SimConfig: sample_every must be positive");
    if (mode == GraphMode::Dynamic && !(regeneration_rate > 0.0))
      throw std::invalid_argument("SimConfig: regeneration_rate must be positive");
    if (tail_depth < 1) throw std::invalid_argument("SimConfig: tail_depth must be >= 1");
  }
};

// Empirical tail matrix at one sampling instant; classes are realized
// degrees on static graphs and expected degrees on dynamic graphs.
struct SimSnapshot {
  double time = 0.0;
  std::map<int, std::vector<double>> s_hat;  // class k -> tails[0..tail_depth]
  std::map<int, int> class_size;
  long offload_count = 0;  // cumulative
};

struct SimTotals {
  long generated = 0;
  long offloaded = 0;
  long completed = 0;
  long in_queue_at_end = 0;
};

struct SimResult {
  std::vector<SimSnapshot> snapshots;
  SimTotals totals;
  std::vector<std::string> warnings;
  int initial_component_count = 0;
};

// Event-driven Po2 collaboration on a static or dynamic graph.  Per user:
// Poisson(lambda) task generation; a generated task is offloaded with
// probability x (leaves the system), otherwise the generator polls one
// uniformly random neighbor and the task joins the strictly shorter queue
// (fair coin on ties, own queue if there is no neighbor).  Nonempty queues
// complete work at rate mu.  Dynamic graphs are regenerated at an
// exponential rate.  Draw order per event is fixed for reproducibility:
// arrival = offload coin, neighbor pick, tie coin, service draw, next
// arrival draw.
inline SimResult run_simulation(const SimConfig& config) {
  config.validate();
  Rng rng(config.seed);
  SimResult result;

  if (stability_margin(config.profile, config.lambda, config.mu, 1.0 - config.x) >= 1.0)
    result.warnings.push_back(
        "collaboration load exceeds the mean-field stability margin; tails may not settle");

  Graph graph;
  DynamicGraphModel model;
  if (config.mode == GraphMode::Static) {
    graph = build_configuration_graph(config.n_users, config.profile, rng);
    for (int u = 0; u < config.n_users; ++u)
      if (graph.degrees[u] == 0)
        throw std::invalid_argument("run_simulation: static mode requires all degrees >= 1");
  } else {
    model = make_dynamic_graph_model(config.n_users, config.profile, config.regeneration_rate,
                                     rng);
    graph = model.current;
  }
  result.initial_component_count = component_count(graph);

  // Measurement classes: realized degree (static) or expected degree (dynamic).
  std::map<int, std::vector<int>> classes;
  for (int u = 0; u < config.n_users; ++u) {
    int k = config.mode == GraphMode::Static ? graph.degrees[u] : model.expected_degrees[u];
    classes[k].push_back(u);
  }

  enum class EventType { Arrival, Service, Regenerate, Sample };
  struct Event {
    double t;
    EventType type;
    int user;
    bool operator>(const Event& o) const { return t > o.t; }
  };
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events;

  std::vector<long> queue(config.n_users, 0);
  for (int u = 0; u < config.n_users; ++u)
    events.push({exp_draw(rng, config.lambda), EventType::Arrival, u});
  if (config.mode == GraphMode::Dynamic)
    events.push({exp_draw(rng, config.regeneration_rate), EventType::Regenerate, -1});
  events.push({config.sample_every, EventType::Sample, -1});

  auto take_snapshot = [&](double t) {
    SimSnapshot snap;
    snap.time = t;
    snap.offload_count = result.totals.offloaded;
    std::vector<long> hist(config.tail_depth + 1, 0);
    for (const auto& [k, members] : classes) {
      std::fill(hist.begin(), hist.end(), 0);
      for (int u : members) hist[std::min<long>(queue[u], config.tail_depth)]++;
      std::vector<double> tails(config.tail_depth + 1, 0.0);
      long at_least = 0;
      for (int i = config.tail_depth; i >= 0; --i) {
        at_least += hist[i];
        tails[i] = static_cast<double>(at_least) / members.size();
      }
      snap.s_hat[k] = std::move(tails);
      snap.class_size[k] = static_cast<int>(members.size());
    }
    result.snapshots.push_back(std::move(snap));
  };

  while (!events.empty()) {
    Event ev = events.top();
    events.pop();
    if (ev.t > config.t_end) break;
    switch (ev.type) {
      case EventType::Arrival: {
        result.totals.generated++;
        if (coin(rng, config.x)) {
          result.totals.offloaded++;
        } else {
          int u = ev.user;
          int target = u;
          const auto& neigh = graph.adjacency[u];
          if (!neigh.empty()) {
            int v = neigh[index_draw(rng, neigh.size())];
            if (queue[v] < queue[u])
              target = v;
            else if (queue[v] == queue[u] && coin(rng))
              target = v;
          }
          queue[target]++;
          if (queue[target] == 1)
            events.push({ev.t + exp_draw(rng, config.mu), EventType::Service, target});
        }
        events.push({ev.t + exp_draw(rng, config.lambda), EventType::Arrival, ev.user});
        break;
      }
      case EventType::Service: {
        queue[ev.user]--;
        result.totals.completed++;
        if (queue[ev.user] > 0)
          events.push({ev.t + exp_draw(rng, config.mu), EventType::Service, ev.user});
        break;
      }
      case EventType::Regenerate: {
        regenerate_dynamic_graph(model, rng);
        graph = model.current;
        events.push({ev.t + exp_draw(rng, config.regeneration_rate), EventType::Regenerate, -1});
        break;
      }
      case EventType::Sample: {
        take_snapshot(ev.t);
        double next = ev.t + config.sample_every;
        if (next <= config.t_end + 1e-12) events.push({next, EventType::Sample, -1});
        break;
      }
    }
  }
  for (long q : queue) result.totals.in_queue_at_end += q;
  return result;
}

// Time average of s_hat_{k,i} over the trailing fraction of the horizon.
inline double late_window_average(const SimResult& result, int k, int i,
                                  double window_fraction = 0.25) {
  if (result.snapshots.empty()) throw std::invalid_argument("late_window_average: no snapshots");
  double t_end = result.snapshots.back().time;
  double t_from = t_end * (1.0 - window_fraction);
  double sum = 0.0;
  long count = 0;
  for (const auto& snap : result.snapshots) {
    if (snap.time < t_from) continue;
    auto it = snap.s_hat.find(k);
    if (it == snap.s_hat.end()) continue;
    sum += it->second[i];
    ++count;
  }
  if (count == 0) throw std::invalid_argument("late_window_average: class never observed");
  return sum / count;
}

struct ConvergenceStudy {
  std::vector<int> sizes;
  // trajectories[size][seed] = (t, s_hat_{k_min,1}) series
  std::vector<std::vector<std::vector<std::pair<double, double>>>> trajectories;
  std::vector<double> late_window_variance;  // per size, seed-averaged
};

// Po2 runs across system sizes; reports the busy-tail trajectory of the
// smallest degree class and how its late-window fluctuation shrinks with n.
inline ConvergenceStudy convergence_study(const SimConfig& base, const std::vector<int>& sizes,
                                          const std::vector<std::uint64_t>& seeds,
                                          double window_fraction = 0.25) {
  if (sizes.empty() || seeds.empty())
    throw std::invalid_argument("convergence_study: sizes and seeds must be nonempty");
  for (std::size_t j = 1; j < sizes.size(); ++j)
    if (sizes[j] <= sizes[j - 1])
      throw std::invalid_argument("convergence_study: sizes must be ascending");

  const int k_min = base.profile.k_min();
  ConvergenceStudy study;
  study.sizes = sizes;
  study.trajectories.resize(sizes.size());
  study.late_window_variance.assign(sizes.size(), 0.0);
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    double var_sum = 0.0;
    for (std::uint64_t seed : seeds) {
      SimConfig cfg = base;
      cfg.n_users = sizes[si];
      cfg.seed = seed;
      SimResult run = run_simulation(cfg);
      std::vector<std::pair<double, double>> series;
      double t_from = cfg.t_end * (1.0 - window_fraction);
      double sum = 0.0, sq = 0.0;
      long count = 0;
      for (const auto& snap : run.snapshots) {
        auto it = snap.s_hat.find(k_min);
        if (it == snap.s_hat.end()) continue;
        double v = it->second[1];
        series.emplace_back(snap.time, v);
        if (snap.time >= t_from) {
          sum += v;
          sq += v * v;
          ++count;
        }
      }
      if (count > 1) {
        double mean = sum / count;
        var_sum += std::max(0.0, sq / count - mean * mean);
      }
      study.trajectories[si].push_back(std::move(series));
    }
    study.late_window_variance[si] = var_sum / seeds.size();
  }
  return study;
}

// Mean number in system of an M/M/1 queue, rho / (1 - rho).
inline double mm1_mean_workload(double lambda, double mu) {
  if (lambda < 0.0 || mu <= 0.0)
    throw std::invalid_argument("mm1_mean_workload: invalid rates");
  if (lambda >= mu) throw infeasible_error("mm1_mean_workload: requires lambda < mu");
  double rho = lambda / mu;
  return rho / (1.0 - rho);
}

// Fraction of the non-collaborative M/M/1 workload removed by Po2
// collaboration at the same effective arrival rate x_c * lambda.
inline double workload_reduction(const DegreeProfile& profile, double lambda, double mu,
                                 double x_c, double tol = 1e-9) {
  if (x_c == 0.0) return 0.0;  // both workloads vanish
  StationaryPoint sp = stationary_point(profile, lambda, mu, x_c, tol);
  double baseline = mm1_mean_workload(x_c * lambda, mu);
  return 1.0 - sp.mean_workload / baseline;
}

}  // namespace mfedge
