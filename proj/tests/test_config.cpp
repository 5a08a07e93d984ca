#include <catch2/catch.hpp>

#include <json.hpp>

#include "mfedge/config.hpp"

using namespace mfedge;

TEST_CASE("defaults reflect the evaluated configuration", "[config]") {
  RunConfig cfg = default_config();
  CHECK(cfg.params.lambda == 0.9);
  CHECK(cfg.params.mu == 1.0);
  CHECK(cfg.params.gamma == 5.0);
  CHECK(cfg.params.tx_time() == Approx(1.6));  // 2000 KB over 10 Mbps
  CHECK(cfg.params.d_bar == 1.6);
  CHECK(cfg.params.s_bar == 0.06);
  CHECK(cfg.params.x_bar == 0.6);
  CHECK(cfg.params.p_u == 0.5);
  CHECK(cfg.profile.mean_degree() == Approx(7.5));
  CHECK(cfg.profile.k_min() == 6);
  CHECK(cfg.profile.k_max() == 9);
  CHECK(cfg.seeds.size() == 8);
  CHECK(validate_config(cfg).empty());
}

TEST_CASE("json round trip preserves the config", "[config]") {
  RunConfig cfg = default_config();
  cfg.experiment = "pricing_sweep";
  cfg.params.d_bar = 1.7;
  cfg.profile = DegreeProfile::uniform(4, 11);
  cfg.sweep.v_weights = {5, 50};
  cfg.seeds = {42, 43};
  cfg.solver.tol = 1e-8;
  cfg.sim.mode = "dynamic";

  RunConfig back = config_from_json(config_to_json(cfg));
  CHECK(config_to_json(back) == config_to_json(cfg));
}

TEST_CASE("partial json files fall back to defaults", "[config]") {
  auto j = nlohmann::json::parse(R"({"experiment":"feasibility","params":{"d_bar":1.9}})");
  RunConfig cfg = config_from_json(j);
  CHECK(cfg.experiment == "feasibility");
  CHECK(cfg.params.d_bar == 1.9);
  CHECK(cfg.params.lambda == 0.9);
  CHECK(cfg.profile.mean_degree() == Approx(7.5));
}

TEST_CASE("unit conversion from raw fields", "[config]") {
  auto j = nlohmann::json::parse(R"({"params":{"data_size_kb":1000,"uplink_mbps":8}})");
  RunConfig cfg = config_from_json(j);
  CHECK(cfg.params.tx_time() == Approx(1.0));  // 8e6 bits over 8e6 bits/s
}

TEST_CASE("validation lists precise issues", "[config]") {
  RunConfig cfg = default_config();
  cfg.experiment = "frobnicate";
  auto issues = validate_config(cfg);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].find("frobnicate") != std::string::npos);
  for (const auto& name : experiment_names())
    CHECK(issues[0].find(name) != std::string::npos);

  cfg = default_config();
  cfg.params.lambda = 1.5;  // >= mu
  CHECK(!validate_config(cfg).empty());

  cfg = default_config();
  cfg.sweep.xc_lambda = {};
  CHECK(!validate_config(cfg).empty());

  cfg = default_config();
  cfg.sweep.sizes = {300, 100};
  CHECK(!validate_config(cfg).empty());

  cfg = default_config();
  cfg.seeds = {};
  CHECK(!validate_config(cfg).empty());
}

TEST_CASE("interval choice override", "[config]") {
  auto j = nlohmann::json::parse(R"({"solver":{"interval_choice":"lowest_x"}})");
  RunConfig cfg = config_from_json(j);
  CHECK(cfg.solver.interval_choice == "lowest_x");
  CHECK(validate_config(cfg).empty());
  CHECK(config_to_json(cfg).at("solver").at("interval_choice") == "lowest_x");
  cfg.solver.interval_choice = "sideways";
  CHECK(!validate_config(cfg).empty());
}

TEST_CASE("malformed profile json is rejected", "[config]") {
  auto j = nlohmann::json::parse(R"({"profile":{"support":[3,2],"pmf":[0.5,0.5]}})");
  CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
}
