// Copyright 2026 The birthmark Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "birthmark/harness.hpp"

using namespace birthmark;
using Catch::Approx;
using nlohmann::json;

TEST_CASE("experiment names parse both ways", "[harness]") {
  REQUIRE(parse_experiment("enhancement") == ExperimentKind::enhancement);
  REQUIRE(parse_experiment("moments") == ExperimentKind::moments);
  REQUIRE(parse_experiment("tensor") == ExperimentKind::tensor);
  REQUIRE(parse_experiment("sector") == ExperimentKind::sector);
  REQUIRE(parse_experiment("convergence") == ExperimentKind::convergence);
  REQUIRE(parse_experiment("verify-all") == ExperimentKind::verify_all);
  REQUIRE(parse_experiment("verify_all") == ExperimentKind::verify_all);
  REQUIRE_THROWS_AS(parse_experiment("bogus"), ConfigError);
  for (const auto kind :
       {ExperimentKind::enhancement, ExperimentKind::moments,
        ExperimentKind::tensor, ExperimentKind::sector,
        ExperimentKind::convergence, ExperimentKind::verify_all}) {
    REQUIRE(parse_experiment(to_string(kind)) == kind);
  }
}

TEST_CASE("verdict lines are grep friendly", "[harness]") {
  REQUIRE(verdict_line({"self-overlap", true, "z = 0.3"}) ==
          "PASS self-overlap: z = 0.3");
  REQUIRE(verdict_line({"ratio", false, "off by 2"}) == "FAIL ratio: off by 2");
}

TEST_CASE("config documents override only the fields they name", "[harness]") {
  const json doc = json::parse(R"({
    "experiment": "sector",
    "class": "GOE",
    "n": 12,
    "layout": [4, 4, 8],
    "accessible": [0],
    "samples": 2500,
    "path": "matrix",
    "horizons": [5.0, 50.0],
    "pairs": 3,
    "out": "run.csv",
    "workers": 2
  })");
  ExperimentConfig base;
  base.seed = 99;
  const auto cfg = config_from_json(doc, base);
  REQUIRE(cfg.experiment == ExperimentKind::sector);
  REQUIRE(cfg.symmetry == SymmetryClass::goe);
  REQUIRE(cfg.n == 12);
  REQUIRE(cfg.layout == std::vector<Eigen::Index>{4, 4, 8});
  REQUIRE(cfg.accessible == std::vector<std::size_t>{0});
  REQUIRE(cfg.samples == 2500);
  REQUIRE(cfg.seed == 99);  // untouched: the document never mentions it
  REQUIRE(cfg.path == SamplePath::matrix);
  REQUIRE(cfg.horizons == std::vector<double>{5.0, 50.0});
  REQUIRE(cfg.pairs == 3);
  REQUIRE(cfg.out == "run.csv");
  REQUIRE(cfg.workers == 2);

  REQUIRE_THROWS_WITH(config_from_json(json::parse(R"({"typo_field": 1})")),
                      "unknown config field 'typo_field'");
  REQUIRE_THROWS_WITH(config_from_json(json::parse(R"({"n": "twelve"})")),
                      "field 'n' has the wrong type");
  REQUIRE_THROWS_AS(config_from_json(json::parse("[1, 2]")), ConfigError);
}

TEST_CASE("config validation rejects unusable settings", "[harness]") {
  ExperimentConfig cfg;
  cfg.n = 0;
  REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.samples = 1;
  REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.workers = 0;
  REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.pairs = 0;
  REQUIRE_THROWS_AS(cfg.validate(), ConfigError);

  cfg = {};
  cfg.experiment = ExperimentKind::sector;
  REQUIRE_THROWS_WITH(cfg.validate(),
                      "field 'layout' is required for sector runs");
  cfg.layout = {4, 4};
  REQUIRE_NOTHROW(cfg.validate());
  // Without an explicit accessible list the whole layout is accessible.
  REQUIRE(cfg.sector_layout().accessible_dim() == 8);

  cfg = {};
  cfg.experiment = ExperimentKind::convergence;
  cfg.horizons = {};
  REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
  cfg.horizons = {0.0, 10.0};
  REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
  cfg.horizons = {10.0, 10.0};
  REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
  cfg.horizons = {10.0, 5.0};
  REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
  cfg.horizons = {10.0, 100.0};
  REQUIRE_NOTHROW(cfg.validate());
}

TEST_CASE("enhancement run produces a verdicted summary and CSV", "[harness]") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::enhancement;
  cfg.symmetry = SymmetryClass::gue;
  cfg.n = 8;
  cfg.samples = 5000;
  cfg.seed = 12;
  const auto out = run(cfg);
  REQUIRE(out.passed);
  REQUIRE(out.summary.at("experiment") == "enhancement");
  REQUIRE(out.summary.at("class") == "GUE");
  REQUIRE(out.summary.at("n") == 8);
  for (const char* key : {"p_aa", "p_ab", "ratio"}) {
    const auto& check = out.summary.at(key);
    REQUIRE(check.contains("value"));
    REQUIRE(check.contains("analytic"));
    REQUIRE(check.contains("stderr"));
    REQUIRE(check.at("z_limit") == 4.0);
    REQUIRE(check.at("pass") == true);
  }
  REQUIRE(out.summary.at("p_aa").at("analytic").get<double>() == 2.0 / 9.0);
  REQUIRE(out.summary.at("passed") == true);

  // Two header+row lines, trailing newline.
  REQUIRE(out.table.rfind(enhancement_csv_header() + "\n", 0) == 0);
  REQUIRE(std::count(out.table.begin(), out.table.end(), '\n') == 2);

  // Byte-identical replay, also under a different worker count.
  REQUIRE(run(cfg).table == out.table);
  cfg.workers = 2;
  REQUIRE(run(cfg).table == out.table);
}

TEST_CASE("moments run checks both analytic moments", "[harness]") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::moments;
  cfg.symmetry = SymmetryClass::gue;
  cfg.n = 4;
  cfg.samples = 20000;
  cfg.seed = 5;
  const auto out = run(cfg);
  REQUIRE(out.passed);
  REQUIRE(out.summary.at("e_pi_sq").at("analytic").get<double>() == 0.1);
  REQUIRE(out.summary.at("e_pi_pj").at("analytic").get<double>() == 0.05);
  REQUIRE(out.summary.at("normalization_gap").get<double>() < 1e-12);
  REQUIRE(out.table.rfind(moments_csv_header() + "\n", 0) == 0);
}

TEST_CASE("tensor run picks the sliced estimator for large n", "[harness]") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::tensor;
  cfg.symmetry = SymmetryClass::gue;
  cfg.n = 16;
  cfg.samples = 20000;
  cfg.seed = 6;
  cfg.pairs = 6;
  const auto out = run(cfg);
  REQUIRE(out.summary.at("estimator") == "sliced");
  REQUIRE(out.summary.at("ratio_band") == json::array({1.95, 2.05}));
  REQUIRE(out.summary.at("ratio_pass") == true);
  REQUIRE(out.summary.at("off_pattern_pass") == true);
  REQUIRE(out.passed);

  cfg.n = 4;
  const auto dense = run(cfg);
  REQUIRE(dense.summary.at("estimator") == "dense");
  REQUIRE(dense.passed);
}

TEST_CASE("sector run reports the accessible-dimension target", "[harness]") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::sector;
  cfg.symmetry = SymmetryClass::goe;
  cfg.layout = {4, 4, 8};
  cfg.accessible = {0};
  cfg.samples = 20000;
  cfg.seed = 8;
  const auto out = run(cfg);
  REQUIRE(out.passed);
  REQUIRE(out.summary.at("accessible_dim") == 4);
  REQUIRE(out.summary.at("layout") == json::array({4, 4, 8}));
  // Ratio target is N * self-overlap = 16 * 3/(4+2).
  REQUIRE(out.summary.at("ratio").at("analytic").get<double>() ==
          Approx(8.0).margin(1e-14));
}

TEST_CASE("convergence run reaches the percent band", "[harness]") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::convergence;
  cfg.symmetry = SymmetryClass::gue;
  cfg.n = 16;
  cfg.seed = 4;
  const auto out = run(cfg);
  REQUIRE(out.passed);
  REQUIRE(out.summary.at("final_rel_error").get<double>() < 1e-2);
  REQUIRE(out.summary.at("error_shrinks") == true);
  REQUIRE(out.summary.at("horizon_units") == "inverse mean level spacing");
  REQUIRE(out.table.rfind("T,value,limit,abs_error\n", 0) == 0);
  REQUIRE(std::count(out.table.begin(), out.table.end(), '\n') == 5);
}
