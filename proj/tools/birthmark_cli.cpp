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

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "birthmark/harness.hpp"

namespace {

constexpr const char* kDescription =
    "Long-time return-probability statistics of random-matrix eigenstates.\n"
    "Settings resolve in order: built-in defaults, then --config JSON fields,\n"
    "then explicit flags. Results are deterministic for a fixed seed; the\n"
    "worker count only changes wall-clock time.";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{kDescription};
  app.require_subcommand(1);

  std::string class_name;
  std::string path_name;
  std::string config_path;
  std::string out_path;
  std::int64_t n = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> layout;
  std::vector<std::size_t> accessible;
  std::vector<double> horizons;
  std::int64_t pairs = 0;
  int workers = 0;

  auto* opt_config =
      app.add_option("--config", config_path,
                     "JSON config file; explicit flags override its fields");
  auto* opt_class =
      app.add_option("--class", class_name, "Symmetry class: GOE or GUE");
  auto* opt_n = app.add_option("--n", n, "Hilbert space dimension");
  auto* opt_samples =
      app.add_option("--samples", samples, "Monte Carlo trial count");
  auto* opt_seed = app.add_option("--seed", seed, "Master seed");
  auto* opt_path = app.add_option(
      "--path", path_name,
      "Weight sampling path: dirichlet (direct law) or matrix (eigensolve)");
  auto* opt_layout =
      app.add_option("--layout", layout,
                     "Sector dimensions, comma separated (sector runs)")
          ->delimiter(',');
  auto* opt_accessible =
      app.add_option("--accessible", accessible,
                     "Accessible sector indices, comma separated; default all")
          ->delimiter(',');
  auto* opt_horizons =
      app.add_option("--horizons", horizons,
                     "Averaging horizons in mean-gap units, comma separated")
          ->delimiter(',');
  auto* opt_pairs = app.add_option(
      "--pairs", pairs, "Probe index pairs for the sliced tensor estimator");
  auto* opt_out =
      app.add_option("--out", out_path, "Write the result table to this file");
  auto* opt_workers =
      app.add_option("--workers", workers, "Worker thread count");

  app.add_subcommand("enhancement",
                     "Self- vs cross-overlap means and their ratio")
      ->fallthrough();
  app.add_subcommand("moments", "Second mixed moments of the weight vector")
      ->fallthrough();
  app.add_subcommand("tensor",
                     "Fourth-moment tensor estimate and pairing-structure fit")
      ->fallthrough();
  app.add_subcommand("sector", "Enhancement for sector-restricted states")
      ->fallthrough();
  app.add_subcommand("convergence",
                     "Finite-time averages against the spectral sum")
      ->fallthrough();
  app.add_subcommand("verify-all",
                     "Run every closed-form check at its stated tolerance")
      ->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Normalize CLI11's per-error exit codes: 0 for --help, 2 otherwise.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    birthmark::ExperimentConfig cfg;
    cfg.experiment =
        birthmark::parse_experiment(app.get_subcommands().front()->get_name());
    if (cfg.experiment == birthmark::ExperimentKind::verify_all)
      cfg.seed = birthmark::kVerifySeed;

    if (opt_config->count() > 0) {
      std::ifstream in(config_path);
      if (!in)
        throw birthmark::ConfigError("cannot read config file '" +
                                     config_path + "'");
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw birthmark::ConfigError(std::string("config parse error: ") +
                                     e.what());
      }
      const auto kind = cfg.experiment;
      cfg = birthmark::config_from_json(doc, cfg);
      cfg.experiment = kind;  // the subcommand always wins
    }

    if (opt_class->count() > 0)
      cfg.symmetry = birthmark::parse_symmetry_class(class_name);
    if (opt_n->count() > 0) cfg.n = n;
    if (opt_samples->count() > 0) cfg.samples = samples;
    if (opt_seed->count() > 0) cfg.seed = seed;
    if (opt_path->count() > 0) cfg.path = birthmark::parse_sample_path(path_name);
    if (opt_layout->count() > 0)
      cfg.layout.assign(layout.begin(), layout.end());
    if (opt_accessible->count() > 0) cfg.accessible = accessible;
    if (opt_horizons->count() > 0) cfg.horizons = horizons;
    if (opt_pairs->count() > 0) cfg.pairs = pairs;
    if (opt_out->count() > 0) cfg.out = out_path;
    if (opt_workers->count() > 0) cfg.workers = workers;

    const birthmark::RunOutput result = birthmark::run(cfg);
    if (cfg.out.empty())
      std::cout << result.table;
    else
      birthmark::write_text_file(cfg.out, result.table);
    std::cout << result.summary.dump(2) << "\n";
    return result.passed ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
