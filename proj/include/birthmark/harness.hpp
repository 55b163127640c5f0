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
//
// Experiment front end: a JSON-configurable dispatcher over the estimators,
// plus the verification battery that checks every closed-form prediction
// against a seeded Monte Carlo run. Each summary carries its analytic
// reference and the band used for the pass/fail verdict.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "birthmark/birthmark.hpp"
#include "birthmark/dynamics.hpp"
#include "birthmark/ensembles.hpp"
#include "birthmark/errors.hpp"
#include "birthmark/estimator.hpp"
#include "birthmark/io.hpp"
#include "birthmark/moments.hpp"
#include "birthmark/rng.hpp"
#include "birthmark/sectors.hpp"
#include "birthmark/spectral.hpp"
#include "birthmark/symmetry.hpp"

namespace birthmark {

enum class ExperimentKind {
  enhancement,
  moments,
  tensor,
  sector,
  convergence,
  verify_all,
};

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::enhancement: return "enhancement";
    case ExperimentKind::moments: return "moments";
    case ExperimentKind::tensor: return "tensor";
    case ExperimentKind::sector: return "sector";
    case ExperimentKind::convergence: return "convergence";
    case ExperimentKind::verify_all: return "verify-all";
  }
  return "?";
}

inline ExperimentKind parse_experiment(std::string_view name) {
  if (name == "enhancement") return ExperimentKind::enhancement;
  if (name == "moments") return ExperimentKind::moments;
  if (name == "tensor") return ExperimentKind::tensor;
  if (name == "sector") return ExperimentKind::sector;
  if (name == "convergence") return ExperimentKind::convergence;
  if (name == "verify-all" || name == "verify_all")
    return ExperimentKind::verify_all;
  throw ConfigError("unknown experiment: '" + std::string(name) + "'");
}

/// One experiment invocation. Defaults are overridden first by a JSON config
/// document, then by CLI flags.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::enhancement;
  SymmetryClass symmetry = SymmetryClass::gue;
  Eigen::Index n = 32;
  std::vector<Eigen::Index> layout;      // sector dimensions (sector runs)
  std::vector<std::size_t> accessible;   // accessible sectors; empty = all
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  SamplePath path = SamplePath::dirichlet;
  std::vector<double> horizons = {10.0, 100.0, 1000.0, 10000.0};
  Eigen::Index pairs = 8;  // probe pairs for the sliced tensor estimator
  std::string out;         // output file; empty writes to stdout only
  int workers = 1;

  void validate() const {
    if (n < 1) throw ConfigError("field 'n' must be >= 1");
    if (samples < 2) throw ConfigError("field 'samples' must be >= 2");
    if (workers < 1) throw ConfigError("field 'workers' must be >= 1");
    if (pairs < 1) throw ConfigError("field 'pairs' must be >= 1");
    if (experiment == ExperimentKind::convergence) {
      if (horizons.empty()) throw ConfigError("field 'horizons' is empty");
      for (std::size_t i = 0; i < horizons.size(); ++i) {
        if (!(horizons[i] > 0.0))
          throw ConfigError("field 'horizons' must be positive");
        if (i > 0 && horizons[i] <= horizons[i - 1])
          throw ConfigError("field 'horizons' must be strictly increasing");
      }
    }
    if (experiment == ExperimentKind::sector && layout.empty())
      throw ConfigError("field 'layout' is required for sector runs");
  }

  SectorLayout sector_layout() const {
    if (layout.empty())
      throw ConfigError("field 'layout' is required for sector runs");
    if (accessible.empty()) return SectorLayout::full(layout);
    return SectorLayout(layout, accessible);
  }
};

namespace detail {

template <class T>
T json_field(const nlohmann::json& j, const char* name, const T& fallback) {
  if (!j.contains(name)) return fallback;
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("field '") + name + "' has the wrong type");
  }
}

}  // namespace detail

/// Applies a config document on top of `base`, rejecting unknown fields so
/// typos surface instead of silently running defaults.
inline ExperimentConfig config_from_json(const nlohmann::json& j,
                                         ExperimentConfig base = {}) {
  if (!j.is_object()) throw ConfigError("config document must be an object");
  static const std::vector<std::string> known = {
      "experiment", "class",    "n",    "layout",  "accessible",
      "samples",    "seed",     "path", "horizons", "pairs",
      "out",        "workers"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown config field '" + key + "'");

  ExperimentConfig cfg = std::move(base);
  if (j.contains("experiment"))
    cfg.experiment =
        parse_experiment(detail::json_field<std::string>(j, "experiment", ""));
  if (j.contains("class"))
    cfg.symmetry =
        parse_symmetry_class(detail::json_field<std::string>(j, "class", ""));
  if (j.contains("path"))
    cfg.path = parse_sample_path(detail::json_field<std::string>(j, "path", ""));
  cfg.n = detail::json_field<Eigen::Index>(j, "n", cfg.n);
  cfg.layout = detail::json_field<std::vector<Eigen::Index>>(j, "layout",
                                                             cfg.layout);
  cfg.accessible = detail::json_field<std::vector<std::size_t>>(
      j, "accessible", cfg.accessible);
  cfg.samples = detail::json_field<std::uint64_t>(j, "samples", cfg.samples);
  cfg.seed = detail::json_field<std::uint64_t>(j, "seed", cfg.seed);
  cfg.horizons =
      detail::json_field<std::vector<double>>(j, "horizons", cfg.horizons);
  cfg.pairs = detail::json_field<Eigen::Index>(j, "pairs", cfg.pairs);
  cfg.out = detail::json_field<std::string>(j, "out", cfg.out);
  cfg.workers = detail::json_field<int>(j, "workers", cfg.workers);
  return cfg;
}

/// Outcome of one named check: the measured numbers and whether they landed
/// inside the stated band.
struct Verdict {
  std::string name;
  bool passed = false;
  std::string detail;
};

inline std::string verdict_line(const Verdict& v) {
  return std::string(v.passed ? "PASS" : "FAIL") + " " + v.name + ": " +
         v.detail;
}

/// Everything run() hands back: the artifact written to --out (CSV or JSON),
/// a JSON summary with analytic references and verdicts, and the aggregate
/// pass flag that drives the exit code.
struct RunOutput {
  std::string table;
  nlohmann::ordered_json summary;
  bool passed = true;
};

inline constexpr std::uint64_t kVerifySeed = 7;

namespace detail {

inline double z_score(double mean, double target, double se) {
  const double gap = std::abs(mean - target);
  if (se > 0.0) return gap / se;
  return gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

inline nlohmann::ordered_json band_check(double value, double target,
                                         double se, double z_limit) {
  nlohmann::ordered_json j;
  j["value"] = value;
  j["analytic"] = target;
  j["stderr"] = se;
  j["z"] = z_score(value, target, se);
  j["z_limit"] = z_limit;
  j["pass"] = z_score(value, target, se) <= z_limit;
  return j;
}

inline nlohmann::ordered_json enhancement_summary(const EnhancementReport& r,
                                                  double self_target,
                                                  double cross_target) {
  nlohmann::ordered_json s;
  s["class"] = to_string(r.symmetry);
  s["n"] = r.n;
  s["path"] = to_string(r.path);
  s["samples"] = r.samples;
  s["seed"] = r.seed;
  s["p_aa"] = band_check(r.p_aa(), self_target,
                         r.self_overlap.standard_error(), 4.0);
  s["p_ab"] = band_check(r.p_ab(), cross_target,
                         r.cross_overlap.standard_error(), 4.0);
  s["ratio"] =
      band_check(r.ratio(), r.analytic, r.ratio_standard_error(), 4.0);
  s["degenerate_trials"] = r.degenerate_trials;
  const bool ok = s["p_aa"]["pass"].get<bool>() &&
                  s["p_ab"]["pass"].get<bool>() &&
                  s["ratio"]["pass"].get<bool>();
  s["passed"] = ok;
  return s;
}

template <SymmetryClass C>
TimeAverageCurve seeded_convergence_curve(Eigen::Index n, std::uint64_t seed,
                                          const std::vector<double>& horizons) {
  PhiloxRng rng(seed, 0);
  const auto h = sample_matrix<C>(n, rng);
  const auto spectrum = decompose(h);
  const auto a = sample_haar_state<C>(n, rng);
  const auto b = sample_haar_state<C>(n, rng);
  return convergence_curve(spectrum, a, b, horizons);
}

}  // namespace detail

inline std::vector<Verdict> verify_all(std::uint64_t seed = kVerifySeed,
                                       int workers = 1);

/// Runs one configured experiment and assembles its artifact and summary.
inline RunOutput run(const ExperimentConfig& cfg) {
  cfg.validate();
  RunOutput out;
  out.summary["experiment"] = to_string(cfg.experiment);

  switch (cfg.experiment) {
    case ExperimentKind::enhancement: {
      const auto rep = estimate_enhancement(cfg.symmetry, cfg.n, cfg.samples,
                                            cfg.seed, cfg.path, cfg.workers);
      out.table = enhancement_csv_header() + "\n" + enhancement_csv_row(rep) +
                  "\n";
      auto s = detail::enhancement_summary(
          rep, analytic_self_overlap(cfg.symmetry, cfg.n),
          1.0 / static_cast<double>(cfg.n));
      out.passed = s["passed"].get<bool>();
      out.summary.update(s);
      break;
    }
    case ExperimentKind::moments: {
      const auto est = estimate_moments(cfg.symmetry, cfg.n, cfg.samples,
                                        cfg.seed, cfg.workers);
      const auto table = analytic_moments(cfg.symmetry, cfg.n);
      out.table = moments_csv_header() + "\n" + moments_csv_row(est, table) +
                  "\n";
      out.summary["class"] = to_string(cfg.symmetry);
      out.summary["n"] = cfg.n;
      out.summary["samples"] = cfg.samples;
      out.summary["seed"] = cfg.seed;
      out.summary["e_pi_sq"] =
          detail::band_check(est.e_pi_sq.mean(), table.e_pi_sq,
                             est.e_pi_sq.standard_error(), 4.0);
      out.summary["e_pi_pj"] =
          detail::band_check(est.e_pi_pj.mean(), table.e_pi_pj,
                             est.e_pi_pj.standard_error(), 4.0);
      out.summary["normalization_gap"] = table.normalization_gap();
      out.passed = out.summary["e_pi_sq"]["pass"].get<bool>() &&
                   out.summary["e_pi_pj"]["pass"].get<bool>();
      out.summary["passed"] = out.passed;
      break;
    }
    case ExperimentKind::tensor: {
      const bool dense = cfg.n <= kMaxDenseTensorDim;
      const TensorFit fit =
          dense ? estimate_fourth_tensor(cfg.symmetry, cfg.n, cfg.samples,
                                         cfg.seed, cfg.workers)
                : estimate_fourth_tensor_sliced(cfg.symmetry, cfg.n,
                                                cfg.samples, cfg.seed,
                                                cfg.pairs, cfg.workers);
      auto j = tensor_fit_json(fit);
      j["estimator"] = dense ? "dense" : "sliced";
      const double target = cfg.symmetry == SymmetryClass::gue ? 2.0 : 3.0;
      const double band = cfg.symmetry == SymmetryClass::gue ? 0.05 : 0.1;
      const double ratio = pairing_ratio(fit);
      j["ratio_band"] = {target - band, target + band};
      const bool ratio_ok = std::abs(ratio - target) <= band;
      const bool z_ok = fit.off_pattern_max_z < 5.0;
      j["ratio_pass"] = ratio_ok;
      j["off_pattern_pass"] = z_ok;
      j["passed"] = ratio_ok && z_ok;
      out.table = j.dump(2) + "\n";
      out.passed = ratio_ok && z_ok;
      out.summary.update(j);
      break;
    }
    case ExperimentKind::sector: {
      const SectorLayout layout = cfg.sector_layout();
      const auto rep = estimate_sector_ratio(layout, cfg.symmetry, cfg.samples,
                                             cfg.seed, cfg.path, cfg.workers);
      out.table = enhancement_csv_header() + "\n" + enhancement_csv_row(rep) +
                  "\n";
      auto s = detail::enhancement_summary(
          rep, analytic_self_overlap(cfg.symmetry, layout.accessible_dim()),
          1.0 / static_cast<double>(layout.total()));
      s["layout"] = layout.sector_dims();
      s["accessible"] = layout.accessible();
      s["accessible_dim"] = layout.accessible_dim();
      out.passed = s["passed"].get<bool>();
      out.summary.update(s);
      break;
    }
    case ExperimentKind::convergence: {
      const TimeAverageCurve curve = with_symmetry(cfg.symmetry, [&](auto tag) {
        return detail::seeded_convergence_curve<decltype(tag)::value>(
            cfg.n, cfg.seed, cfg.horizons);
      });
      out.table = convergence_csv(curve);
      const std::size_t last = curve.horizons.size() - 1;
      const double rel =
          curve.limit > 0.0 ? curve.abs_error(last) / curve.limit
                            : std::numeric_limits<double>::infinity();
      out.summary["class"] = to_string(cfg.symmetry);
      out.summary["n"] = cfg.n;
      out.summary["seed"] = cfg.seed;
      out.summary["horizon_units"] = "inverse mean level spacing";
      out.summary["mean_gap"] = curve.mean_gap;
      out.summary["limit"] = curve.limit;
      out.summary["final_rel_error"] = rel;
      out.summary["rel_error_limit"] = 1e-2;
      const bool shrinking =
          curve.horizons.size() < 2 ||
          curve.abs_error(last) <= curve.abs_error(0);
      out.summary["error_shrinks"] = shrinking;
      out.passed = rel <= 1e-2 && shrinking;
      out.summary["passed"] = out.passed;
      break;
    }
    case ExperimentKind::verify_all: {
      const auto verdicts = verify_all(cfg.seed, cfg.workers);
      nlohmann::ordered_json list = nlohmann::ordered_json::array();
      for (const auto& v : verdicts) {
        out.table += verdict_line(v) + "\n";
        nlohmann::ordered_json item;
        item["name"] = v.name;
        item["passed"] = v.passed;
        item["detail"] = v.detail;
        list.push_back(item);
        out.passed = out.passed && v.passed;
      }
      out.summary["checks"] = list;
      out.summary["passed"] = out.passed;
      break;
    }
  }
  return out;
}

/// The verification battery: every closed-form prediction checked against a
/// seeded run at its stated tolerance, one verdict per check.
inline std::vector<Verdict> verify_all(std::uint64_t seed, int workers) {
  using SC = SymmetryClass;
  std::vector<Verdict> verdicts;
  const auto add = [&](std::string name, bool pass, std::string detail) {
    verdicts.push_back(Verdict{std::move(name), pass, std::move(detail)});
  };

  // Self- and cross-overlap means at N = 32 against 2/(N+1), 3/(N+2), 1/N.
  const auto gue32 = estimate_enhancement(SC::gue, 32, 100000, seed,
                                          SamplePath::dirichlet, workers);
  const auto goe32 = estimate_enhancement(SC::goe, 32, 100000, seed + 1,
                                          SamplePath::dirichlet, workers);
  for (const auto* rep : {&gue32, &goe32}) {
    const double target = analytic_self_overlap(rep->symmetry, rep->n);
    const double z = detail::z_score(rep->p_aa(), target,
                                     rep->self_overlap.standard_error());
    const double rel = std::abs(rep->p_aa() - target) / target;
    add(std::string("self-overlap-") +
            (rep->symmetry == SC::gue ? "gue" : "goe"),
        z <= 4.0 && rel <= 0.01,
        "p_aa=" + format_double(rep->p_aa()) + " target=" +
            format_double(target) + " z=" + format_double(z) +
            " rel=" + format_double(rel));
  }
  {
    const double target = 1.0 / 32.0;
    const double z1 = detail::z_score(gue32.p_ab(), target,
                                      gue32.cross_overlap.standard_error());
    const double z2 = detail::z_score(goe32.p_ab(), target,
                                      goe32.cross_overlap.standard_error());
    add("cross-overlap", z1 <= 4.0 && z2 <= 4.0,
        "gue p_ab=" + format_double(gue32.p_ab()) + " z=" + format_double(z1) +
            "; goe p_ab=" + format_double(goe32.p_ab()) +
            " z=" + format_double(z2) + "; target=" + format_double(target));
  }

  // Large-N enhancement ratios against the universal limits 2 and 3.
  {
    const auto gue_big = estimate_enhancement(SC::gue, 1024, 100000, seed + 2,
                                              SamplePath::dirichlet, workers);
    const auto goe_big = estimate_enhancement(SC::goe, 1024, 100000, seed + 3,
                                              SamplePath::dirichlet, workers);
    const double dg = std::abs(gue_big.ratio() - 2.0) / 2.0;
    const double dr = std::abs(goe_big.ratio() - 3.0) / 3.0;
    add("ratio-limits", dg <= 0.02 && dr <= 0.02,
        "gue ratio=" + format_double(gue_big.ratio()) +
            " rel=" + format_double(dg) +
            "; goe ratio=" + format_double(goe_big.ratio()) +
            " rel=" + format_double(dr) + "; band=2%");
  }

  // Eigenvector pipeline against the direct weight law at N = 64.
  {
    bool ok = true;
    std::string detail_text;
    std::uint64_t s = seed + 4;
    for (const SC c : {SC::gue, SC::goe}) {
      const auto m = estimate_enhancement(c, 64, 1000, s++,
                                          SamplePath::matrix, workers);
      const auto d = estimate_enhancement(c, 64, 100000, s++,
                                          SamplePath::dirichlet, workers);
      const double za = detail::z_score(
          m.p_aa(), d.p_aa(),
          std::hypot(m.self_overlap.standard_error(),
                     d.self_overlap.standard_error()));
      const double zb = detail::z_score(
          m.p_ab(), d.p_ab(),
          std::hypot(m.cross_overlap.standard_error(),
                     d.cross_overlap.standard_error()));
      ok = ok && za <= 4.0 && zb <= 4.0;
      detail_text += std::string(to_string(c)) + " z_aa=" + format_double(za) +
                     " z_ab=" + format_double(zb) + "; ";
    }
    add("matrix-dirichlet-agreement", ok, detail_text + "limit=4");
  }

  // Second mixed moments across dimensions.
  {
    bool ok = true;
    double worst = 0.0;
    std::uint64_t s = seed + 8;
    for (const SC c : {SC::gue, SC::goe})
      for (const Eigen::Index n : {2, 4, 8, 16}) {
        const auto est = estimate_moments(c, n, 1000000, s++, workers);
        const auto table = analytic_moments(c, n);
        const double z1 = detail::z_score(est.e_pi_sq.mean(), table.e_pi_sq,
                                          est.e_pi_sq.standard_error());
        const double z2 = detail::z_score(est.e_pi_pj.mean(), table.e_pi_pj,
                                          est.e_pi_pj.standard_error());
        worst = std::max({worst, z1, z2});
        ok = ok && z1 <= 4.0 && z2 <= 4.0;
      }
    add("dirichlet-moments", ok,
        "n in {2,4,8,16}, both classes, 10^6 samples; worst z=" +
            format_double(worst) + " limit=4");
  }

  // Fourth-moment pairing structure at N = 8.
  {
    bool ok = true;
    std::string detail_text;
    std::uint64_t s = seed + 16;
    for (const SC c : {SC::gue, SC::goe}) {
      const auto fit = estimate_fourth_tensor(c, 8, 1000000, s++, workers);
      const double target = c == SC::gue ? 2.0 : 3.0;
      const double band = c == SC::gue ? 0.05 : 0.1;
      const double ratio = pairing_ratio(fit);
      const bool ratio_ok = std::abs(ratio - target) <= band;
      const bool z_ok = fit.off_pattern_max_z < 5.0;
      ok = ok && ratio_ok && z_ok;
      detail_text += std::string(to_string(c)) + " C/D=" +
                     format_double(ratio) + " off-pattern max z=" +
                     format_double(fit.off_pattern_max_z) + "; ";
    }
    add("pairing-structure", ok, detail_text + "bands=[1.95,2.05]/[2.9,3.1], z<5");
  }

  // Sector-restricted amplification, plus the d = N reduction.
  {
    const auto gue_sec =
        estimate_sector_ratio(SectorLayout({4, 4}, {0}), SC::gue, 100000,
                              seed + 18, SamplePath::matrix, workers);
    const auto goe_sec =
        estimate_sector_ratio(SectorLayout({4, 4, 8}, {0}), SC::goe, 100000,
                              seed + 19, SamplePath::matrix, workers);
    const double z1 = detail::z_score(gue_sec.ratio(), gue_sec.analytic,
                                      gue_sec.ratio_standard_error());
    const double z2 = detail::z_score(goe_sec.ratio(), goe_sec.analytic,
                                      goe_sec.ratio_standard_error());
    bool reduction = true;
    for (const SC c : {SC::gue, SC::goe})
      for (const Eigen::Index n : {2, 8, 32, 128, 1024})
        reduction = reduction && analytic_sector_ratio(c, n, n) ==
                                     analytic_ratio(c, n);
    add("sector-amplification", z1 <= 4.0 && z2 <= 4.0 && reduction,
        "gue(8,4) ratio=" + format_double(gue_sec.ratio()) + " target=" +
            format_double(gue_sec.analytic) + " z=" + format_double(z1) +
            "; goe(16,4) ratio=" + format_double(goe_sec.ratio()) +
            " target=" + format_double(goe_sec.analytic) +
            " z=" + format_double(z2) + "; d=N reduction exact=" +
            (reduction ? "yes" : "no"));
  }

  // Finite-time averages converge onto the spectral sum.
  {
    const auto curve = detail::seeded_convergence_curve<SC::gue>(
        16, seed + 20, {10.0, 100.0, 1000.0, 10000.0});
    const double rel = curve.abs_error(3) / curve.limit;
    const bool shrinking = curve.abs_error(3) < curve.abs_error(0);
    add("time-average-convergence", rel < 1e-2 && shrinking,
        "rel error at T=10^4 gaps: " + format_double(rel) +
            " (limit 1e-2); error at 10^4 < error at 10: " +
            (shrinking ? "yes" : "no"));
  }

  // Exact invariants: the 1/N floor, the normalization identity, and merge
  // determinism of the sufficient statistics.
  {
    double floor_slack = std::numeric_limits<double>::infinity();
    std::uint64_t s = seed + 21;
    for (const SC c : {SC::gue, SC::goe}) {
      const Eigen::Index n = 16;
      for (std::uint64_t i = 0; i < 100000; ++i) {
        PhiloxRng rng(s, i);
        const WeightVector w = sample_dirichlet(c, n, rng);
        floor_slack = std::min(
            floor_slack, dilation(w) - 1.0 / static_cast<double>(n));
      }
      ++s;
    }
    const bool floor_ok = floor_slack >= -1e-12;

    double worst_gap = 0.0;
    for (const SC c : {SC::gue, SC::goe}) {
      for (Eigen::Index n = 1; n <= 128; ++n)
        worst_gap = std::max(worst_gap,
                             std::abs(analytic_moments(c, n).normalization_gap()));
      for (const Eigen::Index n : {256, 512, 1024, 2048, 4096})
        worst_gap = std::max(worst_gap,
                             std::abs(analytic_moments(c, n).normalization_gap()));
    }
    const bool identity_ok = worst_gap <= 1e-12;

    PhiloxRng rng(seed + 23, 0);
    std::vector<EstimatorResult> partials(16);
    EstimatorResult pooled;
    for (std::size_t k = 0; k < partials.size(); ++k)
      for (int i = 0; i < 625; ++i) {
        const double x = rng.uniform();
        partials[k].add(x);
        pooled.add(x);
      }
    auto shuffled = partials;
    for (std::size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1],
                shuffled[static_cast<std::size_t>(detail::uniform_index(
                    rng, static_cast<Eigen::Index>(i)))]);
    auto reversed = partials;
    std::reverse(reversed.begin(), reversed.end());
    const EstimatorResult m1 = merge(partials);
    const EstimatorResult m2 = merge(shuffled);
    const EstimatorResult m3 = merge(reversed);
    double merge_gap = 0.0;
    for (const auto* m : {&m1, &m2, &m3}) {
      merge_gap = std::max(merge_gap, std::abs(m->mean() - pooled.mean()));
      merge_gap = std::max(merge_gap, std::abs(m->standard_error() -
                                               pooled.standard_error()));
    }
    const bool merge_ok = merge_gap <= 1e-12;

    add("exact-invariants", floor_ok && identity_ok && merge_ok,
        "floor slack=" + format_double(floor_slack) +
            "; identity gap=" + format_double(worst_gap) +
            "; merge gap=" + format_double(merge_gap) + "; limits 1e-12");
  }

  return verdicts;
}

}  // namespace birthmark
