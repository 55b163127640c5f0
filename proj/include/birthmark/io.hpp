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
// Result serialization. Floats are written with 17 significant digits via
// std::to_chars, which is locale-independent, so a fixed (config, seed) pair
// produces byte-identical files everywhere.

#pragma once

#include <array>
#include <charconv>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>

#include <json.hpp>

#include "birthmark/birthmark.hpp"
#include "birthmark/dynamics.hpp"
#include "birthmark/errors.hpp"
#include "birthmark/moments.hpp"

namespace birthmark {

inline std::string format_double(double x) {
  std::array<char, 64> buf;
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x,
                                       std::chars_format::general, 17);
  if (ec != std::errc()) throw OutputError("failed to format a double");
  return std::string(buf.data(), ptr);
}

inline std::string enhancement_csv_header() {
  return "class,n,path,samples,p_aa_mean,p_aa_stderr,p_ab_mean,p_ab_stderr,"
         "ratio,analytic_ratio,seed";
}

inline std::string enhancement_csv_row(const EnhancementReport& r) {
  std::string row;
  row += to_string(r.symmetry);
  row += ',';
  row += std::to_string(r.n);
  row += ',';
  row += to_string(r.path);
  row += ',';
  row += std::to_string(r.samples);
  row += ',';
  row += format_double(r.p_aa());
  row += ',';
  row += format_double(r.self_overlap.standard_error());
  row += ',';
  row += format_double(r.p_ab());
  row += ',';
  row += format_double(r.cross_overlap.standard_error());
  row += ',';
  row += format_double(r.ratio());
  row += ',';
  row += format_double(r.analytic);
  row += ',';
  row += std::to_string(r.seed);
  return row;
}

inline std::string moments_csv_header() {
  return "class,n,samples,e_pi_sq,e_pi_sq_stderr,e_pi_sq_analytic,"
         "e_pi_pj,e_pi_pj_stderr,e_pi_pj_analytic,seed";
}

inline std::string moments_csv_row(const MomentEstimate& est,
                                   const MomentTable& analytic) {
  std::string row;
  row += to_string(est.symmetry);
  row += ',';
  row += std::to_string(est.n);
  row += ',';
  row += std::to_string(est.samples);
  row += ',';
  row += format_double(est.e_pi_sq.mean());
  row += ',';
  row += format_double(est.e_pi_sq.standard_error());
  row += ',';
  row += format_double(analytic.e_pi_sq);
  row += ',';
  row += format_double(est.e_pi_pj.mean());
  row += ',';
  row += format_double(est.e_pi_pj.standard_error());
  row += ',';
  row += format_double(analytic.e_pi_pj);
  row += ',';
  row += std::to_string(est.seed);
  return row;
}

inline std::string convergence_csv(const TimeAverageCurve& curve) {
  std::string text = "T,value,limit,abs_error\n";
  for (std::size_t i = 0; i < curve.horizons.size(); ++i) {
    text += format_double(curve.horizons[i]);
    text += ',';
    text += format_double(curve.values[i]);
    text += ',';
    text += format_double(curve.limit);
    text += ',';
    text += format_double(curve.abs_error(i));
    text += '\n';
  }
  return text;
}

inline nlohmann::ordered_json tensor_fit_json(const TensorFit& fit) {
  nlohmann::ordered_json j;
  j["class"] = to_string(fit.symmetry);
  j["n"] = fit.n;
  j["samples"] = fit.samples;
  nlohmann::ordered_json coefs;
  for (const auto& [name, value] : fit.coefficients) coefs[name] = value;
  j["coefficients"] = coefs;
  j["residual"] = fit.residual;
  j["seed"] = fit.seed;
  j["off_pattern_max_z"] = fit.off_pattern_max_z;
  j["c_estimate"] = fit.diag_moment.mean();
  j["c_stderr"] = fit.diag_moment.standard_error();
  j["d_estimate"] = fit.pair_moment.mean();
  j["d_stderr"] = fit.pair_moment.standard_error();
  j["pairing_ratio"] = pairing_ratio(fit);
  return j;
}

inline void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw OutputError("failed while writing '" + path + "'");
}

}  // namespace birthmark
