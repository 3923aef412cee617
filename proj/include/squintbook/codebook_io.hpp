// SPDX-License-Identifier: Apache-2.0
//
// Codebook (de)serialization. Weights are stored as quantization indices
// rather than floats, so a reloaded codebook is realizable by construction.

#ifndef SQUINTBOOK_CODEBOOK_IO_HPP
#define SQUINTBOOK_CODEBOOK_IO_HPP

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "squintbook/design.hpp"

namespace squintbook {

inline CodebookLabel label_from_string(const std::string& s) {
  if (s == "proposed") return CodebookLabel::Proposed;
  if (s == "cbf") return CodebookLabel::CBF;
  if (s == "narrowband") return CodebookLabel::NarrowbandLS;
  if (s == "narrowband-wb") return CodebookLabel::NarrowbandLSWideObj;
  throw std::invalid_argument("unknown codebook label: " + s);
}

inline nlohmann::json codebook_to_json(const Codebook& cb) {
  constexpr double r2d = 180.0 / std::numbers::pi;
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& d : cb.grid.directions())
    grid.push_back({{"az_deg", d.azimuth_rad * r2d},
                    {"el_deg", d.elevation_rad * r2d}});

  nlohmann::json weights = nlohmann::json::array();
  for (Eigen::Index i = 0; i < cb.weights.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < cb.weights.cols(); ++j) {
      const ProjectedWeight p = project_weight(cb.spec, cb.weights(i, j));
      row.push_back({{"q_amp", p.amp_index}, {"p_phase", p.phase_index}});
    }
    weights.push_back(row);
  }

  return {{"label", to_string(cb.label)},
          {"n", cb.weights.rows()},
          {"m", cb.weights.cols()},
          {"quantization",
           {{"phase_bits", cb.spec.phase_bits()},
            {"amp_bits", cb.spec.amp_bits()},
            {"amp_step_db", cb.spec.amp_step_db()}}},
          {"grid", grid},
          {"weights", weights}};
}

inline void save_codebook(const Codebook& cb, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_codebook: cannot open " + path);
  out << codebook_to_json(cb).dump(2) << "\n";
}

inline Codebook load_codebook(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_codebook: cannot open " + path);
  nlohmann::json j;
  in >> j;

  const auto& q = j.at("quantization");
  QuantizationSpec spec(q.at("phase_bits").get<int>(), q.at("amp_bits").get<int>(),
                        q.at("amp_step_db").get<double>());

  std::vector<Direction> dirs;
  for (const auto& d : j.at("grid"))
    dirs.push_back(Direction::from_degrees(d.at("az_deg").get<double>(),
                                           d.at("el_deg").get<double>()));

  const int n = j.at("n").get<int>();
  const int m = j.at("m").get<int>();
  CMatrix weights(n, m);
  const auto& w = j.at("weights");
  if (static_cast<int>(w.size()) != n)
    throw std::runtime_error("load_codebook: weight row count mismatch");
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(w[i].size()) != m)
      throw std::runtime_error("load_codebook: weight column count mismatch");
    for (int jj = 0; jj < m; ++jj)
      weights(i, jj) = spec.weight(w[i][jj].at("q_amp").get<int>(),
                                   w[i][jj].at("p_phase").get<int>());
  }

  Codebook cb;
  cb.weights = std::move(weights);
  cb.grid = CoverageGrid(std::move(dirs));
  cb.spec = spec;
  cb.label = label_from_string(j.at("label").get<std::string>());
  return cb;
}

}  // namespace squintbook

#endif  // SQUINTBOOK_CODEBOOK_IO_HPP
