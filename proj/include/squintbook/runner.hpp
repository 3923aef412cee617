// SPDX-License-Identifier: Apache-2.0
//
// Configuration-driven scenario runner: parses a JSON run config, designs
// codebooks for every (bandwidth, sigma^2, baseline) sweep point, evaluates
// them over a seeded user population, and writes plot-ready CSV artifacts
// plus a summary.json. Outputs are deterministic for a fixed seed.

#ifndef SQUINTBOOK_RUNNER_HPP
#define SQUINTBOOK_RUNNER_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "squintbook/codebook_io.hpp"
#include "squintbook/design.hpp"
#include "squintbook/metrics.hpp"

namespace squintbook {

struct UserPopulation {
  double az_min_deg = -67.5, az_max_deg = 67.5;
  double el_min_deg = -37.5, el_max_deg = 37.5;
  int count = 100;
  std::uint64_t seed = 1;
};

struct RunConfig {
  std::uint64_t seed = 1;
  int nx = 8, nz = 8;
  double carrier_ghz = 60.0;
  double separation_wavelengths = 10.0;
  double rician_kappa_db = 10.0;
  double cov_az_min_deg = -60, cov_az_max_deg = 60;
  double cov_el_min_deg = -30, cov_el_max_deg = 30;
  double cov_spacing_deg = 15;
  int subcarriers = 16;
  int phase_bits = 6, amp_bits = 6;
  double amp_step_db = 0.5;
  LinkBudget budget;
  UserPopulation users;
  std::vector<double> bandwidths_ghz;
  std::vector<double> sigma2_db;
  std::vector<std::string> baselines;
  int outer_rounds = 1;
  SolverConfig solver;
  std::string output_dir = "out";
};

namespace detail {

inline double parse_db(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "-inf")
      return -std::numeric_limits<double>::infinity();
    throw std::invalid_argument("dB field must be a number or \"-inf\"");
  }
  return j.get<double>();
}

inline std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

}  // namespace detail

/// Parses and cross-checks a config document without running it. Returns one
/// diagnostic string per problem; entries starting with "error:" block a run.
inline std::vector<std::string> validate_config(const nlohmann::json& j) {
  std::vector<std::string> diags;
  auto require = [&](const char* path, bool ok) {
    if (!ok) diags.push_back(std::string("error: ") + path + ": missing");
  };

  require("arrays", j.contains("arrays"));
  if (j.contains("arrays")) {
    const auto& a = j["arrays"];
    if (a.value("nx", 1) < 1 || a.value("nz", 1) < 1)
      diags.push_back("error: arrays.nx/nz: must be >= 1");
    if (!(a.value("carrier_ghz", 60.0) > 0.0))
      diags.push_back("error: arrays.carrier_ghz: must be positive");
  }
  if (j.value("subcarriers", 1) < 1)
    diags.push_back("error: subcarriers: must be >= 1");
  if (j.contains("separation_wavelengths") &&
      !(j["separation_wavelengths"].get<double>() > 0.0))
    diags.push_back("error: separation_wavelengths: must be positive");

  require("sweep", j.contains("sweep"));
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    require("sweep.bandwidths_ghz",
            s.contains("bandwidths_ghz") && !s["bandwidths_ghz"].empty());
    require("sweep.baselines", s.contains("baselines") && !s["baselines"].empty());
    if (s.contains("baselines"))
      for (const auto& b : s["baselines"])
        try {
          label_from_string(b.get<std::string>());
        } catch (const std::exception& e) {
          diags.push_back(std::string("error: sweep.baselines: ") + e.what());
        }
    if (s.contains("sigma2_db") && s["sigma2_db"].empty())
      diags.push_back("error: sweep.sigma2_db: must be nonempty when present");
  }

  if (j.contains("coverage")) {
    const auto& c = j["coverage"];
    const double az_span = c.value("az_max_deg", 60.0) - c.value("az_min_deg", -60.0);
    const double el_span = c.value("el_max_deg", 30.0) - c.value("el_min_deg", -30.0);
    const double sp = c.value("spacing_deg", 15.0);
    if (!(sp > 0.0)) {
      diags.push_back("error: coverage.spacing_deg: must be positive");
    } else {
      auto divides = [&](double span) {
        const double r = std::fmod(span, sp);
        return r < 1e-9 || sp - r < 1e-9;
      };
      const int naz = static_cast<int>(std::floor(az_span / sp + 1e-9)) + 1;
      const int nel = static_cast<int>(std::floor(el_span / sp + 1e-9)) + 1;
      if (!divides(az_span) || !divides(el_span))
        diags.push_back("warning: coverage.spacing_deg does not divide the range; grid is " +
                        std::to_string(naz) + "x" + std::to_string(nel) + " = " +
                        std::to_string(naz * nel) + " beams");
    }
  }

  if (j.contains("quantization")) {
    const auto& q = j["quantization"];
    if (q.value("phase_bits", 6) < 1)
      diags.push_back("error: quantization.phase_bits: must be >= 1");
    if (q.value("amp_bits", 6) < 0)
      diags.push_back("error: quantization.amp_bits: must be >= 0");
    if (!(q.value("amp_step_db", 0.5) > 0.0))
      diags.push_back("error: quantization.amp_step_db: must be positive");
  }
  if (j.contains("budget")) {
    for (const char* f : {"snr_tx_db", "snr_rx_db"})
      if (j["budget"].contains(f) && !std::isfinite(j["budget"][f].get<double>()))
        diags.push_back(std::string("error: budget.") + f + ": must be finite");
  }
  if (j.contains("users") && j["users"].value("count", 1) < 1)
    diags.push_back("error: users.count: must be >= 1");
  return diags;
}

inline RunConfig parse_config(const nlohmann::json& j) {
  {
    auto diags = validate_config(j);
    for (const auto& d : diags)
      if (d.rfind("error:", 0) == 0)
        throw std::invalid_argument("config validation failed: " + d);
  }
  RunConfig c;
  c.seed = j.value("seed", std::uint64_t{1});
  if (const char* env = std::getenv("SQUINTBOOK_SEED"))
    c.seed = std::strtoull(env, nullptr, 10);
  const auto& a = j.at("arrays");
  c.nx = a.value("nx", 8);
  c.nz = a.value("nz", 8);
  c.carrier_ghz = a.value("carrier_ghz", 60.0);
  c.separation_wavelengths = j.value("separation_wavelengths", 10.0);
  c.rician_kappa_db = j.contains("rician_kappa_db")
                          ? detail::parse_db(j["rician_kappa_db"])
                          : 10.0;
  if (j.contains("coverage")) {
    const auto& cov = j["coverage"];
    c.cov_az_min_deg = cov.value("az_min_deg", -60.0);
    c.cov_az_max_deg = cov.value("az_max_deg", 60.0);
    c.cov_el_min_deg = cov.value("el_min_deg", -30.0);
    c.cov_el_max_deg = cov.value("el_max_deg", 30.0);
    c.cov_spacing_deg = cov.value("spacing_deg", 15.0);
  }
  c.subcarriers = j.value("subcarriers", 16);
  if (j.contains("quantization")) {
    const auto& q = j["quantization"];
    c.phase_bits = q.value("phase_bits", 6);
    c.amp_bits = q.value("amp_bits", 6);
    c.amp_step_db = q.value("amp_step_db", 0.5);
  }
  if (j.contains("budget")) {
    const auto& b = j["budget"];
    if (b.contains("snr_tx_db")) c.budget.snr_tx_db = b["snr_tx_db"].get<double>();
    if (b.contains("snr_rx_db")) c.budget.snr_rx_db = b["snr_rx_db"].get<double>();
    if (b.contains("inr_rx_db")) c.budget.inr_rx_db = detail::parse_db(b["inr_rx_db"]);
  }
  if (j.contains("users")) {
    const auto& u = j["users"];
    c.users.az_min_deg = u.value("az_min_deg", -67.5);
    c.users.az_max_deg = u.value("az_max_deg", 67.5);
    c.users.el_min_deg = u.value("el_min_deg", -37.5);
    c.users.el_max_deg = u.value("el_max_deg", 37.5);
    c.users.count = u.value("count", 100);
    c.users.seed = u.value("seed", std::uint64_t{1});
  }
  const auto& s = j.at("sweep");
  c.bandwidths_ghz = s.at("bandwidths_ghz").get<std::vector<double>>();
  c.sigma2_db = s.value("sigma2_db", std::vector<double>{-10.0});
  c.baselines = s.at("baselines").get<std::vector<std::string>>();
  c.outer_rounds = j.value("outer_rounds", 1);
  if (j.contains("solver")) {
    const auto& so = j["solver"];
    c.solver.max_outer_iters = so.value("max_outer_iters", c.solver.max_outer_iters);
    c.solver.max_inner_iters = so.value("max_inner_iters", c.solver.max_inner_iters);
    c.solver.penalty_init = so.value("penalty_init", c.solver.penalty_init);
    c.solver.penalty_growth = so.value("penalty_growth", c.solver.penalty_growth);
    c.solver.feasibility_tol = so.value("feasibility_tol", c.solver.feasibility_tol);
    c.solver.objective_rel_tol =
        so.value("objective_rel_tol", c.solver.objective_rel_tol);
    c.solver.kkt_tol = so.value("kkt_tol", c.solver.kkt_tol);
    c.solver.inner_grad_tol = so.value("inner_grad_tol", c.solver.inner_grad_tol);
  }
  c.output_dir = j.value("output_dir", std::string("out"));
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  nlohmann::json j;
  in >> j;
  return parse_config(j);
}

// --- Sweep execution --------------------------------------------------------

struct SweepRow {
  std::string baseline;
  double bandwidth_ghz = 0.0;
  double sigma2_db = 0.0;
  double mean_r = 0.0;
  double mean_gamma = 0.0;
  std::vector<double> inr_db_per_freq;       // exact triple-average per subcarrier
  std::vector<double> cov_var_tx_per_freq;   // linear
  std::vector<double> cov_var_rx_per_freq;   // linear
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
  bool solver_infeasible = false;
};

struct SweepOutput {
  std::vector<SweepRow> rows;
  // (baseline, bandwidth) -> index into rows of the tuned (argmax mean R) row
  std::map<std::pair<std::string, double>, std::size_t> tuned;
  std::map<std::pair<std::string, double>, DesignResult> tuned_designs;
};

namespace detail {

struct UserPair {
  Direction downlink;
  Direction uplink;
};

inline std::vector<UserPair> draw_users(const UserPopulation& pop) {
  std::mt19937_64 rng(pop.seed);
  constexpr double d2r = std::numbers::pi / 180.0;
  std::uniform_real_distribution<double> az(pop.az_min_deg * d2r,
                                            pop.az_max_deg * d2r);
  std::uniform_real_distribution<double> el(pop.el_min_deg * d2r,
                                            pop.el_max_deg * d2r);
  std::vector<UserPair> users(pop.count);
  for (auto& u : users) {
    u.downlink = Direction(az(rng), el(rng));
    u.uplink = Direction(az(rng), el(rng));
  }
  return users;
}

/// Per-subcarrier exact mean INR (dB) over all beam pairs of a codebook pair.
inline std::vector<double> mean_inr_curve(const LinkBudget& budget,
                                          const ChannelTensor& channel,
                                          const CMatrix& F, const CMatrix& W) {
  const double nt = channel.tx_size(), nr = channel.rx_size();
  const int mt = static_cast<int>(F.cols()), mr = static_cast<int>(W.cols());
  std::vector<double> out(channel.num_subcarriers());
  for (int k = 0; k < channel.num_subcarriers(); ++k) {
    const CMatrix coupling = W.adjoint() * channel.entries[k] * F;
    double acc = 0.0;
    for (int jcol = 0; jcol < mr; ++jcol) {
      const double wn2 = W.col(jcol).squaredNorm();
      for (int i = 0; i < mt; ++i)
        acc += std::norm(coupling(jcol, i)) / (nt * nt * nr * wn2);
    }
    out[k] = linear_to_db(budget.inr_rx_linear() * acc / (mt * mr));
  }
  return out;
}

struct EvalResult {
  double mean_r = 0.0;
  double mean_gamma = 0.0;
};

/// Evaluates a codebook pair over the user population: beam selection to
/// maximize SNR, then subcarrier-average sum spectral efficiency and its
/// normalization against the interference-free CBF reference.
inline EvalResult evaluate_codebooks(const RunConfig& cfg,
                                     const ArrayGeometry& tx_geom,
                                     const ArrayGeometry& rx_geom,
                                     const SubcarrierGrid& sc,
                                     const ChannelTensor& channel,
                                     const CMatrix& F, const CMatrix& W,
                                     const CMatrix& F_cbf, const CMatrix& W_cbf,
                                     const std::vector<UserPair>& users) {
  EvalResult res;
  const std::vector<double> zeros(sc.num_subcarriers(), 0.0);
  for (const auto& u : users) {
    const UserChannel h_tx =
        synth_los_user(tx_geom, u.downlink, sc, UserChannel::Side::Transmit);
    const UserChannel h_rx =
        synth_los_user(rx_geom, u.uplink, sc, UserChannel::Side::Receive);

    const BeamSelection sel_f = select_beams(F, h_tx);
    const BeamSelection sel_w = select_beams(W, h_rx);
    const CVector f = F.col(sel_f.index);
    const CVector w = W.col(sel_w.index);

    const auto stx = snr_tx(cfg.budget, h_tx, f);
    const auto srx = snr_rx(cfg.budget, h_rx, w);
    const auto irx = inr_rx(cfg.budget, channel, f, w);
    const auto se = sum_se(stx, srx, irx, zeros);
    res.mean_r += se.mean;

    // Interference-free CBF reference for the same user pair.
    const BeamSelection ref_f = select_beams(F_cbf, h_tx);
    const BeamSelection ref_w = select_beams(W_cbf, h_rx);
    const auto ref_stx = snr_tx(cfg.budget, h_tx, F_cbf.col(ref_f.index));
    const auto ref_srx = snr_rx(cfg.budget, h_rx, W_cbf.col(ref_w.index));
    double snr_tx_ref = 0.0, snr_rx_ref = 0.0;
    for (int k = 0; k < sc.num_subcarriers(); ++k) {
      snr_tx_ref += ref_stx[k];
      snr_rx_ref += ref_srx[k];
    }
    snr_tx_ref /= sc.num_subcarriers();
    snr_rx_ref /= sc.num_subcarriers();
    const auto gamma = normalized_sum_se(se.per_subcarrier, snr_tx_ref, snr_rx_ref);
    double mg = 0.0;
    for (double g : gamma) mg += g;
    res.mean_gamma += mg / gamma.size();
  }
  res.mean_r /= users.size();
  res.mean_gamma /= users.size();
  return res;
}

inline std::vector<double> coverage_curve(const CMatrix& weights,
                                          const ArrayGeometry& geom,
                                          const CoverageGrid& grid,
                                          const SubcarrierGrid& sc) {
  std::vector<double> out(sc.num_subcarriers());
  for (int k = 0; k < sc.num_subcarriers(); ++k)
    out[k] = coverage_variance(weights, geom, grid, sc.frequency(k));
  return out;
}

}  // namespace detail

/// Runs the full sweep described by the config. Bandwidth points execute
/// concurrently up to `workers` threads; rows are keyed and sorted before
/// being returned, so the result is order-independent.
inline SweepOutput run_sweep(const RunConfig& cfg, int workers = 1) {
  const double fc = cfg.carrier_ghz * 1e9;
  const ArrayGeometry tx_geom = ArrayGeometry::planar(cfg.nx, cfg.nz, fc);
  const ArrayGeometry rx_geom = ArrayGeometry::planar(cfg.nx, cfg.nz, fc);
  const CoverageGrid grid = CoverageGrid::rectangular(
      cfg.cov_az_min_deg, cfg.cov_az_max_deg, cfg.cov_el_min_deg,
      cfg.cov_el_max_deg, cfg.cov_spacing_deg);
  const QuantizationSpec spec(cfg.phase_bits, cfg.amp_bits, cfg.amp_step_db);
  const auto users = detail::draw_users(cfg.users);

  struct BandwidthResult {
    std::vector<SweepRow> rows;
    std::map<std::pair<std::string, double>, std::size_t> tuned_local;
    std::map<std::pair<std::string, double>, DesignResult> designs;
  };
  std::vector<BandwidthResult> per_bw(cfg.bandwidths_ghz.size());

  auto run_bandwidth = [&](std::size_t bi) {
    const double bw_ghz = cfg.bandwidths_ghz[bi];
    const SubcarrierGrid sc(fc, bw_ghz * 1e9, cfg.subcarriers);
    const ChannelTensor channel = synth_nearfield_si(
        tx_geom, rx_geom, cfg.separation_wavelengths, sc, cfg.rician_kappa_db,
        cfg.seed);

    DesignScenario scenario{tx_geom,  rx_geom, grid,
                            grid,     sc,      channel,
                            spec,     0.0,     0.0,
                            cfg.outer_rounds,  cfg.solver};
    const auto cbf = design_cbf(scenario);

    BandwidthResult& br = per_bw[bi];
    for (const auto& baseline : cfg.baselines) {
      const CodebookLabel label = label_from_string(baseline);
      double best_r = -std::numeric_limits<double>::infinity();
      for (double s2_db : cfg.sigma2_db) {
        SweepRow row;
        row.baseline = baseline;
        row.bandwidth_ghz = bw_ghz;
        row.sigma2_db = s2_db;
        row.seed = cfg.seed;
        const auto t0 = std::chrono::steady_clock::now();

        DesignResult design;
        try {
          switch (label) {
            case CodebookLabel::CBF: {
              design.tx = cbf.first;
              design.rx = cbf.second;
              break;
            }
            case CodebookLabel::Proposed: {
              scenario.sigma2_tx = scenario.sigma2_rx = db_to_linear(s2_db);
              design = design_proposed(scenario);
              break;
            }
            case CodebookLabel::NarrowbandLS:
            case CodebookLabel::NarrowbandLSWideObj: {
              scenario.sigma2_tx = scenario.sigma2_rx = db_to_linear(s2_db);
              design = design_narrowband(
                  scenario, label == CodebookLabel::NarrowbandLSWideObj);
              break;
            }
          }
        } catch (const std::runtime_error&) {
          row.solver_infeasible = true;
          br.rows.push_back(row);
          continue;
        }

        const auto eval = detail::evaluate_codebooks(
            cfg, tx_geom, rx_geom, sc, channel, design.tx.weights,
            design.rx.weights, cbf.first.weights, cbf.second.weights, users);
        row.mean_r = eval.mean_r;
        row.mean_gamma = eval.mean_gamma;
        row.inr_db_per_freq = detail::mean_inr_curve(
            cfg.budget, channel, design.tx.weights, design.rx.weights);
        row.cov_var_tx_per_freq =
            detail::coverage_curve(design.tx.weights, tx_geom, grid, sc);
        row.cov_var_rx_per_freq =
            detail::coverage_curve(design.rx.weights, rx_geom, grid, sc);
        row.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        br.rows.push_back(row);

        if (row.mean_r > best_r) {
          best_r = row.mean_r;
          br.tuned_local[{baseline, bw_ghz}] = br.rows.size() - 1;
          br.designs[{baseline, bw_ghz}] = design;
        }
      }
    }
  };

  if (workers <= 1 || cfg.bandwidths_ghz.size() <= 1) {
    for (std::size_t bi = 0; bi < cfg.bandwidths_ghz.size(); ++bi)
      run_bandwidth(bi);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    const int n = std::min<int>(workers, static_cast<int>(cfg.bandwidths_ghz.size()));
    for (int t = 0; t < n; ++t)
      pool.emplace_back([&] {
        for (std::size_t bi = next.fetch_add(1); bi < cfg.bandwidths_ghz.size();
             bi = next.fetch_add(1))
          run_bandwidth(bi);
      });
    for (auto& th : pool) th.join();
  }

  SweepOutput out;
  for (auto& br : per_bw) {
    const std::size_t base = out.rows.size();
    for (auto& [key, idx] : br.tuned_local) out.tuned[key] = base + idx;
    for (auto& [key, d] : br.designs) out.tuned_designs[key] = std::move(d);
    out.rows.insert(out.rows.end(), br.rows.begin(), br.rows.end());
  }
  return out;
}

/// Executes a full run: sweep, CSV artifacts, channel and codebook files, and
/// summary.json under out_dir.
inline void run_to_directory(const RunConfig& cfg, const std::string& out_dir,
                             int workers = 1) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const double fc = cfg.carrier_ghz * 1e9;

  const SweepOutput sweep = run_sweep(cfg, workers);

  // Channel export per bandwidth.
  const ArrayGeometry tx_geom = ArrayGeometry::planar(cfg.nx, cfg.nz, fc);
  const ArrayGeometry rx_geom = ArrayGeometry::planar(cfg.nx, cfg.nz, fc);
  for (double bw_ghz : cfg.bandwidths_ghz) {
    const SubcarrierGrid sc(fc, bw_ghz * 1e9, cfg.subcarriers);
    const ChannelTensor channel = synth_nearfield_si(
        tx_geom, rx_geom, cfg.separation_wavelengths, sc, cfg.rician_kappa_db,
        cfg.seed);
    save_channel(channel,
                 out_dir + "/channel_B" + detail::fmt(bw_ghz) + "ghz.cht");
  }

  // Tuned codebooks.
  for (const auto& [key, design] : sweep.tuned_designs) {
    const std::string stem =
        out_dir + "/codebook_" + key.first + "_B" + detail::fmt(key.second) + "ghz";
    save_codebook(design.tx, stem + "_tx.json");
    save_codebook(design.rx, stem + "_rx.json");
  }

  // se_vs_bandwidth.csv: one row per sweep point per baseline.
  {
    std::ofstream csv(out_dir + "/se_vs_bandwidth.csv");
    csv << "baseline,bandwidth_ghz,sigma2_db,mean_R_bpshz,mean_gamma\n";
    for (const auto& row : sweep.rows)
      csv << row.baseline << "," << detail::fmt(row.bandwidth_ghz) << ","
          << detail::fmt(row.sigma2_db) << "," << detail::fmt(row.mean_r) << ","
          << detail::fmt(row.mean_gamma) << "\n";
  }

  // inr_vs_freq.csv: tuned row per (baseline, bandwidth).
  std::size_t inr_rows = 0;
  {
    std::ofstream csv(out_dir + "/inr_vs_freq.csv");
    csv << "baseline,bandwidth_ghz,freq_ghz,mean_inr_db\n";
    for (const auto& [key, idx] : sweep.tuned) {
      const SweepRow& row = sweep.rows[idx];
      const SubcarrierGrid sc(fc, row.bandwidth_ghz * 1e9, cfg.subcarriers);
      for (int k = 0; k < sc.num_subcarriers(); ++k) {
        csv << row.baseline << "," << detail::fmt(row.bandwidth_ghz) << ","
            << detail::fmt(sc.frequency(k) / 1e9) << ","
            << detail::fmt(row.inr_db_per_freq[k]) << "\n";
        ++inr_rows;
      }
    }
  }

  // coverage_variance_vs_freq.csv: largest bandwidth, tuned sigma^2.
  const double bw_max =
      *std::max_element(cfg.bandwidths_ghz.begin(), cfg.bandwidths_ghz.end());
  std::size_t cov_rows = 0;
  {
    std::ofstream csv(out_dir + "/coverage_variance_vs_freq.csv");
    csv << "baseline,side,freq_ghz,sigma2_hat_db\n";
    const SubcarrierGrid sc(fc, bw_max * 1e9, cfg.subcarriers);
    for (const auto& [key, idx] : sweep.tuned) {
      if (key.second != bw_max) continue;
      const SweepRow& row = sweep.rows[idx];
      for (int k = 0; k < sc.num_subcarriers(); ++k) {
        csv << row.baseline << ",tx," << detail::fmt(sc.frequency(k) / 1e9) << ","
            << detail::fmt(linear_to_db(row.cov_var_tx_per_freq[k])) << "\n";
        ++cov_rows;
      }
      for (int k = 0; k < sc.num_subcarriers(); ++k) {
        csv << row.baseline << ",rx," << detail::fmt(sc.frequency(k) / 1e9) << ","
            << detail::fmt(linear_to_db(row.cov_var_rx_per_freq[k])) << "\n";
        ++cov_rows;
      }
    }
  }

  // summary.json with provenance; the timestamp is the only
  // non-reproducible field and is confined to this file.
  nlohmann::json tuned = nlohmann::json::object();
  for (const auto& [key, idx] : sweep.tuned)
    tuned[key.first + "@B" + detail::fmt(key.second)] =
        sweep.rows[idx].sigma2_db;
  nlohmann::json summary = {
      {"seed", cfg.seed},
      {"baselines", cfg.baselines},
      {"bandwidths_ghz", cfg.bandwidths_ghz},
      {"sigma2_db", cfg.sigma2_db},
      {"subcarriers", cfg.subcarriers},
      {"users", cfg.users.count},
      {"tuned_sigma2_db", tuned},
      {"rows",
       {{"se_vs_bandwidth", sweep.rows.size()},
        {"inr_vs_freq", inr_rows},
        {"coverage_variance_vs_freq", cov_rows}}},
      {"coverage_variance_bandwidth_ghz", bw_max},
      {"timestamp",
       std::chrono::duration_cast<std::chrono::seconds>(
           std::chrono::system_clock::now().time_since_epoch())
           .count()}};
  std::ofstream(out_dir + "/summary.json") << summary.dump(2) << "\n";
}

}  // namespace squintbook

#endif  // SQUINTBOOK_RUNNER_HPP
