// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: validate configs, run sweeps, export synthetic
// channels.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "squintbook/runner.hpp"

namespace {

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wideband full-duplex beamforming codebook designer"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string channel_out;
  int workers = 1;

  auto* run = app.add_subcommand("run", "Design codebooks and run the sweep");
  run->add_option("config", config_path, "Run config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides config)");
  run->add_option("--workers", workers, "Concurrent sweep workers")
      ->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "Check a config without running");
  validate->add_option("config", config_path, "Run config (JSON)")->required();

  auto* exportc =
      app.add_subcommand("export-channel", "Synthesize and save the channel");
  exportc->add_option("config", config_path, "Run config (JSON)")->required();
  exportc->add_option("output", channel_out, "Output channel file (.cht)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      const auto diags = squintbook::validate_config(read_json(config_path));
      for (const auto& d : diags) std::cout << d << "\n";
      const bool has_error =
          std::any_of(diags.begin(), diags.end(),
                      [](const std::string& d) { return d.rfind("error:", 0) == 0; });
      return has_error ? 1 : 0;
    }

    if (run->parsed()) {
      const auto cfg = squintbook::parse_config(read_json(config_path));
      const std::string dir = out_dir.empty() ? cfg.output_dir : out_dir;
      squintbook::run_to_directory(cfg, dir, workers);
      std::cout << "wrote artifacts to " << dir << "\n";
      return 0;
    }

    if (exportc->parsed()) {
      const auto cfg = squintbook::parse_config(read_json(config_path));
      const double fc = cfg.carrier_ghz * 1e9;
      const auto tx = squintbook::ArrayGeometry::planar(cfg.nx, cfg.nz, fc);
      const auto rx = squintbook::ArrayGeometry::planar(cfg.nx, cfg.nz, fc);
      const squintbook::SubcarrierGrid sc(fc, cfg.bandwidths_ghz.front() * 1e9,
                                          cfg.subcarriers);
      const auto channel = squintbook::synth_nearfield_si(
          tx, rx, cfg.separation_wavelengths, sc, cfg.rician_kappa_db, cfg.seed);
      squintbook::save_channel(channel, channel_out);
      std::cout << "wrote " << channel_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
