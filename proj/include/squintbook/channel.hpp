// SPDX-License-Identifier: Apache-2.0
//
// Self-interference channel tensors and line-of-sight user channels.
// The synthetic self-interference model combines a near-field spherical-wave
// LOS component with a seeded Rician NLOS term; externally simulated channels
// can be imported through the CHT1 file format.

#ifndef SQUINTBOOK_CHANNEL_HPP
#define SQUINTBOOK_CHANNEL_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "squintbook/array.hpp"

namespace squintbook {

/// Per-subcarrier Nr x Nt self-interference matrices H[k]. When normalized,
/// the subcarrier-average Frobenius energy equals Nt * Nr.
struct ChannelTensor {
  std::vector<CMatrix> entries;  // K matrices, each Nr x Nt
  SubcarrierGrid grid{1.0, 0.0, 1};
  bool normalized = false;

  int num_subcarriers() const { return static_cast<int>(entries.size()); }
  int rx_size() const { return entries.empty() ? 0 : static_cast<int>(entries[0].rows()); }
  int tx_size() const { return entries.empty() ? 0 : static_cast<int>(entries[0].cols()); }

  double average_energy() const {
    double e = 0.0;
    for (const auto& H : entries) e += H.squaredNorm();
    return e / static_cast<double>(entries.size());
  }
};

/// Per-subcarrier user channel vectors h[k], normalized so the
/// subcarrier-average energy equals the array size.
struct UserChannel {
  enum class Side { Transmit, Receive };
  std::vector<CVector> entries;  // K vectors of length N
  Side side = Side::Transmit;

  int num_subcarriers() const { return static_cast<int>(entries.size()); }
};

/// Rescales the tensor so (1/K) sum_k ||H[k]||_F^2 = Nt * Nr.
inline ChannelTensor normalize_si(ChannelTensor tensor) {
  const double target = static_cast<double>(tensor.tx_size()) * tensor.rx_size();
  const double energy = tensor.average_energy();
  if (!(energy > 0.0))
    throw std::invalid_argument("normalize_si: channel tensor has zero energy");
  const double scale = std::sqrt(target / energy);
  for (auto& H : tensor.entries) H *= scale;
  tensor.normalized = true;
  return tensor;
}

/// Synthesizes a frequency-selective self-interference channel between two
/// co-located arrays separated along the x axis by the given distance in
/// carrier wavelengths. LOS entries follow the spherical-wave model
/// (r0 / r_nm) exp(-j 2 pi r_nm f_k / f_c); the NLOS part is a seeded sum of
/// complex Gaussian taps with random excess delays, mixed at power ratio
/// kappa. Pass +inf dB for a pure LOS channel.
inline ChannelTensor synth_nearfield_si(const ArrayGeometry& tx_geom,
                                        const ArrayGeometry& rx_geom,
                                        double array_separation_wavelengths,
                                        const SubcarrierGrid& grid,
                                        double rician_kappa_db,
                                        std::uint64_t seed) {
  if (!(array_separation_wavelengths > 0.0))
    throw std::invalid_argument("synth_nearfield_si: separation must be positive");
  const int nt = tx_geom.size();
  const int nr = rx_geom.size();
  const int K = grid.num_subcarriers();
  const double fc = grid.carrier_freq_hz();
  const Eigen::Vector3d offset(array_separation_wavelengths, 0.0, 0.0);

  // Element-pair distances in carrier wavelengths.
  Eigen::MatrixXd r(nr, nt);
  for (int n = 0; n < nr; ++n)
    for (int m = 0; m < nt; ++m) {
      const double d = (rx_geom.elements()[n] + offset - tx_geom.elements()[m]).norm();
      if (!(d > 0.0))
        throw std::invalid_argument("synth_nearfield_si: overlapping element positions");
      r(n, m) = d;
    }
  const double r0 = array_separation_wavelengths;

  ChannelTensor los;
  los.grid = grid;
  los.entries.resize(K, CMatrix(nr, nt));
  for (int k = 0; k < K; ++k) {
    const double ratio = grid.frequency(k) / fc;
    for (int n = 0; n < nr; ++n)
      for (int m = 0; m < nt; ++m)
        los.entries[k](n, m) =
            std::polar(r0 / r(n, m),
                       -2.0 * std::numbers::pi * r(n, m) * ratio);
  }

  if (std::isinf(rician_kappa_db) && rician_kappa_db > 0.0)
    return normalize_si(std::move(los));

  // NLOS: a handful of delayed Gaussian taps so the term is itself
  // frequency-selective.
  constexpr int kNumTaps = 4;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> delay(array_separation_wavelengths,
                                               3.0 * array_separation_wavelengths);
  std::vector<CMatrix> taps(kNumTaps, CMatrix(nr, nt));
  std::vector<double> tau(kNumTaps);
  for (int t = 0; t < kNumTaps; ++t) {
    tau[t] = delay(rng);
    for (int n = 0; n < nr; ++n)
      for (int m = 0; m < nt; ++m)
        taps[t](n, m) = Complex(gauss(rng), gauss(rng));
  }

  ChannelTensor nlos;
  nlos.grid = grid;
  nlos.entries.resize(K, CMatrix::Zero(nr, nt));
  for (int k = 0; k < K; ++k) {
    const double ratio = grid.frequency(k) / fc;
    for (int t = 0; t < kNumTaps; ++t)
      nlos.entries[k] +=
          taps[t] * std::polar(1.0, -2.0 * std::numbers::pi * tau[t] * ratio);
  }

  los = normalize_si(std::move(los));
  nlos = normalize_si(std::move(nlos));
  const double kappa = std::pow(10.0, rician_kappa_db / 10.0);
  const double w_los = std::sqrt(kappa / (1.0 + kappa));
  const double w_nlos = std::sqrt(1.0 / (1.0 + kappa));

  ChannelTensor out;
  out.grid = grid;
  out.entries.resize(K);
  for (int k = 0; k < K; ++k)
    out.entries[k] = w_los * los.entries[k] + w_nlos * nlos.entries[k];
  return normalize_si(std::move(out));
}

/// Line-of-sight user channel: h[k] equals the steering vector toward the
/// user at each subcarrier frequency. Unit-modulus entries make the energy
/// normalization hold exactly.
inline UserChannel synth_los_user(const ArrayGeometry& geom, const Direction& dir,
                                  const SubcarrierGrid& grid,
                                  UserChannel::Side side) {
  UserChannel h;
  h.side = side;
  h.entries.reserve(grid.num_subcarriers());
  for (int k = 0; k < grid.num_subcarriers(); ++k)
    h.entries.push_back(steering_vector(geom, dir, grid.frequency(k)));
  return h;
}

// --- CHT1 file format -------------------------------------------------------
//
// ASCII magic "CHT1\n", a one-line JSON header
// {"k":K,"nr":Nr,"nt":Nt,"fc_hz":...,"bw_hz":...,"normalized":bool}
// then K*Nr*Nt little-endian float64 (real, imag) pairs, k-major, row-major.

inline void save_channel(const ChannelTensor& tensor, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_channel: cannot open " + path);
  nlohmann::json header = {{"k", tensor.num_subcarriers()},
                           {"nr", tensor.rx_size()},
                           {"nt", tensor.tx_size()},
                           {"fc_hz", tensor.grid.carrier_freq_hz()},
                           {"bw_hz", tensor.grid.bandwidth_hz()},
                           {"normalized", tensor.normalized}};
  out << "CHT1\n" << header.dump() << "\n";
  for (const auto& H : tensor.entries)
    for (Eigen::Index i = 0; i < H.rows(); ++i)
      for (Eigen::Index j = 0; j < H.cols(); ++j) {
        const double re = H(i, j).real(), im = H(i, j).imag();
        out.write(reinterpret_cast<const char*>(&re), sizeof(double));
        out.write(reinterpret_cast<const char*>(&im), sizeof(double));
      }
  if (!out) throw std::runtime_error("save_channel: write failed for " + path);
}

inline ChannelTensor load_channel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_channel: cannot open " + path);
  std::string magic;
  std::getline(in, magic);
  if (magic != "CHT1")
    throw std::runtime_error("load_channel: bad magic in " + path);
  std::string header_line;
  std::getline(in, header_line);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::parse_error&) {
    throw std::runtime_error("load_channel: malformed header in " + path);
  }
  const int K = header.at("k").get<int>();
  const int nr = header.at("nr").get<int>();
  const int nt = header.at("nt").get<int>();
  if (K < 1 || nr < 1 || nt < 1)
    throw std::runtime_error("load_channel: invalid dimensions in header");

  ChannelTensor tensor;
  tensor.grid = SubcarrierGrid(header.at("fc_hz").get<double>(),
                               header.at("bw_hz").get<double>(), K);
  tensor.normalized = header.at("normalized").get<bool>();
  tensor.entries.resize(K, CMatrix(nr, nt));
  for (auto& H : tensor.entries)
    for (Eigen::Index i = 0; i < H.rows(); ++i)
      for (Eigen::Index j = 0; j < H.cols(); ++j) {
        double re = 0.0, im = 0.0;
        in.read(reinterpret_cast<char*>(&re), sizeof(double));
        in.read(reinterpret_cast<char*>(&im), sizeof(double));
        if (!in)
          throw std::runtime_error("load_channel: payload length mismatch in " + path);
        if (!std::isfinite(re) || !std::isfinite(im))
          throw std::runtime_error("load_channel: non-finite payload value in " + path);
        H(i, j) = Complex(re, im);
      }
  return tensor;
}

}  // namespace squintbook

#endif  // SQUINTBOOK_CHANNEL_HPP
