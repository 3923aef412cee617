// SPDX-License-Identifier: Apache-2.0
//
// Link-budget arithmetic and per-subcarrier SINR, spectral-efficiency,
// coverage-variance, and beam-selection metrics. All ratios are computed in
// bound-relative form, parameterized directly by the average-SNR/INR upper
// bounds.

#ifndef SQUINTBOOK_METRICS_HPP
#define SQUINTBOOK_METRICS_HPP

#include <cmath>
#include <limits>
#include <vector>

#include "squintbook/channel.hpp"

namespace squintbook {

inline double db_to_linear(double db) {
  if (std::isinf(db) && db < 0.0) return 0.0;
  return std::pow(10.0, db / 10.0);
}

inline double linear_to_db(double x) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(x);
}

/// System link quality expressed as the upper bounds on subcarrier-average
/// SNR and INR. inr_rx_db may be -inf (the interference-free capacity
/// reference).
struct LinkBudget {
  double snr_tx_db = 10.0;
  double snr_rx_db = 10.0;
  double inr_rx_db = 80.0;

  double snr_tx_linear() const { return db_to_linear(snr_tx_db); }
  double snr_rx_linear() const { return db_to_linear(snr_rx_db); }
  double inr_rx_linear() const { return db_to_linear(inr_rx_db); }
};

/// Downlink SNR per subcarrier: snr_bar * |h[k]^* f|^2 / Nt^2.
inline std::vector<double> snr_tx(const LinkBudget& budget, const UserChannel& h,
                                  const CVector& f) {
  std::vector<double> out(h.num_subcarriers());
  for (int k = 0; k < h.num_subcarriers(); ++k) {
    if (h.entries[k].size() != f.size())
      throw std::invalid_argument("snr_tx: dimension mismatch");
    const double n = static_cast<double>(f.size());
    out[k] = budget.snr_tx_linear() * std::norm(h.entries[k].dot(f)) / (n * n);
  }
  return out;
}

/// Uplink SNR per subcarrier: snr_bar * |h[k]^* w|^2 / (Nr ||w||^2).
inline std::vector<double> snr_rx(const LinkBudget& budget, const UserChannel& h,
                                  const CVector& w) {
  const double wn2 = w.squaredNorm();
  if (!(wn2 > 0.0)) throw std::invalid_argument("snr_rx: zero combining vector");
  std::vector<double> out(h.num_subcarriers());
  for (int k = 0; k < h.num_subcarriers(); ++k) {
    if (h.entries[k].size() != w.size())
      throw std::invalid_argument("snr_rx: dimension mismatch");
    const double n = static_cast<double>(w.size());
    out[k] = budget.snr_rx_linear() * std::norm(h.entries[k].dot(w)) / (n * wn2);
  }
  return out;
}

/// Uplink INR per subcarrier: inr_bar * |w^* H[k] f|^2 / (Nt^2 Nr ||w||^2).
inline std::vector<double> inr_rx(const LinkBudget& budget,
                                  const ChannelTensor& channel, const CVector& f,
                                  const CVector& w) {
  const double wn2 = w.squaredNorm();
  if (!(wn2 > 0.0)) throw std::invalid_argument("inr_rx: zero combining vector");
  const double nt = static_cast<double>(channel.tx_size());
  const double nr = static_cast<double>(channel.rx_size());
  std::vector<double> out(channel.num_subcarriers());
  for (int k = 0; k < channel.num_subcarriers(); ++k) {
    const auto& H = channel.entries[k];
    if (H.cols() != f.size() || H.rows() != w.size())
      throw std::invalid_argument("inr_rx: dimension mismatch");
    out[k] = budget.inr_rx_linear() * std::norm((w.adjoint() * H * f).value()) /
             (nt * nt * nr * wn2);
  }
  return out;
}

struct AverageInr {
  double exact = 0.0;       // triple average of inr_rx over (k, i, j)
  double frobenius = 0.0;   // approximation assuming ||w_j||^2 = Nr
};

/// Average INR coupled across all subcarriers and beam pairs of a codebook
/// pair, both exactly and in the Frobenius-norm approximation.
inline AverageInr avg_inr_codebooks(const LinkBudget& budget,
                                    const ChannelTensor& channel, const CMatrix& F,
                                    const CMatrix& W) {
  const double nt = static_cast<double>(channel.tx_size());
  const double nr = static_cast<double>(channel.rx_size());
  const int K = channel.num_subcarriers();
  const int mt = static_cast<int>(F.cols());
  const int mr = static_cast<int>(W.cols());
  for (int j = 0; j < mr; ++j)
    if (!(W.col(j).squaredNorm() > 0.0))
      throw std::invalid_argument("avg_inr_codebooks: zero receive column");

  AverageInr out;
  double fro_sum = 0.0;
  for (int k = 0; k < K; ++k) {
    const CMatrix coupling = W.adjoint() * channel.entries[k] * F;
    fro_sum += coupling.squaredNorm();
    for (int j = 0; j < mr; ++j) {
      const double wn2 = W.col(j).squaredNorm();
      for (int i = 0; i < mt; ++i)
        out.exact += std::norm(coupling(j, i)) / (nt * nt * nr * wn2);
    }
  }
  const double denom = static_cast<double>(K) * mt * mr;
  out.exact = budget.inr_rx_linear() * out.exact / denom;
  out.frobenius =
      budget.inr_rx_linear() * fro_sum / (denom * nt * nt * nr * nr);
  return out;
}

/// Sum spectral efficiency per subcarrier and its subcarrier average.
/// inr_tx is the cross-link interference slot, zero in this work.
struct SumSpectralEfficiency {
  std::vector<double> per_subcarrier;
  double mean = 0.0;
};

inline SumSpectralEfficiency sum_se(const std::vector<double>& snr_tx_k,
                                    const std::vector<double>& snr_rx_k,
                                    const std::vector<double>& inr_rx_k,
                                    const std::vector<double>& inr_tx_k) {
  const std::size_t K = snr_tx_k.size();
  if (snr_rx_k.size() != K || inr_rx_k.size() != K || inr_tx_k.size() != K)
    throw std::invalid_argument("sum_se: array length mismatch");
  SumSpectralEfficiency out;
  out.per_subcarrier.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    if (snr_tx_k[k] < 0 || snr_rx_k[k] < 0 || inr_rx_k[k] < 0 || inr_tx_k[k] < 0)
      throw std::invalid_argument("sum_se: negative input");
    const double sinr_tx = snr_tx_k[k] / (1.0 + inr_tx_k[k]);
    const double sinr_rx = snr_rx_k[k] / (1.0 + inr_rx_k[k]);
    out.per_subcarrier[k] = std::log2(1.0 + sinr_tx) + std::log2(1.0 + sinr_rx);
    out.mean += out.per_subcarrier[k];
  }
  out.mean /= static_cast<double>(K);
  return out;
}

/// Normalized sum spectral efficiency: R[k] over the interference-free CBF
/// capacity of the same user pair.
inline std::vector<double> normalized_sum_se(const std::vector<double>& r_per_k,
                                             double cbf_snr_tx,
                                             double cbf_snr_rx) {
  if (!(cbf_snr_tx > 0.0) || !(cbf_snr_rx > 0.0))
    throw std::invalid_argument("normalized_sum_se: CBF reference SNR must be positive");
  const double denom = std::log2(1.0 + cbf_snr_tx) + std::log2(1.0 + cbf_snr_rx);
  std::vector<double> out(r_per_k.size());
  for (std::size_t k = 0; k < r_per_k.size(); ++k) out[k] = r_per_k[k] / denom;
  return out;
}

/// Normalized coverage variance of a weight matrix at frequency f:
/// ||N 1 - diag(A(f)^* X)||^2 / (N^2 M).
inline double coverage_variance(const CMatrix& weights, const ArrayGeometry& geom,
                                const CoverageGrid& grid, double f_hz) {
  if (weights.cols() != grid.size() || weights.rows() != geom.size())
    throw std::invalid_argument("coverage_variance: dimension mismatch");
  const double n = static_cast<double>(geom.size());
  const int m = grid.size();
  double acc = 0.0;
  for (int j = 0; j < m; ++j) {
    const CVector a = steering_vector(geom, grid[j], f_hz);
    acc += std::norm(Complex(n, 0.0) - a.dot(weights.col(j)));
  }
  return acc / (n * n * m);
}

struct BeamSelection {
  int index = 0;
  std::vector<double> per_subcarrier_gain;  // normalized beamforming gain
};

/// Picks the codebook column maximizing the subcarrier-average normalized
/// gain toward the user; ties go to the lowest index.
inline BeamSelection select_beams(const CMatrix& codebook, const UserChannel& h) {
  if (codebook.cols() == 0)
    throw std::invalid_argument("select_beams: empty codebook");
  const int K = h.num_subcarriers();
  const double n = static_cast<double>(codebook.rows());
  int best = 0;
  double best_score = -1.0;
  for (int i = 0; i < codebook.cols(); ++i) {
    const double denom = h.side == UserChannel::Side::Transmit
                             ? n
                             : codebook.col(i).squaredNorm();
    if (!(denom > 0.0)) continue;
    double score = 0.0;
    for (int k = 0; k < K; ++k)
      score += std::norm(h.entries[k].dot(codebook.col(i))) / denom;
    score /= static_cast<double>(K);
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  BeamSelection out;
  out.index = best;
  out.per_subcarrier_gain.resize(K);
  const double denom = h.side == UserChannel::Side::Transmit
                           ? n
                           : codebook.col(best).squaredNorm();
  for (int k = 0; k < K; ++k)
    out.per_subcarrier_gain[k] =
        std::norm(h.entries[k].dot(codebook.col(best))) / denom;
  return out;
}

}  // namespace squintbook

#endif  // SQUINTBOOK_METRICS_HPP
