// SPDX-License-Identifier: Apache-2.0
//
// Realizable phase/amplitude sets of a digitally controlled phase shifter and
// stepped attenuator, and the Euclidean projection of arbitrary complex
// weights onto them.

#ifndef SQUINTBOOK_QUANTIZE_HPP
#define SQUINTBOOK_QUANTIZE_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "squintbook/array.hpp"

namespace squintbook {

/// Discrete per-antenna weight control: 2^phase_bits uniform phases over
/// [0, 2pi) and 2^amp_bits attenuator levels of amp_step_db each, max 0 dB.
class QuantizationSpec {
 public:
  QuantizationSpec(int phase_bits, int amp_bits, double amp_step_db)
      : phase_bits_(phase_bits), amp_bits_(amp_bits), amp_step_db_(amp_step_db) {
    if (phase_bits_ < 1)
      throw std::invalid_argument("QuantizationSpec: phase_bits must be >= 1");
    if (amp_bits_ < 0)
      throw std::invalid_argument("QuantizationSpec: amp_bits must be >= 0");
    if (!(amp_step_db_ > 0.0))
      throw std::invalid_argument("QuantizationSpec: amp_step_db must be positive");
  }

  int phase_bits() const { return phase_bits_; }
  int amp_bits() const { return amp_bits_; }
  double amp_step_db() const { return amp_step_db_; }

  int num_phases() const { return 1 << phase_bits_; }
  int num_amplitudes() const { return 1 << amp_bits_; }

  double phase(int p) const {
    return 2.0 * std::numbers::pi * p / num_phases();
  }
  double amplitude(int q) const {
    return std::pow(10.0, -q * amp_step_db_ / 20.0);
  }

  std::vector<double> phases() const {
    std::vector<double> v(num_phases());
    for (int p = 0; p < num_phases(); ++p) v[p] = phase(p);
    return v;
  }
  std::vector<double> amplitudes() const {
    std::vector<double> v(num_amplitudes());
    for (int q = 0; q < num_amplitudes(); ++q) v[q] = amplitude(q);
    return v;
  }

  Complex weight(int q, int p) const {
    return std::polar(amplitude(q), phase(p));
  }

 private:
  int phase_bits_;
  int amp_bits_;
  double amp_step_db_;
};

/// One projected weight with its quantization indices.
struct ProjectedWeight {
  int amp_index = 0;
  int phase_index = 0;
  double amp = 1.0;
  double phase = 0.0;
  Complex value;
};

/// Projects w onto the realizable set: nearest phase by shortest angular
/// distance, then the amplitude level closest to |w| cos(theta* - arg w).
/// This two-stage rule attains the joint Euclidean minimizer; ties go to the
/// lower phase index, then the lower amplitude index.
inline ProjectedWeight project_weight(const QuantizationSpec& spec, Complex w) {
  double a = std::abs(w);
  if (a > 1.0 + 1e-9)
    throw std::invalid_argument("project_weight: |w| exceeds unit magnitude");
  a = std::min(a, 1.0);
  const double theta = std::arg(w);

  const int P = spec.num_phases();
  int best_p = 0;
  double best_pd = std::numeric_limits<double>::infinity();
  for (int p = 0; p < P; ++p) {
    double d = std::abs(std::remainder(spec.phase(p) - theta,
                                       2.0 * std::numbers::pi));
    if (d < best_pd) {
      best_pd = d;
      best_p = p;
    }
  }

  // Amplitude target after fixing the phase.
  const double target = a * std::cos(spec.phase(best_p) - theta);
  const int Q = spec.num_amplitudes();
  int best_q = 0;
  double best_ad = std::numeric_limits<double>::infinity();
  for (int q = 0; q < Q; ++q) {
    double d = std::abs(spec.amplitude(q) - target);
    if (d < best_ad) {
      best_ad = d;
      best_q = q;
    }
  }

  ProjectedWeight out;
  out.amp_index = best_q;
  out.phase_index = best_p;
  out.amp = spec.amplitude(best_q);
  out.phase = spec.phase(best_p);
  out.value = spec.weight(best_q, best_p);
  return out;
}

/// Entrywise projection of a weight matrix onto the realizable set.
inline CMatrix project_matrix(const QuantizationSpec& spec, const CMatrix& M) {
  CMatrix out(M.rows(), M.cols());
  for (Eigen::Index j = 0; j < M.cols(); ++j)
    for (Eigen::Index i = 0; i < M.rows(); ++i)
      out(i, j) = project_weight(spec, M(i, j)).value;
  return out;
}

/// Clips entries to the unit-modulus box, preserving phase. Used inside the
/// relaxed solver, not for final codebooks.
inline CMatrix box_project(const CMatrix& M) {
  CMatrix out = M;
  for (Eigen::Index j = 0; j < M.cols(); ++j)
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      const double a = std::abs(out(i, j));
      if (a > 1.0) out(i, j) /= a;
    }
  return out;
}

}  // namespace squintbook

#endif  // SQUINTBOOK_QUANTIZE_HPP
