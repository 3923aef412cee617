// SPDX-License-Identifier: Apache-2.0
//
// Array geometry and frequency-dependent steering vectors for phased arrays
// driving an OFDM waveform. Coordinates are stored in units of the carrier
// wavelength so element phases depend only on the ratio f / f_c.

#ifndef SQUINTBOOK_ARRAY_HPP
#define SQUINTBOOK_ARRAY_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace squintbook {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Azimuth/elevation pair in radians. Azimuth in [-pi, pi), elevation in
/// [-pi/2, pi/2].
struct Direction {
  double azimuth_rad = 0.0;
  double elevation_rad = 0.0;

  Direction() = default;
  Direction(double az, double el) : azimuth_rad(az), elevation_rad(el) {
    constexpr double pi = std::numbers::pi;
    if (!(az >= -pi && az < pi))
      throw std::invalid_argument("Direction: azimuth out of [-pi, pi)");
    if (!(el >= -pi / 2 && el <= pi / 2))
      throw std::invalid_argument("Direction: elevation out of [-pi/2, pi/2]");
  }

  static Direction from_degrees(double az_deg, double el_deg) {
    constexpr double d2r = std::numbers::pi / 180.0;
    return Direction(az_deg * d2r, el_deg * d2r);
  }

  bool operator==(const Direction& o) const {
    return azimuth_rad == o.azimuth_rad && elevation_rad == o.elevation_rad;
  }
};

/// Antenna array described by element coordinates (in carrier wavelengths)
/// and the carrier frequency.
class ArrayGeometry {
 public:
  ArrayGeometry(std::vector<Eigen::Vector3d> elements, double carrier_freq_hz)
      : elements_(std::move(elements)), carrier_freq_hz_(carrier_freq_hz) {
    if (elements_.empty())
      throw std::invalid_argument("ArrayGeometry: need at least one element");
    if (!(carrier_freq_hz_ > 0.0))
      throw std::invalid_argument("ArrayGeometry: carrier frequency must be positive");
    for (const auto& e : elements_)
      if (!e.allFinite())
        throw std::invalid_argument("ArrayGeometry: non-finite element coordinate");
  }

  /// Half-wavelength uniform planar array in the x-z plane (boresight along
  /// +y), centered on the origin. nx columns along x, nz rows along z.
  static ArrayGeometry planar(int nx, int nz, double carrier_freq_hz) {
    if (nx < 1 || nz < 1)
      throw std::invalid_argument("ArrayGeometry::planar: nx, nz must be >= 1");
    std::vector<Eigen::Vector3d> elems;
    elems.reserve(static_cast<std::size_t>(nx) * nz);
    for (int iz = 0; iz < nz; ++iz)
      for (int ix = 0; ix < nx; ++ix)
        elems.emplace_back(0.5 * (ix - 0.5 * (nx - 1)), 0.0,
                           0.5 * (iz - 0.5 * (nz - 1)));
    return ArrayGeometry(std::move(elems), carrier_freq_hz);
  }

  int size() const { return static_cast<int>(elements_.size()); }
  const std::vector<Eigen::Vector3d>& elements() const { return elements_; }
  double carrier_freq_hz() const { return carrier_freq_hz_; }

 private:
  std::vector<Eigen::Vector3d> elements_;
  double carrier_freq_hz_;
};

/// Ordered, duplicate-free list of serving directions.
class CoverageGrid {
 public:
  explicit CoverageGrid(std::vector<Direction> directions)
      : directions_(std::move(directions)) {
    if (directions_.empty())
      throw std::invalid_argument("CoverageGrid: empty direction list");
    for (std::size_t i = 0; i < directions_.size(); ++i)
      for (std::size_t j = i + 1; j < directions_.size(); ++j)
        if (directions_[i] == directions_[j])
          throw std::invalid_argument("CoverageGrid: duplicate direction");
  }

  /// Rectangular azimuth x elevation lattice, all angles in degrees.
  /// Ordered elevation-major to keep column indexing predictable.
  static CoverageGrid rectangular(double az_min_deg, double az_max_deg,
                                  double el_min_deg, double el_max_deg,
                                  double spacing_deg) {
    if (!(spacing_deg > 0.0))
      throw std::invalid_argument("CoverageGrid: spacing must be positive");
    std::vector<Direction> dirs;
    for (double el = el_min_deg; el <= el_max_deg + 1e-9; el += spacing_deg)
      for (double az = az_min_deg; az <= az_max_deg + 1e-9; az += spacing_deg)
        dirs.push_back(Direction::from_degrees(az, el));
    return CoverageGrid(std::move(dirs));
  }

  int size() const { return static_cast<int>(directions_.size()); }
  const std::vector<Direction>& directions() const { return directions_; }
  const Direction& operator[](int i) const { return directions_.at(i); }

 private:
  std::vector<Direction> directions_;
};

/// K OFDM subcarriers on a symmetric mid-rise grid around the carrier:
/// f_k = f_c - B/2 + (k + 1/2) B/K for k = 0..K-1. The center index is the
/// nearest subcarrier at or below f_c.
class SubcarrierGrid {
 public:
  SubcarrierGrid(double carrier_freq_hz, double bandwidth_hz, int num_subcarriers)
      : carrier_freq_hz_(carrier_freq_hz),
        bandwidth_hz_(bandwidth_hz),
        num_subcarriers_(num_subcarriers) {
    if (!(carrier_freq_hz_ > 0.0))
      throw std::invalid_argument("SubcarrierGrid: carrier frequency must be positive");
    if (bandwidth_hz_ < 0.0)
      throw std::invalid_argument("SubcarrierGrid: bandwidth must be nonnegative");
    if (num_subcarriers_ < 1)
      throw std::invalid_argument("SubcarrierGrid: need at least one subcarrier");
    if (num_subcarriers_ > 1 && !(bandwidth_hz_ > 0.0))
      throw std::invalid_argument("SubcarrierGrid: K > 1 requires positive bandwidth");
  }

  double carrier_freq_hz() const { return carrier_freq_hz_; }
  double bandwidth_hz() const { return bandwidth_hz_; }
  int num_subcarriers() const { return num_subcarriers_; }

  double frequency(int k) const {
    if (k < 0 || k >= num_subcarriers_)
      throw std::out_of_range("SubcarrierGrid: subcarrier index out of range");
    const int K = num_subcarriers_;
    return carrier_freq_hz_ - bandwidth_hz_ / 2.0 +
           (k + 0.5) * bandwidth_hz_ / K;
  }

  std::vector<double> frequencies() const {
    std::vector<double> f(num_subcarriers_);
    for (int k = 0; k < num_subcarriers_; ++k) f[k] = frequency(k);
    return f;
  }

  /// Zero-based index of the center subcarrier, ceil(K/2) in one-based terms.
  int center_index() const { return (num_subcarriers_ - 1) / 2; }

 private:
  double carrier_freq_hz_;
  double bandwidth_hz_;
  int num_subcarriers_;
};

/// Spatial phase of one element toward a direction, in carrier wavelengths.
inline double element_phase(const Eigen::Vector3d& p, const Direction& dir) {
  const double az = dir.azimuth_rad, el = dir.elevation_rad;
  return p.x() * std::sin(az) * std::cos(el) +
         p.y() * std::cos(az) * std::cos(el) + p.z() * std::sin(el);
}

/// Response of element i at frequency f_hz: exp(j 2 pi (f/f_c) Phi_i).
inline Complex element_response(const ArrayGeometry& geom, int i,
                                const Direction& dir, double f_hz) {
  if (i < 0 || i >= geom.size())
    throw std::out_of_range("element_response: element index out of range");
  if (!(f_hz > 0.0))
    throw std::invalid_argument("element_response: frequency must be positive");
  const double phase = 2.0 * std::numbers::pi * (f_hz / geom.carrier_freq_hz()) *
                       element_phase(geom.elements()[i], dir);
  return std::polar(1.0, phase);
}

inline CVector steering_vector(const ArrayGeometry& geom, const Direction& dir,
                               double f_hz) {
  CVector a(geom.size());
  for (int i = 0; i < geom.size(); ++i)
    a(i) = element_response(geom, i, dir, f_hz);
  return a;
}

/// N x M matrix whose column j is the steering vector toward grid direction j.
inline CMatrix steering_matrix(const ArrayGeometry& geom, const CoverageGrid& grid,
                               double f_hz) {
  CMatrix A(geom.size(), grid.size());
  for (int j = 0; j < grid.size(); ++j)
    A.col(j) = steering_vector(geom, grid[j], f_hz);
  return A;
}

}  // namespace squintbook

#endif  // SQUINTBOOK_ARRAY_HPP
