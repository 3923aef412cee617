// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "squintbook/metrics.hpp"
#include "squintbook/quantize.hpp"

using namespace squintbook;
using Catch::Approx;

namespace {
constexpr double kFc = 60e9;

CVector random_cvector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v;
}

ChannelTensor random_tensor(int K, int nr, int nt, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ChannelTensor t;
  t.grid = SubcarrierGrid(kFc, K > 1 ? 1e9 : 0.0, K);
  t.entries.resize(K, CMatrix(nr, nt));
  for (auto& H : t.entries)
    for (Eigen::Index i = 0; i < H.rows(); ++i)
      for (Eigen::Index j = 0; j < H.cols(); ++j) H(i, j) = Complex(g(rng), g(rng));
  return t;
}

}  // namespace

TEST_CASE("dB conversions") {
  CHECK(db_to_linear(10.0) == Approx(10.0));
  CHECK(db_to_linear(-std::numeric_limits<double>::infinity()) == 0.0);
  CHECK(linear_to_db(100.0) == Approx(20.0));
  CHECK(linear_to_db(0.0) == -std::numeric_limits<double>::infinity());
  CHECK(linear_to_db(db_to_linear(-14.1)) == Approx(-14.1));
}

TEST_CASE("snr_tx: a matched steering beam attains the bound") {
  const auto geom = ArrayGeometry::planar(4, 4, kFc);
  const SubcarrierGrid sc(kFc, 0.0, 1);
  const Direction dir = Direction::from_degrees(25.0, -5.0);
  const auto h = synth_los_user(geom, dir, sc, UserChannel::Side::Transmit);
  const CVector f = steering_vector(geom, dir, kFc);
  LinkBudget budget;
  budget.snr_tx_db = 10.0;
  // |h^* f|^2 = N^2, so snr = snr_bar.
  const auto s = snr_tx(budget, h, f);
  CHECK(s[0] == Approx(10.0).epsilon(1e-9));
}

TEST_CASE("snr_rx: matched beam attains the bound and is scale invariant") {
  const auto geom = ArrayGeometry::planar(4, 2, kFc);
  const SubcarrierGrid sc(kFc, 0.0, 1);
  const Direction dir = Direction::from_degrees(-40.0, 10.0);
  const auto h = synth_los_user(geom, dir, sc, UserChannel::Side::Receive);
  const CVector w = steering_vector(geom, dir, kFc);
  LinkBudget budget;
  const auto s = snr_rx(budget, h, w);
  CHECK(s[0] == Approx(budget.snr_rx_linear()).epsilon(1e-9));
  // w and c w give identical SNR.
  const auto s2 = snr_rx(budget, h, Complex(0.3, -0.4) * w);
  CHECK(s2[0] == Approx(s[0]).epsilon(1e-12));
  CHECK_THROWS_AS(snr_rx(budget, h, CVector::Zero(8)), std::invalid_argument);
}

TEST_CASE("snr values never exceed their bounds") {
  const auto geom = ArrayGeometry::planar(4, 4, kFc);
  const SubcarrierGrid sc(kFc, 2e9, 4);
  const auto h = synth_los_user(geom, Direction::from_degrees(17.0, 3.0), sc,
                                UserChannel::Side::Transmit);
  const auto hr = synth_los_user(geom, Direction::from_degrees(17.0, 3.0), sc,
                                 UserChannel::Side::Receive);
  LinkBudget budget;
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    CVector f = random_cvector(16, rng);
    f = box_project(f);
    for (double v : snr_tx(budget, h, f))
      CHECK(v <= budget.snr_tx_linear() * (1.0 + 1e-12));
    for (double v : snr_rx(budget, hr, f))
      CHECK(v <= budget.snr_rx_linear() * (1.0 + 1e-12));
  }
}

TEST_CASE("inr_rx: scale invariance in w and orthogonality zero") {
  const auto t = random_tensor(3, 4, 4, 8);
  std::mt19937_64 rng(9);
  const CVector f = random_cvector(4, rng);
  const CVector w = random_cvector(4, rng);
  LinkBudget budget;
  budget.inr_rx_db = 80.0;
  const auto a = inr_rx(budget, t, f, w);
  const auto b = inr_rx(budget, t, f, Complex(0.0, 2.5) * w);
  for (int k = 0; k < 3; ++k) CHECK(b[k] == Approx(a[k]).epsilon(1e-12));

  // w orthogonal to H f on every subcarrier: zero INR.
  ChannelTensor t1;
  t1.grid = SubcarrierGrid(kFc, 0.0, 1);
  CMatrix H = CMatrix::Zero(2, 2);
  H(0, 0) = 1.0;  // H f is along e_0 for f = e_0
  t1.entries = {H};
  CVector f0 = CVector::Zero(2), w0 = CVector::Zero(2);
  f0(0) = 1.0;
  w0(1) = 1.0;
  CHECK(inr_rx(budget, t1, f0, w0)[0] == 0.0);
}

TEST_CASE("avg_inr_codebooks: reduces to inr_rx for single-beam codebooks") {
  const auto t = random_tensor(4, 3, 3, 11);
  std::mt19937_64 rng(12);
  const CVector f = random_cvector(3, rng);
  const CVector w = random_cvector(3, rng);
  LinkBudget budget;
  const auto per_k = inr_rx(budget, t, f, w);
  double mean = 0.0;
  for (double v : per_k) mean += v;
  mean /= per_k.size();
  const auto avg = avg_inr_codebooks(budget, t, f, w);
  CHECK(avg.exact == Approx(mean).epsilon(1e-12));
}

TEST_CASE("avg_inr_codebooks: Frobenius form agrees for unit-modulus W") {
  const auto t = random_tensor(4, 4, 4, 14);
  std::mt19937_64 rng(15);
  CMatrix F(4, 3), W(4, 2);
  for (Eigen::Index j = 0; j < 3; ++j) F.col(j) = random_cvector(4, rng);
  for (Eigen::Index j = 0; j < 2; ++j) {
    CVector c = random_cvector(4, rng);
    for (int i = 0; i < 4; ++i) c(i) /= std::abs(c(i));  // ||w_j||^2 = Nr
    W.col(j) = c;
  }
  LinkBudget budget;
  const auto avg = avg_inr_codebooks(budget, t, F, W);
  CHECK(avg.frobenius == Approx(avg.exact).epsilon(1e-9));
  CHECK_THROWS_AS(
      avg_inr_codebooks(budget, t, F, CMatrix::Zero(4, 1)), std::invalid_argument);
}

TEST_CASE("sum_se: closed form and monotonicity") {
  // 10 dB both links, no interference: R = 2 log2(11).
  const auto r = sum_se({10.0}, {10.0}, {0.0}, {0.0});
  CHECK(r.per_subcarrier[0] == Approx(2.0 * std::log2(11.0)).epsilon(1e-12));
  CHECK(r.mean == Approx(r.per_subcarrier[0]));

  // R decreases as the INR grows.
  double prev = std::numeric_limits<double>::infinity();
  for (double inr : {0.0, 1.0, 10.0, 1e4}) {
    const double cur = sum_se({10.0}, {10.0}, {inr}, {0.0}).mean;
    CHECK(cur < prev);
    prev = cur;
  }

  // Mean averages over subcarriers.
  const auto multi = sum_se({10.0, 10.0}, {10.0, 0.0}, {0.0, 0.0}, {0.0, 0.0});
  CHECK(multi.mean ==
        Approx(0.5 * (multi.per_subcarrier[0] + multi.per_subcarrier[1])));

  CHECK_THROWS_AS(sum_se({-1.0}, {0.0}, {0.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(sum_se({1.0, 1.0}, {0.0}, {0.0}, {0.0}), std::invalid_argument);
}

TEST_CASE("normalized_sum_se: unity at the reference, bounded by it") {
  const double ref_tx = 10.0, ref_rx = 10.0;
  const double r_ref = 2.0 * std::log2(11.0);
  const auto g = normalized_sum_se({r_ref, 0.5 * r_ref, 0.0}, ref_tx, ref_rx);
  CHECK(g[0] == Approx(1.0).epsilon(1e-12));
  CHECK(g[1] == Approx(0.5).epsilon(1e-12));
  CHECK(g[2] == 0.0);
  CHECK_THROWS_AS(normalized_sum_se({1.0}, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("coverage_variance: exact steering codebook has zero variance") {
  const auto geom = ArrayGeometry::planar(4, 4, kFc);
  const auto grid = CoverageGrid::rectangular(-60, 60, -30, 30, 30);
  const CMatrix A = steering_matrix(geom, grid, kFc);
  CHECK(coverage_variance(A, geom, grid, kFc) == Approx(0.0).margin(1e-20));
  // Away from the design frequency the variance is positive.
  CHECK(coverage_variance(A, geom, grid, 1.05 * kFc) > 1e-6);
}

TEST_CASE("coverage_variance: zero codebook gives exactly one") {
  const auto geom = ArrayGeometry::planar(2, 2, kFc);
  const auto grid = CoverageGrid::rectangular(-30, 30, 0, 0, 30);
  const CMatrix Z = CMatrix::Zero(4, grid.size());
  CHECK(coverage_variance(Z, geom, grid, kFc) == Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(coverage_variance(CMatrix::Zero(3, grid.size()), geom, grid, kFc),
                  std::invalid_argument);
}

TEST_CASE("select_beams: picks the brute-force argmax") {
  const auto geom = ArrayGeometry::planar(4, 2, kFc);
  const auto grid = CoverageGrid::rectangular(-45, 45, -15, 15, 15);
  const SubcarrierGrid sc(kFc, 2e9, 4);
  const CMatrix A = steering_matrix(geom, grid, kFc);
  const auto h = synth_los_user(geom, Direction::from_degrees(12.0, 7.0), sc,
                                UserChannel::Side::Transmit);

  const auto sel = select_beams(A, h);
  const double n = geom.size();
  int best = 0;
  double best_score = -1.0;
  for (int i = 0; i < A.cols(); ++i) {
    double score = 0.0;
    for (int k = 0; k < 4; ++k)
      score += std::norm(h.entries[k].dot(A.col(i))) / n;
    if (score / 4.0 > best_score) {
      best_score = score / 4.0;
      best = i;
    }
  }
  CHECK(sel.index == best);
  REQUIRE(sel.per_subcarrier_gain.size() == 4);
  double mean_gain = 0.0;
  for (double g : sel.per_subcarrier_gain) mean_gain += g;
  CHECK(mean_gain / 4.0 == Approx(best_score).epsilon(1e-12));
}

TEST_CASE("select_beams: an on-grid user selects its own beam at K=1") {
  const auto geom = ArrayGeometry::planar(4, 4, kFc);
  const auto grid = CoverageGrid::rectangular(-60, 60, -30, 30, 15);
  const SubcarrierGrid sc(kFc, 0.0, 1);
  const CMatrix A = steering_matrix(geom, grid, kFc);
  const int target = 17;
  const auto h = synth_los_user(geom, grid[target], sc, UserChannel::Side::Receive);
  const auto sel = select_beams(A, h);
  CHECK(sel.index == target);
  // The matched beam reaches the full normalized gain N.
  CHECK(sel.per_subcarrier_gain[0] == Approx(16.0).epsilon(1e-9));
}
