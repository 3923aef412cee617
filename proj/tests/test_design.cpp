// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <numbers>

#include "squintbook/codebook_io.hpp"
#include "squintbook/design.hpp"

using namespace squintbook;
using Catch::Approx;

namespace {
constexpr double kFc = 60e9;

DesignScenario small_scenario(int K, double bw_hz, std::uint64_t seed) {
  DesignScenario s{ArrayGeometry::planar(2, 2, kFc),
                   ArrayGeometry::planar(2, 2, kFc),
                   CoverageGrid::rectangular(-30, 30, 0, 0, 30),
                   CoverageGrid::rectangular(-30, 30, 0, 0, 30),
                   SubcarrierGrid(kFc, bw_hz, K),
                   ChannelTensor{},
                   QuantizationSpec(6, 6, 0.5)};
  s.channel = synth_nearfield_si(s.tx_geom, s.rx_geom, 10.0, s.subcarriers,
                                 std::numeric_limits<double>::infinity(), seed);
  s.sigma2_tx = 0.1;
  s.sigma2_rx = 0.1;
  return s;
}

bool in_realizable_set(const QuantizationSpec& spec, const CMatrix& X) {
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const auto p = project_weight(spec, X(i, j));
      if (std::abs(p.value - X(i, j)) > 1e-15) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("design_cbf: approaches the steering matrix as resolution grows") {
  auto s = small_scenario(1, 0.0, 3);
  s.spec = QuantizationSpec(10, 10, 0.05);
  const auto [tx, rx] = design_cbf(s);
  const CMatrix A = steering_matrix(s.tx_geom, s.tx_grid, kFc);
  CHECK((tx.weights - A).cwiseAbs().maxCoeff() < 5e-3);
  CHECK(tx.label == CodebookLabel::CBF);
}

TEST_CASE("design_cbf: center-frequency gain bound at 6 phase bits") {
  auto s = small_scenario(1, 0.0, 4);
  s.tx_geom = ArrayGeometry::planar(8, 8, kFc);
  s.rx_geom = ArrayGeometry::planar(8, 8, kFc);
  s.tx_grid = CoverageGrid::rectangular(-60, 60, -30, 30, 15);
  s.rx_grid = s.tx_grid;
  const auto [tx, rx] = design_cbf(s);
  const CMatrix A = steering_matrix(s.tx_geom, s.tx_grid, kFc);
  const double n = 64.0;
  const double bound = n * n * std::pow(std::cos(std::numbers::pi / 64.0), 2.0);
  for (int j = 0; j < s.tx_grid.size(); ++j)
    CHECK(std::norm(A.col(j).dot(tx.weights.col(j))) >= bound);
}

TEST_CASE("designed codebooks live in the realizable set") {
  auto s = small_scenario(4, 1e9, 7);
  const auto prop = design_proposed(s);
  CHECK(in_realizable_set(s.spec, prop.tx.weights));
  CHECK(in_realizable_set(s.spec, prop.rx.weights));
  const auto nb = design_narrowband(s, /*wide_objective=*/false);
  CHECK(in_realizable_set(s.spec, nb.tx.weights));
  CHECK(in_realizable_set(s.spec, nb.rx.weights));
  const auto [ctx, crx] = design_cbf(s);
  CHECK(in_realizable_set(s.spec, ctx.weights));
  CHECK(in_realizable_set(s.spec, crx.weights));
}

TEST_CASE("zero channel: relaxed solves meet coverage with zero objective") {
  auto s = small_scenario(2, 1e9, 9);
  for (auto& H : s.channel.entries) H.setZero();
  s.channel.normalized = false;
  const auto res = design_proposed(s, /*relax=*/true);
  REQUIRE(res.trace.size() == 1);
  CHECK(res.trace[0].f_objective_pre_projection < 1e-10);
  CHECK(res.trace[0].w_objective_pre_projection < 1e-10);
  CHECK(res.trace[0].f_max_violation_pre <= s.solver.feasibility_tol);
  CHECK(res.trace[0].w_max_violation_pre <= s.solver.feasibility_tol);
}

TEST_CASE("huge coverage budget: projection lands on the smallest level") {
  auto s = small_scenario(2, 1e9, 12);
  s.sigma2_tx = 1e12;
  s.sigma2_rx = 1e12;
  const auto res = design_proposed(s);
  const Complex floor_w = s.spec.weight(s.spec.num_amplitudes() - 1, 0);
  for (Eigen::Index j = 0; j < res.tx.weights.cols(); ++j)
    for (Eigen::Index i = 0; i < res.tx.weights.rows(); ++i)
      CHECK(std::abs(res.tx.weights(i, j) - floor_w) < 1e-15);
}

TEST_CASE("proposed design beats CBF on the wideband coupling objective") {
  auto s = small_scenario(8, 2e9, 21);
  const auto prop = design_proposed(s);
  const auto [ctx, crx] = design_cbf(s);
  const double prop_obj =
      wideband_objective(s.channel, prop.tx.weights, prop.rx.weights);
  const double cbf_obj = wideband_objective(s.channel, ctx.weights, crx.weights);
  CHECK(prop_obj < cbf_obj);
}

TEST_CASE("K=1: proposed and narrowband designs coincide") {
  auto s = small_scenario(1, 0.0, 30);
  const auto prop = design_proposed(s);
  const auto nb = design_narrowband(s, /*wide_objective=*/false);
  const auto nbw = design_narrowband(s, /*wide_objective=*/true);
  CHECK((prop.tx.weights - nb.tx.weights).norm() == 0.0);
  CHECK((prop.rx.weights - nb.rx.weights).norm() == 0.0);
  CHECK((prop.tx.weights - nbw.tx.weights).norm() == 0.0);
  CHECK((prop.rx.weights - nbw.rx.weights).norm() == 0.0);
  CHECK(nb.tx.label == CodebookLabel::NarrowbandLS);
  CHECK(nbw.tx.label == CodebookLabel::NarrowbandLSWideObj);
}

TEST_CASE("narrowband design meets the center-subcarrier constraint") {
  auto s = small_scenario(8, 2e9, 33);
  const auto nb = design_narrowband(s, /*wide_objective=*/false, /*relax=*/true);
  const int k0 = s.subcarriers.center_index();
  const CMatrix A0 =
      steering_matrix(s.tx_geom, s.tx_grid, s.subcarriers.frequency(k0));
  double acc = 0.0;
  const double n = s.tx_geom.size();
  for (int j = 0; j < s.tx_grid.size(); ++j)
    acc += std::norm(Complex(n, 0.0) - A0.col(j).dot(nb.tx.weights.col(j)));
  const double rhs = s.sigma2_tx * n * n * s.tx_grid.size();
  CHECK(acc <= rhs * (1.0 + 1e-4) + 1e-9);
}

TEST_CASE("relaxed alternating rounds do not increase the coupling objective") {
  auto s = small_scenario(4, 1e9, 40);
  s.outer_rounds = 3;
  const auto res = design_proposed(s, /*relax=*/true);
  REQUIRE(res.trace.size() == 3);
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& t : res.trace) {
    CHECK(t.w_objective_post_projection <= prev * (1.0 + 1e-4) + 1e-9);
    prev = t.w_objective_post_projection;
  }
}

TEST_CASE("design runs are deterministic") {
  auto s = small_scenario(4, 1e9, 55);
  const auto a = design_proposed(s);
  const auto b = design_proposed(s);
  CHECK((a.tx.weights - b.tx.weights).norm() == 0.0);
  CHECK((a.rx.weights - b.rx.weights).norm() == 0.0);
}

TEST_CASE("codebook JSON round trip preserves weights, grid, and label") {
  auto s = small_scenario(4, 1e9, 60);
  const auto res = design_proposed(s);
  const auto path = std::filesystem::temp_directory_path() / "sqb_cb.json";
  save_codebook(res.tx, path.string());
  const auto back = load_codebook(path.string());
  CHECK(back.label == CodebookLabel::Proposed);
  REQUIRE(back.weights.rows() == res.tx.weights.rows());
  REQUIRE(back.weights.cols() == res.tx.weights.cols());
  CHECK((back.weights - res.tx.weights).cwiseAbs().maxCoeff() < 1e-12);
  REQUIRE(back.grid.size() == res.tx.grid.size());
  for (int j = 0; j < back.grid.size(); ++j) {
    CHECK(back.grid[j].azimuth_rad ==
          Approx(res.tx.grid[j].azimuth_rad).margin(1e-12));
    CHECK(back.grid[j].elevation_rad ==
          Approx(res.tx.grid[j].elevation_rad).margin(1e-12));
  }
  std::filesystem::remove(path);
}

TEST_CASE("label strings round trip") {
  for (auto l : {CodebookLabel::Proposed, CodebookLabel::CBF,
                 CodebookLabel::NarrowbandLS, CodebookLabel::NarrowbandLSWideObj})
    CHECK(label_from_string(to_string(l)) == l);
  CHECK_THROWS_AS(label_from_string("bogus"), std::invalid_argument);
}
