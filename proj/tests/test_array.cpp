// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "squintbook/array.hpp"

using namespace squintbook;
using Catch::Approx;

namespace {
constexpr double kFc = 60e9;
}

TEST_CASE("element_response: element at origin is 1 for any direction") {
  ArrayGeometry geom({{0.0, 0.0, 0.0}}, kFc);
  const auto r = element_response(geom, 0, Direction::from_degrees(37.0, -12.0),
                                  1.7 * kFc);
  CHECK(r.real() == Approx(1.0));
  CHECK(r.imag() == Approx(0.0).margin(1e-15));
}

TEST_CASE("element_response: half-wavelength offset at 30 deg azimuth") {
  ArrayGeometry geom({{0.5, 0.0, 0.0}}, kFc);
  const Direction dir = Direction::from_degrees(30.0, 0.0);
  // 2 pi * 0.5 * sin(30 deg) = pi/2
  const auto at_fc = element_response(geom, 0, dir, kFc);
  CHECK(at_fc.real() == Approx(0.0).margin(1e-12));
  CHECK(at_fc.imag() == Approx(1.0));

  // Phase scales linearly with f/fc: 1.5x gives 3 pi / 4.
  const auto at_15 = element_response(geom, 0, dir, 1.5 * kFc);
  CHECK(std::arg(at_15) == Approx(3.0 * std::numbers::pi / 4.0));
}

TEST_CASE("element_response: index and frequency validation") {
  ArrayGeometry geom({{0.0, 0.0, 0.0}}, kFc);
  CHECK_THROWS_AS(element_response(geom, 1, Direction{}, kFc), std::out_of_range);
  CHECK_THROWS_AS(element_response(geom, -1, Direction{}, kFc), std::out_of_range);
  CHECK_THROWS_AS(element_response(geom, 0, Direction{}, 0.0),
                  std::invalid_argument);
}

TEST_CASE("steering_vector: broadside of a planar array is all ones") {
  const auto geom = ArrayGeometry::planar(2, 2, kFc);
  const CVector a = steering_vector(geom, Direction::from_degrees(0.0, 0.0), kFc);
  for (int i = 0; i < a.size(); ++i) {
    CHECK(a(i).real() == Approx(1.0));
    CHECK(a(i).imag() == Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("steering_vector: norm and modulus invariants") {
  const auto geom = ArrayGeometry::planar(8, 8, kFc);
  const CVector a =
      steering_vector(geom, Direction::from_degrees(23.0, -11.0), 1.03 * kFc);
  CHECK(a.squaredNorm() == Approx(64.0).epsilon(1e-9));
  for (int i = 0; i < a.size(); ++i)
    CHECK(std::abs(a(i)) == Approx(1.0).margin(1e-12));
  // a^* a = N
  CHECK(std::abs(a.dot(a)) == Approx(64.0).epsilon(1e-9));
}

TEST_CASE("steering_vector: phase is linear in frequency") {
  const auto geom = ArrayGeometry::planar(4, 4, kFc);
  const Direction dir = Direction::from_degrees(42.0, 17.0);
  // exp(j 2pi (f1/fc) Phi) exp(j 2pi (f2/fc) Phi) = exp(j 2pi ((f1+f2)/fc) Phi)
  const CVector a1 = steering_vector(geom, dir, 0.6 * kFc);
  const CVector a2 = steering_vector(geom, dir, 0.77 * kFc);
  const CVector a3 = steering_vector(geom, dir, 1.37 * kFc);
  for (int i = 0; i < a1.size(); ++i)
    CHECK(std::abs(a1(i) * a2(i) - a3(i)) < 1e-12);
}

TEST_CASE("planar geometry: half-wavelength spacing on two axes") {
  const auto geom = ArrayGeometry::planar(3, 2, kFc);
  REQUIRE(geom.size() == 6);
  // Neighbors along x differ by exactly 0.5; all y coordinates are 0.
  CHECK(geom.elements()[1].x() - geom.elements()[0].x() == 0.5);
  CHECK(geom.elements()[3].z() - geom.elements()[0].z() == 0.5);
  for (const auto& e : geom.elements()) CHECK(e.y() == 0.0);
}

TEST_CASE("steering_matrix: columns follow grid order") {
  const auto geom = ArrayGeometry::planar(4, 2, kFc);
  const auto grid = CoverageGrid::rectangular(-30, 30, -15, 15, 15);
  const CMatrix A = steering_matrix(geom, grid, 1.01 * kFc);
  REQUIRE(A.cols() == grid.size());
  for (int j = 0; j < grid.size(); ++j)
    CHECK((A.col(j) - steering_vector(geom, grid[j], 1.01 * kFc)).norm() == 0.0);
}

TEST_CASE("steering_matrix: the 45-beam coverage grid") {
  const auto grid = CoverageGrid::rectangular(-60, 60, -30, 30, 15);
  CHECK(grid.size() == 45);
}

TEST_CASE("steering_matrix: columns differ across frequency unless phase-free") {
  const auto geom = ArrayGeometry::planar(4, 1, kFc);
  const auto grid =
      CoverageGrid(std::vector<Direction>{Direction::from_degrees(25.0, 0.0)});
  const CMatrix A1 = steering_matrix(geom, grid, kFc);
  const CMatrix A2 = steering_matrix(geom, grid, 1.05 * kFc);
  CHECK((A1 - A2).norm() > 1e-6);
}

TEST_CASE("subcarrier grid: single subcarrier sits at the carrier") {
  const SubcarrierGrid sc(kFc, 0.0, 1);
  CHECK(sc.frequency(0) == Approx(kFc));
  CHECK(sc.center_index() == 0);
}

TEST_CASE("subcarrier grid: K=3 over 6 GHz") {
  const SubcarrierGrid sc(60e9, 6e9, 3);
  CHECK(sc.frequency(0) == Approx(58e9));
  CHECK(sc.frequency(1) == Approx(60e9));
  CHECK(sc.frequency(2) == Approx(62e9));
  CHECK(sc.center_index() == 1);
}

TEST_CASE("subcarrier grid: even K has no exact-center subcarrier") {
  const SubcarrierGrid sc(60e9, 2e9, 2);
  CHECK(sc.frequency(0) == Approx(59.5e9));
  CHECK(sc.frequency(1) == Approx(60.5e9));
  CHECK(sc.center_index() == 0);
  // Nearest-below convention: the center index minimizes |f_k - fc|.
  CHECK(std::abs(sc.frequency(sc.center_index()) - 60e9) <=
        std::abs(sc.frequency(1) - 60e9));
}

TEST_CASE("subcarrier grid: strictly increasing frequencies") {
  const SubcarrierGrid sc(60e9, 1e9, 16);
  const auto f = sc.frequencies();
  for (std::size_t k = 1; k < f.size(); ++k) CHECK(f[k] > f[k - 1]);
  CHECK_THROWS_AS(SubcarrierGrid(60e9, -1.0, 4), std::invalid_argument);
}

TEST_CASE("domain type validation") {
  CHECK_THROWS_AS(Direction(4.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Direction(0.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(ArrayGeometry({}, kFc), std::invalid_argument);
  CHECK_THROWS_AS(CoverageGrid(std::vector<Direction>{}), std::invalid_argument);
  CHECK_THROWS_AS(
      CoverageGrid(std::vector<Direction>{Direction{0.1, 0.2}, Direction{0.1, 0.2}}),
      std::invalid_argument);
}
