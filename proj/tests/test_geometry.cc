// tests/test_geometry.cc

// Copyright 2026 The locsep authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>

#include "locsep/common.h"
#include "locsep/geometry.h"

using namespace locsep;

namespace {
ArrayGeometry Pair226() { return MakeLinearArray(2, 0.226); }
}  // namespace

TEST_CASE("tdoa: analytic endfire/broadside values") {
  ArrayGeometry g = Pair226();
  // Direct evaluation of d cos(theta) / c is the oracle.
  double want = 0.226 * std::cos(0.0) / 343.0;
  CHECK(std::abs(Tdoa(g, 0, 1, {0.0, true}) - want) < 1e-9);
  CHECK(std::abs(Tdoa(g, 0, 1, {0.0, true}) - 6.5889e-4) < 5e-9);
  CHECK(std::abs(Tdoa(g, 0, 1, {90.0, true})) < 1e-9);
  CHECK(std::abs(Tdoa(g, 0, 1, {180.0, true}) + want) < 1e-9);
}

TEST_CASE("tdoa: swap antisymmetry and the aperture bound") {
  ArrayGeometry g = MakeLinearArray(4, 0.226);
  Rng rng(100);
  for (int it = 0; it < 200; ++it) {
    int i = rng.UniformInt(0, 3);
    int j = rng.UniformInt(0, 3);
    if (i == j) continue;
    SourceDirection dir{rng.Uniform(0.0, 180.0), true};
    double tij = Tdoa(g, i, j, dir);
    double tji = Tdoa(g, j, i, dir);
    CHECK(tij == doctest::Approx(-tji).epsilon(1e-12));
    // Swapping mics while mirroring the angle is the identity.
    SourceDirection mirrored{180.0 - dir.azimuth_deg, true};
    CHECK(Tdoa(g, j, i, mirrored) == doctest::Approx(tij).epsilon(1e-9));
    CHECK(std::abs(tij) <= g.pair_distance(i, j) / 343.0 + 1e-15);
  }
}

TEST_CASE("tdoa: degenerate inputs") {
  std::vector<Eigen::Vector3d> mics = {Eigen::Vector3d(0, 0, 0),
                                       Eigen::Vector3d(0, 0, 0)};
  CHECK_THROWS_AS(ArrayGeometry{mics}, ConfigError);
  CHECK_THROWS_AS(MakeLinearArray(1, 0.226), ConfigError);
  CHECK_THROWS_AS(ArrayGeometry(MakeLinearArray(2, 0.2).mics(), 5), ConfigError);
  ArrayGeometry g = Pair226();
  CHECK_THROWS_AS(Tdoa(g, 0, 0, {90.0, true}), ConfigError);
  CHECK_THROWS_AS(Tdoa(g, 0, 1, {200.0, true}), ConfigError);
}

TEST_CASE("steering: zero frequency, unit modulus, reference element") {
  ArrayGeometry g = MakeLinearArray(4, 0.226);
  SteeringVector sv = Steering(g, {37.0, true}, 0, 1600, 16000.0);
  for (int i = 0; i < 4; ++i) CHECK(sv.coefficients[i] == std::complex<double>(1.0, 0.0));

  Rng rng(200);
  for (int it = 0; it < 50; ++it) {
    int bin = rng.UniformInt(0, 800);
    SourceDirection dir{rng.Uniform(0.0, 180.0), true};
    Eigen::VectorXcd c = Steering(g, dir, bin, 1600, 16000.0).coefficients;
    CHECK(c[g.reference_index()] == std::complex<double>(1.0, 0.0));
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(std::abs(c[i]) - 1.0) < 1e-12);
  }
}

TEST_CASE("steering: phase matches the direct evaluation at 1 kHz endfire") {
  ArrayGeometry g = Pair226();
  Eigen::VectorXcd c = SteeringAtHz(g, {0.0, true}, 1000.0);
  double tau = 0.226 / 343.0;
  std::complex<double> want =
      std::exp(std::complex<double>(0.0, -2.0 * kPi * 1000.0 * tau));
  CHECK(std::abs(c[1] - want) < 1e-12);
  // The 4-significant-digit phase often quoted for this setup.
  CHECK(std::abs(std::arg(c[1]) + 4.1399 - 2.0 * kPi) < 1e-3);
}

TEST_CASE("steering: negating the frequency conjugates the coefficients") {
  ArrayGeometry g = MakeLinearArray(4, 0.226);
  Rng rng(300);
  for (int it = 0; it < 30; ++it) {
    double nu = rng.Uniform(10.0, 8000.0);
    SourceDirection dir{rng.Uniform(0.0, 180.0), true};
    Eigen::VectorXcd plus = SteeringAtHz(g, dir, nu);
    Eigen::VectorXcd minus = SteeringAtHz(g, dir, -nu);
    CHECK((minus - plus.conjugate()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("steering bin range is enforced") {
  ArrayGeometry g = Pair226();
  CHECK_THROWS_AS(Steering(g, {90.0, true}, 801, 1600, 16000.0), ConfigError);
  CHECK_THROWS_AS(Steering(g, {90.0, true}, -1, 1600, 16000.0), ConfigError);
}

TEST_CASE("source placement agrees with the TDOA sign convention") {
  // A far source rendered geometrically must show the delays Tdoa predicts.
  ArrayGeometry g = MakeLinearArray(4, 0.226);
  const double c = 343.0;
  for (double az : {0.0, 25.0, 90.0, 131.0, 180.0}) {
    Eigen::Vector3d src = 5000.0 * SourceUnitVector(g, {az, true});
    double t_ref = (src - g.mic(g.reference_index())).norm() / c;
    for (int i = 0; i < 4; ++i) {
      double delay = (src - g.mic(i)).norm() / c - t_ref;
      CHECK(std::abs(delay - Tdoa(g, g.reference_index(), i, {az, true})) <
            1e-9);
    }
  }
}
