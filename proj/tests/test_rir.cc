// tests/test_rir.cc

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
#include "locsep/ref.h"
#include "locsep/rir.h"
#include "oracles.h"

using namespace locsep;

namespace {

RoomSpec Box(double x, double y, double z, double rt60) {
  RoomSpec r;
  r.dims = Eigen::Vector3d(x, y, z);
  r.rt60 = rt60;
  return r;
}

}  // namespace

TEST_CASE("rir: anechoic direct path at the free-field Green's function") {
  RoomSpec room = Box(6, 5, 3, 0.0);
  Eigen::Vector3d src(1.0, 2.5, 1.5);
  std::vector<Eigen::Vector3d> mics = {Eigen::Vector3d(3.0, 2.5, 1.5)};
  RirConfig cfg;
  cfg.anechoic = true;
  Rir rir = SimulateRir(room, src, mics, cfg);

  const double dist = 2.0;
  const Eigen::Index want_idx = std::lround(dist / 343.0 * 16000.0);  // 93
  CHECK(want_idx == 93);
  CHECK(rir.taps[0][want_idx] == doctest::Approx(1.0 / (8.0 * kPi)).epsilon(1e-12));
  double off_energy = rir.taps[0].squaredNorm() -
                      rir.taps[0][want_idx] * rir.taps[0][want_idx];
  CHECK(off_energy == 0.0);
}

TEST_CASE("rir: doubling the distance halves the direct amplitude") {
  RoomSpec room = Box(9, 5, 3, 0.0);
  RirConfig cfg;
  cfg.anechoic = true;
  Eigen::Vector3d src(1.0, 2.5, 1.5);
  std::vector<Eigen::Vector3d> near = {Eigen::Vector3d(2.5, 2.5, 1.5)};
  std::vector<Eigen::Vector3d> far = {Eigen::Vector3d(4.0, 2.5, 1.5)};
  Rir a = SimulateRir(room, src, near, cfg);
  Rir b = SimulateRir(room, src, far, cfg);
  double amp_a = a.taps[0].cwiseAbs().maxCoeff();
  double amp_b = b.taps[0].cwiseAbs().maxCoeff();
  CHECK(amp_a == doctest::Approx(2.0 * amp_b).epsilon(1e-12));
}

TEST_CASE("rir: direct-path delay within one sample of geometry, all mics") {
  Rng rng(42);
  for (int it = 0; it < 5; ++it) {
    RoomSpec room = Box(rng.Uniform(4, 8), rng.Uniform(4, 8), rng.Uniform(2.6, 4),
                        rng.Uniform(0.3, 0.7));
    Eigen::Vector3d src(rng.Uniform(1, room.dims.x() - 1),
                        rng.Uniform(1, room.dims.y() - 1),
                        rng.Uniform(1, room.dims.z() - 1));
    std::vector<Eigen::Vector3d> mics;
    for (int m = 0; m < 4; ++m)
      mics.push_back(Eigen::Vector3d(rng.Uniform(0.6, room.dims.x() - 0.6),
                                     rng.Uniform(0.6, room.dims.y() - 0.6),
                                     rng.Uniform(0.6, room.dims.z() - 0.6)));
    RirConfig cfg;
    cfg.frac_delay = it % 2 == 1;
    Rir rir = SimulateRir(room, src, mics, cfg);
    for (size_t m = 0; m < mics.size(); ++m) {
      double want = (mics[m] - src).norm() / 343.0 * 16000.0;
      // First tap above a tenth of the peak is the direct arrival.
      double peak = rir.taps[m].cwiseAbs().maxCoeff();
      Eigen::Index first = 0;
      while (first < rir.taps[m].size() &&
             std::abs(rir.taps[m][first]) < 0.1 * peak)
        ++first;
      CHECK(std::abs(static_cast<double>(first) - want) <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("rir: Schroeder RT60 estimate lands near the target") {
  Rng rng(43);
  RirConfig cfg;
  for (int it = 0; it < 4; ++it) {
    RoomSpec room = Box(rng.Uniform(3, 9), rng.Uniform(3, 9), rng.Uniform(3, 9),
                        rng.Uniform(0.3, 1.0));
    Eigen::Vector3d src(room.dims.x() / 2 + 0.4, room.dims.y() / 2,
                        room.dims.z() / 2);
    std::vector<Eigen::Vector3d> mics = {Eigen::Vector3d(
        room.dims.x() / 2 - 0.8, room.dims.y() / 2 - 0.3, room.dims.z() / 2)};
    Rir rir = SimulateRir(room, src, mics, cfg);
    double est = oracles::SchroederRt60(rir.taps[0], 16000.0);
    REQUIRE(est > 0.0);
    CHECK(std::abs(est - room.rt60) <= 0.2 * room.rt60);
  }
}

TEST_CASE("rir: error paths") {
  RoomSpec room = Box(5, 4, 3, 0.5);
  RirConfig cfg;
  std::vector<Eigen::Vector3d> mics = {Eigen::Vector3d(1, 1, 1)};
  CHECK_THROWS_AS(SimulateRir(room, Eigen::Vector3d(7, 1, 1), mics, cfg),
                  ConfigError);  // source outside
  CHECK_THROWS_AS(SimulateRir(room, Eigen::Vector3d(1, 1, 1), mics, cfg),
                  InputError);  // coincides with the mic
  // Unrealizably short RT60 for a big room.
  RoomSpec dead = Box(9, 9, 9, 0.05);
  CHECK_THROWS_AS(SimulateRir(dead, Eigen::Vector3d(4, 4, 4), mics, cfg),
                  ConfigError);
}

TEST_CASE("rir: max_order 0 keeps only the direct path") {
  RoomSpec room = Box(5, 4, 3, 0.6);
  RirConfig cfg;
  cfg.max_order = 0;
  Eigen::Vector3d src(1.2, 2.0, 1.5);
  std::vector<Eigen::Vector3d> mics = {Eigen::Vector3d(3.4, 2.2, 1.4)};
  Rir rir = SimulateRir(room, src, mics, cfg);
  int nonzero = 0;
  for (Eigen::Index i = 0; i < rir.taps[0].size(); ++i)
    if (rir.taps[0][i] != 0.0) ++nonzero;
  CHECK(nonzero == 1);
}

TEST_CASE("rir: OpenMP kernel matches the serial reference bitwise") {
  RoomSpec room = Box(4.4, 3.8, 3.1, 0.45);
  Eigen::Vector3d src(1.2, 2.0, 1.5);
  std::vector<Eigen::Vector3d> mics = {Eigen::Vector3d(3.0, 1.5, 1.4),
                                       Eigen::Vector3d(3.2, 1.5, 1.4)};
  for (bool frac : {false, true}) {
    RirConfig cfg;
    cfg.frac_delay = frac;
    Rir a = SimulateRir(room, src, mics, cfg);
    Rir b = ref::SimulateRir(room, src, mics, cfg);
    REQUIRE(a.taps[0].size() == b.taps[0].size());
    for (size_t m = 0; m < mics.size(); ++m)
      CHECK((a.taps[m] - b.taps[m]).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("convolve: FFT path matches direct convolution") {
  Rng rng(44);
  Eigen::VectorXd x(1000), h(257);
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.Uniform(-1, 1);
  for (Eigen::Index i = 0; i < h.size(); ++i) h[i] = rng.Uniform(-1, 1);
  Eigen::VectorXd a = Convolve(x, h);
  Eigen::VectorXd b = ref::ConvolveDirect(x, h);
  REQUIRE(a.size() == b.size());
  CHECK((a - b).norm() / b.norm() < 1e-12);

  // Tiny inputs take the direct path inside Convolve as well.
  Eigen::VectorXd u(3), v(2);
  u << 1, 2, 3;
  v << 1, -1;
  Eigen::VectorXd w = Convolve(u, v);
  CHECK(w.size() == 4);
  CHECK(w[0] == 1.0);
  CHECK(w[3] == -3.0);
}
