// include/locsep/rir.h

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

#ifndef LOCSEP_RIR_H_
#define LOCSEP_RIR_H_

#include <Eigen/Dense>
#include <vector>

#include "locsep/common.h"

namespace locsep {

// Shoebox room with one scalar absorption derived from RT60 (Sabine), plus
// the array placement used when sampling scenes.
struct RoomSpec {
  Eigen::Vector3d dims = Eigen::Vector3d(6, 5, 3);  // meters
  double rt60 = 0.5;                                // seconds; 0 = anechoic
  std::vector<Eigen::Vector3d> source_positions;
  Eigen::Vector3d array_center = Eigen::Vector3d::Zero();
  Eigen::Vector3d array_axis = Eigen::Vector3d(1, 0, 0);
};

// Multichannel FIR room response.
struct Rir {
  double sample_rate = 0.0;
  std::vector<Eigen::VectorXd> taps;  // one vector per channel

  int channels() const { return static_cast<int>(taps.size()); }
};

struct RirConfig {
  double sample_rate = 16000.0;
  double speed_of_sound = kSpeedOfSound;
  bool anechoic = false;
  // Image placement: nearest sample keeps single sharp taps (default);
  // fractional smears each image with a Hann-windowed sinc so inter-channel
  // delays stay sub-sample accurate.
  bool frac_delay = false;
  // Cap on the number of wall reflections per image; -1 derives it from the
  // response length.
  int max_order = -1;
  // Extra tail beyond rt60, seconds.
  double extra_tail_s = 0.0;
};

// Image-source simulation of the response from src to every mic. Direct path
// lands at distance/c with amplitude 1/(4*pi*distance); walls reflect with
// beta = sqrt(1 - 0.161 V / (S * rt60)) per Sabine.
Rir SimulateRir(const RoomSpec &room, const Eigen::Vector3d &src,
                const std::vector<Eigen::Vector3d> &mics, const RirConfig &cfg);

// Linear convolution, FFT based. Outputs x.size() + h.size() - 1 samples.
Eigen::VectorXd Convolve(const Eigen::VectorXd &x, const Eigen::VectorXd &h);

}  // namespace locsep

#endif  // LOCSEP_RIR_H_
