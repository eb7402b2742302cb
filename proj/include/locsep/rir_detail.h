// include/locsep/rir_detail.h

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

#ifndef LOCSEP_RIR_DETAIL_H_
#define LOCSEP_RIR_DETAIL_H_

#include <Eigen/Dense>
#include <vector>

#include "locsep/rir.h"

namespace locsep {
namespace rir_detail {

// Precomputed image-source bookkeeping shared by the parallel kernel and the
// serial reference.
struct Plan {
  bool anechoic = false;
  double beta = 0.0;       // wall reflection coefficient
  Eigen::Index len = 0;    // taps per channel
  int n_img[3] = {0, 0, 0};  // image order bound per axis
  int half_width = 0;      // sinc half-width in samples; 0 = nearest sample
};

double ReflectionCoefficient(const Eigen::Vector3d &dims, double rt60,
                             double speed_of_sound);

Plan MakePlan(const RoomSpec &room, const Eigen::Vector3d &src,
              const std::vector<Eigen::Vector3d> &mics, const RirConfig &cfg);

void AccumulateImagesX(const RoomSpec &room, const Eigen::Vector3d &src,
                       const Eigen::Vector3d &mic, const RirConfig &cfg,
                       const Plan &plan, int mx, Eigen::VectorXd &taps);

}  // namespace rir_detail
}  // namespace locsep

#endif  // LOCSEP_RIR_DETAIL_H_
