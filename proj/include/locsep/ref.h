// include/locsep/ref.h

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

#ifndef LOCSEP_REF_H_
#define LOCSEP_REF_H_

#include "locsep/covariance.h"
#include "locsep/localize.h"
#include "locsep/rir.h"
#include "locsep/signal.h"

// Plain serial implementations of the hot kernels. They are the behavioral
// reference: the OpenMP versions must match them bit for bit (same
// per-element summation order) except where a different algorithm is the
// point, like FFT vs direct convolution. Kept for tests and the kernel
// benchmark.
namespace locsep {
namespace ref {

Spectrogram Stft(const TimeSignal &sig, const StftConfig &cfg = {});
TimeSignal Istft(const Spectrogram &spec);

Rir SimulateRir(const RoomSpec &room, const Eigen::Vector3d &src,
                const std::vector<Eigen::Vector3d> &mics, const RirConfig &cfg);

// O(n*m) direct convolution; independent of the FFT path.
Eigen::VectorXd ConvolveDirect(const Eigen::VectorXd &x,
                               const Eigen::VectorXd &h);

Eigen::VectorXcd PhatCrossSpectrum(const Eigen::VectorXd &x1,
                                   const Eigen::VectorXd &x2,
                                   double sample_rate,
                                   const StftConfig &cfg = {});

CovariancePair BatchCov(const Mask &mask, const Spectrogram &spec);

}  // namespace ref
}  // namespace locsep

#endif  // LOCSEP_REF_H_
