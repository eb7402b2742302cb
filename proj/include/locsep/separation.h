// include/locsep/separation.h

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

#ifndef LOCSEP_SEPARATION_H_
#define LOCSEP_SEPARATION_H_

#include <string>
#include <vector>

#include "locsep/geometry.h"
#include "locsep/scene.h"
#include "locsep/signal.h"

namespace locsep {

// Per-source time-frequency weights in [0, 1], same frames x bins shape as
// the mixture spectrogram.
struct Mask {
  int source_id = 0;
  Eigen::MatrixXd values;  // frames x bins

  Eigen::Index frames() const { return values.rows(); }
  Eigen::Index bins() const { return values.cols(); }
};

// Magnitude spectrum of the steered signal plus the cosine and sine of its
// phase difference to the reference channel; the per-frame stacked feature
// dimension is 3 * bins regardless of the channel count.
struct FeatureBlock {
  Eigen::MatrixXd magnitude;  // frames x bins
  Eigen::MatrixXd cos_ipd;
  Eigen::MatrixXd sin_ipd;

  Eigen::Index frame_dim() const { return 3 * magnitude.cols(); }
};

// Phase-align the channels towards a DOA and sum. With normalize (default)
// the sum is divided by the channel count so a perfectly steered source
// passes at unit gain; without it the plain aligned sum is returned.
Spectrogram DsBeamform(const Spectrogram &spec, const ArrayGeometry &geom,
                       const SourceDirection &dir, bool normalize = true,
                       double speed_of_sound = kSpeedOfSound);

// ds_spec and ref_spec must be single-channel and same shape. Bins where
// either magnitude is below 1e-12 emit (cos, sin) = (1, 0).
FeatureBlock CsipdFeatures(const Spectrogram &ds_spec,
                           const Spectrogram &ref_spec);

enum class OracleMaskKind { kMagnitudeRatio, kWiener, kBinary };

// Masks computed from the rendered ground truth at the reference channel:
// |C_j| / (sum_k |C_k| + |N|) for the default magnitude-ratio kind, the
// squared-magnitude Wiener variant, or a hard argmax. Simulation-only; a
// stand-in and evaluation instrument, not a deployment path.
std::vector<Mask> OracleMasks(const SceneTruth &truth, const StftConfig &cfg,
                              int reference_channel = 0,
                              OracleMaskKind kind = OracleMaskKind::kMagnitudeRatio);

// Blind fallback using only DOA information: |ds_j|^p / sum_k |ds_k|^p.
// Sums to one over sources in every bin; all-zero bins get 1/J.
std::vector<Mask> HeuristicMasks(const std::vector<Spectrogram> &ds_specs,
                                 double exponent = 2.0);

// Raw mask file: 16-byte header (magic "MASK", u32 frames, u32 bins,
// u32 reserved), then float32 little-endian values, frame major.
void SaveMask(const std::string &path, const Mask &mask);

struct LoadedMask {
  Mask mask;
  long clamped = 0;  // values outside [0,1] clamped on load
};

// Validates the header against the expected shape, rejects non-finite
// values, clamps out-of-range ones (counted).
LoadedMask LoadExternalMask(const std::string &path, Eigen::Index frames,
                            Eigen::Index bins);

}  // namespace locsep

#endif  // LOCSEP_SEPARATION_H_
