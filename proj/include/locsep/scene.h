// include/locsep/scene.h

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

#ifndef LOCSEP_SCENE_H_
#define LOCSEP_SCENE_H_

#include <string>
#include <vector>

#include "locsep/geometry.h"
#include "locsep/rir.h"
#include "locsep/signal.h"

namespace locsep {

struct NoiseSpec {
  enum class Kind { kIsotropic, kFile };
  Kind kind = Kind::kIsotropic;
  std::string path;        // file mode
  double offset_s = -1.0;  // file mode crop offset; negative = seeded random
  int n_plane_waves = 64;  // isotropic mode
};

struct SceneSource {
  std::string wav;
  double doa_deg = 90.0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
};

// Everything needed to render one mixture deterministically.
struct SceneSpec {
  RoomSpec room;
  std::vector<SceneSource> sources;
  double sir_db = 0.0;
  double snr_db = 0.0;
  NoiseSpec noise;
  uint64_t seed = 0;
};

// Rendered scene with per-source ground truth. mixture is, sample for
// sample, the sum of the spatial images (ascending source index) plus the
// noise image.
struct SceneTruth {
  TimeSignal mixture;
  std::vector<TimeSignal> spatial_images;
  TimeSignal noise_image;
  std::vector<double> true_doas_deg;
  double achieved_sir_db = 0.0;
  double achieved_snr_db = 0.0;
};

struct SamplerConfig {
  double room_dim_range[2] = {3.0, 9.0};
  double rt60_range[2] = {0.3, 1.0};
  double sir_range_db[2] = {0.0, 10.0};
  double snr_range_db[2] = {0.0, 10.0};
  double doa_range_deg[2] = {10.0, 170.0};
  double min_delta_doa_deg = 5.0;
  double source_distance_range_m[2] = {1.0, 2.5};
  double wall_margin_m = 0.5;
  double source_margin_m = 0.3;
  double array_aperture_m = 0.226;
  int n_sources = 2;
  int max_retries = 500;
  std::vector<std::string> source_pool;
  NoiseSpec noise;
};

struct RenderConfig {
  double sample_rate = 16000.0;
  double speed_of_sound = kSpeedOfSound;
  bool anechoic = false;
  bool frac_delay = false;
  int max_order = -1;
  double max_source_seconds = 0.0;  // 0 = use full files
  int reference_channel = 0;        // anchors SIR and SNR
};

// Draws room, RT60, SIR, SNR, array placement, source DOAs/positions and
// source files, uniformly within the configured ranges; DOA pairs are
// redrawn until they differ by at least min_delta_doa_deg. Same seed, same
// scene.
SceneSpec SampleScene(const SamplerConfig &cfg, uint64_t seed);

// Absolute mic positions: the relative layout rotated about z so its x axis
// lines up with `axis`, then translated to `center`.
std::vector<Eigen::Vector3d> PlaceArray(const ArrayGeometry &relative,
                                        const Eigen::Vector3d &center,
                                        const Eigen::Vector3d &axis);

// Simulates RIRs, convolves, scales the interferers to the target SIR and
// the noise to the target SNR (both at the reference channel, measured on
// the reverberated images), and sums.
SceneTruth RenderScene(const SceneSpec &spec, const ArrayGeometry &relative_geom,
                       const RenderConfig &rc);

// File mode: seeded random (or fixed) offset crop of a multichannel noise
// recording. Isotropic mode: sum of n_plane_waves white-noise plane waves
// from uniformly random directions, approximating a spherically diffuse
// field.
TimeSignal SynthNoise(const NoiseSpec &spec,
                      const std::vector<Eigen::Vector3d> &mics,
                      Eigen::Index n_samples, double sample_rate, uint64_t seed,
                      double speed_of_sound = kSpeedOfSound);

// Harmonic babble with a wandering pitch, syllabic gating and a noise floor.
// Not speech, but spectrally sparse and non-stationary in the same way;
// handy as source material when no recordings are at hand.
TimeSignal SynthSpeechLike(double duration_s, double sample_rate, uint64_t seed);

}  // namespace locsep

#endif  // LOCSEP_SCENE_H_
