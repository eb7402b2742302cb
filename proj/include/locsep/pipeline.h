// include/locsep/pipeline.h

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

#ifndef LOCSEP_PIPELINE_H_
#define LOCSEP_PIPELINE_H_

#include <optional>
#include <string>
#include <vector>

#include "locsep/beamformer.h"
#include "locsep/metrics.h"
#include "locsep/scene.h"
#include "locsep/separation.h"

namespace locsep {

// Stage selection for one separation run: DOA source, mask provider,
// adaptive beamformer, statistics mode.
struct PipelineOptions {
  std::string doa = "truth";    // truth | gcc
  std::string mask = "oracle";  // oracle | heuristic | file:PATTERN ({src})
  std::string bf = "r1";        // gev | sdw | r1
  double mu = 1.0;
  double alpha = 0.95;          // forgetting factor, recursive stats
  std::string stats = "batch";  // batch | recursive
  bool dump_masks = false;
  bool unnormalized_ds = false;

  // File-name tag, e.g. "truth_oracle_r1".
  std::string Tag() const;
  void Validate() const;
};

struct DatasetConfig {
  uint64_t seed = 1;
  int n_scenes = 0;
  double sample_rate = 16000.0;
  std::vector<Eigen::Vector3d> mic_positions;  // default: 4 mics, 0.226 m
  int reference_index = 0;
  StftConfig stft;
  SamplerConfig sampler;
  RenderConfig render;
  PipelineOptions defaults;
};

struct ManifestScene {
  std::string id;
  std::string dir;  // relative to the dataset root
  SceneSpec spec;
};

// The single source of truth for a dataset run; everything a separation or
// evaluation needs is in here or in the scene directories it points to.
struct Manifest {
  int version = 1;
  double sample_rate = 16000.0;
  std::vector<Eigen::Vector3d> mic_positions;
  int reference_index = 0;
  StftConfig stft;
  RenderConfig render;
  PipelineOptions defaults;
  std::vector<ManifestScene> scenes;

  ArrayGeometry Geometry() const;
};

DatasetConfig LoadDatasetConfig(const std::string &path);
DatasetConfig DatasetConfigFromJson(const std::string &text);

void SaveManifest(const Manifest &manifest, const std::string &path);
Manifest LoadManifest(const std::string &path);
std::string ManifestToJson(const Manifest &manifest);
Manifest ManifestFromJson(const std::string &text);

// Renders cfg.n_scenes scenes under out_dir (one subdirectory per scene:
// mixture.wav, source<j>_image.wav, noise_image.wav, truth.json) and writes
// out_dir/manifest.json. Scene seeds derive from cfg.seed and the scene
// index, so --jobs parallelism cannot change any output byte.
Manifest MakeDataset(const DatasetConfig &cfg, const std::string &out_dir,
                     int jobs = 1);

// Ground truth as re-read from a scene directory.
struct SceneTruthFiles {
  SceneTruth truth;
  double target_sir_db = 0.0;
  double target_snr_db = 0.0;
  uint64_t seed = 0;
  double rt60 = 0.0;
};

std::optional<SceneTruthFiles> LoadSceneTruth(const std::string &scene_dir,
                                              double sample_rate);

struct SeparateResult {
  std::vector<EvalRecord> records;       // empty without ground truth
  std::vector<std::string> wav_paths;    // one enhanced WAV per source
  std::vector<double> doas_used_deg;
};

// Full Fig-style chain for one scene: DOA (ground truth or GCC-PHAT with
// top-2 peaks), DS beamforming, mask, covariance statistics, adaptive
// beamformer, inverse STFT. Writes one WAV per source into
// out_dir/<scene_id>/ plus a records_<tag>.jsonl with per-source metrics
// when ground truth exists.
SeparateResult SeparateScene(const Manifest &manifest, const std::string &scene_id,
                             const std::string &dataset_dir,
                             const std::string &out_dir,
                             const PipelineOptions &opt);

// All records_*.jsonl files under a directory tree (sorted path order).
std::vector<EvalRecord> LoadRecordsUnder(const std::string &dir);

// Writes report.txt and report.csv; returns the report.
BucketReport EvaluateRecords(const std::vector<EvalRecord> &records,
                             const std::string &out_dir);

struct PipelineRunResult {
  Manifest manifest;
  std::vector<EvalRecord> records;
  BucketReport report;
};

// make-dataset + separate every scene + eval, all under out_dir.
PipelineRunResult RunPipeline(const DatasetConfig &cfg, const std::string &out_dir,
                              int jobs = 1,
                              const std::optional<PipelineOptions> &override_opt =
                                  std::nullopt);

// Temp-file-plus-rename text write.
void AtomicWriteText(const std::string &path, const std::string &text);

}  // namespace locsep

#endif  // LOCSEP_PIPELINE_H_
