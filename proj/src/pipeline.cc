// src/pipeline.cc

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

#include "locsep/pipeline.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "locsep/localize.h"
#include "locsep/wav.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace locsep {

// ---------------------------------------------------------------------------
// Small utilities

void AtomicWriteText(const std::string &path, const std::string &text) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw InputError("AtomicWriteText: cannot open " + tmp);
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!os) throw InputError("AtomicWriteText: write failed for " + tmp);
  }
  fs::rename(tmp, path);
}

namespace {

void AtomicWriteWav(const std::string &path, const TimeSignal &sig) {
  std::string tmp = path + ".tmp";
  WriteWav(tmp, sig, WavCodec::kFloat32);
  fs::rename(tmp, path);
}

std::string SceneDirName(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "scene_%04d", index);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Options

void PipelineOptions::Validate() const {
  if (doa != "truth" && doa != "gcc")
    throw ConfigError("pipeline: doa must be truth or gcc, got " + doa);
  if (mask != "oracle" && mask != "heuristic" &&
      mask.rfind("file:", 0) != 0)
    throw ConfigError("pipeline: mask must be oracle, heuristic or file:PATTERN");
  ParseBfKind(bf);
  if (mu < 0.0) throw ConfigError("pipeline: mu must be >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ConfigError("pipeline: alpha must be in [0, 1]");
  if (stats != "batch" && stats != "recursive")
    throw ConfigError("pipeline: stats must be batch or recursive");
}

std::string PipelineOptions::Tag() const {
  std::string mask_tag = mask.rfind("file:", 0) == 0 ? "file" : mask;
  std::string tag = doa + "_" + mask_tag + "_" + bf;
  if (stats == "recursive") tag += "_rec";
  return tag;
}

// ---------------------------------------------------------------------------
// JSON (de)serialization

namespace {

json Vec3ToJson(const Eigen::Vector3d &v) { return json{v.x(), v.y(), v.z()}; }

Eigen::Vector3d Vec3FromJson(const json &j) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError("manifest: expected a 3-vector");
  return Eigen::Vector3d(j[0].get<double>(), j[1].get<double>(),
                         j[2].get<double>());
}

json NoiseToJson(const NoiseSpec &n) {
  json j;
  j["kind"] = n.kind == NoiseSpec::Kind::kFile ? "file" : "isotropic";
  j["path"] = n.path;
  j["offset_s"] = n.offset_s;
  j["n_plane_waves"] = n.n_plane_waves;
  return j;
}

NoiseSpec NoiseFromJson(const json &j) {
  NoiseSpec n;
  std::string kind = j.value("kind", "isotropic");
  if (kind == "file")
    n.kind = NoiseSpec::Kind::kFile;
  else if (kind == "isotropic")
    n.kind = NoiseSpec::Kind::kIsotropic;
  else
    throw ConfigError("noise: unknown kind " + kind);
  n.path = j.value("path", std::string());
  n.offset_s = j.value("offset_s", -1.0);
  n.n_plane_waves = j.value("n_plane_waves", 64);
  if (n.kind == NoiseSpec::Kind::kFile && n.path.empty())
    throw ConfigError("noise: file mode requires a path");
  return n;
}

json StftToJson(const StftConfig &c) {
  return json{{"window_len", c.window_len}, {"frame_shift", c.frame_shift}};
}

StftConfig StftFromJson(const json &j) {
  StftConfig c;
  c.window_len = j.value("window_len", 1600);
  c.frame_shift = j.value("frame_shift", 800);
  return c;
}

json RenderToJson(const RenderConfig &r) {
  json j;
  j["anechoic"] = r.anechoic;
  j["frac_delay"] = r.frac_delay;
  j["max_order"] = r.max_order;
  j["max_source_seconds"] = r.max_source_seconds;
  j["reference_channel"] = r.reference_channel;
  j["speed_of_sound"] = r.speed_of_sound;
  return j;
}

RenderConfig RenderFromJson(const json &j, double sample_rate) {
  RenderConfig r;
  r.sample_rate = sample_rate;
  r.anechoic = j.value("anechoic", false);
  r.frac_delay = j.value("frac_delay", false);
  r.max_order = j.value("max_order", -1);
  r.max_source_seconds = j.value("max_source_seconds", 0.0);
  r.reference_channel = j.value("reference_channel", 0);
  r.speed_of_sound = j.value("speed_of_sound", kSpeedOfSound);
  return r;
}

json PipelineToJson(const PipelineOptions &p) {
  json j;
  j["doa"] = p.doa;
  j["mask"] = p.mask;
  j["bf"] = p.bf;
  j["mu"] = p.mu;
  j["alpha"] = p.alpha;
  j["stats"] = p.stats;
  return j;
}

PipelineOptions PipelineFromJson(const json &j) {
  PipelineOptions p;
  p.doa = j.value("doa", "truth");
  p.mask = j.value("mask", "oracle");
  p.bf = j.value("bf", "r1");
  p.mu = j.value("mu", 1.0);
  p.alpha = j.value("alpha", 0.95);
  p.stats = j.value("stats", "batch");
  p.Validate();
  return p;
}

void RangeFromJson(const json &j, const char *key, double out[2]) {
  if (!j.contains(key)) return;
  const json &r = j.at(key);
  if (!r.is_array() || r.size() != 2)
    throw ConfigError(std::string("sampler: ") + key + " must be [lo, hi]");
  out[0] = r[0].get<double>();
  out[1] = r[1].get<double>();
  if (out[1] < out[0])
    throw ConfigError(std::string("sampler: ") + key + " range is inverted");
}

SamplerConfig SamplerFromJson(const json &j) {
  SamplerConfig s;
  RangeFromJson(j, "room_dim_range", s.room_dim_range);
  RangeFromJson(j, "rt60_range", s.rt60_range);
  RangeFromJson(j, "sir_range_db", s.sir_range_db);
  RangeFromJson(j, "snr_range_db", s.snr_range_db);
  RangeFromJson(j, "doa_range_deg", s.doa_range_deg);
  RangeFromJson(j, "source_distance_range_m", s.source_distance_range_m);
  s.min_delta_doa_deg = j.value("min_delta_doa_deg", 5.0);
  s.wall_margin_m = j.value("wall_margin_m", 0.5);
  s.source_margin_m = j.value("source_margin_m", 0.3);
  s.array_aperture_m = j.value("array_aperture_m", 0.226);
  s.n_sources = j.value("n_sources", 2);
  s.max_retries = j.value("max_retries", 500);
  if (j.contains("source_pool"))
    s.source_pool = j.at("source_pool").get<std::vector<std::string>>();
  if (j.contains("noise")) s.noise = NoiseFromJson(j.at("noise"));
  return s;
}

json SamplerToJson(const SamplerConfig &s) {
  json j;
  j["room_dim_range"] = {s.room_dim_range[0], s.room_dim_range[1]};
  j["rt60_range"] = {s.rt60_range[0], s.rt60_range[1]};
  j["sir_range_db"] = {s.sir_range_db[0], s.sir_range_db[1]};
  j["snr_range_db"] = {s.snr_range_db[0], s.snr_range_db[1]};
  j["doa_range_deg"] = {s.doa_range_deg[0], s.doa_range_deg[1]};
  j["source_distance_range_m"] = {s.source_distance_range_m[0],
                                  s.source_distance_range_m[1]};
  j["min_delta_doa_deg"] = s.min_delta_doa_deg;
  j["wall_margin_m"] = s.wall_margin_m;
  j["source_margin_m"] = s.source_margin_m;
  j["array_aperture_m"] = s.array_aperture_m;
  j["n_sources"] = s.n_sources;
  j["max_retries"] = s.max_retries;
  j["source_pool"] = s.source_pool;
  j["noise"] = NoiseToJson(s.noise);
  return j;
}

std::vector<Eigen::Vector3d> GeometryFromJson(const json &j) {
  if (j.contains("mic_positions")) {
    std::vector<Eigen::Vector3d> mics;
    for (const auto &m : j.at("mic_positions")) mics.push_back(Vec3FromJson(m));
    return mics;
  }
  int n = 4;
  double aperture = 0.226;
  if (j.contains("linear")) {
    n = j.at("linear").value("n_mics", 4);
    aperture = j.at("linear").value("aperture", 0.226);
  }
  ArrayGeometry g = MakeLinearArray(n, aperture);
  return g.mics();
}

json SceneSpecToJson(const SceneSpec &s) {
  json j;
  j["seed"] = s.seed;
  j["sir_db"] = s.sir_db;
  j["snr_db"] = s.snr_db;
  j["noise"] = NoiseToJson(s.noise);
  j["room"] = {{"dims", Vec3ToJson(s.room.dims)},
               {"rt60", s.room.rt60},
               {"array_center", Vec3ToJson(s.room.array_center)},
               {"array_axis", Vec3ToJson(s.room.array_axis)}};
  json sources = json::array();
  for (const auto &src : s.sources)
    sources.push_back({{"wav", src.wav},
                       {"doa_deg", src.doa_deg},
                       {"position", Vec3ToJson(src.position)}});
  j["sources"] = sources;
  return j;
}

SceneSpec SceneSpecFromJson(const json &j) {
  SceneSpec s;
  s.seed = j.at("seed").get<uint64_t>();
  s.sir_db = j.at("sir_db").get<double>();
  s.snr_db = j.at("snr_db").get<double>();
  s.noise = NoiseFromJson(j.at("noise"));
  const json &room = j.at("room");
  s.room.dims = Vec3FromJson(room.at("dims"));
  s.room.rt60 = room.at("rt60").get<double>();
  s.room.array_center = Vec3FromJson(room.at("array_center"));
  s.room.array_axis = Vec3FromJson(room.at("array_axis"));
  for (const auto &src : j.at("sources")) {
    SceneSource ss;
    ss.wav = src.at("wav").get<std::string>();
    ss.doa_deg = src.at("doa_deg").get<double>();
    ss.position = Vec3FromJson(src.at("position"));
    s.sources.push_back(ss);
    s.room.source_positions.push_back(ss.position);
  }
  return s;
}

}  // namespace

DatasetConfig DatasetConfigFromJson(const std::string &text) {
  json j = json::parse(text);
  DatasetConfig cfg;
  cfg.seed = j.value("seed", 1ULL);
  cfg.n_scenes = j.value("n_scenes", 0);
  if (cfg.n_scenes < 0) throw ConfigError("config: n_scenes must be >= 0");
  cfg.sample_rate = j.value("sample_rate", 16000.0);
  cfg.reference_index = j.value("reference_index", 0);
  cfg.mic_positions = j.contains("geometry")
                          ? GeometryFromJson(j.at("geometry"))
                          : MakeLinearArray(4, 0.226).mics();
  if (j.contains("stft")) cfg.stft = StftFromJson(j.at("stft"));
  if (j.contains("sampler")) cfg.sampler = SamplerFromJson(j.at("sampler"));
  cfg.render = RenderFromJson(j.contains("render") ? j.at("render") : json::object(),
                              cfg.sample_rate);
  cfg.render.reference_channel = cfg.reference_index;
  if (j.contains("pipeline")) cfg.defaults = PipelineFromJson(j.at("pipeline"));
  return cfg;
}

DatasetConfig LoadDatasetConfig(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("LoadDatasetConfig: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return DatasetConfigFromJson(ss.str());
}

ArrayGeometry Manifest::Geometry() const {
  return ArrayGeometry(mic_positions, reference_index);
}

std::string ManifestToJson(const Manifest &m) {
  json j;
  j["version"] = m.version;
  j["sample_rate"] = m.sample_rate;
  json mics = json::array();
  for (const auto &p : m.mic_positions) mics.push_back(Vec3ToJson(p));
  j["geometry"] = {{"mic_positions", mics},
                   {"reference_index", m.reference_index}};
  j["stft"] = StftToJson(m.stft);
  j["render"] = RenderToJson(m.render);
  j["pipeline"] = PipelineToJson(m.defaults);
  json scenes = json::array();
  for (const auto &s : m.scenes) {
    json js = SceneSpecToJson(s.spec);
    js["id"] = s.id;
    js["dir"] = s.dir;
    scenes.push_back(js);
  }
  j["scenes"] = scenes;
  return j.dump(2) + "\n";
}

Manifest ManifestFromJson(const std::string &text) {
  json j = json::parse(text);
  Manifest m;
  m.version = j.at("version").get<int>();
  if (m.version != 1)
    throw ConfigError("manifest: unsupported version " +
                      std::to_string(m.version));
  m.sample_rate = j.at("sample_rate").get<double>();
  const json &geom = j.at("geometry");
  for (const auto &p : geom.at("mic_positions"))
    m.mic_positions.push_back(Vec3FromJson(p));
  m.reference_index = geom.value("reference_index", 0);
  m.stft = StftFromJson(j.at("stft"));
  m.render = RenderFromJson(j.at("render"), m.sample_rate);
  m.render.reference_channel = m.reference_index;
  m.defaults = PipelineFromJson(j.at("pipeline"));
  for (const auto &js : j.at("scenes")) {
    ManifestScene s;
    s.id = js.at("id").get<std::string>();
    s.dir = js.at("dir").get<std::string>();
    s.spec = SceneSpecFromJson(js);
    m.scenes.push_back(std::move(s));
  }
  return m;
}

void SaveManifest(const Manifest &manifest, const std::string &path) {
  AtomicWriteText(path, ManifestToJson(manifest));
}

Manifest LoadManifest(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("LoadManifest: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ManifestFromJson(ss.str());
}

// ---------------------------------------------------------------------------
// Dataset generation

Manifest MakeDataset(const DatasetConfig &cfg, const std::string &out_dir,
                     int jobs) {
  ArrayGeometry geometry(cfg.mic_positions, cfg.reference_index);
  fs::create_directories(out_dir);

  Manifest manifest;
  manifest.sample_rate = cfg.sample_rate;
  manifest.mic_positions = cfg.mic_positions;
  manifest.reference_index = cfg.reference_index;
  manifest.stft = cfg.stft;
  manifest.render = cfg.render;
  manifest.defaults = cfg.defaults;
  manifest.scenes.resize(cfg.n_scenes);

  std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs))
  for (int i = 0; i < cfg.n_scenes; ++i) {
    try {
      uint64_t seed = DeriveSeed(cfg.seed, static_cast<uint64_t>(i));
      SceneSpec spec = SampleScene(cfg.sampler, seed);
      SceneTruth truth = RenderScene(spec, geometry, cfg.render);

      std::string dir_name = SceneDirName(i);
      fs::path scene_dir = fs::path(out_dir) / dir_name;
      fs::create_directories(scene_dir);
      AtomicWriteWav((scene_dir / "mixture.wav").string(), truth.mixture);
      for (size_t s = 0; s < truth.spatial_images.size(); ++s)
        AtomicWriteWav((scene_dir / ("source" + std::to_string(s) + "_image.wav"))
                           .string(),
                       truth.spatial_images[s]);
      AtomicWriteWav((scene_dir / "noise_image.wav").string(),
                     truth.noise_image);

      json tj;
      tj["seed"] = spec.seed;
      tj["rt60"] = spec.room.rt60;
      tj["true_doas"] = truth.true_doas_deg;
      tj["target_sir_db"] = spec.sir_db;
      tj["target_snr_db"] = spec.snr_db;
      tj["achieved_sir_db"] = truth.achieved_sir_db;
      tj["achieved_snr_db"] = truth.achieved_snr_db;
      tj["delta_doa"] = truth.true_doas_deg.size() > 1
                            ? std::abs(truth.true_doas_deg[0] -
                                       truth.true_doas_deg[1])
                            : 0.0;
      AtomicWriteText((scene_dir / "truth.json").string(), tj.dump(2) + "\n");

      manifest.scenes[i].id = dir_name;
      manifest.scenes[i].dir = dir_name;
      manifest.scenes[i].spec = std::move(spec);
    } catch (...) {
#pragma omp critical(make_dataset_err)
      if (failure == nullptr) failure = std::current_exception();
    }
  }
  if (failure != nullptr) std::rethrow_exception(failure);

  SaveManifest(manifest, (fs::path(out_dir) / "manifest.json").string());
  return manifest;
}

std::optional<SceneTruthFiles> LoadSceneTruth(const std::string &scene_dir,
                                              double sample_rate) {
  fs::path tj_path = fs::path(scene_dir) / "truth.json";
  if (!fs::exists(tj_path)) return std::nullopt;
  std::ifstream in(tj_path);
  std::stringstream ss;
  ss << in.rdbuf();
  json tj = json::parse(ss.str());

  SceneTruthFiles out;
  out.seed = tj.value("seed", 0ULL);
  out.rt60 = tj.value("rt60", 0.0);
  out.target_sir_db = tj.value("target_sir_db", 0.0);
  out.target_snr_db = tj.value("target_snr_db", 0.0);
  out.truth.true_doas_deg = tj.at("true_doas").get<std::vector<double>>();
  out.truth.achieved_sir_db = tj.value("achieved_sir_db", 0.0);
  out.truth.achieved_snr_db = tj.value("achieved_snr_db", 0.0);

  out.truth.mixture = ReadWav((fs::path(scene_dir) / "mixture.wav").string(),
                              sample_rate);
  for (int s = 0;; ++s) {
    fs::path p = fs::path(scene_dir) / ("source" + std::to_string(s) +
                                        "_image.wav");
    if (!fs::exists(p)) break;
    out.truth.spatial_images.push_back(ReadWav(p.string(), sample_rate));
  }
  fs::path np = fs::path(scene_dir) / "noise_image.wav";
  if (fs::exists(np)) out.truth.noise_image = ReadWav(np.string(), sample_rate);
  if (out.truth.spatial_images.empty())
    throw InputError("LoadSceneTruth: truth.json without image WAVs in " +
                     scene_dir);
  return out;
}

// ---------------------------------------------------------------------------
// Separation

namespace {

// Recursive statistics: per frequency, run the forgetting-factor updates
// frame by frame and re-derive the weights at every frame.
Spectrogram StreamingAdaptiveBf(const Spectrogram &spec, const Mask &mask,
                                BfKind kind, double mu, double alpha, int ref) {
  const int n_bins = static_cast<int>(spec.bins());
  const Eigen::Index n_frames = spec.frames();
  const int n_ch = spec.channels();

  Spectrogram out;
  out.sample_rate = spec.sample_rate;
  out.window_len = spec.window_len;
  out.frame_shift = spec.frame_shift;
  out.ch.assign(1, Eigen::MatrixXcd(n_frames, n_bins));

  std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(dynamic, 8)
  for (int b = 0; b < n_bins; ++b) {
    try {
      Eigen::MatrixXcd sj = 1e-6 * Eigen::MatrixXcd::Identity(n_ch, n_ch);
      Eigen::MatrixXcd sn = sj;
      Eigen::VectorXcd x(n_ch);
      for (Eigen::Index t = 0; t < n_frames; ++t) {
        for (int c = 0; c < n_ch; ++c) x[c] = spec.ch[c](t, b);
        double m = mask.values(t, b);
        sj = UpdateSourceCov(sj, m, x, alpha);
        sn = UpdateNoiseCov(sn, m, x, alpha);
        Eigen::VectorXcd w;
        switch (kind) {
          case BfKind::kGev: w = GevWeights(sj, sn, ref); break;
          case BfKind::kSdwMwf: w = SdwMwfWeights(sj, sn, mu, ref); break;
          case BfKind::kR1Mwf: w = R1MwfWeights(sj, sn, mu, ref); break;
        }
        out.ch[0](t, b) = w.dot(x);
      }
    } catch (...) {
#pragma omp critical(streaming_bf_err)
      if (failure == nullptr) failure = std::current_exception();
    }
  }
  if (failure != nullptr) std::rethrow_exception(failure);
  return out;
}

std::string MaskPathFor(const std::string &pattern, int source) {
  const std::string token = "{src}";
  std::string::size_type pos = pattern.find(token);
  if (pos == std::string::npos)
    throw ConfigError("mask file pattern must contain {src}: " + pattern);
  std::string out = pattern;
  out.replace(pos, token.size(), std::to_string(source));
  return out;
}

double SourceSirDb(const SceneTruth &truth, size_t j, int ref) {
  double ej = truth.spatial_images[j].ch[ref].squaredNorm();
  double others = 0.0;
  for (size_t k = 0; k < truth.spatial_images.size(); ++k)
    if (k != j) others += truth.spatial_images[k].ch[ref].squaredNorm();
  if (others <= 0.0) return 0.0;
  return 10.0 * std::log10(ej / others);
}

}  // namespace

SeparateResult SeparateScene(const Manifest &manifest, const std::string &scene_id,
                             const std::string &dataset_dir,
                             const std::string &out_dir,
                             const PipelineOptions &opt) {
  opt.Validate();
  const ManifestScene *scene = nullptr;
  for (const auto &s : manifest.scenes)
    if (s.id == scene_id) scene = &s;
  if (scene == nullptr)
    throw ConfigError("SeparateScene: unknown scene id " + scene_id);

  const std::string scene_dir = (fs::path(dataset_dir) / scene->dir).string();
  const ArrayGeometry geometry = manifest.Geometry();
  const int ref = manifest.reference_index;
  const int n_src = static_cast<int>(scene->spec.sources.size());

  TimeSignal mixture =
      ReadWav((fs::path(scene_dir) / "mixture.wav").string(),
              manifest.sample_rate);
  if (mixture.channels() != geometry.num_mics())
    throw InputError("SeparateScene: mixture channel count != geometry");
  std::optional<SceneTruthFiles> truth =
      LoadSceneTruth(scene_dir, manifest.sample_rate);

  // Stage 1: DOAs.
  std::vector<double> doas(n_src);
  if (opt.doa == "truth") {
    if (!truth)
      throw InputError("SeparateScene: --doa truth requires rendered ground "
                       "truth (truth.json) for " + scene_id);
    doas = truth->truth.true_doas_deg;
  } else {
    AngularSpectrum as = ComputeAngularSpectrum(
        mixture, geometry, {0, geometry.num_mics() - 1}, manifest.stft);
    PeakList peaks = TopKPeaks(as, n_src, 5.0);
    if (peaks.doas_deg.empty())
      throw InputError("SeparateScene: GCC-PHAT found no peaks");
    for (int j = 0; j < n_src; ++j) {
      if (truth)
        doas[j] = OracleSelect(peaks, truth->truth.true_doas_deg[j]);
      else
        doas[j] = peaks.doas_deg[j % peaks.doas_deg.size()];
    }
  }

  // Stage 2: DS beamforming towards every DOA.
  Spectrogram spec_x = Stft(mixture, manifest.stft);
  std::vector<Spectrogram> ds(n_src);
  for (int j = 0; j < n_src; ++j)
    ds[j] = DsBeamform(spec_x, geometry, SourceDirection{doas[j], true},
                       !opt.unnormalized_ds, manifest.render.speed_of_sound);

  // Stage 3: masks.
  std::vector<Mask> masks;
  std::string mask_kind;
  if (opt.mask == "oracle") {
    if (!truth)
      throw InputError("SeparateScene: --mask oracle requires rendered ground "
                       "truth for " + scene_id);
    masks = OracleMasks(truth->truth, manifest.stft, ref);
    mask_kind = "oracle";
  } else if (opt.mask == "heuristic") {
    masks = HeuristicMasks(ds);
    mask_kind = "heuristic";
  } else {
    const std::string pattern = opt.mask.substr(5);
    for (int j = 0; j < n_src; ++j) {
      LoadedMask lm = LoadExternalMask(ResolveDataPath(MaskPathFor(pattern, j)),
                                       spec_x.frames(), spec_x.bins());
      lm.mask.source_id = j;
      masks.push_back(std::move(lm.mask));
    }
    mask_kind = "file";
  }
  if (static_cast<int>(masks.size()) < n_src)
    throw InputError("SeparateScene: fewer masks than sources");

  // Stages 4-5: statistics and adaptive beamforming, then synthesis.
  fs::path scene_out = fs::path(out_dir) / scene_id;
  fs::create_directories(scene_out);
  const BfKind kind = ParseBfKind(opt.bf);
  const std::string tag = opt.Tag();

  SeparateResult result;
  result.doas_used_deg = doas;
  for (int j = 0; j < n_src; ++j) {
    Spectrogram enhanced;
    if (opt.stats == "batch") {
      CovariancePair cov = BatchCov(masks[j], spec_x);
      BeamformerWeights w = ComputeWeights(cov, kind, opt.mu, ref);
      enhanced = ApplyBeamformer(w, spec_x);
    } else {
      enhanced = StreamingAdaptiveBf(spec_x, masks[j], kind, opt.mu, opt.alpha,
                                     ref);
    }
    TimeSignal est = Istft(enhanced);
    est.ch[0].conservativeResize(mixture.samples());
    est.ch.resize(1);

    std::string wav_name = "sep_" + tag + "_source" + std::to_string(j) + ".wav";
    AtomicWriteWav((scene_out / wav_name).string(), est);
    result.wav_paths.push_back((scene_out / wav_name).string());
    if (opt.dump_masks)
      SaveMask((scene_out / ("mask_" + tag + "_source" + std::to_string(j) +
                             ".mask")).string(),
               masks[j]);

    if (truth && j < static_cast<int>(truth->truth.spatial_images.size())) {
      const Eigen::VectorXd &ref_img = truth->truth.spatial_images[j].ch[ref];
      EvalRecord rec;
      rec.scene_id = scene_id;
      rec.source_id = j;
      rec.si_sdr_in = SiSdr(mixture.ch[ref], ref_img);
      rec.si_sdr_out = SiSdr(est.ch[0], ref_img);
      rec.doa_true = truth->truth.true_doas_deg[j];
      rec.doa_est = doas[j];
      rec.delta_doa = truth->truth.true_doas_deg.size() > 1
                          ? std::abs(truth->truth.true_doas_deg[0] -
                                     truth->truth.true_doas_deg[1])
                          : 0.0;
      rec.sir_db = SourceSirDb(truth->truth, j, ref);
      rec.snr_db = truth->truth.achieved_snr_db;
      rec.bf_kind = opt.bf;
      rec.mask_kind = mask_kind;
      result.records.push_back(std::move(rec));
    }
  }

  if (!result.records.empty()) {
    std::string lines;
    for (const auto &r : result.records) lines += EvalRecordToJson(r) + "\n";
    AtomicWriteText((scene_out / ("records_" + tag + ".jsonl")).string(), lines);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Evaluation and the full chain

std::vector<EvalRecord> LoadRecordsUnder(const std::string &dir) {
  std::vector<std::string> files;
  if (fs::is_regular_file(dir)) {
    files.push_back(dir);
  } else {
    for (const auto &e : fs::recursive_directory_iterator(dir)) {
      if (!e.is_regular_file()) continue;
      std::string name = e.path().filename().string();
      if (name.rfind("records_", 0) == 0 && e.path().extension() == ".jsonl")
        files.push_back(e.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<EvalRecord> records;
  for (const auto &f : files) {
    std::ifstream in(f);
    if (!in) throw InputError("LoadRecordsUnder: cannot open " + f);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      records.push_back(EvalRecordFromJson(line));
    }
  }
  return records;
}

BucketReport EvaluateRecords(const std::vector<EvalRecord> &records,
                             const std::string &out_dir) {
  fs::create_directories(out_dir);
  BucketReport report = MakeBucketReport(records);
  AtomicWriteText((fs::path(out_dir) / "report.txt").string(),
                  RenderTextReport(report));
  AtomicWriteText((fs::path(out_dir) / "report.csv").string(),
                  RenderCsvReport(report));
  return report;
}

PipelineRunResult RunPipeline(const DatasetConfig &cfg, const std::string &out_dir,
                              int jobs,
                              const std::optional<PipelineOptions> &override_opt) {
  PipelineRunResult result;
  result.manifest = MakeDataset(cfg, out_dir, jobs);
  const PipelineOptions opt = override_opt.value_or(cfg.defaults);

  const std::string sep_dir = (fs::path(out_dir) / "separated").string();
  const int n = static_cast<int>(result.manifest.scenes.size());
  std::vector<std::vector<EvalRecord>> per_scene(n);
  std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs))
  for (int i = 0; i < n; ++i) {
    try {
      SeparateResult r = SeparateScene(result.manifest,
                                       result.manifest.scenes[i].id, out_dir,
                                       sep_dir, opt);
      per_scene[i] = std::move(r.records);
    } catch (...) {
#pragma omp critical(run_pipeline_err)
      if (failure == nullptr) failure = std::current_exception();
    }
  }
  if (failure != nullptr) std::rethrow_exception(failure);

  for (auto &v : per_scene)
    result.records.insert(result.records.end(), v.begin(), v.end());
  result.report =
      EvaluateRecords(result.records, (fs::path(out_dir) / "report").string());
  return result;
}

}  // namespace locsep
