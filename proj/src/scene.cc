// src/scene.cc

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

#include "locsep/scene.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "locsep/wav.h"

namespace locsep {

SceneSpec SampleScene(const SamplerConfig &cfg, uint64_t seed) {
  if (cfg.n_sources < 1) throw ConfigError("SampleScene: n_sources must be >= 1");
  if (cfg.source_pool.empty())
    throw InputError("SampleScene: empty source audio pool");
  if (static_cast<int>(cfg.source_pool.size()) < cfg.n_sources)
    throw InputError("SampleScene: source pool smaller than n_sources");

  Rng rng(seed);
  SceneSpec spec;
  spec.seed = seed;

  for (int d = 0; d < 3; ++d)
    spec.room.dims[d] = rng.Uniform(cfg.room_dim_range[0], cfg.room_dim_range[1]);
  spec.room.rt60 = rng.Uniform(cfg.rt60_range[0], cfg.rt60_range[1]);
  spec.sir_db = rng.Uniform(cfg.sir_range_db[0], cfg.sir_range_db[1]);
  spec.snr_db = rng.Uniform(cfg.snr_range_db[0], cfg.snr_range_db[1]);

  const double margin = cfg.wall_margin_m + cfg.array_aperture_m / 2.0;
  for (int d = 0; d < 3; ++d)
    if (spec.room.dims[d] <= 2.0 * margin)
      throw ConfigError("SampleScene: room too small for the array margin");

  double phi = rng.Uniform(0.0, 2.0 * kPi);
  Eigen::Vector3d axis(std::cos(phi), std::sin(phi), 0.0);
  Eigen::Vector3d perp(-std::sin(phi), std::cos(phi), 0.0);
  Eigen::Vector3d center;
  center.x() = rng.Uniform(margin, spec.room.dims.x() - margin);
  center.y() = rng.Uniform(margin, spec.room.dims.y() - margin);
  center.z() = rng.Uniform(1.2, std::min(2.0, spec.room.dims.z() - margin));
  spec.room.array_center = center;
  spec.room.array_axis = axis;

  auto inside = [&](const Eigen::Vector3d &p) {
    for (int d = 0; d < 3; ++d)
      if (!(p[d] >= cfg.source_margin_m &&
            p[d] <= spec.room.dims[d] - cfg.source_margin_m))
        return false;
    return true;
  };

  bool placed = false;
  for (int attempt = 0; attempt < cfg.max_retries && !placed; ++attempt) {
    std::vector<double> doas(cfg.n_sources);
    for (auto &a : doas)
      a = rng.Uniform(cfg.doa_range_deg[0], cfg.doa_range_deg[1]);
    bool separated = true;
    for (int i = 0; i < cfg.n_sources && separated; ++i)
      for (int j = i + 1; j < cfg.n_sources; ++j)
        if (std::abs(doas[i] - doas[j]) < cfg.min_delta_doa_deg) {
          separated = false;
          break;
        }
    if (!separated) continue;

    std::vector<Eigen::Vector3d> positions(cfg.n_sources);
    bool ok = true;
    for (int j = 0; j < cfg.n_sources; ++j) {
      double r = rng.Uniform(cfg.source_distance_range_m[0],
                             cfg.source_distance_range_m[1]);
      double theta = doas[j] * kPi / 180.0;
      Eigen::Vector3d u = -std::cos(theta) * axis + std::sin(theta) * perp;
      positions[j] = center + r * u;
      if (!inside(positions[j])) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;

    spec.sources.resize(cfg.n_sources);
    for (int j = 0; j < cfg.n_sources; ++j) {
      spec.sources[j].doa_deg = doas[j];
      spec.sources[j].position = positions[j];
    }
    spec.room.source_positions = positions;
    placed = true;
  }
  if (!placed)
    throw ConfigError("SampleScene: no feasible source placement after retries");

  // Distinct files via a partial Fisher-Yates shuffle.
  std::vector<int> idx(cfg.source_pool.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (int j = 0; j < cfg.n_sources; ++j) {
    int k = rng.UniformInt(j, static_cast<int>(idx.size()) - 1);
    std::swap(idx[j], idx[k]);
    spec.sources[j].wav = cfg.source_pool[idx[j]];
  }

  spec.noise = cfg.noise;
  return spec;
}

std::vector<Eigen::Vector3d> PlaceArray(const ArrayGeometry &relative,
                                        const Eigen::Vector3d &center,
                                        const Eigen::Vector3d &axis) {
  Eigen::Vector3d a = axis;
  a.z() = 0.0;
  if (a.norm() < 1e-9)
    throw ConfigError("PlaceArray: array axis must have a horizontal component");
  a.normalize();
  double phi = std::atan2(a.y(), a.x());
  Eigen::Matrix3d rot;
  rot = Eigen::AngleAxisd(phi, Eigen::Vector3d::UnitZ());
  std::vector<Eigen::Vector3d> out;
  out.reserve(relative.num_mics());
  for (int i = 0; i < relative.num_mics(); ++i)
    out.push_back(center + rot * relative.mic(i));
  return out;
}

namespace {

Eigen::VectorXd LoadMono(const std::string &path, const RenderConfig &rc) {
  TimeSignal s = ReadWav(ResolveDataPath(path), rc.sample_rate);
  Eigen::VectorXd x = s.ch[0];
  if (rc.max_source_seconds > 0.0) {
    Eigen::Index cap =
        static_cast<Eigen::Index>(rc.max_source_seconds * rc.sample_rate);
    if (x.size() > cap) x = x.head(cap).eval();
  }
  return x;
}

double Db(double ratio) { return 10.0 * std::log10(ratio); }

}  // namespace

SceneTruth RenderScene(const SceneSpec &spec, const ArrayGeometry &relative_geom,
                       const RenderConfig &rc) {
  if (spec.sources.empty()) throw ConfigError("RenderScene: no sources");
  const int n_ch = relative_geom.num_mics();
  const int ref = rc.reference_channel;
  if (ref < 0 || ref >= n_ch)
    throw ConfigError("RenderScene: reference channel out of range");

  std::vector<Eigen::Vector3d> mics =
      PlaceArray(relative_geom, spec.room.array_center, spec.room.array_axis);

  // Dry sources, zero-padded to the longest one ("max" length convention).
  std::vector<Eigen::VectorXd> dry(spec.sources.size());
  Eigen::Index n_dry = 0;
  for (size_t j = 0; j < spec.sources.size(); ++j) {
    dry[j] = LoadMono(spec.sources[j].wav, rc);
    if (dry[j].squaredNorm() == 0.0)
      throw InputError("RenderScene: silent source " + spec.sources[j].wav);
    n_dry = std::max(n_dry, dry[j].size());
  }

  RirConfig rir_cfg;
  rir_cfg.sample_rate = rc.sample_rate;
  rir_cfg.speed_of_sound = rc.speed_of_sound;
  rir_cfg.anechoic = rc.anechoic;
  rir_cfg.frac_delay = rc.frac_delay;
  rir_cfg.max_order = rc.max_order;

  std::vector<Rir> rirs(spec.sources.size());
  for (size_t j = 0; j < spec.sources.size(); ++j)
    rirs[j] = SimulateRir(spec.room, spec.sources[j].position, mics, rir_cfg);

  Eigen::Index n_mix = 0;
  for (const auto &r : rirs)
    n_mix = std::max(n_mix, n_dry + r.taps[0].size() - 1);

  SceneTruth truth;
  truth.spatial_images.resize(spec.sources.size());
  const int n_src = static_cast<int>(spec.sources.size());
  for (auto &img : truth.spatial_images) {
    img.sample_rate = rc.sample_rate;
    img.ch.assign(n_ch, Eigen::VectorXd());
  }
#pragma omp parallel for collapse(2) schedule(dynamic)
  for (int j = 0; j < n_src; ++j) {
    for (int c = 0; c < n_ch; ++c) {
      Eigen::VectorXd padded = Eigen::VectorXd::Zero(n_dry);
      padded.head(dry[j].size()) = dry[j];
      Eigen::VectorXd img = Convolve(padded, rirs[j].taps[c]);
      Eigen::VectorXd full = Eigen::VectorXd::Zero(n_mix);
      full.head(img.size()) = img;
      truth.spatial_images[j].ch[c] = std::move(full);
    }
  }

  // Interferers scaled against source 0 at the reference channel.
  double e0 = truth.spatial_images[0].ch[ref].squaredNorm();
  if (e0 == 0.0) throw InputError("RenderScene: source 0 image is silent");
  for (size_t j = 1; j < truth.spatial_images.size(); ++j) {
    double ej = truth.spatial_images[j].ch[ref].squaredNorm();
    if (ej == 0.0)
      throw InputError("RenderScene: interferer image is silent, cannot set SIR");
    double gain = std::sqrt(e0 / (ej * std::pow(10.0, spec.sir_db / 10.0)));
    for (auto &chan : truth.spatial_images[j].ch) chan *= gain;
  }

  truth.noise_image = SynthNoise(spec.noise, mics, n_mix, rc.sample_rate,
                                 DeriveSeed(spec.seed, 0x6e6f6973ULL),
                                 rc.speed_of_sound);
  double es = 0.0;
  for (const auto &img : truth.spatial_images) es += img.ch[ref].squaredNorm();
  double en = truth.noise_image.ch[ref].squaredNorm();
  if (en == 0.0) throw InputError("RenderScene: silent noise, cannot set SNR");
  double gn = std::sqrt(es / (en * std::pow(10.0, spec.snr_db / 10.0)));
  for (auto &chan : truth.noise_image.ch) chan *= gn;

  truth.mixture.sample_rate = rc.sample_rate;
  truth.mixture.ch.assign(n_ch, Eigen::VectorXd());
  for (int c = 0; c < n_ch; ++c) {
    Eigen::VectorXd acc = truth.spatial_images[0].ch[c];
    for (size_t j = 1; j < truth.spatial_images.size(); ++j)
      acc += truth.spatial_images[j].ch[c];
    acc += truth.noise_image.ch[c];
    truth.mixture.ch[c] = std::move(acc);
  }

  for (const auto &s : spec.sources) truth.true_doas_deg.push_back(s.doa_deg);
  if (truth.spatial_images.size() > 1) {
    double e1 = truth.spatial_images[1].ch[ref].squaredNorm();
    truth.achieved_sir_db = Db(e0 / e1);
  }
  truth.achieved_snr_db = Db(es / truth.noise_image.ch[ref].squaredNorm());
  return truth;
}

TimeSignal SynthNoise(const NoiseSpec &spec,
                      const std::vector<Eigen::Vector3d> &mics,
                      Eigen::Index n_samples, double sample_rate, uint64_t seed,
                      double speed_of_sound) {
  const int n_ch = static_cast<int>(mics.size());
  TimeSignal out;
  out.sample_rate = sample_rate;

  if (spec.kind == NoiseSpec::Kind::kFile) {
    TimeSignal file = ReadWav(ResolveDataPath(spec.path), sample_rate);
    if (file.channels() != n_ch)
      throw InputError("SynthNoise: noise file has " +
                       std::to_string(file.channels()) + " channels, need " +
                       std::to_string(n_ch));
    if (file.samples() < n_samples)
      throw InputError("SynthNoise: noise file shorter than the mixture");
    Eigen::Index max_off = file.samples() - n_samples;
    Eigen::Index off;
    if (spec.offset_s >= 0.0) {
      off = static_cast<Eigen::Index>(std::llround(spec.offset_s * sample_rate));
      if (off > max_off)
        throw InputError("SynthNoise: requested offset past end of noise file");
    } else {
      Rng rng(seed);
      off = max_off == 0 ? 0 : static_cast<Eigen::Index>(rng.NextU64() %
                                                         (max_off + 1));
    }
    out.ch.resize(n_ch);
    for (int c = 0; c < n_ch; ++c)
      out.ch[c] = file.ch[c].segment(off, n_samples);
    return out;
  }

  // Spherically isotropic approximation: plane waves from uniform random
  // directions, each a fresh white noise delayed per mic.
  const int K = std::max(64, spec.n_plane_waves);
  Rng rng(seed);
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto &m : mics) centroid += m;
  centroid /= n_ch;
  double radius = 0.0;
  for (const auto &m : mics) radius = std::max(radius, (m - centroid).norm());
  const Eigen::Index guard =
      static_cast<Eigen::Index>(std::ceil(radius / speed_of_sound * sample_rate)) + 1;

  out.ch.assign(n_ch, Eigen::VectorXd::Zero(n_samples));
  Eigen::VectorXd w(n_samples + 2 * guard);
  for (int k = 0; k < K; ++k) {
    double z = rng.Uniform(-1.0, 1.0);
    double phi = rng.Uniform(0.0, 2.0 * kPi);
    double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    Eigen::Vector3d dir(rho * std::cos(phi), rho * std::sin(phi), z);
    for (Eigen::Index t = 0; t < w.size(); ++t) w[t] = rng.Normal();
    for (int c = 0; c < n_ch; ++c) {
      // Arrival delay of this plane wave at mic c, relative to the centroid.
      Eigen::Index d = static_cast<Eigen::Index>(
          std::lround((mics[c] - centroid).dot(dir) / speed_of_sound * sample_rate));
      out.ch[c] += w.segment(guard + d, n_samples);
    }
  }
  double scale = 1.0 / std::sqrt(static_cast<double>(K));
  for (auto &c : out.ch) c *= scale;
  return out;
}

TimeSignal SynthSpeechLike(double duration_s, double sample_rate, uint64_t seed) {
  const Eigen::Index n = static_cast<Eigen::Index>(duration_s * sample_rate);
  Rng rng(seed);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);

  // Pitch target updated every ~150 ms, interpolated linearly in between.
  const Eigen::Index seg = static_cast<Eigen::Index>(0.15 * sample_rate);
  double f0_prev = rng.Uniform(90.0, 260.0);
  double f0_next = rng.Uniform(90.0, 260.0);
  // Two fixed formant-like resonances shape the harmonic amplitudes.
  double form1 = rng.Uniform(300.0, 900.0);
  double form2 = rng.Uniform(1200.0, 2600.0);

  // Syllabic gate: on/off segments of 60-200 ms with raised-cosine edges.
  Eigen::VectorXd gate = Eigen::VectorXd::Zero(n);
  Eigen::Index pos = 0;
  while (pos < n) {
    Eigen::Index len = static_cast<Eigen::Index>(
        rng.Uniform(0.06, 0.20) * sample_rate);
    bool on = rng.Uniform() < 0.75;
    double level = on ? rng.Uniform(0.4, 1.0) : 0.0;
    for (Eigen::Index t = pos; t < std::min(n, pos + len); ++t) gate[t] = level;
    pos += len;
  }
  const Eigen::Index ramp = static_cast<Eigen::Index>(0.01 * sample_rate);
  Eigen::VectorXd smooth = gate;
  for (Eigen::Index t = 1; t < n; ++t) {
    double a = 1.0 / ramp;
    smooth[t] = smooth[t - 1] + std::clamp(gate[t] - smooth[t - 1], -a, a);
  }

  double theta = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (t % seg == 0 && t > 0) {
      f0_prev = f0_next;
      f0_next = rng.Uniform(90.0, 260.0);
    }
    double frac = static_cast<double>(t % seg) / seg;
    double f0 = f0_prev + (f0_next - f0_prev) * frac;
    theta += 2.0 * kPi * f0 / sample_rate;
    int n_harm = static_cast<int>(3600.0 / f0);
    double s = 0.0;
    for (int k = 1; k <= n_harm; ++k) {
      double fk = k * f0;
      double res = std::exp(-0.5 * std::pow((fk - form1) / 250.0, 2)) +
                   0.7 * std::exp(-0.5 * std::pow((fk - form2) / 400.0, 2)) +
                   0.08;
      s += res / std::pow(k, 0.7) * std::sin(k * theta);
    }
    x[t] = smooth[t] * (s + 0.03 * rng.Normal());
  }
  double peak = x.cwiseAbs().maxCoeff();
  if (peak > 0.0) x *= 0.3 / peak;

  TimeSignal sig;
  sig.sample_rate = sample_rate;
  sig.ch.push_back(std::move(x));
  return sig;
}

}  // namespace locsep
