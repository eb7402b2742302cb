// src/separation.cc

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

#include "locsep/separation.h"

#include <cmath>
#include <cstring>
#include <fstream>

namespace locsep {

Spectrogram DsBeamform(const Spectrogram &spec, const ArrayGeometry &geom,
                       const SourceDirection &dir, bool normalize,
                       double speed_of_sound) {
  spec.Validate();
  if (spec.channels() != geom.num_mics())
    throw ConfigError("DsBeamform: spectrogram has " +
                      std::to_string(spec.channels()) + " channels, geometry " +
                      std::to_string(geom.num_mics()) + " mics");
  const int n_bins = static_cast<int>(spec.bins());
  const Eigen::Index n_frames = spec.frames();
  const int n_ch = spec.channels();
  const double inv = normalize ? 1.0 / n_ch : 1.0;

  Spectrogram out;
  out.sample_rate = spec.sample_rate;
  out.window_len = spec.window_len;
  out.frame_shift = spec.frame_shift;
  out.ch.assign(1, Eigen::MatrixXcd(n_frames, n_bins));

#pragma omp parallel for
  for (int b = 0; b < n_bins; ++b) {
    double nu = static_cast<double>(b) * spec.sample_rate / spec.window_len;
    Eigen::VectorXcd d = SteeringAtHz(geom, dir, nu, speed_of_sound);
    for (Eigen::Index t = 0; t < n_frames; ++t) {
      std::complex<double> acc(0.0, 0.0);
      for (int c = 0; c < n_ch; ++c) acc += std::conj(d[c]) * spec.ch[c](t, b);
      out.ch[0](t, b) = acc * inv;
    }
  }
  return out;
}

FeatureBlock CsipdFeatures(const Spectrogram &ds_spec,
                           const Spectrogram &ref_spec) {
  if (ds_spec.channels() != 1 || ref_spec.channels() != 1)
    throw ConfigError("CsipdFeatures: expects single-channel spectrograms");
  if (ds_spec.frames() != ref_spec.frames() || ds_spec.bins() != ref_spec.bins())
    throw ConfigError("CsipdFeatures: dimension mismatch");

  const Eigen::Index n_frames = ds_spec.frames();
  const Eigen::Index n_bins = ds_spec.bins();
  FeatureBlock fb;
  fb.magnitude.resize(n_frames, n_bins);
  fb.cos_ipd.resize(n_frames, n_bins);
  fb.sin_ipd.resize(n_frames, n_bins);

#pragma omp parallel for
  for (Eigen::Index b = 0; b < n_bins; ++b) {
    for (Eigen::Index t = 0; t < n_frames; ++t) {
      std::complex<double> d = ds_spec.ch[0](t, b);
      std::complex<double> r = ref_spec.ch[0](t, b);
      double md = std::abs(d);
      fb.magnitude(t, b) = md;
      if (md < 1e-12 || std::abs(r) < 1e-12) {
        fb.cos_ipd(t, b) = 1.0;
        fb.sin_ipd(t, b) = 0.0;
      } else {
        std::complex<double> prod = d * std::conj(r);
        double mag = std::abs(prod);
        fb.cos_ipd(t, b) = prod.real() / mag;
        fb.sin_ipd(t, b) = prod.imag() / mag;
      }
    }
  }
  return fb;
}

std::vector<Mask> OracleMasks(const SceneTruth &truth, const StftConfig &cfg,
                              int reference_channel, OracleMaskKind kind) {
  if (truth.spatial_images.empty())
    throw InputError("OracleMasks: scene truth has no spatial images");
  const int n_src = static_cast<int>(truth.spatial_images.size());

  std::vector<Eigen::MatrixXd> mags(n_src);
  for (int j = 0; j < n_src; ++j) {
    TimeSignal mono;
    mono.sample_rate = truth.spatial_images[j].sample_rate;
    mono.ch.push_back(truth.spatial_images[j].ch.at(reference_channel));
    mags[j] = Stft(mono, cfg).ch[0].cwiseAbs();
  }
  Eigen::MatrixXd noise_mag;
  if (truth.noise_image.channels() > 0) {
    TimeSignal mono;
    mono.sample_rate = truth.noise_image.sample_rate;
    mono.ch.push_back(truth.noise_image.ch.at(reference_channel));
    noise_mag = Stft(mono, cfg).ch[0].cwiseAbs();
  } else {
    noise_mag = Eigen::MatrixXd::Zero(mags[0].rows(), mags[0].cols());
  }

  const Eigen::Index n_frames = mags[0].rows();
  const Eigen::Index n_bins = mags[0].cols();
  std::vector<Mask> masks(n_src);
  for (int j = 0; j < n_src; ++j) {
    masks[j].source_id = j;
    masks[j].values.setZero(n_frames, n_bins);
  }

  for (Eigen::Index b = 0; b < n_bins; ++b) {
    for (Eigen::Index t = 0; t < n_frames; ++t) {
      if (kind == OracleMaskKind::kBinary) {
        int best = -1;  // -1 = noise wins
        double best_mag = noise_mag(t, b);
        for (int j = 0; j < n_src; ++j)
          if (mags[j](t, b) > best_mag) {
            best_mag = mags[j](t, b);
            best = j;
          }
        if (best >= 0 && best_mag > 1e-12) masks[best].values(t, b) = 1.0;
      } else {
        const bool wiener = kind == OracleMaskKind::kWiener;
        double denom = 0.0;
        for (int j = 0; j < n_src; ++j) {
          double m = mags[j](t, b);
          denom += wiener ? m * m : m;
        }
        double nm = noise_mag(t, b);
        denom += wiener ? nm * nm : nm;
        if (denom < 1e-12) continue;
        for (int j = 0; j < n_src; ++j) {
          double m = mags[j](t, b);
          masks[j].values(t, b) = (wiener ? m * m : m) / denom;
        }
      }
    }
  }
  return masks;
}

std::vector<Mask> HeuristicMasks(const std::vector<Spectrogram> &ds_specs,
                                 double exponent) {
  if (ds_specs.empty()) throw ConfigError("HeuristicMasks: no DS spectrograms");
  const int n_src = static_cast<int>(ds_specs.size());
  for (const auto &s : ds_specs) {
    if (s.channels() != 1)
      throw ConfigError("HeuristicMasks: expects single-channel DS outputs");
    if (s.frames() != ds_specs[0].frames() || s.bins() != ds_specs[0].bins())
      throw ConfigError("HeuristicMasks: DS outputs differ in shape");
  }
  const Eigen::Index n_frames = ds_specs[0].frames();
  const Eigen::Index n_bins = ds_specs[0].bins();

  std::vector<Mask> masks(n_src);
  for (int j = 0; j < n_src; ++j) {
    masks[j].source_id = j;
    masks[j].values.resize(n_frames, n_bins);
  }
#pragma omp parallel for
  for (Eigen::Index b = 0; b < n_bins; ++b) {
    for (Eigen::Index t = 0; t < n_frames; ++t) {
      double denom = 0.0;
      for (int j = 0; j < n_src; ++j)
        denom += std::pow(std::abs(ds_specs[j].ch[0](t, b)), exponent);
      for (int j = 0; j < n_src; ++j) {
        masks[j].values(t, b) =
            denom > 0.0
                ? std::pow(std::abs(ds_specs[j].ch[0](t, b)), exponent) / denom
                : 1.0 / n_src;
      }
    }
  }
  return masks;
}

namespace {
constexpr char kMaskMagic[4] = {'M', 'A', 'S', 'K'};
}

void SaveMask(const std::string &path, const Mask &mask) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InputError("SaveMask: cannot open " + path);
  uint32_t frames = static_cast<uint32_t>(mask.frames());
  uint32_t bins = static_cast<uint32_t>(mask.bins());
  uint32_t reserved = 0;
  os.write(kMaskMagic, 4);
  os.write(reinterpret_cast<const char *>(&frames), 4);
  os.write(reinterpret_cast<const char *>(&bins), 4);
  os.write(reinterpret_cast<const char *>(&reserved), 4);
  for (Eigen::Index t = 0; t < mask.frames(); ++t)
    for (Eigen::Index b = 0; b < mask.bins(); ++b) {
      float v = static_cast<float>(mask.values(t, b));
      os.write(reinterpret_cast<const char *>(&v), 4);
    }
  if (!os) throw InputError("SaveMask: write failed for " + path);
}

LoadedMask LoadExternalMask(const std::string &path, Eigen::Index frames,
                            Eigen::Index bins) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("LoadExternalMask: cannot open " + path);
  char magic[4];
  uint32_t f = 0, b = 0, reserved = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char *>(&f), 4);
  in.read(reinterpret_cast<char *>(&b), 4);
  in.read(reinterpret_cast<char *>(&reserved), 4);
  if (!in || std::memcmp(magic, kMaskMagic, 4) != 0)
    throw InputError("LoadExternalMask: bad header in " + path);
  if (f != static_cast<uint32_t>(frames) || b != static_cast<uint32_t>(bins))
    throw ConfigError("LoadExternalMask: mask is " + std::to_string(f) + "x" +
                      std::to_string(b) + ", expected " +
                      std::to_string(frames) + "x" + std::to_string(bins));

  LoadedMask out;
  out.mask.values.resize(frames, bins);
  for (Eigen::Index t = 0; t < frames; ++t)
    for (Eigen::Index bi = 0; bi < bins; ++bi) {
      float v;
      in.read(reinterpret_cast<char *>(&v), 4);
      if (!in) throw InputError("LoadExternalMask: truncated file " + path);
      if (!std::isfinite(v))
        throw InputError("LoadExternalMask: non-finite value in " + path);
      double d = v;
      if (d < 0.0) {
        d = 0.0;
        ++out.clamped;
      } else if (d > 1.0) {
        d = 1.0;
        ++out.clamped;
      }
      out.mask.values(t, bi) = d;
    }
  return out;
}

}  // namespace locsep
