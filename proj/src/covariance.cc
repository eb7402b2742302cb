// src/covariance.cc

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

#include "locsep/covariance.h"

#include <cstring>
#include <fstream>

namespace locsep {

namespace {

void CheckUpdateArgs(double mask_val, double alpha) {
  if (!(mask_val >= 0.0 && mask_val <= 1.0))
    throw ConfigError("covariance update: mask value outside [0, 1]");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ConfigError("covariance update: alpha outside [0, 1]");
}

// Validated before entering parallel regions so the per-frame updates
// cannot throw mid-loop.
void CheckMaskRange(const Mask &mask) {
  if (!mask.values.allFinite() || (mask.values.array() < 0.0).any() ||
      (mask.values.array() > 1.0).any())
    throw ConfigError("covariance: mask values outside [0, 1]");
}

// Gathers the per-frequency snapshot vector x(t, f) across channels.
inline Eigen::VectorXcd Snapshot(const Spectrogram &spec, Eigen::Index t,
                                 Eigen::Index b) {
  Eigen::VectorXcd x(spec.channels());
  for (int c = 0; c < spec.channels(); ++c) x[c] = spec.ch[c](t, b);
  return x;
}

}  // namespace

Eigen::MatrixXcd UpdateSourceCov(const Eigen::MatrixXcd &prev, double mask_val,
                                 const Eigen::VectorXcd &x, double alpha) {
  CheckUpdateArgs(mask_val, alpha);
  return alpha * prev + ((1.0 - alpha) * mask_val) * (x * x.adjoint());
}

Eigen::MatrixXcd UpdateNoiseCov(const Eigen::MatrixXcd &prev, double mask_val,
                                const Eigen::VectorXcd &x, double alpha) {
  CheckUpdateArgs(mask_val, alpha);
  return alpha * prev + ((1.0 - alpha) * (1.0 - mask_val)) * (x * x.adjoint());
}

CovariancePair BatchCov(const Mask &mask, const Spectrogram &spec) {
  spec.Validate();
  if (mask.frames() != spec.frames() || mask.bins() != spec.bins())
    throw ConfigError("BatchCov: mask shape does not match the spectrogram");
  CheckMaskRange(mask);
  const int n_ch = spec.channels();
  const int n_bins = static_cast<int>(spec.bins());
  const Eigen::Index n_frames = spec.frames();

  CovariancePair cov;
  cov.alpha = 0.0;
  cov.sigma_j.assign(n_bins, Eigen::MatrixXcd());
  cov.sigma_n.assign(n_bins, Eigen::MatrixXcd());

#pragma omp parallel for
  for (int b = 0; b < n_bins; ++b) {
    Eigen::MatrixXcd acc_j = Eigen::MatrixXcd::Zero(n_ch, n_ch);
    Eigen::MatrixXcd acc_n = Eigen::MatrixXcd::Zero(n_ch, n_ch);
    Eigen::MatrixXcd acc_all = Eigen::MatrixXcd::Zero(n_ch, n_ch);
    double w_j = 0.0, w_n = 0.0;
    for (Eigen::Index t = 0; t < n_frames; ++t) {
      Eigen::VectorXcd x = Snapshot(spec, t, b);
      Eigen::MatrixXcd outer = x * x.adjoint();
      double m = mask.values(t, b);
      acc_j += m * outer;
      acc_n += (1.0 - m) * outer;
      acc_all += outer;
      w_j += m;
      w_n += 1.0 - m;
    }
    double mean_pow = n_frames > 0
                          ? acc_all.real().trace() / (n_frames * n_ch)
                          : 0.0;
    double fallback = 1e-6 * (mean_pow > 0.0 ? mean_pow : 1.0);
    cov.sigma_j[b] = w_j > 1e-8
                         ? Eigen::MatrixXcd(acc_j / w_j)
                         : Eigen::MatrixXcd(fallback *
                                            Eigen::MatrixXcd::Identity(n_ch, n_ch));
    cov.sigma_n[b] = w_n > 1e-8
                         ? Eigen::MatrixXcd(acc_n / w_n)
                         : Eigen::MatrixXcd(fallback *
                                            Eigen::MatrixXcd::Identity(n_ch, n_ch));
  }
  return cov;
}

CovariancePair RecursiveCovFinal(const Mask &mask, const Spectrogram &spec,
                                 double alpha, double epsilon_init) {
  spec.Validate();
  if (mask.frames() != spec.frames() || mask.bins() != spec.bins())
    throw ConfigError("RecursiveCovFinal: mask shape does not match");
  CheckMaskRange(mask);
  const int n_ch = spec.channels();
  const int n_bins = static_cast<int>(spec.bins());
  const Eigen::Index n_frames = spec.frames();

  CovariancePair cov;
  cov.alpha = alpha;
  cov.sigma_j.assign(n_bins, Eigen::MatrixXcd());
  cov.sigma_n.assign(n_bins, Eigen::MatrixXcd());

#pragma omp parallel for
  for (int b = 0; b < n_bins; ++b) {
    Eigen::MatrixXcd sj =
        epsilon_init * Eigen::MatrixXcd::Identity(n_ch, n_ch);
    Eigen::MatrixXcd sn = sj;
    for (Eigen::Index t = 0; t < n_frames; ++t) {
      Eigen::VectorXcd x = Snapshot(spec, t, b);
      double m = mask.values(t, b);
      sj = UpdateSourceCov(sj, m, x, alpha);
      sn = UpdateNoiseCov(sn, m, x, alpha);
    }
    cov.sigma_j[b] = std::move(sj);
    cov.sigma_n[b] = std::move(sn);
  }
  return cov;
}

namespace {
constexpr char kCovMagic[4] = {'C', 'O', 'V', 'Z'};

void WriteMatrix(std::ofstream &os, const Eigen::MatrixXcd &m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      float re = static_cast<float>(m(r, c).real());
      float im = static_cast<float>(m(r, c).imag());
      os.write(reinterpret_cast<const char *>(&re), 4);
      os.write(reinterpret_cast<const char *>(&im), 4);
    }
}

Eigen::MatrixXcd ReadMatrix(std::ifstream &in, int dim) {
  Eigen::MatrixXcd m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      float re, im;
      in.read(reinterpret_cast<char *>(&re), 4);
      in.read(reinterpret_cast<char *>(&im), 4);
      m(r, c) = std::complex<double>(re, im);
    }
  return m;
}
}  // namespace

void SaveCovDump(const std::string &path, const CovariancePair &cov) {
  if (cov.sigma_j.size() != cov.sigma_n.size())
    throw ConfigError("SaveCovDump: mismatched sigma_j/sigma_n");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InputError("SaveCovDump: cannot open " + path);
  uint32_t freqs = static_cast<uint32_t>(cov.sigma_j.size());
  uint32_t dim = freqs > 0 ? static_cast<uint32_t>(cov.sigma_j[0].rows()) : 0;
  uint32_t reserved = 0;
  float alpha = static_cast<float>(cov.alpha);
  os.write(kCovMagic, 4);
  os.write(reinterpret_cast<const char *>(&freqs), 4);
  os.write(reinterpret_cast<const char *>(&dim), 4);
  os.write(reinterpret_cast<const char *>(&reserved), 4);
  os.write(reinterpret_cast<const char *>(&alpha), 4);
  for (uint32_t f = 0; f < freqs; ++f) {
    WriteMatrix(os, cov.sigma_j[f]);
    WriteMatrix(os, cov.sigma_n[f]);
  }
  if (!os) throw InputError("SaveCovDump: write failed for " + path);
}

CovariancePair LoadCovDump(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("LoadCovDump: cannot open " + path);
  char magic[4];
  uint32_t freqs = 0, dim = 0, reserved = 0;
  float alpha = 0.0f;
  in.read(magic, 4);
  in.read(reinterpret_cast<char *>(&freqs), 4);
  in.read(reinterpret_cast<char *>(&dim), 4);
  in.read(reinterpret_cast<char *>(&reserved), 4);
  in.read(reinterpret_cast<char *>(&alpha), 4);
  if (!in || std::memcmp(magic, kCovMagic, 4) != 0)
    throw InputError("LoadCovDump: bad header in " + path);
  CovariancePair cov;
  cov.alpha = alpha;
  cov.sigma_j.reserve(freqs);
  cov.sigma_n.reserve(freqs);
  for (uint32_t f = 0; f < freqs; ++f) {
    cov.sigma_j.push_back(ReadMatrix(in, dim));
    cov.sigma_n.push_back(ReadMatrix(in, dim));
  }
  if (!in) throw InputError("LoadCovDump: truncated file " + path);
  return cov;
}

}  // namespace locsep
