// src/ref.cc

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

#include "locsep/ref.h"

#include <cmath>

#include "locsep/fft.h"
#include "locsep/rir_detail.h"

namespace locsep {
namespace ref {

Spectrogram Stft(const TimeSignal &sig, const StftConfig &cfg) {
  if (cfg.window_len <= 0 || cfg.window_len % 2 != 0)
    throw ConfigError("ref::Stft: window_len must be positive and even");
  if (cfg.frame_shift <= 0 || cfg.window_len < cfg.frame_shift)
    throw ConfigError("ref::Stft: bad frame_shift");
  sig.Validate();
  if (sig.samples() == 0) throw InputError("ref::Stft: empty signal");

  const int W = cfg.window_len;
  const int S = cfg.frame_shift;
  const Eigen::Index pad = W - S;
  const Eigen::Index n_frames = StftFrameCount(sig.samples(), cfg);
  const int n_bins = W / 2 + 1;
  const Eigen::VectorXd win = SineWindow(W);
  const Eigen::Index L = sig.samples();

  Spectrogram spec;
  spec.sample_rate = sig.sample_rate;
  spec.window_len = W;
  spec.frame_shift = S;
  spec.ch.resize(sig.channels());

  RealFft fft(W);
  RealFft::Workspace ws(fft);
  for (int c = 0; c < sig.channels(); ++c) {
    spec.ch[c].resize(n_frames, n_bins);
    for (Eigen::Index t = 0; t < n_frames; ++t) {
      for (int k = 0; k < W; ++k) {
        Eigen::Index p = t * S + k - pad;
        ws.real()[k] = (p >= 0 && p < L) ? win[k] * sig.ch[c][p] : 0.0;
      }
      fft.Forward(ws);
      for (int b = 0; b < n_bins; ++b) spec.ch[c](t, b) = ws.cpx()[b];
    }
  }
  return spec;
}

TimeSignal Istft(const Spectrogram &spec) {
  spec.Validate();
  const int W = spec.window_len;
  const int S = spec.frame_shift;
  const Eigen::Index n_frames = spec.frames();
  const int n_bins = W / 2 + 1;
  const Eigen::Index pad = W - S;
  const Eigen::VectorXd win = SineWindow(W);

  TimeSignal out;
  out.sample_rate = spec.sample_rate;
  out.ch.resize(spec.channels());
  if (n_frames == 0) {
    for (auto &c : out.ch) c.resize(0);
    return out;
  }
  const Eigen::Index padded_len = (n_frames - 1) * S + W;
  const Eigen::Index out_len = (n_frames - 1) * S;

  RealFft fft(W);
  RealFft::Workspace ws(fft);
  for (int c = 0; c < spec.channels(); ++c) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(padded_len);
    Eigen::VectorXd norm = Eigen::VectorXd::Zero(padded_len);
    for (Eigen::Index t = 0; t < n_frames; ++t) {
      for (int b = 0; b < n_bins; ++b) ws.cpx()[b] = spec.ch[c](t, b);
      fft.Inverse(ws);
      for (int k = 0; k < W; ++k) {
        acc[t * S + k] += win[k] * ws.real()[k];
        norm[t * S + k] += win[k] * win[k];
      }
    }
    out.ch[c].resize(out_len);
    for (Eigen::Index p = 0; p < out_len; ++p) {
      double nrm = norm[p + pad];
      out.ch[c][p] = nrm > 1e-12 ? acc[p + pad] / nrm : 0.0;
    }
  }
  return out;
}

Rir SimulateRir(const RoomSpec &room, const Eigen::Vector3d &src,
                const std::vector<Eigen::Vector3d> &mics, const RirConfig &cfg) {
  const rir_detail::Plan plan = rir_detail::MakePlan(room, src, mics, cfg);
  Rir rir;
  rir.sample_rate = cfg.sample_rate;
  rir.taps.assign(mics.size(), Eigen::VectorXd::Zero(plan.len));
  for (size_t mi = 0; mi < mics.size(); ++mi)
    for (int mx = -plan.n_img[0]; mx <= plan.n_img[0]; ++mx)
      rir_detail::AccumulateImagesX(room, src, mics[mi], cfg, plan, mx,
                                    rir.taps[mi]);
  return rir;
}

Eigen::VectorXd ConvolveDirect(const Eigen::VectorXd &x,
                               const Eigen::VectorXd &h) {
  if (x.size() == 0 || h.size() == 0) return Eigen::VectorXd();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size() + h.size() - 1);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    for (Eigen::Index j = 0; j < h.size(); ++j) out[i + j] += x[i] * h[j];
  return out;
}

Eigen::VectorXcd PhatCrossSpectrum(const Eigen::VectorXd &x1,
                                   const Eigen::VectorXd &x2,
                                   double sample_rate, const StftConfig &cfg) {
  if (x1.size() != x2.size())
    throw ConfigError("ref::PhatCrossSpectrum: inputs differ in length");
  if (x1.squaredNorm() == 0.0 || x2.squaredNorm() == 0.0)
    throw InputError("ref::PhatCrossSpectrum: all-zero input");
  TimeSignal s1, s2;
  s1.sample_rate = s2.sample_rate = sample_rate;
  s1.ch.push_back(x1);
  s2.ch.push_back(x2);
  Spectrogram f1 = ref::Stft(s1, cfg);
  Spectrogram f2 = ref::Stft(s2, cfg);
  const Eigen::Index n_frames = f1.frames();
  const int n_bins = static_cast<int>(f1.bins());
  Eigen::VectorXcd cross(n_bins);
  for (int b = 0; b < n_bins; ++b) {
    std::complex<double> acc(0.0, 0.0);
    for (Eigen::Index t = 0; t < n_frames; ++t) {
      std::complex<double> g = std::conj(f1.ch[0](t, b)) * f2.ch[0](t, b);
      acc += g / std::max(std::abs(g), 1e-12);
    }
    cross[b] = acc / static_cast<double>(n_frames);
  }
  return cross;
}

CovariancePair BatchCov(const Mask &mask, const Spectrogram &spec) {
  spec.Validate();
  if (mask.frames() != spec.frames() || mask.bins() != spec.bins())
    throw ConfigError("ref::BatchCov: mask shape does not match");
  const int n_ch = spec.channels();
  const int n_bins = static_cast<int>(spec.bins());
  const Eigen::Index n_frames = spec.frames();

  CovariancePair cov;
  cov.alpha = 0.0;
  cov.sigma_j.assign(n_bins, Eigen::MatrixXcd());
  cov.sigma_n.assign(n_bins, Eigen::MatrixXcd());
  Eigen::VectorXcd x(n_ch);
  for (int b = 0; b < n_bins; ++b) {
    Eigen::MatrixXcd acc_j = Eigen::MatrixXcd::Zero(n_ch, n_ch);
    Eigen::MatrixXcd acc_n = Eigen::MatrixXcd::Zero(n_ch, n_ch);
    Eigen::MatrixXcd acc_all = Eigen::MatrixXcd::Zero(n_ch, n_ch);
    double w_j = 0.0, w_n = 0.0;
    for (Eigen::Index t = 0; t < n_frames; ++t) {
      for (int c = 0; c < n_ch; ++c) x[c] = spec.ch[c](t, b);
      Eigen::MatrixXcd outer = x * x.adjoint();
      double m = mask.values(t, b);
      acc_j += m * outer;
      acc_n += (1.0 - m) * outer;
      acc_all += outer;
      w_j += m;
      w_n += 1.0 - m;
    }
    double mean_pow =
        n_frames > 0 ? acc_all.real().trace() / (n_frames * n_ch) : 0.0;
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

}  // namespace ref
}  // namespace locsep
