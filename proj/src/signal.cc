// src/signal.cc

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

#include "locsep/signal.h"

#include <cmath>

#include "locsep/common.h"
#include "locsep/fft.h"

namespace locsep {

void TimeSignal::Validate() const {
  if (sample_rate <= 0.0) throw ConfigError("TimeSignal: sample_rate must be > 0");
  if (ch.empty()) throw InputError("TimeSignal: no channels");
  for (const auto &c : ch)
    if (c.size() != ch[0].size())
      throw InputError("TimeSignal: channels differ in length");
}

void Spectrogram::Validate() const {
  if (window_len <= 0 || window_len % 2 != 0)
    throw ConfigError("Spectrogram: window_len must be positive and even");
  if (frame_shift <= 0 || frame_shift > window_len)
    throw ConfigError("Spectrogram: frame_shift must be in (0, window_len]");
  if (ch.empty()) throw InputError("Spectrogram: no channels");
  for (const auto &c : ch) {
    if (c.rows() != ch[0].rows() || c.cols() != ch[0].cols())
      throw InputError("Spectrogram: channels differ in shape");
    if (c.cols() != window_len / 2 + 1)
      throw ConfigError("Spectrogram: bins != window_len/2 + 1");
  }
}

Eigen::VectorXd SineWindow(int len) {
  Eigen::VectorXd w(len);
  for (int k = 0; k < len; ++k)
    w[k] = std::sin(kPi * (k + 0.5) / len);
  return w;
}

Eigen::Index StftFrameCount(Eigen::Index n_samples, const StftConfig &cfg) {
  Eigen::Index pad = cfg.window_len - cfg.frame_shift;
  return (n_samples + pad + cfg.frame_shift - 1) / cfg.frame_shift;
}

namespace {

void CheckStftConfig(const StftConfig &cfg) {
  if (cfg.window_len <= 0 || cfg.window_len % 2 != 0)
    throw ConfigError("Stft: window_len must be positive and even");
  if (cfg.frame_shift <= 0)
    throw ConfigError("Stft: frame_shift must be > 0");
  if (cfg.window_len < cfg.frame_shift)
    throw ConfigError("Stft: window_len < frame_shift");
}

}  // namespace

Spectrogram Stft(const TimeSignal &sig, const StftConfig &cfg) {
  CheckStftConfig(cfg);
  sig.Validate();
  if (sig.samples() == 0) throw InputError("Stft: empty signal");

  const int W = cfg.window_len;
  const int S = cfg.frame_shift;
  const Eigen::Index pad = W - S;
  const Eigen::Index n_frames = StftFrameCount(sig.samples(), cfg);
  const int n_bins = W / 2 + 1;
  const Eigen::VectorXd win = SineWindow(W);

  Spectrogram spec;
  spec.sample_rate = sig.sample_rate;
  spec.window_len = W;
  spec.frame_shift = S;
  spec.ch.resize(sig.channels());
  for (auto &m : spec.ch) m.resize(n_frames, n_bins);

  RealFft fft(W);
  const Eigen::Index L = sig.samples();

#pragma omp parallel
  {
    RealFft::Workspace ws(fft);
#pragma omp for collapse(2)
    for (int c = 0; c < sig.channels(); ++c) {
      for (Eigen::Index t = 0; t < n_frames; ++t) {
        const double *x = sig.ch[c].data();
        for (int k = 0; k < W; ++k) {
          Eigen::Index p = t * S + k - pad;  // position in the unpadded signal
          ws.real()[k] = (p >= 0 && p < L) ? win[k] * x[p] : 0.0;
        }
        fft.Forward(ws);
        for (int b = 0; b < n_bins; ++b) spec.ch[c](t, b) = ws.cpx()[b];
      }
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

  // Frames within a pass are at least ceil(W/S) shifts apart so their
  // overlap-add regions are disjoint; each output sample receives its
  // contributions in the same (commutative, at most pairwise for W = 2S)
  // order as a serial loop.
  const int stride = static_cast<int>((W + S - 1) / S);

  for (int c = 0; c < spec.channels(); ++c) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(padded_len);
    Eigen::VectorXd norm = Eigen::VectorXd::Zero(padded_len);
    for (int pass = 0; pass < stride; ++pass) {
#pragma omp parallel
      {
        RealFft::Workspace ws(fft);
#pragma omp for
        for (Eigen::Index t = pass; t < n_frames; t += stride) {
          for (int b = 0; b < n_bins; ++b) ws.cpx()[b] = spec.ch[c](t, b);
          fft.Inverse(ws);
          double *a = acc.data() + t * S;
          double *nz = norm.data() + t * S;
          for (int k = 0; k < W; ++k) {
            a[k] += win[k] * ws.real()[k];
            nz[k] += win[k] * win[k];
          }
        }
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

}  // namespace locsep
