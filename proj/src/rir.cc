// src/rir.cc

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

#include "locsep/rir.h"

#include <cmath>

#include "locsep/fft.h"
#include "locsep/rir_detail.h"

namespace locsep {

namespace rir_detail {

double ReflectionCoefficient(const Eigen::Vector3d &dims, double rt60,
                             double speed_of_sound) {
  double V = dims.x() * dims.y() * dims.z();
  double S = 2.0 * (dims.x() * dims.y() + dims.x() * dims.z() +
                    dims.y() * dims.z());
  double alfa = 24.0 * std::log(10.0) * V / (speed_of_sound * S * rt60);
  if (alfa > 1.0)
    throw ConfigError("SimulateRir: rt60 too short to realize in this room");
  return std::sqrt(1.0 - alfa);
}

Plan MakePlan(const RoomSpec &room, const Eigen::Vector3d &src,
              const std::vector<Eigen::Vector3d> &mics, const RirConfig &cfg) {
  if (mics.empty()) throw ConfigError("SimulateRir: no microphones");
  auto inside = [&room](const Eigen::Vector3d &p) {
    for (int d = 0; d < 3; ++d)
      if (!(p[d] > 0.0 && p[d] < room.dims[d])) return false;
    return true;
  };
  if (!inside(src)) throw ConfigError("SimulateRir: source outside the room");
  double max_dist = 0.0;
  for (const auto &m : mics) {
    if (!inside(m)) throw ConfigError("SimulateRir: microphone outside the room");
    double d = (m - src).norm();
    if (d < 1e-6)
      throw InputError("SimulateRir: degenerate distance, source coincides with a mic");
    max_dist = std::max(max_dist, d);
  }

  Plan plan;
  plan.anechoic = cfg.anechoic || room.rt60 <= 0.0;
  plan.beta = plan.anechoic ? 0.0
                            : ReflectionCoefficient(room.dims, room.rt60,
                                                    cfg.speed_of_sound);
  plan.half_width = cfg.frac_delay
                        ? static_cast<int>(std::lround(0.004 * cfg.sample_rate))
                        : 0;
  double tail = plan.anechoic ? 0.0 : room.rt60;
  tail += cfg.extra_tail_s;
  plan.len = static_cast<Eigen::Index>(
      std::ceil((tail + max_dist / cfg.speed_of_sound) * cfg.sample_rate)) +
      2 * plan.half_width + 2;
  double reach_m = (static_cast<double>(plan.len) / cfg.sample_rate) *
                   cfg.speed_of_sound;
  for (int d = 0; d < 3; ++d) {
    plan.n_img[d] = plan.anechoic
                        ? 0
                        : static_cast<int>(std::ceil(reach_m / (2.0 * room.dims[d])));
  }
  return plan;
}

// Contribution of every image with the given x-order to one channel, taps
// accumulated in a fixed loop order. Shared by the parallel kernel and the
// serial reference so their outputs agree bit for bit.
void AccumulateImagesX(const RoomSpec &room, const Eigen::Vector3d &src,
                       const Eigen::Vector3d &mic, const RirConfig &cfg,
                       const Plan &plan, int mx, Eigen::VectorXd &taps) {
  const double fs = cfg.sample_rate;
  const double c = cfg.speed_of_sound;
  const Eigen::Index len = plan.len;
  const int half = plan.half_width;
  const int tw = 2 * half + 1;

  for (int my = -plan.n_img[1]; my <= plan.n_img[1]; ++my) {
    for (int mz = -plan.n_img[2]; mz <= plan.n_img[2]; ++mz) {
      for (int px = 0; px <= 1; ++px) {
        for (int py = 0; py <= 1; ++py) {
          for (int pz = 0; pz <= 1; ++pz) {
            int m[3] = {mx, my, mz};
            int p[3] = {px, py, pz};
            int order = 0;
            double off[3];
            for (int d = 0; d < 3; ++d) {
              off[d] = (1 - 2 * p[d]) * src[d] - mic[d] +
                       2.0 * m[d] * room.dims[d];
              order += std::abs(m[d] - p[d]) + std::abs(m[d]);
            }
            if (cfg.max_order >= 0 && order > cfg.max_order) continue;
            double refl = order == 0 ? 1.0 : std::pow(plan.beta, order);
            if (refl == 0.0) continue;
            double dist = std::sqrt(off[0] * off[0] + off[1] * off[1] +
                                    off[2] * off[2]);
            double delay = dist / c * fs;
            double amp = refl / (4.0 * kPi * dist);
            if (plan.half_width == 0) {
              Eigen::Index idx = static_cast<Eigen::Index>(std::lround(delay));
              if (idx >= 0 && idx < len) taps[idx] += amp;
            } else {
              Eigen::Index first =
                  static_cast<Eigen::Index>(std::ceil(delay)) - half;
              for (Eigen::Index k = first; k < first + tw; ++k) {
                if (k < 0 || k >= len) continue;
                double u = static_cast<double>(k) - delay;
                if (std::abs(u) > half) continue;
                double win = 0.5 * (1.0 + std::cos(2.0 * kPi * u / tw));
                double sinc = u == 0.0 ? 1.0 : std::sin(kPi * u) / (kPi * u);
                taps[k] += amp * win * sinc;
              }
            }
          }
        }
      }
    }
  }
}

}  // namespace rir_detail

Rir SimulateRir(const RoomSpec &room, const Eigen::Vector3d &src,
                const std::vector<Eigen::Vector3d> &mics, const RirConfig &cfg) {
  using rir_detail::AccumulateImagesX;
  const rir_detail::Plan plan = rir_detail::MakePlan(room, src, mics, cfg);

  Rir rir;
  rir.sample_rate = cfg.sample_rate;
  rir.taps.assign(mics.size(), Eigen::VectorXd::Zero(plan.len));

  const int nx = plan.n_img[0];
  const int n_chunks = 2 * nx + 1;
  for (size_t mi = 0; mi < mics.size(); ++mi) {
    // One partial response per x-order so the scatter-adds race-free; the
    // ordered merge keeps the summation order identical to the serial loop.
    std::vector<Eigen::VectorXd> partials(n_chunks);
#pragma omp parallel for schedule(dynamic)
    for (int chunk = 0; chunk < n_chunks; ++chunk) {
      partials[chunk] = Eigen::VectorXd::Zero(plan.len);
      AccumulateImagesX(room, src, mics[mi], cfg, plan, chunk - nx,
                        partials[chunk]);
    }
    for (int chunk = 0; chunk < n_chunks; ++chunk)
      rir.taps[mi] += partials[chunk];
  }
  return rir;
}

Eigen::VectorXd Convolve(const Eigen::VectorXd &x, const Eigen::VectorXd &h) {
  if (x.size() == 0 || h.size() == 0) return Eigen::VectorXd();
  const Eigen::Index out_len = x.size() + h.size() - 1;
  if (out_len < 16) {  // direct form for trivial sizes
    Eigen::VectorXd out = Eigen::VectorXd::Zero(out_len);
    for (Eigen::Index i = 0; i < x.size(); ++i)
      for (Eigen::Index j = 0; j < h.size(); ++j) out[i + j] += x[i] * h[j];
    return out;
  }
  Eigen::Index n = 1;
  while (n < out_len) n <<= 1;

  RealFft fft(static_cast<int>(n));
  RealFft::Workspace wx(fft), wh(fft);
  for (Eigen::Index i = 0; i < n; ++i) {
    wx.real()[i] = i < x.size() ? x[i] : 0.0;
    wh.real()[i] = i < h.size() ? h[i] : 0.0;
  }
  fft.Forward(wx);
  fft.Forward(wh);
  for (int b = 0; b < fft.bins(); ++b) wx.cpx()[b] *= wh.cpx()[b];
  fft.Inverse(wx);
  Eigen::VectorXd out(out_len);
  for (Eigen::Index i = 0; i < out_len; ++i) out[i] = wx.real()[i];
  return out;
}

}  // namespace locsep
