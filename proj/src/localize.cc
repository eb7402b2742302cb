// src/localize.cc

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

#include "locsep/localize.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace locsep {

double LagScores::ArgmaxLag() const {
  Eigen::Index best = 0;
  scores.maxCoeff(&best);
  return lags_s[best];
}

namespace {

// Score of the averaged cross spectrum at an arbitrary continuous lag:
// sum over bins of Re(G_b e^{2j pi nu_b tau}), interior bins doubled as in a
// full-spectrum inverse transform of a conjugate-symmetric sequence.
double DtftScore(const Eigen::VectorXcd &cross, double sample_rate,
                 int window_len, double tau) {
  const int n_bins = static_cast<int>(cross.size());
  double acc = 0.0;
  for (int b = 0; b < n_bins; ++b) {
    double nu = static_cast<double>(b) * sample_rate / window_len;
    double ph = 2.0 * kPi * nu * tau;
    double w = (b == 0 || b == n_bins - 1) ? 1.0 : 2.0;
    acc += w * (cross[b].real() * std::cos(ph) - cross[b].imag() * std::sin(ph));
  }
  return acc / window_len;
}

TimeSignal MonoSignal(const Eigen::VectorXd &x, double sample_rate) {
  TimeSignal s;
  s.sample_rate = sample_rate;
  s.ch.push_back(x);
  return s;
}

}  // namespace

Eigen::VectorXcd PhatCrossSpectrum(const Eigen::VectorXd &x1,
                                   const Eigen::VectorXd &x2,
                                   double sample_rate, const StftConfig &cfg) {
  if (x1.size() != x2.size())
    throw ConfigError("PhatCrossSpectrum: inputs differ in length");
  if (x1.squaredNorm() == 0.0 || x2.squaredNorm() == 0.0)
    throw InputError("PhatCrossSpectrum: all-zero input, PHAT undefined");

  Spectrogram s1 = Stft(MonoSignal(x1, sample_rate), cfg);
  Spectrogram s2 = Stft(MonoSignal(x2, sample_rate), cfg);
  const Eigen::Index n_frames = s1.frames();
  const int n_bins = static_cast<int>(s1.bins());

  Eigen::VectorXcd cross(n_bins);
#pragma omp parallel for
  for (int b = 0; b < n_bins; ++b) {
    std::complex<double> acc(0.0, 0.0);
    for (Eigen::Index t = 0; t < n_frames; ++t) {
      std::complex<double> g = std::conj(s1.ch[0](t, b)) * s2.ch[0](t, b);
      acc += g / std::max(std::abs(g), 1e-12);
    }
    cross[b] = acc / static_cast<double>(n_frames);
  }
  return cross;
}

LagScores GccPhat(const Eigen::VectorXd &x1, const Eigen::VectorXd &x2,
                  double sample_rate, double max_lag_s, const StftConfig &cfg,
                  int steps_per_sample) {
  if (max_lag_s <= 0.0) throw ConfigError("GccPhat: max_lag must be > 0");
  if (steps_per_sample < 1)
    throw ConfigError("GccPhat: steps_per_sample must be >= 1");
  Eigen::VectorXcd cross = PhatCrossSpectrum(x1, x2, sample_rate, cfg);

  const double step = 1.0 / (sample_rate * steps_per_sample);
  const Eigen::Index half =
      static_cast<Eigen::Index>(std::floor(max_lag_s / step + 1e-9));
  LagScores out;
  out.lags_s.resize(2 * half + 1);
  out.scores.resize(2 * half + 1);
#pragma omp parallel for
  for (Eigen::Index k = 0; k < 2 * half + 1; ++k) {
    double tau = static_cast<double>(k - half) * step;
    out.lags_s[k] = tau;
    out.scores[k] = DtftScore(cross, sample_rate, cfg.window_len, tau);
  }
  return out;
}

AngularSpectrum ComputeAngularSpectrum(const TimeSignal &mixture,
                                       const ArrayGeometry &geom,
                                       std::pair<int, int> pair,
                                       const StftConfig &cfg,
                                       double grid_step_deg,
                                       double speed_of_sound) {
  mixture.Validate();
  if (pair.first == pair.second)
    throw ConfigError("ComputeAngularSpectrum: need two distinct channels");
  if (pair.first < 0 || pair.first >= mixture.channels() || pair.second < 0 ||
      pair.second >= mixture.channels())
    throw ConfigError("ComputeAngularSpectrum: pair channel out of range");
  if (grid_step_deg <= 0.0)
    throw ConfigError("ComputeAngularSpectrum: grid step must be > 0");

  Eigen::VectorXcd cross =
      PhatCrossSpectrum(mixture.ch[pair.first], mixture.ch[pair.second],
                        mixture.sample_rate, cfg);
  // Signed axial separation: the lag the geometry predicts for azimuth theta
  // is dq * cos(theta) / c, matching Tdoa(pair.first, pair.second, theta).
  double dq = geom.axial_coord(pair.second) - geom.axial_coord(pair.first);
  if (std::abs(dq) < 1e-9)
    throw ConfigError("ComputeAngularSpectrum: pair has no axial separation");

  const Eigen::Index n_grid =
      static_cast<Eigen::Index>(std::floor(180.0 / grid_step_deg + 1e-9)) + 1;
  AngularSpectrum spec;
  spec.grid_deg.resize(n_grid);
  spec.scores.resize(n_grid);
#pragma omp parallel for
  for (Eigen::Index i = 0; i < n_grid; ++i) {
    double theta = std::min(180.0, i * grid_step_deg);
    double tau = dq * std::cos(theta * kPi / 180.0) / speed_of_sound;
    spec.grid_deg[i] = theta;
    spec.scores[i] = DtftScore(cross, mixture.sample_rate, cfg.window_len, tau);
  }
  return spec;
}

PeakList TopKPeaks(const AngularSpectrum &spec, int k,
                   double min_separation_deg) {
  if (k < 1) throw ConfigError("TopKPeaks: k must be >= 1");
  const Eigen::Index n = spec.scores.size();
  if (n != spec.grid_deg.size() || n == 0)
    throw ConfigError("TopKPeaks: malformed angular spectrum");

  std::vector<Eigen::Index> cand;
  for (Eigen::Index i = 0; i < n; ++i) {
    bool left = i == 0 || spec.scores[i] > spec.scores[i - 1];
    bool right = i == n - 1 || spec.scores[i] > spec.scores[i + 1];
    if (n == 1 || (left && right)) cand.push_back(i);
  }
  std::sort(cand.begin(), cand.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (spec.scores[a] != spec.scores[b]) return spec.scores[a] > spec.scores[b];
    return spec.grid_deg[a] < spec.grid_deg[b];
  });

  PeakList out;
  for (Eigen::Index i : cand) {
    if (static_cast<int>(out.doas_deg.size()) >= k) break;
    bool clear = true;
    for (double accepted : out.doas_deg)
      if (std::abs(accepted - spec.grid_deg[i]) < min_separation_deg) {
        clear = false;
        break;
      }
    if (!clear) continue;
    out.doas_deg.push_back(spec.grid_deg[i]);
    out.scores.push_back(spec.scores[i]);
  }
  out.short_of_k = static_cast<int>(out.doas_deg.size()) < k;
  return out;
}

double OracleSelect(const PeakList &peaks, double true_doa_deg) {
  if (peaks.doas_deg.empty()) throw InputError("OracleSelect: no peaks");
  // Peaks arrive in descending score order, so on a distance tie the
  // higher-scoring peak is kept.
  double best = peaks.doas_deg[0];
  double best_dist = std::abs(best - true_doa_deg);
  for (size_t i = 1; i < peaks.doas_deg.size(); ++i) {
    double d = std::abs(peaks.doas_deg[i] - true_doa_deg);
    if (d < best_dist - 1e-12) {
      best = peaks.doas_deg[i];
      best_dist = d;
    }
  }
  return best;
}

}  // namespace locsep
