// include/locsep/localize.h

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

#ifndef LOCSEP_LOCALIZE_H_
#define LOCSEP_LOCALIZE_H_

#include <utility>
#include <vector>

#include "locsep/geometry.h"
#include "locsep/signal.h"

namespace locsep {

struct LagScores {
  Eigen::VectorXd lags_s;  // strictly increasing
  Eigen::VectorXd scores;

  double ArgmaxLag() const;
};

struct AngularSpectrum {
  Eigen::VectorXd grid_deg;  // strictly increasing
  Eigen::VectorXd scores;
};

struct PeakList {
  std::vector<double> doas_deg;  // descending score order
  std::vector<double> scores;
  bool short_of_k = false;  // fewer local maxima than requested
};

// PHAT-weighted cross spectrum conj(X1(f)) * X2(f) / |X1 X2*|, averaged over
// STFT frames. A positive-lag peak of its inverse transform means x2 lags
// x1. Bins with cross power under 1e-12 contribute zero.
Eigen::VectorXcd PhatCrossSpectrum(const Eigen::VectorXd &x1,
                                   const Eigen::VectorXd &x2,
                                   double sample_rate,
                                   const StftConfig &cfg = {});

// Generalized cross-correlation with PHAT weighting, evaluated on a dense
// lag grid (steps_per_sample points per sample period) over [-max_lag_s,
// max_lag_s]. Throws InputError on all-zero input.
LagScores GccPhat(const Eigen::VectorXd &x1, const Eigen::VectorXd &x2,
                  double sample_rate, double max_lag_s,
                  const StftConfig &cfg = {}, int steps_per_sample = 8);

// GCC-PHAT score of the channel pair remapped to a DOA grid: the score at
// azimuth theta is the cross-correlation evaluated exactly at the pair lag
// the geometry predicts for theta.
AngularSpectrum ComputeAngularSpectrum(const TimeSignal &mixture,
                                       const ArrayGeometry &geom,
                                       std::pair<int, int> pair,
                                       const StftConfig &cfg = {},
                                       double grid_step_deg = 1.0,
                                       double speed_of_sound = kSpeedOfSound);

// Local maxima by descending score with a minimum separation; endpoints
// count. Returns what exists (flagged) when fewer than k peaks are found.
PeakList TopKPeaks(const AngularSpectrum &spec, int k = 2,
                   double min_separation_deg = 5.0);

// The peak closest to the true DOA; ties go to the higher-scoring peak.
double OracleSelect(const PeakList &peaks, double true_doa_deg);

}  // namespace locsep

#endif  // LOCSEP_LOCALIZE_H_
