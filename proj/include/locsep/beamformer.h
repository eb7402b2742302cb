// include/locsep/beamformer.h

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

#ifndef LOCSEP_BEAMFORMER_H_
#define LOCSEP_BEAMFORMER_H_

#include <string>
#include <vector>

#include "locsep/covariance.h"
#include "locsep/signal.h"

namespace locsep {

enum class BfKind { kGev, kSdwMwf, kR1Mwf };

std::string BfKindName(BfKind kind);
BfKind ParseBfKind(const std::string &name);

struct BeamformerWeights {
  BfKind kind = BfKind::kR1Mwf;
  double mu = 1.0;  // tradeoff, MWF kinds only
  std::vector<Eigen::VectorXcd> w;  // one per frequency
};

// Max-SNR weights: the principal generalized eigenvector of (sigma_j,
// sigma_n), solved by Cholesky whitening of a diagonally loaded sigma_n.
// Unit norm, phase rotated so the reference entry is real non-negative; the
// per-frequency gain stays arbitrary (no postfilter).
Eigen::VectorXcd GevWeights(const Eigen::MatrixXcd &sigma_j,
                            const Eigen::MatrixXcd &sigma_n, int ref = 0);

// Speech-distortion-weighted MWF: (sigma_j + mu sigma_n)^{-1} sigma_j u_ref.
Eigen::VectorXcd SdwMwfWeights(const Eigen::MatrixXcd &sigma_j,
                               const Eigen::MatrixXcd &sigma_n, double mu = 1.0,
                               int ref = 0);

// Rank-1 MWF: the source covariance is replaced by sigma_s h h^H where h is
// the principal generalized eigenvector mapped back through sigma_n and
// sigma_s = tr(sigma_j)/|h|^2; then w = sigma_n^{-1} Sigma_R1 u_ref /
// (mu + lambda) with lambda = tr(sigma_n^{-1} Sigma_R1). lambda_out, when
// given, receives lambda.
Eigen::VectorXcd R1MwfWeights(const Eigen::MatrixXcd &sigma_j,
                              const Eigen::MatrixXcd &sigma_n, double mu = 1.0,
                              int ref = 0, double *lambda_out = nullptr);

// Weights at every frequency of a covariance pair.
BeamformerWeights ComputeWeights(const CovariancePair &cov, BfKind kind,
                                 double mu = 1.0, int ref = 0);

// Per-bin inner product w^H x. Weight count must match the spectrogram bins.
Spectrogram ApplyBeamformer(const BeamformerWeights &weights,
                            const Spectrogram &spec);

}  // namespace locsep

#endif  // LOCSEP_BEAMFORMER_H_
