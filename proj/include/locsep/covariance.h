// include/locsep/covariance.h

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

#ifndef LOCSEP_COVARIANCE_H_
#define LOCSEP_COVARIANCE_H_

#include <string>
#include <vector>

#include "locsep/separation.h"
#include "locsep/signal.h"

namespace locsep {

// Per-frequency source and noise covariance estimates (Hermitian, PSD up to
// rounding) plus the forgetting factor that produced them (0 for batch).
struct CovariancePair {
  std::vector<Eigen::MatrixXcd> sigma_j;
  std::vector<Eigen::MatrixXcd> sigma_n;
  double alpha = 0.0;

  int num_freqs() const { return static_cast<int>(sigma_j.size()); }
};

// One step of the mask-weighted recursive estimate,
// alpha * prev + (1 - alpha) * mask * x x^H. mask outside [0,1] or alpha
// outside [0,1] is a ConfigError.
Eigen::MatrixXcd UpdateSourceCov(const Eigen::MatrixXcd &prev, double mask_val,
                                 const Eigen::VectorXcd &x, double alpha);

// Complement: alpha * prev + (1 - alpha) * (1 - mask) * x x^H.
Eigen::MatrixXcd UpdateNoiseCov(const Eigen::MatrixXcd &prev, double mask_val,
                                const Eigen::VectorXcd &x, double alpha);

// Time-uniform alternative: sigma_j(f) = sum_t M x x^H / sum_t M and the
// (1-M) analog. A mask-mass denominator under 1e-8 falls back to a scaled
// identity (1e-6 * mean power per channel).
CovariancePair BatchCov(const Mask &mask, const Spectrogram &spec);

// Full recursion over all frames from epsilon * I, returning the final
// matrices; the streaming path used when weights are recomputed per frame.
CovariancePair RecursiveCovFinal(const Mask &mask, const Spectrogram &spec,
                                 double alpha, double epsilon_init = 1e-6);

// Debug dump of a covariance pair: header (magic "COVZ", u32 freqs, u32 dim,
// u32 reserved), float32 alpha, then per frequency sigma_j then sigma_n as
// row-major float32 (re, im) pairs.
void SaveCovDump(const std::string &path, const CovariancePair &cov);
CovariancePair LoadCovDump(const std::string &path);

}  // namespace locsep

#endif  // LOCSEP_COVARIANCE_H_
