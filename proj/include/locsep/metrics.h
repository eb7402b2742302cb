// include/locsep/metrics.h

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

#ifndef LOCSEP_METRICS_H_
#define LOCSEP_METRICS_H_

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace locsep {

// Scale-invariant SDR in dB, capped at +-100. The reference is projected
// out of the estimate, so any positive rescaling of est leaves the score
// unchanged. Zero reference is an InputError.
double SiSdr(const Eigen::VectorXd &est, const Eigen::VectorXd &ref);

// |true - est| on the linear-array domain [0, 180].
double DoaError(double true_deg, double est_deg);

struct EvalRecord {
  std::string scene_id;
  int source_id = 0;
  double si_sdr_in = 0.0;   // mixture at the reference channel vs the image
  double si_sdr_out = 0.0;  // beamformer output vs the image
  double doa_true = 0.0;
  double doa_est = 0.0;
  double delta_doa = 0.0;  // angular separation of the two speakers
  double sir_db = 0.0;     // this source against the other speaker
  double snr_db = 0.0;
  std::string bf_kind;
  std::string mask_kind;

  double improvement() const { return si_sdr_out - si_sdr_in; }
};

std::string EvalRecordToJson(const EvalRecord &rec);
EvalRecord EvalRecordFromJson(const std::string &line);

// One aggregation cell: records falling in a (bucket, beamformer) pair.
struct BucketCell {
  long count = 0;
  double mean_improvement = 0.0;
  double median_improvement = 0.0;
  double mean_si_sdr_out = 0.0;
};

struct BucketReport {
  // Bucket edges are left-closed/right-open; the first ΔDOA bucket is
  // (-inf, 10) and the last [50, inf), mirroring <10 / 10-25 / 25-50 / >50.
  std::vector<std::string> doa_bucket_names;
  std::vector<std::string> sir_bin_names;
  std::vector<std::string> bf_kinds;  // row per beamformer seen
  // indexed [bf][bucket]
  std::vector<std::vector<BucketCell>> by_delta_doa;
  std::vector<std::vector<BucketCell>> by_sir;
  std::vector<BucketCell> overall;  // per bf
};

BucketReport MakeBucketReport(const std::vector<EvalRecord> &records);

// Aligned text table; empty buckets render as an em dash.
std::string RenderTextReport(const BucketReport &report);
// Machine-readable: one row per (bf, axis, bucket).
std::string RenderCsvReport(const BucketReport &report);

}  // namespace locsep

#endif  // LOCSEP_METRICS_H_
