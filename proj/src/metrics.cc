// src/metrics.cc

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

#include "locsep/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "locsep/common.h"

namespace locsep {

double SiSdr(const Eigen::VectorXd &est, const Eigen::VectorXd &ref) {
  if (est.size() != ref.size())
    throw ConfigError("SiSdr: estimate and reference differ in length");
  double ref_pow = ref.squaredNorm();
  if (ref_pow == 0.0) throw InputError("SiSdr: zero reference");
  double alpha = est.dot(ref) / ref_pow;
  double num = alpha * alpha * ref_pow;
  double den = (est - alpha * ref).squaredNorm();
  if (den == 0.0) return 100.0;
  if (num == 0.0) return -100.0;
  double db = 10.0 * std::log10(num / den);
  return std::clamp(db, -100.0, 100.0);
}

double DoaError(double true_deg, double est_deg) {
  return std::abs(true_deg - est_deg);
}

std::string EvalRecordToJson(const EvalRecord &rec) {
  nlohmann::json j;
  j["scene_id"] = rec.scene_id;
  j["source_id"] = rec.source_id;
  j["si_sdr_in"] = rec.si_sdr_in;
  j["si_sdr_out"] = rec.si_sdr_out;
  j["doa_true"] = rec.doa_true;
  j["doa_est"] = rec.doa_est;
  j["delta_doa"] = rec.delta_doa;
  j["sir_db"] = rec.sir_db;
  j["snr_db"] = rec.snr_db;
  j["bf_kind"] = rec.bf_kind;
  j["mask_kind"] = rec.mask_kind;
  return j.dump();
}

EvalRecord EvalRecordFromJson(const std::string &line) {
  nlohmann::json j = nlohmann::json::parse(line);
  EvalRecord rec;
  rec.scene_id = j.at("scene_id").get<std::string>();
  rec.source_id = j.at("source_id").get<int>();
  rec.si_sdr_in = j.at("si_sdr_in").get<double>();
  rec.si_sdr_out = j.at("si_sdr_out").get<double>();
  rec.doa_true = j.at("doa_true").get<double>();
  rec.doa_est = j.at("doa_est").get<double>();
  rec.delta_doa = j.at("delta_doa").get<double>();
  rec.sir_db = j.at("sir_db").get<double>();
  rec.snr_db = j.at("snr_db").get<double>();
  rec.bf_kind = j.at("bf_kind").get<std::string>();
  rec.mask_kind = j.at("mask_kind").get<std::string>();
  return rec;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Left-closed/right-open buckets.
const double kDoaEdges[] = {-kInf, 10.0, 25.0, 50.0, kInf};
const double kSirEdges[] = {-kInf, -5.0, 0.0, 5.0, 10.0, kInf};

int BucketIndex(double v, const double *edges, int n_buckets) {
  for (int i = 0; i < n_buckets; ++i)
    if (v >= edges[i] && v < edges[i + 1]) return i;
  return n_buckets - 1;
}

BucketCell Summarize(std::vector<double> improvements,
                     const std::vector<double> &outs) {
  BucketCell cell;
  cell.count = static_cast<long>(improvements.size());
  if (improvements.empty()) return cell;
  double sum = 0.0;
  for (double v : improvements) sum += v;
  cell.mean_improvement = sum / cell.count;
  std::sort(improvements.begin(), improvements.end());
  size_t mid = improvements.size() / 2;
  cell.median_improvement =
      improvements.size() % 2 == 1
          ? improvements[mid]
          : 0.5 * (improvements[mid - 1] + improvements[mid]);
  double sum_out = 0.0;
  for (double v : outs) sum_out += v;
  cell.mean_si_sdr_out = sum_out / cell.count;
  return cell;
}

std::string FormatCell(const BucketCell &cell) {
  if (cell.count == 0) return "—";  // em dash, never a fake zero
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", cell.mean_improvement);
  return buf;
}

}  // namespace

BucketReport MakeBucketReport(const std::vector<EvalRecord> &records) {
  BucketReport rep;
  rep.doa_bucket_names = {"<10", "[10,25)", "[25,50)", ">=50"};
  rep.sir_bin_names = {"<-5", "[-5,0)", "[0,5)", "[5,10)", ">=10"};

  for (const auto &r : records)
    if (std::find(rep.bf_kinds.begin(), rep.bf_kinds.end(), r.bf_kind) ==
        rep.bf_kinds.end())
      rep.bf_kinds.push_back(r.bf_kind);
  std::sort(rep.bf_kinds.begin(), rep.bf_kinds.end());

  const int n_bf = static_cast<int>(rep.bf_kinds.size());
  const int n_doa = static_cast<int>(rep.doa_bucket_names.size());
  const int n_sir = static_cast<int>(rep.sir_bin_names.size());

  for (int k = 0; k < n_bf; ++k) {
    const std::string &bf = rep.bf_kinds[k];
    std::vector<std::vector<double>> doa_imp(n_doa), doa_out(n_doa);
    std::vector<std::vector<double>> sir_imp(n_sir), sir_out(n_sir);
    std::vector<double> all_imp, all_out;
    for (const auto &r : records) {
      if (r.bf_kind != bf) continue;
      int di = BucketIndex(r.delta_doa, kDoaEdges, n_doa);
      int si = BucketIndex(r.sir_db, kSirEdges, n_sir);
      doa_imp[di].push_back(r.improvement());
      doa_out[di].push_back(r.si_sdr_out);
      sir_imp[si].push_back(r.improvement());
      sir_out[si].push_back(r.si_sdr_out);
      all_imp.push_back(r.improvement());
      all_out.push_back(r.si_sdr_out);
    }
    rep.by_delta_doa.emplace_back();
    for (int i = 0; i < n_doa; ++i)
      rep.by_delta_doa.back().push_back(Summarize(doa_imp[i], doa_out[i]));
    rep.by_sir.emplace_back();
    for (int i = 0; i < n_sir; ++i)
      rep.by_sir.back().push_back(Summarize(sir_imp[i], sir_out[i]));
    rep.overall.push_back(Summarize(all_imp, all_out));
  }
  return rep;
}

std::string RenderTextReport(const BucketReport &report) {
  std::ostringstream os;
  auto table = [&os, &report](const std::string &title,
                              const std::vector<std::string> &cols,
                              const std::vector<std::vector<BucketCell>> &cells) {
    os << title << " (mean SI-SDR improvement, dB)\n";
    os << "  " << std::string(10, ' ');
    for (const auto &c : cols) {
      os << "|";
      os.width(10);
      os << c;
    }
    os << "| overall\n";
    for (size_t k = 0; k < report.bf_kinds.size(); ++k) {
      os << "  ";
      os.width(10);
      os << std::left << report.bf_kinds[k] << std::right;
      for (const auto &cell : cells[k]) {
        os << "|";
        os.width(10);
        os << FormatCell(cell);
      }
      os << "|";
      os.width(8);
      os << FormatCell(report.overall[k]);
      os << "\n";
    }
    os << "\n";
  };
  table("By DOA difference (deg)", report.doa_bucket_names, report.by_delta_doa);
  table("By per-source SIR (dB)", report.sir_bin_names, report.by_sir);
  return os.str();
}

std::string RenderCsvReport(const BucketReport &report) {
  std::ostringstream os;
  os << "bf,axis,bucket,count,mean_improvement_db,median_improvement_db,"
        "mean_si_sdr_out_db\n";
  auto emit = [&os](const std::string &bf, const std::string &axis,
                    const std::string &bucket, const BucketCell &cell) {
    char buf[128];
    if (cell.count == 0) {
      os << bf << "," << axis << "," << bucket << ",0,,,\n";
    } else {
      std::snprintf(buf, sizeof(buf), "%ld,%.6f,%.6f,%.6f", cell.count,
                    cell.mean_improvement, cell.median_improvement,
                    cell.mean_si_sdr_out);
      os << bf << "," << axis << "," << bucket << "," << buf << "\n";
    }
  };
  for (size_t k = 0; k < report.bf_kinds.size(); ++k) {
    const std::string &bf = report.bf_kinds[k];
    for (size_t i = 0; i < report.doa_bucket_names.size(); ++i)
      emit(bf, "delta_doa", report.doa_bucket_names[i], report.by_delta_doa[k][i]);
    for (size_t i = 0; i < report.sir_bin_names.size(); ++i)
      emit(bf, "sir", report.sir_bin_names[i], report.by_sir[k][i]);
    emit(bf, "overall", "all", report.overall[k]);
  }
  return os.str();
}

}  // namespace locsep
