// src/fft.cc

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

#include "locsep/fft.h"

#include <fftw3.h>

#include <mutex>

#include "locsep/common.h"

namespace locsep {

namespace {
// FFTW's planner is not thread-safe; executing plans on distinct buffers is.
std::mutex &PlannerMutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(int n) : n_(n) {
  if (n < 2) throw ConfigError("RealFft: size must be >= 2");
  std::lock_guard<std::mutex> lock(PlannerMutex());
  double *re = fftw_alloc_real(n_);
  fftw_complex *cx = fftw_alloc_complex(bins());
  fwd_ = fftw_plan_dft_r2c_1d(n_, re, cx, FFTW_ESTIMATE);
  inv_ = fftw_plan_dft_c2r_1d(n_, cx, re, FFTW_ESTIMATE);
  fftw_free(re);
  fftw_free(cx);
  if (fwd_ == nullptr || inv_ == nullptr)
    throw NumericError("RealFft: FFTW planning failed");
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

RealFft::Workspace::Workspace(const RealFft &fft) {
  re_ = fftw_alloc_real(fft.n());
  cx_ = reinterpret_cast<std::complex<double> *>(fftw_alloc_complex(fft.bins()));
}

RealFft::Workspace::~Workspace() {
  fftw_free(re_);
  fftw_free(cx_);
}

void RealFft::Forward(Workspace &ws) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_), ws.re_,
                       reinterpret_cast<fftw_complex *>(ws.cx_));
}

void RealFft::Inverse(Workspace &ws) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inv_),
                       reinterpret_cast<fftw_complex *>(ws.cx_), ws.re_);
  const double scale = 1.0 / n_;
  for (int i = 0; i < n_; ++i) ws.re_[i] *= scale;
}

}  // namespace locsep
