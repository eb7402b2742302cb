// include/locsep/fft.h

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

#ifndef LOCSEP_FFT_H_
#define LOCSEP_FFT_H_

#include <complex>
#include <memory>

namespace locsep {

// Real<->complex FFT of a fixed size, backed by FFTW (double precision,
// FFTW_ESTIMATE plans so the chosen algorithm never depends on runtime
// measurements and results are reproducible).
//
// Plan creation is serialized internally; Forward/Inverse on distinct
// Workspaces are safe to call concurrently, so the usual pattern in a
// parallel region is one Workspace per thread.
class RealFft {
 public:
  explicit RealFft(int n);
  ~RealFft();
  RealFft(const RealFft &) = delete;
  RealFft &operator=(const RealFft &) = delete;

  int n() const { return n_; }
  int bins() const { return n_ / 2 + 1; }

  // FFTW-aligned scratch buffers owned by the caller (typically one per
  // thread). real() has length n, cpx() length n/2+1.
  class Workspace {
   public:
    explicit Workspace(const RealFft &fft);
    ~Workspace();
    Workspace(const Workspace &) = delete;
    Workspace &operator=(const Workspace &) = delete;

    double *real() { return re_; }
    std::complex<double> *cpx() { return cx_; }

   private:
    friend class RealFft;
    double *re_;
    std::complex<double> *cx_;
  };

  // real -> cpx, unnormalized.
  void Forward(Workspace &ws) const;
  // cpx -> real, scaled by 1/n. Clobbers the cpx buffer (FFTW c2r semantics).
  void Inverse(Workspace &ws) const;

 private:
  int n_;
  void *fwd_;  // fftw_plan
  void *inv_;
};

}  // namespace locsep

#endif  // LOCSEP_FFT_H_
