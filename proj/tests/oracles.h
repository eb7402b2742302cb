// tests/oracles.h

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

// Independent oracles used by the tests. Everything here is a deliberately
// naive textbook computation with no shared code paths with the library.

#ifndef LOCSEP_TESTS_ORACLES_H_
#define LOCSEP_TESTS_ORACLES_H_

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

namespace oracles {

constexpr double kPi = 3.141592653589793238462643383279502884;

// O(n^2) DFT of a real frame, bins 0..n/2.
inline Eigen::VectorXcd NaiveRealDft(const Eigen::VectorXd &x) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXcd out(n / 2 + 1);
  for (int b = 0; b <= n / 2; ++b) {
    std::complex<double> acc(0.0, 0.0);
    for (int k = 0; k < n; ++k) {
      double ph = -2.0 * kPi * b * k / n;
      acc += x[k] * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    out[b] = acc;
  }
  return out;
}

// Backward-integrated decay curve fit between -5 dB and -25 dB, scaled to a
// 60 dB decay (a T20-style estimate).
inline double SchroederRt60(const Eigen::VectorXd &h, double sample_rate) {
  const Eigen::Index n = h.size();
  Eigen::VectorXd edc(n);
  double acc = 0.0;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    acc += h[i] * h[i];
    edc[i] = acc;
  }
  double total = edc[0];
  Eigen::Index t5 = -1, t25 = -1;
  for (Eigen::Index i = 0; i < n; ++i) {
    double db = 10.0 * std::log10(edc[i] / total);
    if (t5 < 0 && db <= -5.0) t5 = i;
    if (t25 < 0 && db <= -25.0) {
      t25 = i;
      break;
    }
  }
  if (t5 < 0 || t25 < 0 || t25 <= t5) return -1.0;
  return 3.0 * static_cast<double>(t25 - t5) / sample_rate;
}

// Welch magnitude-squared coherence at one frequency (Hann window, 50%
// overlap).
inline double WelchMsc(const Eigen::VectorXd &x, const Eigen::VectorXd &y,
                       double sample_rate, double freq_hz, int seg_len = 512) {
  const int hop = seg_len / 2;
  const int bin = static_cast<int>(std::lround(freq_hz * seg_len / sample_rate));
  std::complex<double> sxy(0.0, 0.0);
  double sxx = 0.0, syy = 0.0;
  int count = 0;
  for (Eigen::Index start = 0; start + seg_len <= x.size(); start += hop) {
    std::complex<double> fx(0.0, 0.0), fy(0.0, 0.0);
    for (int k = 0; k < seg_len; ++k) {
      double w = 0.5 - 0.5 * std::cos(2.0 * kPi * k / seg_len);
      double ph = -2.0 * kPi * bin * k / seg_len;
      std::complex<double> e(std::cos(ph), std::sin(ph));
      fx += w * x[start + k] * e;
      fy += w * y[start + k] * e;
    }
    sxy += fx * std::conj(fy);
    sxx += std::norm(fx);
    syy += std::norm(fy);
    ++count;
  }
  if (count == 0 || sxx == 0.0 || syy == 0.0) return 0.0;
  return std::norm(sxy) / (sxx * syy);
}

// Generalized Rayleigh quotient (w^H A w) / (w^H B w).
inline double RayleighQuotient(const Eigen::VectorXcd &w,
                               const Eigen::MatrixXcd &a,
                               const Eigen::MatrixXcd &b) {
  std::complex<double> num = w.dot(a * w);
  std::complex<double> den = w.dot(b * w);
  return num.real() / den.real();
}

}  // namespace oracles

#endif  // LOCSEP_TESTS_ORACLES_H_
