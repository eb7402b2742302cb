// src/beamformer.cc

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

#include "locsep/beamformer.h"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <exception>

namespace locsep {

std::string BfKindName(BfKind kind) {
  switch (kind) {
    case BfKind::kGev: return "gev";
    case BfKind::kSdwMwf: return "sdw";
    case BfKind::kR1Mwf: return "r1";
  }
  return "?";
}

BfKind ParseBfKind(const std::string &name) {
  if (name == "gev") return BfKind::kGev;
  if (name == "sdw") return BfKind::kSdwMwf;
  if (name == "r1") return BfKind::kR1Mwf;
  throw ConfigError("unknown beamformer kind: " + name);
}

namespace {

void CheckPair(const Eigen::MatrixXcd &sigma_j, const Eigen::MatrixXcd &sigma_n,
               int ref) {
  if (sigma_j.rows() != sigma_j.cols() || sigma_n.rows() != sigma_n.cols() ||
      sigma_j.rows() != sigma_n.rows())
    throw ConfigError("beamformer: covariance matrices must be square, same size");
  if (ref < 0 || ref >= sigma_j.rows())
    throw ConfigError("beamformer: reference channel out of range");
}

double BaseScale(const Eigen::MatrixXcd &a) {
  double tr = a.real().trace() / a.rows();
  return tr > 0.0 ? tr : 1.0;
}

// Solve A x = b for Hermitian PSD A. The clean factorization is tried
// first; the diagonal is loaded (escalating) only when the solve comes back
// non-finite or inconsistent, so well-conditioned closed forms are exact.
Eigen::VectorXcd SolvePsd(const Eigen::MatrixXcd &a, const Eigen::VectorXcd &b) {
  const double base = BaseScale(a);
  double eps = 0.0;
  for (int attempt = 0; attempt < 9; ++attempt) {
    Eigen::MatrixXcd loaded = a;
    if (eps > 0.0)
      loaded += eps * Eigen::MatrixXcd::Identity(a.rows(), a.cols());
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(loaded);
    if (ldlt.info() == Eigen::Success) {
      Eigen::VectorXcd x = ldlt.solve(b);
      if (x.allFinite()) {
        double resid = (loaded * x - b).norm();
        if (resid <= 1e-8 * (b.norm() + base * x.norm()) + 1e-290) return x;
      }
    }
    eps = eps == 0.0 ? 1e-10 * base : eps * 100.0;
  }
  throw NumericError("beamformer: covariance solve failed beyond loading");
}

struct Whitened {
  Eigen::LLT<Eigen::MatrixXcd> llt;
  Eigen::MatrixXcd loaded;  // the matrix actually factorized
};

// Cholesky of sigma_n + eps*I. eps starts at eps0 (relative to the mean
// diagonal) and escalates until the factorization is usable.
Whitened FactorNoise(const Eigen::MatrixXcd &sigma_n, double eps0_rel) {
  const double base = BaseScale(sigma_n);
  double eps = eps0_rel * base;
  for (int attempt = 0; attempt < 9; ++attempt) {
    Whitened w;
    w.loaded = sigma_n;
    if (eps > 0.0)
      w.loaded += eps * Eigen::MatrixXcd::Identity(sigma_n.rows(), sigma_n.cols());
    w.llt.compute(w.loaded);
    if (w.llt.info() == Eigen::Success && w.llt.rcond() > 1e-14) return w;
    eps = eps == 0.0 ? 1e-10 * base : eps * 100.0;
  }
  throw NumericError("beamformer: noise covariance singular beyond loading");
}

// Principal generalized eigenvector of (sigma_j, sigma_n) via whitening.
Eigen::VectorXcd PrincipalGev(const Eigen::MatrixXcd &sigma_j,
                              const Whitened &wn) {
  Eigen::MatrixXcd l = wn.llt.matrixL();
  Eigen::MatrixXcd li = l.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXcd::Identity(l.rows(), l.cols()));
  Eigen::MatrixXcd b = li * sigma_j * li.adjoint();
  b = 0.5 * (b + b.adjoint()).eval();  // symmetrize rounding noise
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(b);
  if (eig.info() != Eigen::Success)
    throw NumericError("beamformer: eigen solve failed");
  Eigen::VectorXcd psi = eig.eigenvectors().col(l.rows() - 1);
  return li.adjoint() * psi;
}

}  // namespace

Eigen::VectorXcd GevWeights(const Eigen::MatrixXcd &sigma_j,
                            const Eigen::MatrixXcd &sigma_n, int ref) {
  CheckPair(sigma_j, sigma_n, ref);
  // Masks can starve sigma_n of frames, so this path always loads.
  Whitened wn = FactorNoise(sigma_n, 1e-6);
  Eigen::VectorXcd w = PrincipalGev(sigma_j, wn);
  double nrm = w.norm();
  if (nrm <= 0.0 || !w.allFinite())
    throw NumericError("GevWeights: degenerate eigenvector");
  w /= nrm;
  std::complex<double> r = w[ref];
  if (std::abs(r) > 1e-14) w *= std::conj(r) / std::abs(r);
  return w;
}

Eigen::VectorXcd SdwMwfWeights(const Eigen::MatrixXcd &sigma_j,
                               const Eigen::MatrixXcd &sigma_n, double mu,
                               int ref) {
  CheckPair(sigma_j, sigma_n, ref);
  if (mu < 0.0) throw ConfigError("SdwMwfWeights: mu must be >= 0");
  Eigen::MatrixXcd a = sigma_j + mu * sigma_n;
  return SolvePsd(a, sigma_j.col(ref));
}

Eigen::VectorXcd R1MwfWeights(const Eigen::MatrixXcd &sigma_j,
                              const Eigen::MatrixXcd &sigma_n, double mu,
                              int ref, double *lambda_out) {
  CheckPair(sigma_j, sigma_n, ref);
  if (mu < 0.0) throw ConfigError("R1MwfWeights: mu must be >= 0");
  Whitened wn = FactorNoise(sigma_n, 0.0);
  Eigen::VectorXcd phi = PrincipalGev(sigma_j, wn);
  // Rank-1 reconstruction in signal space: h spans the source subspace, so
  // Sigma_R1 = sigma_s h h^H reproduces sigma_j exactly when it is rank 1.
  Eigen::VectorXcd h = wn.loaded * phi;
  double h2 = h.squaredNorm();
  if (h2 <= 0.0) throw NumericError("R1MwfWeights: degenerate eigenvector");
  double sigma_s = sigma_j.real().trace() / h2;
  double lambda = sigma_s * (phi.dot(h)).real();  // tr(sigma_n^{-1} Sigma_R1)
  if (lambda_out != nullptr) *lambda_out = lambda;
  // sigma_n^{-1} Sigma_R1 u_ref = sigma_s (sigma_n^{-1} h) (h^H u_ref).
  return (sigma_s / (mu + lambda)) * std::conj(h[ref]) * phi;
}

BeamformerWeights ComputeWeights(const CovariancePair &cov, BfKind kind,
                                 double mu, int ref) {
  if (cov.sigma_j.size() != cov.sigma_n.size())
    throw ConfigError("ComputeWeights: mismatched covariance pair");
  BeamformerWeights bw;
  bw.kind = kind;
  bw.mu = mu;
  bw.w.assign(cov.sigma_j.size(), Eigen::VectorXcd());
  const int n = cov.num_freqs();
  std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(dynamic, 16)
  for (int f = 0; f < n; ++f) {
    try {
      switch (kind) {
        case BfKind::kGev:
          bw.w[f] = GevWeights(cov.sigma_j[f], cov.sigma_n[f], ref);
          break;
        case BfKind::kSdwMwf:
          bw.w[f] = SdwMwfWeights(cov.sigma_j[f], cov.sigma_n[f], mu, ref);
          break;
        case BfKind::kR1Mwf:
          bw.w[f] = R1MwfWeights(cov.sigma_j[f], cov.sigma_n[f], mu, ref);
          break;
      }
    } catch (...) {
#pragma omp critical(compute_weights_err)
      if (failure == nullptr) failure = std::current_exception();
    }
  }
  if (failure != nullptr) std::rethrow_exception(failure);
  return bw;
}

Spectrogram ApplyBeamformer(const BeamformerWeights &weights,
                            const Spectrogram &spec) {
  spec.Validate();
  if (static_cast<Eigen::Index>(weights.w.size()) != spec.bins())
    throw ConfigError("ApplyBeamformer: weight count != bins");
  const int n_bins = static_cast<int>(spec.bins());
  const Eigen::Index n_frames = spec.frames();
  const int n_ch = spec.channels();
  for (const auto &w : weights.w)
    if (w.size() != n_ch)
      throw ConfigError("ApplyBeamformer: weight size != channels");

  Spectrogram out;
  out.sample_rate = spec.sample_rate;
  out.window_len = spec.window_len;
  out.frame_shift = spec.frame_shift;
  out.ch.assign(1, Eigen::MatrixXcd(n_frames, n_bins));

#pragma omp parallel for
  for (int b = 0; b < n_bins; ++b) {
    const Eigen::VectorXcd &w = weights.w[b];
    for (Eigen::Index t = 0; t < n_frames; ++t) {
      std::complex<double> acc(0.0, 0.0);
      for (int c = 0; c < n_ch; ++c) acc += std::conj(w[c]) * spec.ch[c](t, b);
      out.ch[0](t, b) = acc;
    }
  }
  return out;
}

}  // namespace locsep
