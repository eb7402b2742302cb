// src/geometry.cc

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

#include "locsep/geometry.h"

#include <cmath>

namespace locsep {

ArrayGeometry::ArrayGeometry(std::vector<Eigen::Vector3d> mic_positions,
                             int reference_index)
    : mics_(std::move(mic_positions)), reference_index_(reference_index) {
  if (mics_.size() < 2)
    throw ConfigError("ArrayGeometry: need at least 2 microphones");
  if (reference_index_ < 0 || reference_index_ >= num_mics())
    throw ConfigError("ArrayGeometry: reference index out of range");
  for (size_t i = 0; i < mics_.size(); ++i)
    for (size_t j = i + 1; j < mics_.size(); ++j)
      if ((mics_[i] - mics_[j]).norm() < 1e-9)
        throw ConfigError("ArrayGeometry: degenerate geometry, mics " +
                          std::to_string(i) + " and " + std::to_string(j) +
                          " coincide");
  axis_ = (mics_.back() - mics_.front()).normalized();
  // Prefer a horizontal perpendicular so sources land in a sensible plane.
  Eigen::Vector3d up(0, 0, 1);
  Eigen::Vector3d p = up.cross(axis_);
  if (p.norm() < 1e-6) p = Eigen::Vector3d(1, 0, 0).cross(axis_);
  perp_ = p.normalized();
}

double ArrayGeometry::axial_coord(int i) const {
  return (mic(i) - mics_.front()).dot(axis_);
}

double ArrayGeometry::pair_distance(int i, int j) const {
  return (mic(i) - mic(j)).norm();
}

double ArrayGeometry::aperture() const {
  double best = 0.0;
  for (size_t i = 0; i < mics_.size(); ++i)
    for (size_t j = i + 1; j < mics_.size(); ++j)
      best = std::max(best, (mics_[i] - mics_[j]).norm());
  return best;
}

ArrayGeometry MakeLinearArray(int n_mics, double aperture_m,
                              int reference_index) {
  if (n_mics < 2) throw ConfigError("MakeLinearArray: need at least 2 mics");
  if (aperture_m <= 0.0) throw ConfigError("MakeLinearArray: aperture must be > 0");
  std::vector<Eigen::Vector3d> mics(n_mics);
  for (int i = 0; i < n_mics; ++i) {
    double x = aperture_m * (static_cast<double>(i) / (n_mics - 1) - 0.5);
    mics[i] = Eigen::Vector3d(x, 0.0, 0.0);
  }
  return ArrayGeometry(std::move(mics), reference_index);
}

namespace {
void CheckAzimuth(const SourceDirection &dir) {
  if (!(dir.azimuth_deg >= 0.0 && dir.azimuth_deg <= 180.0))
    throw ConfigError("SourceDirection: azimuth must be in [0, 180] degrees");
}
}  // namespace

double Tdoa(const ArrayGeometry &geom, int i, int i_prime,
            const SourceDirection &dir, double speed_of_sound) {
  CheckAzimuth(dir);
  if (i == i_prime) throw ConfigError("Tdoa: need two distinct microphones");
  double dq = geom.axial_coord(i_prime) - geom.axial_coord(i);
  return dq * std::cos(dir.azimuth_deg * kPi / 180.0) / speed_of_sound;
}

Eigen::VectorXcd SteeringAtHz(const ArrayGeometry &geom,
                              const SourceDirection &dir, double nu_hz,
                              double speed_of_sound) {
  const int n = geom.num_mics();
  const int ref = geom.reference_index();
  Eigen::VectorXcd d(n);
  for (int i = 0; i < n; ++i) {
    if (i == ref) {
      d[i] = 1.0;
      continue;
    }
    double tau = Tdoa(geom, ref, i, dir, speed_of_sound);
    double phase = -2.0 * kPi * nu_hz * tau;
    d[i] = std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return d;
}

SteeringVector Steering(const ArrayGeometry &geom, const SourceDirection &dir,
                        int freq_bin, int fft_len, double sample_rate,
                        double speed_of_sound) {
  if (freq_bin < 0 || freq_bin > fft_len / 2)
    throw ConfigError("Steering: freq_bin outside [0, fft_len/2]");
  SteeringVector sv;
  sv.freq_bin = freq_bin;
  double nu = static_cast<double>(freq_bin) * sample_rate / fft_len;
  sv.coefficients = SteeringAtHz(geom, dir, nu, speed_of_sound);
  return sv;
}

Eigen::Vector3d SourceUnitVector(const ArrayGeometry &geom,
                                 const SourceDirection &dir) {
  CheckAzimuth(dir);
  double theta = dir.azimuth_deg * kPi / 180.0;
  // Propagation direction makes angle theta with the axis, so the source
  // sits at the supplementary angle.
  return -std::cos(theta) * geom.axis() + std::sin(theta) * geom.perp();
}

}  // namespace locsep
