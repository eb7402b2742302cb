// include/locsep/geometry.h

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

#ifndef LOCSEP_GEOMETRY_H_
#define LOCSEP_GEOMETRY_H_

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "locsep/common.h"

namespace locsep {

// Microphone array. Positions are 3D (meters) in whatever frame the caller
// uses; only relative positions matter. The array axis runs from the first
// to the last microphone.
//
// DOA convention: the azimuth of a far-field source is the angle between the
// direction of propagation (source towards array) and the array axis. 0
// degrees puts the source beyond the first microphone (it is hit first), 90
// degrees is broadside, 180 degrees puts the source beyond the last one.
class ArrayGeometry {
 public:
  ArrayGeometry(std::vector<Eigen::Vector3d> mic_positions,
                int reference_index = 0);

  int num_mics() const { return static_cast<int>(mics_.size()); }
  int reference_index() const { return reference_index_; }
  const Eigen::Vector3d &mic(int i) const { return mics_.at(i); }
  const std::vector<Eigen::Vector3d> &mics() const { return mics_; }

  // Unit vector from the first to the last microphone.
  const Eigen::Vector3d &axis() const { return axis_; }
  // Deterministic unit vector orthogonal to the axis, horizontal when the
  // axis is; spans the plane sources are placed in.
  const Eigen::Vector3d &perp() const { return perp_; }
  // Scalar coordinate of mic i along the axis, relative to the first mic.
  double axial_coord(int i) const;
  double pair_distance(int i, int j) const;
  // Largest pairwise distance.
  double aperture() const;

 private:
  std::vector<Eigen::Vector3d> mics_;
  int reference_index_;
  Eigen::Vector3d axis_;
  Eigen::Vector3d perp_;
};

// Evenly spaced mics along +x, centered on the origin.
ArrayGeometry MakeLinearArray(int n_mics, double aperture_m,
                              int reference_index = 0);

struct SourceDirection {
  double azimuth_deg = 90.0;  // [0, 180], see ArrayGeometry
  bool far_field = true;
};

// Arrival-time difference: time at mic i_prime minus time at mic i for a
// far-field source. Computed from the axial projections, so for a collinear
// pair it equals pair_distance * cos(azimuth) / c with the pair-local angle.
double Tdoa(const ArrayGeometry &geom, int i, int i_prime,
            const SourceDirection &dir, double speed_of_sound = kSpeedOfSound);

struct SteeringVector {
  Eigen::VectorXcd coefficients;  // unit modulus, 1 at the reference channel
  int freq_bin = 0;
};

// Element i is exp(-2j*pi*nu*Tdoa(ref, i, dir)) at the continuous frequency
// nu (Hz). Aligning with these coefficients undoes the inter-channel delays.
Eigen::VectorXcd SteeringAtHz(const ArrayGeometry &geom,
                              const SourceDirection &dir, double nu_hz,
                              double speed_of_sound = kSpeedOfSound);

SteeringVector Steering(const ArrayGeometry &geom, const SourceDirection &dir,
                        int freq_bin, int fft_len, double sample_rate,
                        double speed_of_sound = kSpeedOfSound);

// Unit vector pointing from the array towards a source at the given azimuth,
// within the axis/perp plane.
Eigen::Vector3d SourceUnitVector(const ArrayGeometry &geom,
                                 const SourceDirection &dir);

}  // namespace locsep

#endif  // LOCSEP_GEOMETRY_H_
