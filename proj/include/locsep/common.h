// include/locsep/common.h

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

#ifndef LOCSEP_COMMON_H_
#define LOCSEP_COMMON_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace locsep {

// Error taxonomy: ConfigError for bad parameters/metadata, InputError for bad
// data (files, empty signals), NumericError for conditioning failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string &msg) : Error(msg) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string &msg) : Error(msg) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string &msg) : Error(msg) {}
};

constexpr double kSpeedOfSound = 343.0;  // m/s
constexpr double kPi = 3.141592653589793238462643383279502884;

// $LOCSEP_DATA_ROOT/<path> for relative paths when the variable is set;
// absolute paths pass through. The only environment-driven override.
std::string ResolveDataPath(const std::string &path);

// splitmix64 step; used both as a mixer for derived seeds and inside Rng.
uint64_t SplitMix64(uint64_t &state);

// Stable seed derivation, e.g. per-scene seed = DeriveSeed(master, index).
uint64_t DeriveSeed(uint64_t master, uint64_t stream);

// Small deterministic RNG. All sampling in the toolkit goes through this so
// that manifests and rendered audio are reproducible byte for byte; the
// stdlib distributions are avoided because their sequences are
// implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t NextU64();
  // Uniform in [lo, hi) from the top 53 bits.
  double Uniform(double lo = 0.0, double hi = 1.0);
  // Inclusive integer range.
  int UniformInt(int lo, int hi);
  // Standard normal via Box-Muller (cached spare).
  double Normal();

 private:
  uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace locsep

#endif  // LOCSEP_COMMON_H_
