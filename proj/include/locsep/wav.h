// include/locsep/wav.h

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

#ifndef LOCSEP_WAV_H_
#define LOCSEP_WAV_H_

#include <string>

#include "locsep/signal.h"

namespace locsep {

// RIFF/WAVE, PCM 16-bit or IEEE float 32-bit, any channel count. Anything
// else (compressed codecs, other bit depths) is rejected.
enum class WavCodec { kPcm16, kFloat32 };

struct WavWriteStats {
  long clipped = 0;  // samples clamped to the PCM range on a 16-bit write
};

TimeSignal ReadWav(const std::string &path);

// Same, but fails with InputError when the file's rate differs from what the
// pipeline was configured for.
TimeSignal ReadWav(const std::string &path, double expected_rate);

WavWriteStats WriteWav(const std::string &path, const TimeSignal &sig,
                       WavCodec codec = WavCodec::kFloat32);

}  // namespace locsep

#endif  // LOCSEP_WAV_H_
