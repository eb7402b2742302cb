// include/locsep/signal.h

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

#ifndef LOCSEP_SIGNAL_H_
#define LOCSEP_SIGNAL_H_

#include <Eigen/Dense>
#include <vector>

namespace locsep {

// Multichannel sampled waveform. Channels all have the same length; nominal
// amplitude range is [-1, 1] but nothing clips until a 16-bit WAV write.
struct TimeSignal {
  double sample_rate = 0.0;
  std::vector<Eigen::VectorXd> ch;

  int channels() const { return static_cast<int>(ch.size()); }
  Eigen::Index samples() const { return ch.empty() ? 0 : ch[0].size(); }
  // Throws unless channels are non-empty, equal length, sample_rate > 0.
  void Validate() const;
};

struct StftConfig {
  int window_len = 1600;  // 100 ms at 16 kHz
  int frame_shift = 800;  // 50 ms at 16 kHz
};

// Complex time-frequency tensor, one frames x bins matrix per channel.
// bins == window_len/2 + 1 always (FFT size equals the window length).
struct Spectrogram {
  double sample_rate = 0.0;
  int window_len = 0;
  int frame_shift = 0;
  std::vector<Eigen::MatrixXcd> ch;

  int channels() const { return static_cast<int>(ch.size()); }
  Eigen::Index frames() const { return ch.empty() ? 0 : ch[0].rows(); }
  Eigen::Index bins() const { return ch.empty() ? 0 : ch[0].cols(); }
  void Validate() const;
};

// sin(pi*(k+0.5)/len), used for both analysis and synthesis; its square
// tiles to one at 50% overlap.
Eigen::VectorXd SineWindow(int len);

// Number of analysis frames for a signal of given length: the signal is
// zero-padded by window_len - frame_shift on both sides and frames are taken
// every frame_shift samples.
Eigen::Index StftFrameCount(Eigen::Index n_samples, const StftConfig &cfg);

// Windowed STFT. Frame t covers padded samples [t*shift, t*shift+window).
Spectrogram Stft(const TimeSignal &sig, const StftConfig &cfg = {});

// Normalized weighted overlap-add synthesis. Returns (frames-1)*shift
// samples aligned with the start of the original signal; this is at least as
// long as the input to Stft, so callers trim to the length they know.
TimeSignal Istft(const Spectrogram &spec);

}  // namespace locsep

#endif  // LOCSEP_SIGNAL_H_
