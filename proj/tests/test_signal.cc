// tests/test_signal.cc

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

#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "locsep/common.h"
#include "locsep/ref.h"
#include "locsep/signal.h"
#include "locsep/wav.h"
#include "oracles.h"

using namespace locsep;

namespace {

TimeSignal RandomSignal(int channels, Eigen::Index n, uint64_t seed,
                        double rate = 16000.0) {
  Rng rng(seed);
  TimeSignal s;
  s.sample_rate = rate;
  s.ch.resize(channels);
  for (auto &c : s.ch) {
    c.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) c[i] = rng.Uniform(-1.0, 1.0);
  }
  return s;
}

double RelErr(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
  return (a - b).norm() / b.norm();
}

}  // namespace

TEST_CASE("stft: frequency dimension is window_len/2 + 1, 801 at defaults") {
  TimeSignal s = RandomSignal(2, 16000, 1);
  Spectrogram spec = Stft(s);
  CHECK(spec.bins() == 801);
  CHECK(spec.window_len == 1600);

  StftConfig small{256, 128};
  CHECK(Stft(s, small).bins() == 129);
}

TEST_CASE("stft: all-zero signal gives an all-zero spectrogram") {
  TimeSignal s;
  s.sample_rate = 16000.0;
  s.ch.assign(1, Eigen::VectorXd::Zero(4000));
  Spectrogram spec = Stft(s);
  for (Eigen::Index t = 0; t < spec.frames(); ++t)
    for (Eigen::Index b = 0; b < spec.bins(); ++b)
      CHECK(std::abs(spec.ch[0](t, b)) == 0.0);
}

TEST_CASE("stft: matches a direct DFT of the windowed frame") {
  StftConfig cfg{64, 32};
  TimeSignal s = RandomSignal(1, 300, 2);
  Spectrogram spec = Stft(s, cfg);
  Eigen::VectorXd win = SineWindow(cfg.window_len);

  // Frame t covers padded samples [t*shift, t*shift + window), pad = W - S.
  const int pad = cfg.window_len - cfg.frame_shift;
  for (Eigen::Index t : {Eigen::Index(0), Eigen::Index(3), spec.frames() - 1}) {
    Eigen::VectorXd frame(cfg.window_len);
    for (int k = 0; k < cfg.window_len; ++k) {
      Eigen::Index p = t * cfg.frame_shift + k - pad;
      frame[k] = (p >= 0 && p < s.samples()) ? win[k] * s.ch[0][p] : 0.0;
    }
    Eigen::VectorXcd want = oracles::NaiveRealDft(frame);
    for (Eigen::Index b = 0; b < spec.bins(); ++b)
      CHECK(std::abs(spec.ch[0](t, b) - want[b]) <
            1e-9 * (1.0 + std::abs(want[b])));
  }
}

TEST_CASE("stft: integer-bin cosine concentrates on that bin") {
  // Oracle-derived values: a sine-windowed cosine at an exact bin keeps
  // ~81% of the half-spectrum frame energy in the peak bin and >= 99%
  // within one bin either side.
  const int W = 1600;
  const int k = 37;
  TimeSignal s;
  s.sample_rate = 16000.0;
  s.ch.assign(1, Eigen::VectorXd(W));
  for (int n = 0; n < W; ++n)
    s.ch[0][n] = std::cos(2.0 * kPi * k * n / W);
  Spectrogram spec = Stft(s, StftConfig{W, W / 2});
  // Central frame covers the original signal exactly.
  const Eigen::Index t = 1;

  // Cross-check the frame against the oracle DFT.
  Eigen::VectorXd win = SineWindow(W);
  Eigen::VectorXd frame(W);
  for (int n = 0; n < W; ++n) frame[n] = win[n] * s.ch[0][n];
  Eigen::VectorXcd want = oracles::NaiveRealDft(frame);

  double total = 0.0, at_k = 0.0, near_k = 0.0;
  Eigen::Index argmax = 0;
  double best = -1.0;
  for (Eigen::Index b = 0; b < spec.bins(); ++b) {
    double e = std::norm(spec.ch[0](t, b));
    CHECK(std::abs(spec.ch[0](t, b) - want[b]) < 1e-6);
    total += e;
    if (b == k) at_k = e;
    if (std::abs(static_cast<double>(b) - k) <= 1) near_k += e;
    if (e > best) {
      best = e;
      argmax = b;
    }
  }
  CHECK(argmax == k);
  CHECK(at_k / total > 0.75);
  CHECK(near_k / total >= 0.99);
}

TEST_CASE("stft/istft: round-trip identity on random signals") {
  for (uint64_t seed : {3, 4, 5}) {
    Eigen::Index n = 12345 + 217 * static_cast<Eigen::Index>(seed);
    TimeSignal s = RandomSignal(3, n, seed);
    TimeSignal back = Istft(Stft(s));
    REQUIRE(back.samples() >= n);
    for (int c = 0; c < 3; ++c)
      CHECK(RelErr(back.ch[c].head(n), s.ch[c]) < 1e-6);
  }
}

TEST_CASE("istft: all-zero spectrogram gives all-zero signal") {
  Spectrogram spec;
  spec.sample_rate = 16000.0;
  spec.window_len = 1600;
  spec.frame_shift = 800;
  spec.ch.assign(1, Eigen::MatrixXcd::Zero(5, 801));
  TimeSignal out = Istft(spec);
  CHECK(out.ch[0].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stft: Parseval against a direct energy-sum oracle") {
  StftConfig cfg{400, 200};
  TimeSignal s = RandomSignal(1, 5000, 6);
  Spectrogram spec = Stft(s, cfg);

  // Windowed-frame energy accumulated in the time domain.
  Eigen::VectorXd win = SineWindow(cfg.window_len);
  const int pad = cfg.window_len - cfg.frame_shift;
  double time_energy = 0.0;
  for (Eigen::Index t = 0; t < spec.frames(); ++t)
    for (int k = 0; k < cfg.window_len; ++k) {
      Eigen::Index p = t * cfg.frame_shift + k - pad;
      if (p >= 0 && p < s.samples()) {
        double v = win[k] * s.ch[0][p];
        time_energy += v * v;
      }
    }
  double freq_energy = 0.0;
  for (Eigen::Index t = 0; t < spec.frames(); ++t)
    for (Eigen::Index b = 0; b < spec.bins(); ++b) {
      double c = (b == 0 || b == spec.bins() - 1) ? 1.0 : 2.0;
      freq_energy += c * std::norm(spec.ch[0](t, b));
    }
  freq_energy /= cfg.window_len;
  CHECK(std::abs(freq_energy - time_energy) < 1e-6 * time_energy);
}

TEST_CASE("stft: linearity") {
  StftConfig cfg{256, 128};
  TimeSignal x = RandomSignal(1, 2000, 7);
  TimeSignal y = RandomSignal(1, 2000, 8);
  const double a = 0.37, b = -1.21;
  TimeSignal z = x;
  z.ch[0] = a * x.ch[0] + b * y.ch[0];
  Spectrogram sx = Stft(x, cfg), sy = Stft(y, cfg), sz = Stft(z, cfg);
  double num = 0.0, den = 0.0;
  for (Eigen::Index t = 0; t < sz.frames(); ++t)
    for (Eigen::Index bin = 0; bin < sz.bins(); ++bin) {
      std::complex<double> want = a * sx.ch[0](t, bin) + b * sy.ch[0](t, bin);
      num += std::norm(sz.ch[0](t, bin) - want);
      den += std::norm(want);
    }
  CHECK(std::sqrt(num / den) < 1e-9);
}

TEST_CASE("stft/istft: error paths") {
  TimeSignal s = RandomSignal(1, 100, 9);
  CHECK_THROWS_AS(Stft(s, StftConfig{100, 128}), ConfigError);  // W < S
  CHECK_THROWS_AS(Stft(s, StftConfig{101, 50}), ConfigError);   // odd W
  TimeSignal empty;
  empty.sample_rate = 16000.0;
  empty.ch.assign(1, Eigen::VectorXd());
  CHECK_THROWS_AS(Stft(empty), InputError);

  Spectrogram bad;
  bad.sample_rate = 16000.0;
  bad.window_len = 256;
  bad.frame_shift = 300;  // > window_len
  bad.ch.assign(1, Eigen::MatrixXcd::Zero(4, 129));
  CHECK_THROWS_AS(Istft(bad), ConfigError);
  bad.frame_shift = 128;
  bad.ch.assign(1, Eigen::MatrixXcd::Zero(4, 100));  // wrong bins
  CHECK_THROWS_AS(Istft(bad), ConfigError);
}

TEST_CASE("stft/istft: OpenMP kernels match the serial reference bitwise") {
  TimeSignal s = RandomSignal(2, 7001, 10);
  StftConfig cfg{1600, 800};
  Spectrogram a = Stft(s, cfg);
  Spectrogram b = ref::Stft(s, cfg);
  REQUIRE(a.frames() == b.frames());
  for (int c = 0; c < 2; ++c)
    CHECK((a.ch[c] - b.ch[c]).cwiseAbs().maxCoeff() == 0.0);

  TimeSignal ia = Istft(a);
  TimeSignal ib = ref::Istft(b);
  for (int c = 0; c < 2; ++c)
    CHECK((ia.ch[c] - ib.ch[c]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("wav: float32 round-trip is bit exact") {
  namespace fs = std::filesystem;
  fs::path p = fs::temp_directory_path() / "locsep_test_rt.wav";
  TimeSignal s = RandomSignal(4, 1234, 11);
  WriteWav(p.string(), s, WavCodec::kFloat32);
  TimeSignal r1 = ReadWav(p.string());
  CHECK(r1.sample_rate == 16000.0);
  CHECK(r1.channels() == 4);
  WriteWav(p.string(), r1, WavCodec::kFloat32);
  TimeSignal r2 = ReadWav(p.string());
  for (int c = 0; c < 4; ++c) {
    CHECK((r1.ch[c] - r2.ch[c]).cwiseAbs().maxCoeff() == 0.0);
    // The first write quantizes to float; further trips are lossless.
    for (Eigen::Index i = 0; i < s.samples(); ++i)
      CHECK(r1.ch[c][i] == static_cast<double>(static_cast<float>(s.ch[c][i])));
  }
  fs::remove(p);
}

TEST_CASE("wav: 16-bit write clips at full scale and counts it") {
  namespace fs = std::filesystem;
  fs::path p = fs::temp_directory_path() / "locsep_test_clip.wav";
  TimeSignal s;
  s.sample_rate = 16000.0;
  s.ch.assign(1, Eigen::VectorXd(4));
  s.ch[0] << 1.0, -1.5, 0.25, 0.0;
  WavWriteStats stats = WriteWav(p.string(), s, WavCodec::kPcm16);
  CHECK(stats.clipped == 2);  // 1.0 -> 32768 and -1.5 both clamp
  TimeSignal r = ReadWav(p.string());
  CHECK(r.ch[0][0] == doctest::Approx(32767.0 / 32768.0));
  CHECK(r.ch[0][1] == doctest::Approx(-1.0));
  CHECK(r.ch[0][2] == doctest::Approx(0.25).epsilon(1e-4));
  fs::remove(p);
}

TEST_CASE("wav: sample-rate mismatch and unsupported codec are errors") {
  namespace fs = std::filesystem;
  fs::path p = fs::temp_directory_path() / "locsep_test_sr.wav";
  TimeSignal s = RandomSignal(1, 100, 12, 8000.0);
  WriteWav(p.string(), s);
  CHECK_THROWS_AS(ReadWav(p.string(), 16000.0), InputError);
  CHECK_NOTHROW(ReadWav(p.string(), 8000.0));

  // Corrupt the format tag (offset 20 in a canonical header).
  {
    std::FILE *f = std::fopen(p.string().c_str(), "r+b");
    REQUIRE(f != nullptr);
    std::fseek(f, 20, SEEK_SET);
    unsigned char mulaw[2] = {0x07, 0x00};
    std::fwrite(mulaw, 1, 2, f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(ReadWav(p.string()), InputError);
  fs::remove(p);

  CHECK_THROWS_AS(ReadWav("/nonexistent/locsep.wav"), InputError);
}
