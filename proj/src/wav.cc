// src/wav.cc

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

#include "locsep/wav.h"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "locsep/common.h"

namespace locsep {

namespace {

constexpr uint16_t kFmtPcm = 1;
constexpr uint16_t kFmtIeeeFloat = 3;

void PutU16(std::vector<uint8_t> &b, uint16_t v) {
  b.push_back(v & 0xff);
  b.push_back((v >> 8) & 0xff);
}

void PutU32(std::vector<uint8_t> &b, uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xff);
}

void PutTag(std::vector<uint8_t> &b, const char *tag) {
  b.insert(b.end(), tag, tag + 4);
}

uint16_t GetU16(const uint8_t *p) { return p[0] | (p[1] << 8); }
uint32_t GetU32(const uint8_t *p) {
  return p[0] | (p[1] << 8) | (uint32_t(p[2]) << 16) | (uint32_t(p[3]) << 24);
}

}  // namespace

TimeSignal ReadWav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("ReadWav: cannot open " + path);
  std::vector<uint8_t> buf((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw InputError("ReadWav: not a RIFF/WAVE file: " + path);

  uint16_t fmt_code = 0, n_ch = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  size_t data_off = 0, data_len = 0;

  size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const uint8_t *hdr = buf.data() + pos;
    uint32_t chunk_len = GetU32(hdr + 4);
    size_t body = pos + 8;
    if (body + chunk_len > buf.size())
      throw InputError("ReadWav: truncated chunk in " + path);
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (chunk_len < 16) throw InputError("ReadWav: short fmt chunk");
      fmt_code = GetU16(buf.data() + body);
      n_ch = GetU16(buf.data() + body + 2);
      rate = GetU32(buf.data() + body + 4);
      bits = GetU16(buf.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data_off = body;
      data_len = chunk_len;
    }
    pos = body + chunk_len + (chunk_len & 1);  // chunks are word aligned
  }
  if (!have_fmt || data_off == 0)
    throw InputError("ReadWav: missing fmt or data chunk in " + path);
  if (n_ch == 0 || rate == 0) throw InputError("ReadWav: bad fmt chunk");

  const bool pcm16 = fmt_code == kFmtPcm && bits == 16;
  const bool f32 = fmt_code == kFmtIeeeFloat && bits == 32;
  if (!pcm16 && !f32)
    throw InputError("ReadWav: unsupported codec (format " +
                     std::to_string(fmt_code) + ", " + std::to_string(bits) +
                     " bit) in " + path);

  const size_t bytes_per = bits / 8;
  const size_t frame_bytes = bytes_per * n_ch;
  const size_t n_frames = data_len / frame_bytes;

  TimeSignal sig;
  sig.sample_rate = rate;
  sig.ch.assign(n_ch, Eigen::VectorXd(n_frames));
  const uint8_t *d = buf.data() + data_off;
  for (size_t t = 0; t < n_frames; ++t) {
    for (int c = 0; c < n_ch; ++c) {
      const uint8_t *s = d + t * frame_bytes + c * bytes_per;
      if (pcm16) {
        int16_t v;
        std::memcpy(&v, s, 2);
        sig.ch[c][t] = v / 32768.0;
      } else {
        float v;
        std::memcpy(&v, s, 4);
        sig.ch[c][t] = v;
      }
    }
  }
  return sig;
}

TimeSignal ReadWav(const std::string &path, double expected_rate) {
  TimeSignal sig = ReadWav(path);
  if (sig.sample_rate != expected_rate)
    throw InputError("ReadWav: sample rate mismatch in " + path + ": file has " +
                     std::to_string(sig.sample_rate) + " Hz, pipeline expects " +
                     std::to_string(expected_rate) + " Hz");
  return sig;
}

WavWriteStats WriteWav(const std::string &path, const TimeSignal &sig,
                       WavCodec codec) {
  sig.Validate();
  WavWriteStats stats;
  const int n_ch = sig.channels();
  const Eigen::Index n = sig.samples();
  const bool f32 = codec == WavCodec::kFloat32;
  const uint16_t bits = f32 ? 32 : 16;
  const uint32_t rate = static_cast<uint32_t>(sig.sample_rate);
  const uint32_t block = n_ch * bits / 8;
  const uint32_t data_len = static_cast<uint32_t>(n * block);

  std::vector<uint8_t> out;
  out.reserve(64 + data_len);
  PutTag(out, "RIFF");
  PutU32(out, 0);  // patched below
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, f32 ? kFmtIeeeFloat : kFmtPcm);
  PutU16(out, static_cast<uint16_t>(n_ch));
  PutU32(out, rate);
  PutU32(out, rate * block);
  PutU16(out, static_cast<uint16_t>(block));
  PutU16(out, bits);
  if (f32) {
    PutTag(out, "fact");
    PutU32(out, 4);
    PutU32(out, static_cast<uint32_t>(n));
  }
  PutTag(out, "data");
  PutU32(out, data_len);

  for (Eigen::Index t = 0; t < n; ++t) {
    for (int c = 0; c < n_ch; ++c) {
      double x = sig.ch[c][t];
      if (f32) {
        float v = static_cast<float>(x);
        uint32_t u;
        std::memcpy(&u, &v, 4);
        PutU32(out, u);
      } else {
        long v = std::lround(x * 32768.0);
        if (v > 32767) {
          v = 32767;
          ++stats.clipped;
        } else if (v < -32768) {
          v = -32768;
          ++stats.clipped;
        }
        PutU16(out, static_cast<uint16_t>(static_cast<int16_t>(v)));
      }
    }
  }
  uint32_t riff_len = static_cast<uint32_t>(out.size() - 8);
  out[4] = riff_len & 0xff;
  out[5] = (riff_len >> 8) & 0xff;
  out[6] = (riff_len >> 16) & 0xff;
  out[7] = (riff_len >> 24) & 0xff;

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InputError("WriteWav: cannot open " + path + " for writing");
  os.write(reinterpret_cast<const char *>(out.data()),
           static_cast<std::streamsize>(out.size()));
  if (!os) throw InputError("WriteWav: write failed for " + path);
  return stats;
}

}  // namespace locsep
