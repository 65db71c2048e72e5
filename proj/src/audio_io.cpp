// Copyright (c) 2026 The stamdct authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stamdct/audio_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace stamdct {

namespace {

constexpr uint16_t kFormatPcm = 1;

uint32_t read_u32le(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16le(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void put_u32le(std::vector<unsigned char>& out, uint32_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

void put_u16le(std::vector<unsigned char>& out, uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

}  // namespace

Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_wav: cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0)
    throw std::runtime_error("read_wav: missing RIFF header in " + path);
  if (std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw std::runtime_error("read_wav: missing WAVE tag in " + path);

  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const unsigned char* data = nullptr;
  size_t data_size = 0;

  // Walk the chunk list; unknown chunks (LIST, fact, ...) are skipped.
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + pos;
    const uint32_t chunk_size = read_u32le(hdr + 4);
    const size_t body = pos + 8;
    if (body + chunk_size > bytes.size())
      throw std::runtime_error("read_wav: truncated chunk in " + path);
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (chunk_size < 16)
        throw std::runtime_error("read_wav: fmt chunk too small in " + path);
      const unsigned char* f = bytes.data() + body;
      format = read_u16le(f);
      channels = read_u16le(f + 2);
      rate = read_u32le(f + 4);
      bits = read_u16le(f + 14);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size & 1);  // chunks are 2-byte aligned
  }

  if (!have_fmt) throw std::runtime_error("read_wav: no fmt chunk in " + path);
  if (data == nullptr)
    throw std::runtime_error("read_wav: no data chunk in " + path);
  if (format != kFormatPcm)
    throw std::runtime_error("read_wav: unsupported encoding (format tag " +
                             std::to_string(format) + ", want PCM) in " + path);
  if (channels != 1)
    throw std::runtime_error("read_wav: unsupported channel count " +
                             std::to_string(channels) + " (want mono) in " +
                             path);
  if (bits != 16)
    throw std::runtime_error("read_wav: unsupported bit depth " +
                             std::to_string(bits) + " (want 16) in " + path);
  if (rate != static_cast<uint32_t>(kSampleRate))
    throw std::runtime_error("read_wav: unsupported sample rate " +
                             std::to_string(rate) + " (want 16000) in " + path);

  const size_t n = data_size / 2;
  Waveform w;
  w.sample_rate = kSampleRate;
  w.samples.resize(static_cast<Index>(n));
  for (size_t i = 0; i < n; ++i) {
    int16_t v;
    std::memcpy(&v, data + 2 * i, 2);
    w.samples[static_cast<Index>(i)] = static_cast<double>(v);
  }
  return w;
}

void write_wav(const std::string& path, const Waveform& w) {
  const Index n = w.samples.size();
  std::vector<unsigned char> out;
  out.reserve(44 + static_cast<size_t>(n) * 2);

  const uint32_t data_bytes = static_cast<uint32_t>(n) * 2;
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32le(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  put_u32le(out, 16);
  put_u16le(out, kFormatPcm);
  put_u16le(out, 1);  // mono
  put_u32le(out, static_cast<uint32_t>(w.sample_rate));
  put_u32le(out, static_cast<uint32_t>(w.sample_rate) * 2);  // byte rate
  put_u16le(out, 2);                                         // block align
  put_u16le(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32le(out, data_bytes);

  for (Index i = 0; i < n; ++i) {
    const double v = w.samples[i];
    if (!(v >= kSampleMin && v <= kSampleMax))
      throw std::runtime_error(
          "write_wav: sample " + std::to_string(i) + " out of range (" +
          std::to_string(v) + "); clamp before writing");
    // std::round ties away from zero.
    const int32_t q = static_cast<int32_t>(std::round(v));
    put_u16le(out, static_cast<uint16_t>(static_cast<int16_t>(q)));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("write_wav: cannot open " + path);
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("write_wav: write failed for " + path);
}

}  // namespace stamdct
