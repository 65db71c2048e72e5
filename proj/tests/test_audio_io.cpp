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

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "stamdct/audio_io.hpp"

using namespace stamdct;
namespace fs = std::filesystem;

namespace {

std::string tmp_wav(const char* name) {
  return (fs::temp_directory_path() / name).string();
}

Waveform make(std::initializer_list<double> samples) {
  Waveform w;
  w.samples.resize(static_cast<Index>(samples.size()));
  Index i = 0;
  for (double v : samples) w.samples[i++] = v;
  return w;
}

}  // namespace

TEST_CASE("wav round trip preserves integer-valued samples exactly") {
  Rng rng(42);
  Waveform w;
  w.samples.resize(16000);
  for (Index i = 0; i < w.samples.size(); ++i)
    w.samples[i] = std::floor(rng.uniform(-32768.0, 32768.0));
  const std::string path = tmp_wav("roundtrip.wav");
  write_wav(path, w);
  const Waveform r = read_wav(path);
  REQUIRE(r.samples.size() == w.samples.size());
  CHECK(r.sample_rate == 16000);
  CHECK((r.samples - w.samples).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("zero and max-scale samples survive unchanged") {
  const std::string path = tmp_wav("trivial.wav");
  write_wav(path, make({0.0, 0.0, 0.0}));
  CHECK(read_wav(path).samples.isZero(0.0));
  write_wav(path, make({32767.0}));
  CHECK(read_wav(path).samples[0] == 32767.0);
}

TEST_CASE("rounding is nearest with ties away from zero") {
  const std::string path = tmp_wav("rounding.wav");
  // value -> stored integer
  const std::pair<double, double> table[] = {
      {0.4, 0.0},   {-0.4, 0.0}, {0.5, 1.0},    {-0.5, -1.0},
      {1.5, 2.0},   {-1.5, -2.0}, {2.49, 2.0},  {-2.5, -3.0},
      {32766.5, 32767.0}, {-32767.5, -32768.0}};
  for (const auto& [in, want] : table) {
    write_wav(path, make({in}));
    CHECK_MESSAGE(read_wav(path).samples[0] == want, "input ", in);
  }
}

TEST_CASE("write rejects out-of-range samples instead of clamping") {
  const std::string path = tmp_wav("reject.wav");
  CHECK_THROWS_AS(write_wav(path, make({32768.0})), std::runtime_error);
  CHECK_THROWS_AS(write_wav(path, make({-32769.0})), std::runtime_error);
  CHECK_THROWS_AS(write_wav(path, make({1e9})), std::runtime_error);
}

TEST_CASE("write fails on an unwritable path") {
  CHECK_THROWS_AS(write_wav("/nonexistent-dir/x.wav", make({0.0})),
                  std::runtime_error);
}

TEST_CASE("reader names the offending format field") {
  const std::string path = tmp_wav("bad.wav");

  SUBCASE("not RIFF at all") {
    std::ofstream(path, std::ios::binary) << "JUNKJUNKJUNKJUNK";
    CHECK_THROWS_WITH_AS(read_wav(path), doctest::Contains("RIFF"),
                         std::runtime_error);
  }
  SUBCASE("stereo rejected") {
    Waveform w = make({0.0, 1.0});
    write_wav(path, w);
    // Patch the channel count field (offset 22).
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(22);
    const char two[2] = {2, 0};
    f.write(two, 2);
    f.close();
    CHECK_THROWS_WITH_AS(read_wav(path), doctest::Contains("channel"),
                         std::runtime_error);
  }
  SUBCASE("wrong rate rejected") {
    write_wav(path, make({0.0, 1.0}));
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(24);
    const uint32_t rate = 8000;
    f.write(reinterpret_cast<const char*>(&rate), 4);
    f.close();
    CHECK_THROWS_WITH_AS(read_wav(path), doctest::Contains("rate"),
                         std::runtime_error);
  }
  SUBCASE("wrong bit depth rejected") {
    write_wav(path, make({0.0, 1.0}));
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(34);
    const char bits[2] = {8, 0};
    f.write(bits, 2);
    f.close();
    CHECK_THROWS_WITH_AS(read_wav(path), doctest::Contains("bit depth"),
                         std::runtime_error);
  }
  SUBCASE("non-PCM encoding rejected") {
    write_wav(path, make({0.0, 1.0}));
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(20);
    const char tag[2] = {3, 0};
    f.write(tag, 2);
    f.close();
    CHECK_THROWS_WITH_AS(read_wav(path), doctest::Contains("encoding"),
                         std::runtime_error);
  }
}

TEST_CASE("missing file reports the path") {
  CHECK_THROWS_WITH_AS(read_wav("/no/such/file.wav"),
                       doctest::Contains("/no/such/file.wav"),
                       std::runtime_error);
}
