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

#include <cmath>
#include <fstream>

#include "stamdct/dsp.hpp"
#include "support/oracles.hpp"

using namespace stamdct;
using oracles::rel_err;

namespace {

// Test-local Bessel I0, independent of the library's.
double i0_ref(double x) {
  double sum = 1.0, term = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= (x * x / 4.0) / (k * k);
    sum += term;
  }
  return sum;
}

Vec random_signal(Index n, uint64_t seed, double scale = 1000.0) {
  return oracles::random_vec(n, seed, -scale, scale);
}

}  // namespace

TEST_CASE("kbd window satisfies Princen-Bradley for a range of shapes") {
  for (int w : {4, 8, 64, 256, 1024}) {
    for (double beta : {0.0, 2.0, 4.0, 9.0}) {
      const Window win = kbd_window(w, beta);
      CHECK(win.length() == w);
      CHECK(princen_bradley_error(win) < 1e-9);
      CHECK(win.coeffs.minCoeff() >= 0.0);
      CHECK(win.coeffs.maxCoeff() <= 1.0 + 1e-12);
      // Mirror symmetry.
      for (int n = 0; n < w / 2; ++n)
        CHECK(win.coeffs[n] == doctest::Approx(win.coeffs[w - 1 - n]).epsilon(0));
    }
  }
}

TEST_CASE("kbd window matches a direct cumulative-Kaiser evaluation") {
  const int w = 8;
  const double beta = 4.0;
  const Window win = kbd_window(w, beta);
  // Direct formula: kaiser[i] = I0(beta sqrt(1 - (2i/half - 1)^2)) / I0(beta),
  // h(n) = sqrt(cumsum[n] / cumsum[half]).
  const int half = 4;
  double cum[5];
  double acc = 0.0;
  for (int i = 0; i <= half; ++i) {
    const double t = 2.0 * i / half - 1.0;
    acc += i0_ref(beta * std::sqrt(1.0 - t * t)) / i0_ref(beta);
    cum[i] = acc;
  }
  for (int n = 0; n < half; ++n) {
    const double expect = std::sqrt(cum[n] / cum[half]);
    CHECK(rel_err(win.coeffs[n], expect) < 1e-14);
    CHECK(rel_err(win.coeffs[w - 1 - n], expect) < 1e-14);
  }
}

TEST_CASE("kbd window rejects bad arguments") {
  CHECK_THROWS_AS(kbd_window(7, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(kbd_window(2, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(kbd_window(8, -1.0), std::invalid_argument);
}

TEST_CASE("mdct of the zero waveform is zero") {
  const MdctPlan plan(kbd_window(64, 4.0));
  const SpectrumFrames s = plan.forward(Vec::Zero(256));
  CHECK(s.coeffs.isZero(0.0));
  CHECK(s.bins() == 32);
}

TEST_CASE("mdct is linear") {
  const MdctPlan plan(kbd_window(128, 4.0));
  const Vec x = random_signal(1000, 1);
  const Vec y = random_signal(1000, 2);
  const double a = 2.75, b = -0.4;
  const Mat lhs = plan.forward(a * x + b * y).coeffs;
  const Mat rhs = a * plan.forward(x).coeffs + b * plan.forward(y).coeffs;
  CHECK((lhs - rhs).norm() / rhs.norm() < 1e-12);
}

TEST_CASE("mdct frame matches direct kernel summation") {
  // One frame of ones with a rectangular window; the middle frame of the
  // padded layout covers the raw signal exactly.
  const int w = 8;
  const MdctPlan plan(rect_window(w));
  const SpectrumFrames s = plan.forward(Vec::Ones(w));
  REQUIRE(s.frames() == 3);
  for (int k = 0; k < w / 2; ++k) {
    double want = 0.0;
    for (int n = 0; n < w; ++n)
      want += std::cos(M_PI * (2.0 * n + 1.0 + w / 2.0) * (2.0 * k + 1.0) /
                       (2.0 * w));
    CHECK(std::abs(s.coeffs(1, k) - want) < 1e-12);
  }
}

TEST_CASE("mdct/imdct round trip is exact to 1e-6 on the integer scale") {
  const MdctPlan plan(kbd_window(1024, 4.0));
  for (uint64_t seed = 0; seed < 4; ++seed) {
    const Index n = 1024 + static_cast<Index>(seed) * 3517;
    const Vec x = random_signal(n, seed, 30000.0);
    const Vec r = plan.inverse(plan.forward(x));
    REQUIRE(r.size() == n);
    CHECK((r - x).lpNorm<Eigen::Infinity>() < 1e-6);
  }
}

TEST_CASE("imdct of zero frames is the zero waveform and is linear") {
  const MdctPlan plan(kbd_window(64, 4.0));
  SpectrumFrames s = plan.forward(random_signal(500, 3));
  SpectrumFrames z = s;
  z.coeffs.setZero();
  CHECK(plan.inverse(z).isZero(0.0));
  SpectrumFrames s2 = s;
  s2.coeffs *= 3.25;
  CHECK((plan.inverse(s2) - 3.25 * plan.inverse(s)).norm() < 1e-9);
}

TEST_CASE("inverse scale calibrates to 4/W") {
  for (int w : {64, 256, 1024}) {
    const MdctPlan plan(kbd_window(w, 4.0));
    CHECK(rel_err(plan.inverse_scale(), 4.0 / w) < 1e-9);
  }
}

TEST_CASE("imdct rejects windows that break Princen-Bradley") {
  const MdctPlan plan(kbd_window(16, 4.0));
  SpectrumFrames s = plan.forward(random_signal(64, 4));
  s.window = hamming_window(16);
  CHECK_THROWS_AS(imdct(s), std::invalid_argument);
}

TEST_CASE("imdct rejects a bin-count mismatch") {
  const MdctPlan plan(kbd_window(16, 4.0));
  SpectrumFrames s = plan.forward(random_signal(64, 5));
  s.coeffs.conservativeResize(s.coeffs.rows(), 5);
  CHECK_THROWS_AS(plan.inverse(s), std::invalid_argument);
}

TEST_CASE("mdct rejects inputs shorter than the window") {
  const MdctPlan plan(kbd_window(64, 4.0));
  CHECK_THROWS_AS(plan.forward(Vec::Zero(63)), std::invalid_argument);
}

TEST_CASE("mdct adjoint identity") {
  const MdctPlan plan(kbd_window(128, 4.0));
  for (uint64_t seed = 10; seed < 13; ++seed) {
    const Vec x = random_signal(700, seed);
    SpectrumFrames y = plan.forward(random_signal(700, seed + 100));
    y.coeffs = oracles::random_vec(y.coeffs.size(), seed + 200).reshaped(
        y.coeffs.rows(), y.coeffs.cols());
    const double lhs = (plan.forward(x).coeffs.array() * y.coeffs.array()).sum();
    const double rhs = x.dot(plan.forward_adjoint(y));
    CHECK(rel_err(lhs, rhs) < 1e-9);
  }
}

TEST_CASE("imdct adjoint identity") {
  const MdctPlan plan(kbd_window(128, 4.0));
  for (uint64_t seed = 20; seed < 23; ++seed) {
    SpectrumFrames s = plan.forward(random_signal(900, seed));
    s.coeffs = oracles::random_vec(s.coeffs.size(), seed + 100).reshaped(
        s.coeffs.rows(), s.coeffs.cols());
    const Vec y = random_signal(900, seed + 200);
    const double lhs = plan.inverse(s).dot(y);
    const SpectrumFrames adj = plan.inverse_adjoint(y, 900);
    const double rhs = (s.coeffs.array() * adj.coeffs.array()).sum();
    CHECK(rel_err(lhs, rhs) < 1e-9);
  }
}

TEST_CASE("adjoint of zero is zero") {
  const MdctPlan plan(kbd_window(64, 4.0));
  SpectrumFrames z = plan.forward(Vec::Zero(256));
  CHECK(plan.forward_adjoint(z).isZero(0.0));
  CHECK(plan.inverse_adjoint(Vec::Zero(256), 256).coeffs.isZero(0.0));
}

TEST_CASE("free-function wrappers agree with the plans") {
  const Window win = kbd_window(64, 4.0);
  Waveform w;
  w.samples = random_signal(300, 30);
  const SpectrumFrames s = mdct(w, win);
  const Waveform r = imdct(s);
  CHECK((r.samples - w.samples).lpNorm<Eigen::Infinity>() < 1e-6);
  const SpectrumFrames adj = imdct_adjoint(w, win);
  CHECK(adj.frames() == s.frames());
}

TEST_CASE("dct round trip, DC property and Parseval") {
  const DctPlan plan(16);
  const Vec x = random_signal(100, 40);  // forces tail zero-padding
  const Vec r = plan.inverse(plan.forward(x));
  REQUIRE(r.size() == x.size());
  CHECK((r - x).lpNorm<Eigen::Infinity>() < 1e-9);

  // Constant frame concentrates in bin 0.
  const SpectrumFrames c = plan.forward(Vec::Ones(16));
  CHECK(std::abs(c.coeffs(0, 0) - std::sqrt(16.0)) < 1e-12);
  CHECK(c.coeffs.row(0).tail(15).lpNorm<Eigen::Infinity>() < 1e-12);

  // Orthonormality: norms match (zero padding adds nothing).
  const SpectrumFrames s = plan.forward(x);
  CHECK(rel_err(s.coeffs.norm(), x.norm()) < 1e-12);
}

TEST_CASE("dct adjoint equals its inverse") {
  const DctPlan plan(32);
  const Vec x = random_signal(120, 50);
  SpectrumFrames g = plan.forward(x);
  g.coeffs = oracles::random_vec(g.coeffs.size(), 51).reshaped(
      g.coeffs.rows(), g.coeffs.cols());
  const Vec y = random_signal(120, 52);
  const double lhs = (plan.forward(y).coeffs.array() * g.coeffs.array()).sum();
  const double rhs = y.dot(plan.forward_adjoint(g));
  CHECK(rel_err(lhs, rhs) < 1e-9);
}

TEST_CASE("logmel white noise is exactly normalized by CMVN") {
  LogMelPlan plan;
  Vec x(16000);
  Rng rng(60);
  for (Index i = 0; i < x.size(); ++i) x[i] = 500.0 * rng.gaussian();
  const FeatureMap f = plan.features(x);
  for (int j = 0; j < 40; ++j) {
    const double mean = f.col(j).mean();
    const double var = (f.col(j).array() - mean).square().mean();
    CHECK(std::abs(mean) < 1e-6);
    CHECK(std::abs(var - 1.0) < 1e-3);
  }
}

TEST_CASE("a pure 1 kHz tone peaks in the mel band that contains 1 kHz") {
  LogMelPlan plan;
  Vec x(8000);
  for (Index i = 0; i < x.size(); ++i)
    x[i] = 3000.0 * std::sin(2.0 * M_PI * 1000.0 * i / kSampleRate);
  const FeatureMap f = plan.features(x, nullptr, /*cmvn=*/false);

  // Independent filterbank geometry: find the band whose triangle responds
  // most at 1 kHz.
  auto to_mel = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  auto from_mel = [](double m) {
    return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0);
  };
  double edges[42];
  for (int j = 0; j < 42; ++j)
    edges[j] = from_mel(to_mel(0.0) + (to_mel(8000.0) - to_mel(0.0)) * j / 41.0);
  int expect = 0;
  double best = -1.0;
  for (int j = 0; j < 40; ++j) {
    double wgt = 0.0;
    if (1000.0 >= edges[j] && 1000.0 <= edges[j + 1])
      wgt = (1000.0 - edges[j]) / (edges[j + 1] - edges[j]);
    else if (1000.0 > edges[j + 1] && 1000.0 <= edges[j + 2])
      wgt = (edges[j + 2] - 1000.0) / (edges[j + 2] - edges[j + 1]);
    if (wgt > best) {
      best = wgt;
      expect = j;
    }
  }
  Index got = 0;
  Vec mean = f.colwise().mean();
  mean.maxCoeff(&got);
  CHECK(static_cast<int>(got) == expect);
}

TEST_CASE("zero waveform features are all log(guard) before CMVN") {
  LogMelPlan plan;
  const FeatureMap f = plan.features(Vec::Zero(1600), nullptr, false);
  CHECK((f.array() - std::log(1e-6)).abs().maxCoeff() < 1e-12);
}

TEST_CASE("logmel rejects too-short input") {
  LogMelPlan plan;
  CHECK_THROWS_AS(plan.features(Vec::Zero(399)), std::invalid_argument);
}

TEST_CASE("logmel backward matches finite differences") {
  LogMelPlan plan;
  const Vec x = random_signal(1600, 70, 2000.0);
  LogMelCache cache;
  const FeatureMap f = plan.features(x, &cache);
  const Mat g = oracles::random_vec(f.size(), 71).reshaped(f.rows(), f.cols());
  const Vec dx = plan.backward(cache, g);
  auto scalar = [&](const Vec& q) {
    return (plan.features(q).array() * g.array()).sum();
  };
  Rng rng(72);
  for (int probe = 0; probe < 12; ++probe) {
    const Index i = rng.uniform_int(static_cast<int>(x.size()));
    const double fd = oracles::central_difference(scalar, x, i, 1e-2);
    CHECK(rel_err(dx[i], fd, 1e-8) < 2e-4);
  }
}

TEST_CASE("csv dump is frame-major") {
  Mat m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  const std::string path = "/tmp/stamdct_frames.csv";
  write_matrix_csv(m, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "1,2,3");
  std::getline(in, line);
  CHECK(line == "4,5,6");
}
