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

// Independent reference computations for the test and acceptance suites.
// Everything here is deliberately naive (full recounts, O(n^2) sweeps,
// direct-summation transforms) and never calls into the code it checks.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "stamdct/metrics.hpp"
#include "stamdct/types.hpp"

namespace oracles {

using stamdct::Index;
using stamdct::Mat;
using stamdct::ScoreSet;
using stamdct::Vec;

inline double rel_err(double got, double want, double floor = 1e-12) {
  const double denom = std::max({std::abs(got), std::abs(want), floor});
  return std::abs(got - want) / denom;
}

// Brute-force threshold sweep: recount FAR/FRR for every candidate threshold
// from scratch.
struct SweepPoint {
  double threshold, far, frr;
};

inline std::vector<SweepPoint> brute_sweep(const ScoreSet& s) {
  std::vector<double> all;
  all.insert(all.end(), s.target.begin(), s.target.end());
  all.insert(all.end(), s.nontarget.begin(), s.nontarget.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<double> cand;
  cand.push_back(all.front() - 1.0);
  for (size_t i = 0; i + 1 < all.size(); ++i)
    cand.push_back(0.5 * (all[i] + all[i + 1]));
  cand.push_back(all.back() + 1.0);
  std::vector<SweepPoint> pts;
  for (double th : cand) {
    int fa = 0, fr = 0;
    for (double v : s.nontarget)
      if (v > th) ++fa;
    for (double v : s.target)
      if (v <= th) ++fr;
    pts.push_back({th, static_cast<double>(fa) / s.nontarget.size(),
                   static_cast<double>(fr) / s.target.size()});
  }
  return pts;
}

inline double brute_eer(const ScoreSet& s, double* threshold = nullptr) {
  const auto pts = brute_sweep(s);
  for (size_t k = 0; k < pts.size(); ++k) {
    const double d = pts[k].far - pts[k].frr;
    if (d == 0.0) {
      if (threshold) *threshold = pts[k].threshold;
      return pts[k].far;
    }
    if (d < 0.0) {
      const double da = pts[k - 1].far - pts[k - 1].frr;
      const double t = da / (da - d);
      if (threshold)
        *threshold =
            pts[k - 1].threshold + t * (pts[k].threshold - pts[k - 1].threshold);
      return pts[k - 1].frr + t * (pts[k].frr - pts[k - 1].frr);
    }
  }
  return pts.back().far;
}

inline double brute_min_dcf(const ScoreSet& s, double p_tar = 0.05,
                            double c_miss = 1.0, double c_fa = 1.0) {
  const double norm = std::min(c_miss * p_tar, c_fa * (1.0 - p_tar));
  double best = std::numeric_limits<double>::infinity();
  for (const SweepPoint& p : brute_sweep(s))
    best = std::min(best,
                    (c_miss * p.frr * p_tar + c_fa * p.far * (1.0 - p_tar)) /
                        norm);
  return best;
}

// Naive DFT magnitude of a full signal, bins 0..n/2.
inline Vec dft_magnitude(const Vec& x) {
  const Index n = x.size();
  Vec mag(n / 2 + 1);
  for (Index k = 0; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (Index t = 0; t < n; ++t) {
      const double a = 2.0 * M_PI * k * t / static_cast<double>(n);
      re += x[t] * std::cos(a);
      im -= x[t] * std::sin(a);
    }
    mag[k] = std::hypot(re, im);
  }
  return mag;
}

// Central finite difference of a scalar function along one coordinate.
template <typename F>
double central_difference(F&& f, Vec x, Index i, double h) {
  const double orig = x[i];
  x[i] = orig + h;
  const double up = f(x);
  x[i] = orig - h;
  const double down = f(x);
  x[i] = orig;
  return (up - down) / (2.0 * h);
}

inline Vec random_vec(Index n, uint64_t seed, double lo = -1.0, double hi = 1.0) {
  stamdct::Rng rng(seed);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

}  // namespace oracles
