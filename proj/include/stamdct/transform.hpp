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

#pragma once

#include <memory>

#include "stamdct/dsp.hpp"
#include "stamdct/types.hpp"

namespace stamdct {

enum class TransformVariant { kMdct, kDct };

/// Parameters of the stochastic spectrum transformation
/// T(x) = inverse(forward(x + xi) .* M) with xi ~ N(0, sigma^2 I) in the time
/// domain and M ~ U(1-rho, 1+rho) per coefficient cell.
struct SpectrumTransformParams {
  double sigma = 44.0;
  double rho = 0.75;
  Window window;  // inner transform window; empty -> KBD, W=1024, beta=4
  TransformVariant variant = TransformVariant::kMdct;
};

/// One draw of the transformation randomness.
struct TransformSample {
  Vec noise;  // xi, waveform-shaped
  Mat mask;   // M, frame-grid-shaped
};

/// Plan-holding applier; builds the inner transform kernels once.
class SpectrumTransform {
 public:
  explicit SpectrumTransform(SpectrumTransformParams params);

  const SpectrumTransformParams& params() const { return params_; }
  /// True when sigma == 0 and rho == 0; T then degenerates to the exact
  /// identity (the transform pair is skipped entirely).
  bool identity() const { return params_.sigma == 0.0 && params_.rho == 0.0; }

  int frame_count(Index input_length) const;
  int bins() const;

  /// Deterministic draw: the same seed yields the same (xi, M) bit for bit.
  /// xi is filled first, then M in frame-major order.
  TransformSample sample(uint64_t seed, Index input_length) const;

  /// T(x) for a fixed sample. The output is not clamped; clamping belongs to
  /// the attacker's clip step.
  Vec apply(const Vec& x, const TransformSample& s) const;
  /// The linear part of T: inverse(forward(x) .* M), no noise.
  Vec apply_linear(const Vec& x, const TransformSample& s) const;
  /// Exact transpose of the linear part; since d(x + xi)/dx = I the noise
  /// contributes nothing to the Jacobian.
  Vec apply_adjoint(const Vec& g, const TransformSample& s) const;

 private:
  void check_shapes(Index input_length, const TransformSample& s) const;

  SpectrumTransformParams params_;
  std::unique_ptr<MdctPlan> mdct_;
  std::unique_ptr<DctPlan> dct_;
};

/// Seed for the (t, i)-th inner transform draw of an attack run.
inline uint64_t transform_seed(uint64_t base, int iteration, int draw) {
  return mix_seed(base, static_cast<uint64_t>(iteration),
                  static_cast<uint64_t>(draw));
}

TransformSample sample_transform(const SpectrumTransformParams& params,
                                 uint64_t seed, Index input_length);
Vec apply_transform(const Vec& x, const TransformSample& s,
                    const SpectrumTransformParams& params);
Vec apply_transform_adjoint(const Vec& g, const TransformSample& s,
                            const SpectrumTransformParams& params);

}  // namespace stamdct
