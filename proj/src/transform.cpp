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

#include "stamdct/transform.hpp"

namespace stamdct {

SpectrumTransform::SpectrumTransform(SpectrumTransformParams params)
    : params_(std::move(params)) {
  if (params_.sigma < 0.0)
    throw std::invalid_argument("SpectrumTransform: sigma must be >= 0");
  if (params_.rho < 0.0 || params_.rho >= 1.0)
    throw std::invalid_argument("SpectrumTransform: rho must be in [0, 1)");
  if (params_.window.length() == 0) params_.window = kbd_window(1024, 4.0);
  if (params_.variant == TransformVariant::kMdct) {
    mdct_ = std::make_unique<MdctPlan>(params_.window);
  } else {
    dct_ = std::make_unique<DctPlan>(params_.window.length());
  }
}

int SpectrumTransform::frame_count(Index input_length) const {
  return mdct_ ? mdct_->frame_count(input_length)
               : dct_->frame_count(input_length);
}

int SpectrumTransform::bins() const {
  return mdct_ ? mdct_->bins() : dct_->frame_length();
}

TransformSample SpectrumTransform::sample(uint64_t seed,
                                          Index input_length) const {
  TransformSample s;
  const int frames = frame_count(input_length);
  const int nb = bins();
  if (identity()) {
    s.noise = Vec::Zero(input_length);
    s.mask = Mat::Ones(frames, nb);
    return s;
  }
  Rng rng(seed);
  s.noise.resize(input_length);
  for (Index i = 0; i < input_length; ++i)
    s.noise[i] = params_.sigma * rng.gaussian();
  s.mask.resize(frames, nb);
  const double lo = 1.0 - params_.rho, hi = 1.0 + params_.rho;
  for (int f = 0; f < frames; ++f)
    for (int b = 0; b < nb; ++b) s.mask(f, b) = rng.uniform(lo, hi);
  return s;
}

void SpectrumTransform::check_shapes(Index input_length,
                                     const TransformSample& s) const {
  if (s.noise.size() != input_length)
    throw std::invalid_argument("SpectrumTransform: noise length " +
                                std::to_string(s.noise.size()) +
                                " does not match input length " +
                                std::to_string(input_length));
  if (s.mask.rows() != frame_count(input_length) || s.mask.cols() != bins())
    throw std::invalid_argument("SpectrumTransform: mask shape mismatch");
}

Vec SpectrumTransform::apply(const Vec& x, const TransformSample& s) const {
  if (identity()) return x;
  check_shapes(x.size(), s);
  if (mdct_) {
    SpectrumFrames f = mdct_->forward(x + s.noise);
    f.coeffs.array() *= s.mask.array();
    return mdct_->inverse(f);
  }
  SpectrumFrames f = dct_->forward(x + s.noise);
  f.coeffs.array() *= s.mask.array();
  return dct_->inverse(f);
}

Vec SpectrumTransform::apply_linear(const Vec& x,
                                    const TransformSample& s) const {
  if (identity()) return x;
  check_shapes(x.size(), s);
  if (mdct_) {
    SpectrumFrames f = mdct_->forward(x);
    f.coeffs.array() *= s.mask.array();
    return mdct_->inverse(f);
  }
  SpectrumFrames f = dct_->forward(x);
  f.coeffs.array() *= s.mask.array();
  return dct_->inverse(f);
}

Vec SpectrumTransform::apply_adjoint(const Vec& g,
                                     const TransformSample& s) const {
  if (identity()) return g;
  check_shapes(g.size(), s);
  if (mdct_) {
    SpectrumFrames f = mdct_->inverse_adjoint(g, g.size());
    f.coeffs.array() *= s.mask.array();
    return mdct_->forward_adjoint(f);
  }
  SpectrumFrames f = dct_->inverse_adjoint(g, g.size());
  f.coeffs.array() *= s.mask.array();
  return dct_->forward_adjoint(f);
}

TransformSample sample_transform(const SpectrumTransformParams& params,
                                 uint64_t seed, Index input_length) {
  return SpectrumTransform(params).sample(seed, input_length);
}

Vec apply_transform(const Vec& x, const TransformSample& s,
                    const SpectrumTransformParams& params) {
  return SpectrumTransform(params).apply(x, s);
}

Vec apply_transform_adjoint(const Vec& g, const TransformSample& s,
                            const SpectrumTransformParams& params) {
  return SpectrumTransform(params).apply_adjoint(g, s);
}

}  // namespace stamdct
