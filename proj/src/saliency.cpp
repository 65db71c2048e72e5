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

#include "stamdct/saliency.hpp"

#include <cmath>
#include <fstream>

namespace stamdct {

namespace {

// conv activations are stored channels x positions with row-major (time x
// freq) flattening; rebuild the per-channel grids.
std::vector<Mat> unflatten(const Mat& channels, int h, int w) {
  std::vector<Mat> maps(static_cast<size_t>(channels.rows()));
  for (Index c = 0; c < channels.rows(); ++c) {
    Mat m(h, w);
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j)
        m(i, j) = channels(c, static_cast<Index>(i) * w + j);
    maps[static_cast<size_t>(c)] = std::move(m);
  }
  return maps;
}

}  // namespace

Mat layer_cam_core(const std::vector<Mat>& maps,
                   const std::vector<Mat>& grads) {
  if (maps.empty() || maps.size() != grads.size())
    throw std::invalid_argument("layer_cam_core: channel count mismatch");
  Mat z = Mat::Zero(maps[0].rows(), maps[0].cols());
  for (size_t k = 0; k < maps.size(); ++k) {
    if (maps[k].rows() != z.rows() || maps[k].cols() != z.cols() ||
        grads[k].rows() != z.rows() || grads[k].cols() != z.cols())
      throw std::invalid_argument("layer_cam_core: grid shape mismatch");
    z.array() += grads[k].array().max(0.0) * maps[k].array();
  }
  return z.array().max(0.0);
}

Mat minmax_normalize(const Mat& z) {
  const double lo = z.minCoeff();
  const double hi = z.maxCoeff();
  if (hi - lo <= 0.0) return Mat::Zero(z.rows(), z.cols());
  return (z.array() - lo) / (hi - lo);
}

SaliencyMap layer_cam(const EmbeddingModel& m, const Vec& x,
                      const SpeakerProfile& profile, const std::string& layer) {
  const std::string name = layer == "last-conv" ? m.last_conv_layer() : layer;
  const LayerInfo* info = nullptr;
  for (const LayerInfo& l : m.layers())
    if (l.name == name) info = &l;
  if (!info)
    throw std::invalid_argument("layer_cam: model has no layer named " + name);
  if (!info->convolutional)
    throw std::invalid_argument("layer_cam: layer " + name +
                                " is not convolutional");

  ActivationCache cache;
  const Vec e = m.embed(x, &cache);
  const double y = score(profile.embedding, e);

  BackwardOptions opt;
  opt.input_grad = false;
  opt.layer_grads = true;
  const Gradients g = m.backward(cache, profile.embedding, opt);

  const bool first = name == "conv1";
  const Mat& act = first ? cache.l1_post : cache.l2_post;
  const Mat& dact = first ? g.l1_post_grad : g.l2_post_grad;
  const int h = first ? cache.h1 : cache.h2;
  const int w = first ? cache.w1 : cache.w2;

  SaliencyMap map;
  map.layer = name;
  map.speaker = profile.speaker;
  map.score = y;
  map.values = layer_cam_core(unflatten(act, h, w), unflatten(dact, h, w));
  map.normalized = minmax_normalize(map.values);
  return map;
}

double saliency_shift(const SaliencyMap& a, const SaliencyMap& b) {
  if (a.normalized.rows() != b.normalized.rows() ||
      a.normalized.cols() != b.normalized.cols())
    throw std::invalid_argument("saliency_shift: map shape mismatch");
  const double na = a.normalized.norm();
  const double nb = b.normalized.norm();
  if (na == 0.0 && nb == 0.0) return 0.0;
  if (na == 0.0 || nb == 0.0) return 1.0;
  const double cos =
      (a.normalized.array() * b.normalized.array()).sum() / (na * nb);
  return 1.0 - cos;
}

void render_pgm(const SaliencyMap& map, const std::string& path) {
  const int h = static_cast<int>(map.normalized.rows());   // time
  const int w = static_cast<int>(map.normalized.cols());   // frequency
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("render_pgm: cannot open " + path);
  // Width = time, height = frequency, low bands at the bottom.
  out << "P5\n" << h << " " << w << "\n255\n";
  for (int row = 0; row < w; ++row) {
    for (int col = 0; col < h; ++col) {
      const double v = map.normalized(col, w - 1 - row);
      out.put(static_cast<char>(
          static_cast<unsigned char>(std::lround(255.0 * v))));
    }
  }
  if (!out) throw std::runtime_error("render_pgm: write failed for " + path);
}

}  // namespace stamdct
