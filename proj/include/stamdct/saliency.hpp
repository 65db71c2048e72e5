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

#include <string>
#include <vector>

#include "stamdct/nets.hpp"
#include "stamdct/types.hpp"

namespace stamdct {

/// Layer-CAM saliency over one convolutional layer. values is the raw map Z,
/// normalized is min-max scaled to [0, 1] (all zeros when Z is constant).
/// Grids are time x frequency.
struct SaliencyMap {
  Mat values;
  Mat normalized;
  std::string layer;
  std::string speaker;
  double score = 0.0;
};

/// Z = relu(sum_k relu(dA_k) .* A_k), elementwise over the layer's grid.
Mat layer_cam_core(const std::vector<Mat>& maps, const std::vector<Mat>& grads);

/// Min-max normalization to [0, 1]; a constant input maps to all zeros.
Mat minmax_normalize(const Mat& z);

/// Saliency of the verification score s(profile, x) at a convolutional layer.
/// layer may be a registry name or "last-conv".
SaliencyMap layer_cam(const EmbeddingModel& m, const Vec& x,
                      const SpeakerProfile& profile,
                      const std::string& layer = "last-conv");

/// 1 - cosine similarity of the flattened normalized maps: 0 for identical
/// attention, 1 for disjoint. A pair of all-zero maps counts as identical;
/// one-sided zero counts as disjoint.
double saliency_shift(const SaliencyMap& a, const SaliencyMap& b);

/// 8-bit grayscale PGM (P5), pixel = round(255 * normalized); time runs along
/// x, frequency along y bottom-up.
void render_pgm(const SaliencyMap& map, const std::string& path);

}  // namespace stamdct
