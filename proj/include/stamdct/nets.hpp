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
#include <string>
#include <vector>

#include "stamdct/dsp.hpp"
#include "stamdct/types.hpp"

namespace stamdct {

enum class Arch : uint32_t { kConvNetA = 1, kFrameNetB = 2 };

/// Spectrogram model: log-mel frontend, two strided 2-D convolutions with
/// ReLU, mean/std statistics pooling, linear head, L2 normalization.
struct ConvNetADims {
  int n_mels = 40;
  int c1 = 8;
  int c2 = 16;
  int kernel = 3;
  int stride = 2;
  int embed = 64;
};

/// Raw-waveform model: frame-wise two-layer MLP over W-sample frames,
/// statistics pooling over frames, linear head, L2 normalization.
struct FrameNetBDims {
  int frame_length = 256;
  int hop = 128;
  int h1 = 32;
  int h2 = 32;
  int embed = 64;
};

struct LayerInfo {
  std::string name;
  bool convolutional = false;
};

/// Everything one forward pass leaves behind: layer inputs/outputs for the
/// exact backward pass and the activation maps Layer-CAM reads.
struct ActivationCache {
  Vec input;             // raw waveform; empty for trunk-only passes
  LogMelCache frontend;  // ConvNet-A only
  Mat trunk_input;       // A: features (T x n_mels); B: frames (W x F), scaled
  Mat l1_cols, l2_cols;  // A: im2col buffers
  Mat l1_pre, l1_post;   // channels x positions
  Mat l2_pre, l2_post;
  int h1 = 0, w1 = 0, h2 = 0, w2 = 0;  // conv output grids (A), time x freq
  Vec pool_mean, pool_sd;
  Vec pooled;
  Vec pre_embed;
  Vec embedding;
  double embed_norm = 0.0;
};

struct BackwardOptions {
  bool input_grad = true;
  bool param_grad = false;
  bool layer_grads = false;
};

struct Gradients {
  Vec input;
  Vec params;
  Mat l1_post_grad;  // d upstream / d A at the post-activation maps
  Mat l2_post_grad;
};

class EmbeddingModel {
 public:
  /// Empty shell; use the factories or load() to get a usable model.
  EmbeddingModel() = default;

  static EmbeddingModel conv_net_a(ConvNetADims dims = {});
  static EmbeddingModel frame_net_b(FrameNetBDims dims = {});
  static EmbeddingModel load(const std::string& path);
  void save(const std::string& path) const;

  Arch arch() const { return arch_; }
  std::string arch_name() const;
  int embedding_dim() const;
  Index param_count() const { return params_.size(); }
  const Vec& params() const { return params_; }
  Vec& params() { return params_; }
  void init_params(uint64_t seed);
  int min_samples() const;

  const std::vector<LayerInfo>& layers() const { return layers_; }
  /// Name of the last convolutional layer; throws if the architecture has
  /// none.
  std::string last_conv_layer() const;

  /// Frontend only: features for A, scaled frames for B.
  Mat preprocess(const Vec& x, LogMelCache* frontend = nullptr) const;
  /// Unit-norm speaker embedding. Deterministic for fixed input and params.
  Vec embed(const Vec& x, ActivationCache* cache = nullptr) const;
  /// Trunk-only forward from a preprocessed input (no input gradient later).
  Vec embed_preprocessed(const Mat& trunk_input, ActivationCache* cache) const;

  /// Exact chain-rule backward from an embedding-space gradient.
  Gradients backward(const ActivationCache& cache, const Vec& upstream,
                     const BackwardOptions& opt = {}) const;

  const ConvNetADims& conv_dims() const { return a_; }
  const FrameNetBDims& frame_dims() const { return b_; }
  const LogMelPlan& logmel_plan() const;

 private:
  void finish_setup();

  Arch arch_ = Arch::kConvNetA;
  ConvNetADims a_;
  FrameNetBDims b_;
  std::shared_ptr<const LogMelPlan> logmel_;
  Vec params_;
  std::vector<LayerInfo> layers_;
  Index off_w1_ = 0, off_b1_ = 0, off_w2_ = 0, off_b2_ = 0, off_wh_ = 0,
        off_bh_ = 0;
  Index w1_rows_ = 0, w1_cols_ = 0, w2_rows_ = 0, w2_cols_ = 0, wh_rows_ = 0,
        wh_cols_ = 0;
};

/// Gradient of `upstream . embedding` with respect to the raw waveform.
Vec input_gradient(const EmbeddingModel& m, const ActivationCache& cache,
                   const Vec& upstream);

/// Cosine similarity of unit-norm vectors (their dot product).
double score(const Vec& a, const Vec& b);

struct SpeakerProfile {
  std::string speaker;
  Vec embedding;  // unit norm
};

/// Mean of per-utterance embeddings, renormalized.
SpeakerProfile enroll(const EmbeddingModel& m,
                      const std::vector<Waveform>& utterances,
                      const std::string& speaker_id);

void save_profiles(const std::vector<SpeakerProfile>& profiles,
                   const std::string& path);
std::vector<SpeakerProfile> load_profiles(const std::string& path);

}  // namespace stamdct
