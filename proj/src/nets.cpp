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

#include "stamdct/nets.hpp"

#include <cstring>
#include <fstream>

namespace stamdct {

namespace {

constexpr char kModelMagic[8] = {'S', 'T', 'A', 'M', 'D', 'L', '0', '1'};
constexpr char kProfileMagic[8] = {'S', 'T', 'A', 'P', 'R', 'F', '0', '1'};
constexpr uint32_t kFileVersion = 1;
constexpr double kFrameScale = 1.0 / 32768.0;  // FrameNet input scaling
constexpr double kStdFloor = 1e-8;             // pooling variance guard
constexpr double kNormGuard = 1e-12;

// maps is channels x (H*W) with row-major spatial flattening.
Mat im2col(const Mat& maps, int H, int W, int C, int k, int s, int* Ho,
           int* Wo) {
  *Ho = (H - k) / s + 1;
  *Wo = (W - k) / s + 1;
  Mat cols(static_cast<Index>(k) * k * C,
           static_cast<Index>(*Ho) * (*Wo));
  for (int c = 0; c < C; ++c)
    for (int ki = 0; ki < k; ++ki)
      for (int kj = 0; kj < k; ++kj) {
        const Index r = (static_cast<Index>(c) * k + ki) * k + kj;
        for (int i = 0; i < *Ho; ++i)
          for (int j = 0; j < *Wo; ++j)
            cols(r, static_cast<Index>(i) * (*Wo) + j) =
                maps(c, static_cast<Index>(i * s + ki) * W + (j * s + kj));
      }
  return cols;
}

void col2im_add(Mat& dmaps, const Mat& dcols, int H, int W, int C, int k,
                int s, int Ho, int Wo) {
  for (int c = 0; c < C; ++c)
    for (int ki = 0; ki < k; ++ki)
      for (int kj = 0; kj < k; ++kj) {
        const Index r = (static_cast<Index>(c) * k + ki) * k + kj;
        for (int i = 0; i < Ho; ++i)
          for (int j = 0; j < Wo; ++j)
            dmaps(c, static_cast<Index>(i * s + ki) * W + (j * s + kj)) +=
                dcols(r, static_cast<Index>(i) * Wo + j);
      }
}

// Per-channel mean and std over positions; std = sqrt(var + floor) keeps the
// gradient finite for constant channels.
void stats_pool(const Mat& act, Vec* mean, Vec* sd, Vec* pooled) {
  const Index c = act.rows();
  const double p = static_cast<double>(act.cols());
  mean->resize(c);
  sd->resize(c);
  pooled->resize(2 * c);
  for (Index i = 0; i < c; ++i) {
    const double mu = act.row(i).mean();
    const double var = (act.row(i).array() - mu).square().sum() / p;
    (*mean)[i] = mu;
    (*sd)[i] = std::sqrt(var + kStdFloor);
    (*pooled)[i] = mu;
    (*pooled)[c + i] = (*sd)[i];
  }
}

Mat stats_pool_backward(const Mat& act, const Vec& mean, const Vec& sd,
                        const Vec& dpooled) {
  const Index c = act.rows();
  const double p = static_cast<double>(act.cols());
  Mat dact(act.rows(), act.cols());
  for (Index i = 0; i < c; ++i) {
    const double dmu = dpooled[i];
    const double dsd = dpooled[c + i];
    dact.row(i) = (dmu / p) +
                  (dsd / (p * sd[i])) * (act.row(i).array() - mean[i]);
  }
  return dact;
}

void write_bytes(std::ofstream& out, const void* p, size_t n) {
  out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_bytes(std::ifstream& in, void* p, size_t n, const std::string& what) {
  in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!in) throw std::runtime_error("truncated file while reading " + what);
}

void write_u32(std::ofstream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  write_bytes(out, b, 4);
}

uint32_t read_u32(std::ifstream& in, const std::string& what) {
  unsigned char b[4];
  read_bytes(in, b, 4, what);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) |
         (static_cast<uint32_t>(b[3]) << 24);
}

void write_u64(std::ofstream& out, uint64_t v) {
  write_u32(out, static_cast<uint32_t>(v & 0xffffffffULL));
  write_u32(out, static_cast<uint32_t>(v >> 32));
}

uint64_t read_u64(std::ifstream& in, const std::string& what) {
  const uint64_t lo = read_u32(in, what);
  const uint64_t hi = read_u32(in, what);
  return lo | (hi << 32);
}

void write_f64_block(std::ofstream& out, const double* p, size_t n) {
  // Little-endian doubles; byte-swap would be needed on big-endian hosts.
  static_assert(sizeof(double) == 8);
  write_bytes(out, p, n * 8);
}

void read_f64_block(std::ifstream& in, double* p, size_t n,
                    const std::string& what) {
  read_bytes(in, p, n * 8, what);
}

}  // namespace

EmbeddingModel EmbeddingModel::conv_net_a(ConvNetADims dims) {
  EmbeddingModel m;
  m.arch_ = Arch::kConvNetA;
  m.a_ = dims;
  m.finish_setup();
  return m;
}

EmbeddingModel EmbeddingModel::frame_net_b(FrameNetBDims dims) {
  EmbeddingModel m;
  m.arch_ = Arch::kFrameNetB;
  m.b_ = dims;
  m.finish_setup();
  return m;
}

void EmbeddingModel::finish_setup() {
  if (arch_ == Arch::kConvNetA) {
    LogMelConfig lc;
    lc.n_mels = a_.n_mels;
    logmel_ = std::make_shared<LogMelPlan>(lc);
    const Index k2 = static_cast<Index>(a_.kernel) * a_.kernel;
    w1_rows_ = a_.c1;
    w1_cols_ = k2;
    w2_rows_ = a_.c2;
    w2_cols_ = k2 * a_.c1;
    wh_rows_ = a_.embed;
    wh_cols_ = 2 * a_.c2;
    layers_ = {{"conv1", true}, {"conv2", true}, {"head", false}};
  } else {
    w1_rows_ = b_.h1;
    w1_cols_ = b_.frame_length;
    w2_rows_ = b_.h2;
    w2_cols_ = b_.h1;
    wh_rows_ = b_.embed;
    wh_cols_ = 2 * b_.h2;
    layers_ = {{"fc1", false}, {"fc2", false}, {"head", false}};
  }
  off_w1_ = 0;
  off_b1_ = off_w1_ + w1_rows_ * w1_cols_;
  off_w2_ = off_b1_ + w1_rows_;
  off_b2_ = off_w2_ + w2_rows_ * w2_cols_;
  off_wh_ = off_b2_ + w2_rows_;
  off_bh_ = off_wh_ + wh_rows_ * wh_cols_;
  params_ = Vec::Zero(off_bh_ + wh_rows_);
}

std::string EmbeddingModel::arch_name() const {
  return arch_ == Arch::kConvNetA ? "conv-net-a" : "frame-net-b";
}

int EmbeddingModel::embedding_dim() const {
  return arch_ == Arch::kConvNetA ? a_.embed : b_.embed;
}

void EmbeddingModel::init_params(uint64_t seed) {
  Rng rng(seed);
  auto fill = [&](Index off, Index rows, Index cols) {
    const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
    for (Index i = 0; i < rows * cols; ++i)
      params_[off + i] = rng.uniform(-a, a);
  };
  fill(off_w1_, w1_rows_, w1_cols_);
  fill(off_w2_, w2_rows_, w2_cols_);
  fill(off_wh_, wh_rows_, wh_cols_);
  params_.segment(off_b1_, w1_rows_).setZero();
  params_.segment(off_b2_, w2_rows_).setZero();
  params_.segment(off_bh_, wh_rows_).setZero();
}

int EmbeddingModel::min_samples() const {
  if (arch_ == Arch::kConvNetA) {
    // Enough feature frames that both convolutions have output.
    const int t_min = a_.kernel + a_.stride * (a_.kernel - 1);
    const LogMelConfig& lc = logmel_->config();
    return lc.frame_length + (t_min - 1) * lc.hop;
  }
  return b_.frame_length;
}

std::string EmbeddingModel::last_conv_layer() const {
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it)
    if (it->convolutional) return it->name;
  throw std::invalid_argument(arch_name() +
                              " has no convolutional layer for saliency");
}

const LogMelPlan& EmbeddingModel::logmel_plan() const {
  if (arch_ != Arch::kConvNetA)
    throw std::invalid_argument("logmel_plan: " + arch_name() +
                                " has no log-mel frontend");
  return *logmel_;
}

Mat EmbeddingModel::preprocess(const Vec& x, LogMelCache* frontend) const {
  if (x.size() < min_samples())
    throw std::invalid_argument("embed: input of " + std::to_string(x.size()) +
                                " samples is below the " + arch_name() +
                                " minimum of " + std::to_string(min_samples()));
  if (arch_ == Arch::kConvNetA) return logmel_->features(x, frontend, true);
  const int flen = b_.frame_length;
  const int f_count =
      static_cast<int>((x.size() - flen) / b_.hop + 1);
  Mat frames(flen, f_count);
  for (int f = 0; f < f_count; ++f)
    frames.col(f) = x.segment(static_cast<Index>(f) * b_.hop, flen) * kFrameScale;
  return frames;
}

Vec EmbeddingModel::embed(const Vec& x, ActivationCache* cache) const {
  ActivationCache local;
  ActivationCache& c = cache ? *cache : local;
  c.input = x;
  Mat tin = (arch_ == Arch::kConvNetA) ? preprocess(x, &c.frontend)
                                       : preprocess(x, nullptr);
  return embed_preprocessed(tin, &c);
}

Vec EmbeddingModel::embed_preprocessed(const Mat& trunk_input,
                                       ActivationCache* cache) const {
  ActivationCache local;
  ActivationCache& c = cache ? *cache : local;
  c.trunk_input = trunk_input;
  const auto w1 = Eigen::Map<const Mat>(params_.data() + off_w1_, w1_rows_,
                                        w1_cols_);
  const auto b1 = params_.segment(off_b1_, w1_rows_);
  const auto w2 = Eigen::Map<const Mat>(params_.data() + off_w2_, w2_rows_,
                                        w2_cols_);
  const auto b2 = params_.segment(off_b2_, w2_rows_);
  const auto wh = Eigen::Map<const Mat>(params_.data() + off_wh_, wh_rows_,
                                        wh_cols_);
  const auto bh = params_.segment(off_bh_, wh_rows_);

  if (arch_ == Arch::kConvNetA) {
    const int t = static_cast<int>(trunk_input.rows());
    const int mels = static_cast<int>(trunk_input.cols());
    const int k = a_.kernel, s = a_.stride;
    if (t < a_.kernel + a_.stride * (a_.kernel - 1))
      throw std::invalid_argument("embed: too few feature frames for " +
                                  arch_name());
    // Single input channel, row-major spatial flattening (time x mel).
    Mat maps0(1, static_cast<Index>(t) * mels);
    for (int i = 0; i < t; ++i)
      for (int j = 0; j < mels; ++j)
        maps0(0, static_cast<Index>(i) * mels + j) = trunk_input(i, j);
    c.l1_cols = im2col(maps0, t, mels, 1, k, s, &c.h1, &c.w1);
    c.l1_pre = (w1 * c.l1_cols).colwise() + b1;
    c.l1_post = c.l1_pre.cwiseMax(0.0);
    c.l2_cols = im2col(c.l1_post, c.h1, c.w1, a_.c1, k, s, &c.h2, &c.w2);
    c.l2_pre = (w2 * c.l2_cols).colwise() + b2;
    c.l2_post = c.l2_pre.cwiseMax(0.0);
  } else {
    c.l1_pre = (w1 * trunk_input).colwise() + b1;
    c.l1_post = c.l1_pre.cwiseMax(0.0);
    c.l2_pre = (w2 * c.l1_post).colwise() + b2;
    c.l2_post = c.l2_pre.cwiseMax(0.0);
  }
  stats_pool(c.l2_post, &c.pool_mean, &c.pool_sd, &c.pooled);
  c.pre_embed = wh * c.pooled + bh;
  c.embed_norm = std::max(c.pre_embed.norm(), kNormGuard);
  c.embedding = c.pre_embed / c.embed_norm;
  return c.embedding;
}

Gradients EmbeddingModel::backward(const ActivationCache& cache,
                                   const Vec& upstream,
                                   const BackwardOptions& opt) const {
  if (upstream.size() != embedding_dim())
    throw std::invalid_argument("backward: upstream gradient dimension " +
                                std::to_string(upstream.size()) +
                                " does not match embedding dim " +
                                std::to_string(embedding_dim()));
  if (cache.embedding.size() != embedding_dim())
    throw std::invalid_argument("backward: cache does not match this model");
  Gradients g;
  if (opt.param_grad) g.params = Vec::Zero(params_.size());

  const auto w1 = Eigen::Map<const Mat>(params_.data() + off_w1_, w1_rows_,
                                        w1_cols_);
  const auto w2 = Eigen::Map<const Mat>(params_.data() + off_w2_, w2_rows_,
                                        w2_cols_);
  const auto wh = Eigen::Map<const Mat>(params_.data() + off_wh_, wh_rows_,
                                        wh_cols_);

  // Through the L2 normalization: u = e * r.
  const Vec& e = cache.embedding;
  Vec du = (upstream - e * e.dot(upstream)) / cache.embed_norm;
  Vec dpooled = wh.transpose() * du;
  if (opt.param_grad) {
    Eigen::Map<Mat>(g.params.data() + off_wh_, wh_rows_, wh_cols_) =
        du * cache.pooled.transpose();
    g.params.segment(off_bh_, wh_rows_) = du;
  }

  Mat dpost2 = stats_pool_backward(cache.l2_post, cache.pool_mean,
                                   cache.pool_sd, dpooled);
  if (opt.layer_grads) g.l2_post_grad = dpost2;
  Mat dpre2 =
      (cache.l2_pre.array() > 0.0).select(dpost2, Mat::Zero(dpost2.rows(), dpost2.cols()));

  if (arch_ == Arch::kConvNetA) {
    if (opt.param_grad) {
      Eigen::Map<Mat>(g.params.data() + off_w2_, w2_rows_, w2_cols_) =
          dpre2 * cache.l2_cols.transpose();
      g.params.segment(off_b2_, w2_rows_) = dpre2.rowwise().sum();
    }
    Mat dcols2 = w2.transpose() * dpre2;
    Mat dpost1 = Mat::Zero(cache.l1_post.rows(), cache.l1_post.cols());
    col2im_add(dpost1, dcols2, cache.h1, cache.w1, a_.c1, a_.kernel, a_.stride,
               cache.h2, cache.w2);
    if (opt.layer_grads) g.l1_post_grad = dpost1;
    Mat dpre1 = (cache.l1_pre.array() > 0.0)
                    .select(dpost1, Mat::Zero(dpost1.rows(), dpost1.cols()));
    if (opt.param_grad) {
      Eigen::Map<Mat>(g.params.data() + off_w1_, w1_rows_, w1_cols_) =
          dpre1 * cache.l1_cols.transpose();
      g.params.segment(off_b1_, w1_rows_) = dpre1.rowwise().sum();
    }
    if (opt.input_grad) {
      const int t = static_cast<int>(cache.trunk_input.rows());
      const int mels = static_cast<int>(cache.trunk_input.cols());
      Mat dcols1 = w1.transpose() * dpre1;
      Mat dmaps0 = Mat::Zero(1, static_cast<Index>(t) * mels);
      col2im_add(dmaps0, dcols1, t, mels, 1, a_.kernel, a_.stride, cache.h1,
                 cache.w1);
      Mat dfeat(t, mels);
      for (int i = 0; i < t; ++i)
        for (int j = 0; j < mels; ++j)
          dfeat(i, j) = dmaps0(0, static_cast<Index>(i) * mels + j);
      if (cache.input.size() == 0)
        throw std::invalid_argument(
            "backward: input gradient requested but the cache has no raw "
            "waveform (trunk-only forward)");
      g.input = logmel_->backward(cache.frontend, dfeat);
    }
  } else {
    if (opt.param_grad) {
      Eigen::Map<Mat>(g.params.data() + off_w2_, w2_rows_, w2_cols_) =
          dpre2 * cache.l1_post.transpose();
      g.params.segment(off_b2_, w2_rows_) = dpre2.rowwise().sum();
    }
    Mat dpost1 = w2.transpose() * dpre2;
    if (opt.layer_grads) g.l1_post_grad = dpost1;
    Mat dpre1 = (cache.l1_pre.array() > 0.0)
                    .select(dpost1, Mat::Zero(dpost1.rows(), dpost1.cols()));
    if (opt.param_grad) {
      Eigen::Map<Mat>(g.params.data() + off_w1_, w1_rows_, w1_cols_) =
          dpre1 * cache.trunk_input.transpose();
      g.params.segment(off_b1_, w1_rows_) = dpre1.rowwise().sum();
    }
    if (opt.input_grad) {
      if (cache.input.size() == 0)
        throw std::invalid_argument(
            "backward: input gradient requested but the cache has no raw "
            "waveform (trunk-only forward)");
      Mat dframes = w1.transpose() * dpre1;  // frame_length x F
      g.input = Vec::Zero(cache.input.size());
      for (Index f = 0; f < dframes.cols(); ++f)
        g.input.segment(f * b_.hop, b_.frame_length) +=
            dframes.col(f) * kFrameScale;
    }
  }
  return g;
}

Vec input_gradient(const EmbeddingModel& m, const ActivationCache& cache,
                   const Vec& upstream) {
  BackwardOptions opt;
  opt.input_grad = true;
  return m.backward(cache, upstream, opt).input;
}

double score(const Vec& a, const Vec& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("score: dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  return a.dot(b);
}

SpeakerProfile enroll(const EmbeddingModel& m,
                      const std::vector<Waveform>& utterances,
                      const std::string& speaker_id) {
  if (utterances.empty())
    throw std::invalid_argument("enroll: no utterances for " + speaker_id);
  Vec sum = Vec::Zero(m.embedding_dim());
  for (const Waveform& w : utterances) sum += m.embed(w.samples);
  sum /= static_cast<double>(utterances.size());
  const double n = std::max(sum.norm(), kNormGuard);
  return SpeakerProfile{speaker_id, sum / n};
}

void EmbeddingModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("model save: cannot open " + path);
  write_bytes(out, kModelMagic, 8);
  write_u32(out, kFileVersion);
  write_u32(out, static_cast<uint32_t>(arch_));
  write_u32(out, static_cast<uint32_t>(embedding_dim()));
  if (arch_ == Arch::kConvNetA) {
    write_u32(out, 5);
    for (int v : {a_.n_mels, a_.c1, a_.c2, a_.kernel, a_.stride})
      write_u32(out, static_cast<uint32_t>(v));
  } else {
    write_u32(out, 4);
    for (int v : {b_.frame_length, b_.hop, b_.h1, b_.h2})
      write_u32(out, static_cast<uint32_t>(v));
  }
  write_u64(out, static_cast<uint64_t>(params_.size()));
  write_f64_block(out, params_.data(), static_cast<size_t>(params_.size()));
  if (!out) throw std::runtime_error("model save: write failed for " + path);
}

EmbeddingModel EmbeddingModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("model load: cannot open " + path);
  char magic[8];
  read_bytes(in, magic, 8, "model magic");
  if (std::memcmp(magic, kModelMagic, 8) != 0)
    throw std::runtime_error("model load: bad magic in " + path);
  const uint32_t version = read_u32(in, "version");
  if (version != kFileVersion)
    throw std::runtime_error("model load: unsupported version " +
                             std::to_string(version));
  const uint32_t arch = read_u32(in, "arch");
  const uint32_t embed = read_u32(in, "embedding dim");
  const uint32_t n_dims = read_u32(in, "dim count");
  std::vector<uint32_t> dims(n_dims);
  for (uint32_t i = 0; i < n_dims; ++i) dims[i] = read_u32(in, "dims");

  EmbeddingModel m;
  if (arch == static_cast<uint32_t>(Arch::kConvNetA)) {
    if (n_dims != 5) throw std::runtime_error("model load: bad conv-net-a dims");
    ConvNetADims d;
    d.n_mels = static_cast<int>(dims[0]);
    d.c1 = static_cast<int>(dims[1]);
    d.c2 = static_cast<int>(dims[2]);
    d.kernel = static_cast<int>(dims[3]);
    d.stride = static_cast<int>(dims[4]);
    d.embed = static_cast<int>(embed);
    m = conv_net_a(d);
  } else if (arch == static_cast<uint32_t>(Arch::kFrameNetB)) {
    if (n_dims != 4) throw std::runtime_error("model load: bad frame-net-b dims");
    FrameNetBDims d;
    d.frame_length = static_cast<int>(dims[0]);
    d.hop = static_cast<int>(dims[1]);
    d.h1 = static_cast<int>(dims[2]);
    d.h2 = static_cast<int>(dims[3]);
    d.embed = static_cast<int>(embed);
    m = frame_net_b(d);
  } else {
    throw std::runtime_error("model load: unknown architecture id " +
                             std::to_string(arch));
  }
  const uint64_t n_params = read_u64(in, "param count");
  if (n_params != static_cast<uint64_t>(m.params_.size()))
    throw std::runtime_error(
        "model load: parameter count " + std::to_string(n_params) +
        " does not match architecture (" + std::to_string(m.params_.size()) +
        ")");
  read_f64_block(in, m.params_.data(), n_params, "parameters");
  return m;
}

void save_profiles(const std::vector<SpeakerProfile>& profiles,
                   const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("save_profiles: cannot open " + path);
  write_bytes(out, kProfileMagic, 8);
  write_u32(out, kFileVersion);
  const uint32_t dim =
      profiles.empty() ? 0 : static_cast<uint32_t>(profiles[0].embedding.size());
  write_u32(out, dim);
  write_u32(out, static_cast<uint32_t>(profiles.size()));
  for (const SpeakerProfile& p : profiles) {
    if (static_cast<uint32_t>(p.embedding.size()) != dim)
      throw std::runtime_error("save_profiles: mixed embedding dims");
    write_u32(out, static_cast<uint32_t>(p.speaker.size()));
    write_bytes(out, p.speaker.data(), p.speaker.size());
    write_f64_block(out, p.embedding.data(), dim);
  }
}

std::vector<SpeakerProfile> load_profiles(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_profiles: cannot open " + path);
  char magic[8];
  read_bytes(in, magic, 8, "profile magic");
  if (std::memcmp(magic, kProfileMagic, 8) != 0)
    throw std::runtime_error("load_profiles: bad magic in " + path);
  const uint32_t version = read_u32(in, "version");
  if (version != kFileVersion)
    throw std::runtime_error("load_profiles: unsupported version");
  const uint32_t dim = read_u32(in, "dim");
  const uint32_t count = read_u32(in, "count");
  std::vector<SpeakerProfile> out(count);
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t len = read_u32(in, "name length");
    std::string name(len, '\0');
    read_bytes(in, name.data(), len, "name");
    Vec e(dim);
    read_f64_block(in, e.data(), dim, "embedding");
    out[i] = SpeakerProfile{std::move(name), std::move(e)};
  }
  return out;
}

}  // namespace stamdct
