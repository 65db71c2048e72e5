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

#include "stamdct/dsp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace stamdct {

namespace {

// Zeroth-order modified Bessel function, series to machine precision.
double bessel_i0(double x) {
  double sum = 1.0;
  double term = 1.0;
  const double q = 0.25 * x * x;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

// Reflect index into [0, n): ..., 2, 1, [0, n-1], n-2, n-3, ...
inline Index reflect(Index j, Index n) {
  if (j < 0) return -j;
  if (j >= n) return 2 * n - 2 - j;
  return j;
}

}  // namespace

Window kbd_window(int length, double beta) {
  if (length < 4 || length % 2 != 0)
    throw std::invalid_argument("kbd_window: length must be even and >= 4, got " +
                                std::to_string(length));
  if (beta < 0.0)
    throw std::invalid_argument("kbd_window: beta must be >= 0");
  const int half = length / 2;
  // Kaiser window of length half + 1.
  Vec kaiser(half + 1);
  const double denom = bessel_i0(beta);
  for (int i = 0; i <= half; ++i) {
    const double t = 2.0 * i / half - 1.0;
    kaiser[i] = bessel_i0(beta * std::sqrt(1.0 - t * t)) / denom;
  }
  Vec cum(half + 1);
  double acc = 0.0;
  for (int i = 0; i <= half; ++i) {
    acc += kaiser[i];
    cum[i] = acc;
  }
  Window w;
  w.kind = WindowKind::kKbd;
  w.coeffs.resize(length);
  const double total = cum[half];
  for (int n = 0; n < half; ++n) {
    const double h = std::sqrt(cum[n] / total);
    w.coeffs[n] = h;
    w.coeffs[length - 1 - n] = h;
  }
  return w;
}

Window hamming_window(int length) {
  if (length < 2) throw std::invalid_argument("hamming_window: length too small");
  Window w;
  w.kind = WindowKind::kHamming;
  w.coeffs.resize(length);
  for (int n = 0; n < length; ++n)
    w.coeffs[n] = 0.54 - 0.46 * std::cos(2.0 * M_PI * n / (length - 1));
  return w;
}

Window rect_window(int length) {
  Window w;
  w.kind = WindowKind::kRectangular;
  w.coeffs = Vec::Ones(length);
  return w;
}

double princen_bradley_error(const Window& w) {
  const int half = w.length() / 2;
  double worst = 0.0;
  for (int n = 0; n < half; ++n) {
    const double s =
        w.coeffs[n] * w.coeffs[n] + w.coeffs[n + half] * w.coeffs[n + half];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

MdctPlan::MdctPlan(Window window) : window_(std::move(window)) {
  w_ = window_.length();
  if (w_ < 4 || w_ % 2 != 0)
    throw std::invalid_argument("MdctPlan: window length must be even and >= 4");
  const int bins = w_ / 2;
  kernel_.resize(w_, bins);
  for (int n = 0; n < w_; ++n) {
    for (int k = 0; k < bins; ++k) {
      kernel_(n, k) =
          window_.coeffs[n] *
          std::cos(M_PI * (2.0 * n + 1.0 + 0.5 * w_) * (2.0 * k + 1.0) /
                   (2.0 * w_));
    }
  }
  // Calibrate the inverse scale from an impulse round trip; for this kernel
  // normalization it comes out at 4/W.
  inverse_scale_ = 1.0;
  Vec probe = Vec::Zero(4 * w_);
  probe[2 * w_] = 1.0;
  const Vec r = inverse(forward(probe));
  inverse_scale_ = probe.dot(r) / r.dot(r);
}

int MdctPlan::frame_count(Index input_length) const {
  const Index h = hop();
  const Index align = (h - input_length % h) % h;
  return static_cast<int>((input_length + align) / h + 1);
}

Mat MdctPlan::padded_frames(const Vec& x) const {
  const Index n = x.size();
  if (n < w_)
    throw std::invalid_argument(
        "mdct: input of " + std::to_string(n) +
        " samples is shorter than the window (" + std::to_string(w_) + ")");
  const Index h = hop();
  const Index align = (h - n % h) % h;
  const Index padded_len = n + w_ + align;
  Vec padded(padded_len);
  for (Index p = 0; p < padded_len; ++p)
    padded[p] = x[reflect(p - h, n)];
  const int f_count = frame_count(n);
  Mat frames(f_count, w_);
  for (int f = 0; f < f_count; ++f)
    frames.row(f) = padded.segment(static_cast<Index>(f) * h, w_).transpose();
  return frames;
}

SpectrumFrames MdctPlan::forward(const Vec& x) const {
  SpectrumFrames s;
  s.window = window_;
  s.frame_length = w_;
  s.hop = static_cast<int>(hop());
  s.source_length = static_cast<int>(x.size());
  s.coeffs.noalias() = padded_frames(x) * kernel_;
  return s;
}

Vec MdctPlan::inverse(const SpectrumFrames& s) const {
  if (s.bins() != w_ / 2)
    throw std::invalid_argument("imdct: expected " + std::to_string(w_ / 2) +
                                " bins per frame, got " +
                                std::to_string(s.bins()));
  const Index h = hop();
  const Index n = s.source_length;
  const Index padded_len = static_cast<Index>(s.frames() - 1) * h + w_;
  Mat frames(s.frames(), w_);
  frames.noalias() = inverse_scale_ * (s.coeffs * kernel_.transpose());
  Vec buf = Vec::Zero(padded_len);
  for (int f = 0; f < s.frames(); ++f)
    buf.segment(static_cast<Index>(f) * h, w_) += frames.row(f).transpose();
  return buf.segment(h, n);
}

Vec MdctPlan::forward_adjoint(const SpectrumFrames& g) const {
  if (g.bins() != w_ / 2)
    throw std::invalid_argument("mdct_adjoint: bin count mismatch");
  const Index h = hop();
  const Index n = g.source_length;
  const Index align = (h - n % h) % h;
  const Index padded_len = n + w_ + align;
  if (static_cast<Index>(g.frames() - 1) * h + w_ != padded_len)
    throw std::invalid_argument("mdct_adjoint: frame count / length mismatch");
  Mat frames(g.frames(), w_);
  frames.noalias() = g.coeffs * kernel_.transpose();
  Vec buf = Vec::Zero(padded_len);
  for (int f = 0; f < g.frames(); ++f)
    buf.segment(static_cast<Index>(f) * h, w_) += frames.row(f).transpose();
  // Transpose of the reflect padding: scatter-add back to source positions.
  Vec out = Vec::Zero(n);
  for (Index p = 0; p < padded_len; ++p)
    out[reflect(p - h, n)] += buf[p];
  return out;
}

SpectrumFrames MdctPlan::inverse_adjoint(const Vec& g, Index source_length) const {
  if (g.size() != source_length)
    throw std::invalid_argument("imdct_adjoint: gradient length mismatch");
  const Index h = hop();
  const int f_count = frame_count(source_length);
  const Index padded_len = static_cast<Index>(f_count - 1) * h + w_;
  Vec buf = Vec::Zero(padded_len);
  buf.segment(h, source_length) = g;
  Mat frames(f_count, w_);
  for (int f = 0; f < f_count; ++f)
    frames.row(f) = buf.segment(static_cast<Index>(f) * h, w_).transpose();
  SpectrumFrames s;
  s.window = window_;
  s.frame_length = w_;
  s.hop = static_cast<int>(h);
  s.source_length = static_cast<int>(source_length);
  s.coeffs.noalias() = inverse_scale_ * (frames * kernel_);
  return s;
}

SpectrumFrames mdct(const Waveform& w, const Window& win) {
  return MdctPlan(win).forward(w.samples);
}

Waveform imdct(const SpectrumFrames& s) {
  if (princen_bradley_error(s.window) > 1e-9)
    throw std::invalid_argument(
        "imdct: window does not satisfy the Princen-Bradley condition");
  Waveform w;
  w.samples = MdctPlan(s.window).inverse(s);
  return w;
}

Waveform mdct_adjoint(const SpectrumFrames& g, const Window& win,
                      Index source_length) {
  if (g.source_length != source_length)
    throw std::invalid_argument("mdct_adjoint: source length mismatch");
  Waveform w;
  w.samples = MdctPlan(win).forward_adjoint(g);
  return w;
}

SpectrumFrames imdct_adjoint(const Waveform& g, const Window& win) {
  return MdctPlan(win).inverse_adjoint(g.samples, g.samples.size());
}

DctPlan::DctPlan(int frame_length) : w_(frame_length) {
  if (w_ < 1) throw std::invalid_argument("DctPlan: frame length must be >= 1");
  basis_.resize(w_, w_);
  const double a0 = std::sqrt(1.0 / w_);
  const double ak = std::sqrt(2.0 / w_);
  for (int k = 0; k < w_; ++k)
    for (int n = 0; n < w_; ++n)
      basis_(k, n) = (k == 0 ? a0 : ak) *
                     std::cos(M_PI * (2.0 * n + 1.0) * k / (2.0 * w_));
}

int DctPlan::frame_count(Index input_length) const {
  return static_cast<int>((input_length + w_ - 1) / w_);
}

SpectrumFrames DctPlan::forward(const Vec& x) const {
  const int f_count = frame_count(x.size());
  Mat frames = Mat::Zero(f_count, w_);
  Index pos = 0;
  for (int f = 0; f < f_count; ++f) {
    const Index take = std::min<Index>(w_, x.size() - pos);
    frames.row(f).head(take) = x.segment(pos, take).transpose();
    pos += take;
  }
  SpectrumFrames s;
  s.window = rect_window(w_);
  s.frame_length = w_;
  s.hop = w_;
  s.source_length = static_cast<int>(x.size());
  s.coeffs.noalias() = frames * basis_.transpose();
  return s;
}

Vec DctPlan::inverse(const SpectrumFrames& s) const {
  if (s.bins() != w_)
    throw std::invalid_argument("idct_frames: bin count mismatch");
  Mat frames;
  frames.noalias() = s.coeffs * basis_;
  Vec out(s.source_length);
  Index pos = 0;
  for (int f = 0; f < s.frames() && pos < out.size(); ++f) {
    const Index take = std::min<Index>(w_, out.size() - pos);
    out.segment(pos, take) = frames.row(f).head(take).transpose();
    pos += take;
  }
  return out;
}

SpectrumFrames DctPlan::inverse_adjoint(const Vec& g, Index source_length) const {
  if (g.size() != source_length)
    throw std::invalid_argument("idct adjoint: gradient length mismatch");
  return forward(g);
}

SpectrumFrames dct_frames(const Waveform& w, int frame_length) {
  return DctPlan(frame_length).forward(w.samples);
}

Waveform idct_frames(const SpectrumFrames& s) {
  Waveform w;
  w.samples = DctPlan(s.frame_length).inverse(s);
  return w;
}

LogMelPlan::LogMelPlan(LogMelConfig cfg) : cfg_(cfg) {
  const int n = cfg_.frame_length;
  const int nb = bins();
  window_ = hamming_window(n).coeffs;
  dft_cos_.resize(n, nb);
  dft_sin_.resize(n, nb);
  for (int t = 0; t < n; ++t) {
    for (int k = 0; k < nb; ++k) {
      const double a = 2.0 * M_PI * k * t / n;
      dft_cos_(t, k) = std::cos(a);
      dft_sin_(t, k) = std::sin(a);
    }
  }
  // Triangular mel filters, HTK mel scale, peak 1.
  auto to_mel = [](double f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
  auto from_mel = [](double m) {
    return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0);
  };
  const int bands = cfg_.n_mels;
  Vec edges(bands + 2);
  const double mlo = to_mel(cfg_.fmin), mhi = to_mel(cfg_.fmax);
  for (int j = 0; j < bands + 2; ++j)
    edges[j] = from_mel(mlo + (mhi - mlo) * j / (bands + 1));
  band_center_ = edges.segment(1, bands);
  mel_ = Mat::Zero(nb, bands);
  for (int b = 0; b < nb; ++b) {
    const double f = static_cast<double>(b) * kSampleRate / n;
    for (int j = 0; j < bands; ++j) {
      const double lo = edges[j], mid = edges[j + 1], hi = edges[j + 2];
      if (f >= lo && f <= mid && mid > lo)
        mel_(b, j) = (f - lo) / (mid - lo);
      else if (f > mid && f <= hi && hi > mid)
        mel_(b, j) = (hi - f) / (hi - mid);
    }
  }
}

int LogMelPlan::frame_count(Index input_length) const {
  if (input_length < cfg_.frame_length)
    throw std::invalid_argument(
        "logmel: input of " + std::to_string(input_length) +
        " samples is shorter than one frame (" +
        std::to_string(cfg_.frame_length) + ")");
  return static_cast<int>((input_length - cfg_.frame_length) / cfg_.hop + 1);
}

int LogMelPlan::band_of(double freq_hz) const {
  int best = 0;
  double best_d = std::abs(band_center_[0] - freq_hz);
  for (int j = 1; j < cfg_.n_mels; ++j) {
    const double d = std::abs(band_center_[j] - freq_hz);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

FeatureMap LogMelPlan::features(const Vec& x, LogMelCache* cache,
                                bool cmvn) const {
  const int f_count = frame_count(x.size());
  const int n = cfg_.frame_length;
  LogMelCache local;
  LogMelCache& c = cache ? *cache : local;
  c.input_length = x.size();
  c.frames.resize(f_count, n);
  for (int f = 0; f < f_count; ++f)
    c.frames.row(f) =
        (x.segment(static_cast<Index>(f) * cfg_.hop, n).array() *
         window_.array())
            .matrix()
            .transpose();
  c.re.noalias() = c.frames * dft_cos_;
  c.im.noalias() = c.frames * dft_sin_;
  c.mag = (c.re.array().square() + c.im.array().square()).sqrt();
  c.melspec.noalias() = c.mag * mel_;
  c.logmel = (c.melspec.array() + cfg_.log_guard).log();
  if (!cmvn) {
    c.mean = Vec();
    c.sd = Vec();
    c.floored.clear();
    return c.logmel;
  }
  const double fn = static_cast<double>(f_count);
  c.mean = c.logmel.colwise().mean();
  c.sd.resize(cfg_.n_mels);
  c.floored.assign(cfg_.n_mels, false);
  FeatureMap out(f_count, cfg_.n_mels);
  for (int j = 0; j < cfg_.n_mels; ++j) {
    const Vec centered = c.logmel.col(j).array() - c.mean[j];
    double var = centered.squaredNorm() / fn;
    if (var < cfg_.var_floor) {
      var = cfg_.var_floor;
      c.floored[j] = true;
    }
    c.sd[j] = std::sqrt(var);
    out.col(j) = centered / c.sd[j];
  }
  return out;
}

Vec LogMelPlan::backward(const LogMelCache& cache, const Mat& dfeat) const {
  const int f_count = static_cast<int>(cache.logmel.rows());
  const double fn = static_cast<double>(f_count);
  Mat dlogmel(f_count, cfg_.n_mels);
  if (!cache.sd.size()) {
    dlogmel = dfeat;  // no CMVN was applied
  } else {
    for (int j = 0; j < cfg_.n_mels; ++j) {
      const Vec y = (cache.logmel.col(j).array() - cache.mean[j]) / cache.sd[j];
      const Vec& g = dfeat.col(j);
      const double gm = g.mean();
      if (cache.floored[j]) {
        dlogmel.col(j) = (g.array() - gm) / cache.sd[j];
      } else {
        const double gym = g.dot(y) / fn;
        dlogmel.col(j) =
            (g.array() - gm - y.array() * gym) / cache.sd[j];
      }
    }
  }
  Mat dmel = dlogmel.array() / (cache.melspec.array() + cfg_.log_guard);
  Mat dmag;
  dmag.noalias() = dmel * mel_.transpose();
  // d|z|/dre = re/|z|; defined as 0 where the magnitude is exactly zero.
  Mat inv_mag = (cache.mag.array() > 0.0)
                    .select(cache.mag.cwiseInverse(), Mat::Zero(cache.mag.rows(), cache.mag.cols()));
  Mat dre = dmag.array() * cache.re.array() * inv_mag.array();
  Mat dim = dmag.array() * cache.im.array() * inv_mag.array();
  Mat dframes;
  dframes.noalias() = dre * dft_cos_.transpose();
  dframes.noalias() += dim * dft_sin_.transpose();
  Vec dx = Vec::Zero(cache.input_length);
  const int n = cfg_.frame_length;
  for (int f = 0; f < f_count; ++f)
    dx.segment(static_cast<Index>(f) * cfg_.hop, n).array() +=
        dframes.row(f).transpose().array() * window_.array();
  return dx;
}

void write_matrix_csv(const Mat& m, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("write_matrix_csv: cannot open " + path);
  char buf[40];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.12g", m(i, j));
      out << buf;
      if (j + 1 < m.cols()) out << ',';
    }
    out << '\n';
  }
}

}  // namespace stamdct
