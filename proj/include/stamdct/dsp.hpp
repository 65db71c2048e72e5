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

#include "stamdct/types.hpp"

namespace stamdct {

enum class WindowKind { kKbd, kHamming, kRectangular };

/// Analysis/synthesis window. KBD windows satisfy the Princen-Bradley
/// condition h(n)^2 + h(n + W/2)^2 = 1 and are the only kind accepted by the
/// lapped inverse transform.
struct Window {
  WindowKind kind = WindowKind::kKbd;
  Vec coeffs;

  int length() const { return static_cast<int>(coeffs.size()); }
};

/// Kaiser-Bessel-derived window: cumulative sums of a length-(W/2+1) Kaiser
/// window, square-rooted and mirrored. W must be even and >= 4.
Window kbd_window(int length, double beta);

Window hamming_window(int length);

Window rect_window(int length);

/// Largest deviation from the Princen-Bradley condition over the half window.
double princen_bradley_error(const Window& w);

/// Frame grid of lapped-transform (or blocked-DCT) coefficients.
/// coeffs is frames x bins; source_length remembers the originating waveform
/// so the inverse can trim its reconstruction exactly.
struct SpectrumFrames {
  Mat coeffs;
  Window window;
  int frame_length = 0;
  int hop = 0;
  int source_length = 0;

  int frames() const { return static_cast<int>(coeffs.rows()); }
  int bins() const { return static_cast<int>(coeffs.cols()); }
};

/// Lapped MDCT with 50% overlap and time-domain aliasing cancellation.
/// The input is reflect-padded by W/2 on both ends (plus a reflected tail to
/// align the hop grid) so the round trip is exact over the full signal; the
/// inverse scaling constant is calibrated once per window from an impulse.
class MdctPlan {
 public:
  explicit MdctPlan(Window window);

  const Window& window() const { return window_; }
  int frame_length() const { return w_; }
  int hop() const { return w_ / 2; }
  int bins() const { return w_ / 2; }
  /// Calibrated TDAC inverse scale (4/W for this kernel normalization).
  double inverse_scale() const { return inverse_scale_; }
  int frame_count(Index input_length) const;

  SpectrumFrames forward(const Vec& x) const;
  Vec inverse(const SpectrumFrames& s) const;
  /// Exact transposes of forward/inverse as linear operators, including the
  /// reflect padding and the overlap-add.
  Vec forward_adjoint(const SpectrumFrames& g) const;
  SpectrumFrames inverse_adjoint(const Vec& g, Index source_length) const;

 private:
  Mat padded_frames(const Vec& x) const;

  Window window_;
  int w_;
  Mat kernel_;  // W x W/2, h(n) folded in
  double inverse_scale_;
};

SpectrumFrames mdct(const Waveform& w, const Window& win);
Waveform imdct(const SpectrumFrames& s);
Waveform mdct_adjoint(const SpectrumFrames& g, const Window& win,
                      Index source_length);
SpectrumFrames imdct_adjoint(const Waveform& g, const Window& win);

/// Orthonormal DCT-II over non-overlapping frames (DCT-III inverse). The tail
/// is zero-padded to a multiple of the frame length and trimmed on inversion.
class DctPlan {
 public:
  explicit DctPlan(int frame_length);

  int frame_length() const { return w_; }
  int frame_count(Index input_length) const;

  SpectrumFrames forward(const Vec& x) const;
  Vec inverse(const SpectrumFrames& s) const;
  // With an orthonormal basis and zero padding the adjoint of the forward is
  // the inverse, and vice versa.
  Vec forward_adjoint(const SpectrumFrames& g) const { return inverse(g); }
  SpectrumFrames inverse_adjoint(const Vec& g, Index source_length) const;

 private:
  int w_;
  Mat basis_;  // W x W, row k = orthonormal DCT-II atom k
};

SpectrumFrames dct_frames(const Waveform& w, int frame_length);
Waveform idct_frames(const SpectrumFrames& s);

struct LogMelConfig {
  int frame_length = 400;  // 25 ms at 16 kHz
  int hop = 160;           // 10 ms
  int n_mels = 40;
  double fmin = 0.0;
  double fmax = 8000.0;
  double log_guard = 1e-6;
  double var_floor = 1e-8;  // CMVN variance floor
};

struct LogMelCache {
  Index input_length = 0;
  Mat frames;       // F x frame_length, window applied
  Mat re, im;       // F x bins
  Mat mag;          // F x bins
  Mat melspec;      // F x n_mels
  Mat logmel;       // F x n_mels, pre-CMVN
  Vec mean, sd;     // per band
  std::vector<bool> floored;
};

/// Feature grid, frames x mel bands.
using FeatureMap = Mat;

/// Log mel-filterbank frontend with per-utterance CMVN. Differentiable end to
/// end; the gradient of the DFT magnitude at exactly-zero bins is defined as 0.
class LogMelPlan {
 public:
  explicit LogMelPlan(LogMelConfig cfg = {});

  const LogMelConfig& config() const { return cfg_; }
  int bins() const { return cfg_.frame_length / 2 + 1; }
  int min_samples() const { return cfg_.frame_length; }
  int frame_count(Index input_length) const;
  /// Index of the mel band whose filter peaks closest to the given frequency.
  int band_of(double freq_hz) const;

  FeatureMap features(const Vec& x, LogMelCache* cache = nullptr,
                      bool cmvn = true) const;
  Vec backward(const LogMelCache& cache, const Mat& dfeat) const;

 private:
  LogMelConfig cfg_;
  Vec window_;       // hamming
  Mat dft_cos_;      // frame_length x bins
  Mat dft_sin_;      // frame_length x bins
  Mat mel_;          // bins x n_mels
  Vec band_center_;  // Hz, per mel band
};

/// Frame-major CSV dump (one row per frame) for debugging.
void write_matrix_csv(const Mat& m, const std::string& path);

}  // namespace stamdct
