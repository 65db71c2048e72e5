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

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stamdct/types.hpp"

namespace stamdct {

struct ScoreSet {
  std::vector<double> target;
  std::vector<double> nontarget;
};

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

/// Equal error rate with the accept-if-score-above-threshold convention.
/// Thresholds sweep the midpoints between adjacent distinct scores; the
/// FAR = FRR point is linearly interpolated between adjacent operating points
/// when there is no exact crossing.
EerResult eer(const ScoreSet& s);

/// Minimum normalized detection cost over the same threshold sweep.
double min_dcf(const ScoreSet& s, double p_target = 0.05, double c_miss = 1.0,
               double c_fa = 1.0);

/// 10 log10(P_x / P_delta); +infinity when the perturbation is exactly zero.
double snr_db(const Vec& x, const Vec& x_adv);

struct L2Result {
  double unit = 0.0;  // ||delta||_2 / sqrt(len) / 32768
  double raw = 0.0;   // ||delta||_2 / sqrt(len)
};
L2Result l2(const Vec& x, const Vec& x_adv);

enum class TaskKind { kAsv, kCsi, kOsi };
TaskKind task_from_name(const std::string& name);
const char* task_name(TaskKind task);

/// One evaluation trial. Waveforms are referenced by index into an external
/// table; adv_wave = -1 means no adversarial version. adv_snr_db is present
/// exactly when adv_wave is.
struct Trial {
  std::string enroll_speaker;
  std::string test_speaker;    // ground truth
  std::string target_speaker;  // attack target label
  bool is_target = false;      // ASV label
  bool truth_in_enrollment = true;  // false for OSI out-of-set test speakers
  int wave = -1;
  int adv_wave = -1;
  double adv_snr_db = std::numeric_limits<double>::quiet_NaN();
};
using TrialSet = std::vector<Trial>;

/// Element-wise replacement: trial i of the result is adversarial[i] when
/// i is in replace_set and adversarial[i] clears the SNR budget, originals[i]
/// otherwise. Sets must be index-aligned.
TrialSet mixed_trial_set(const TrialSet& originals, const TrialSet& adversarial,
                         double budget_db, const std::vector<int>& replace_set);

/// Victim decision for one trial: accept/reject plus the decided speaker for
/// identification tasks (empty = rejected).
struct Decision {
  bool accepted = false;
  std::string decided_speaker;
};

struct Rates {
  std::optional<double> far;   // accepted non-targets / non-targets (ASV)
  std::optional<double> tasr;  // adversarial trials deciding the attack target
  std::optional<double> ier;   // misclassified / total (identification)
};

/// Counting rates; empty denominators yield disengaged optionals, never 0/0.
Rates rates(TaskKind task, const TrialSet& trials,
            const std::vector<Decision>& decisions);

}  // namespace stamdct
