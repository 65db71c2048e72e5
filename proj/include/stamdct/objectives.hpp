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
#include <vector>

#include "stamdct/nets.hpp"
#include "stamdct/types.hpp"

namespace stamdct {

enum class AttackTask {
  kAsvImpersonation,  // maximize s(enroll, x_adv)
  kAsvEvasion,        // maximize -s(enroll, x_adv)
  kCsiTargeted,       // maximize s_t - max_{r != t} s_r
  kOsiTargeted,       // maximize s_t - max(max_{r != t} s_r, theta)
};

const char* attack_task_name(AttackTask task);

struct AttackObjective {
  AttackTask task = AttackTask::kAsvImpersonation;
  std::vector<SpeakerProfile> profiles;  // R = 1 for ASV tasks
  int target = 0;                        // index into profiles (identification)
  double threshold = std::numeric_limits<double>::quiet_NaN();  // OSI
};

struct LossValue {
  double value = 0.0;
  Vec grad;  // with respect to the waveform
};

/// Objective value and its exact input gradient at x. The identification max
/// breaks ties toward the lowest index; the gradient flows through the target
/// term and the single arg-max competitor (the theta branch of OSI
/// contributes zero gradient).
LossValue evaluate_loss(const AttackObjective& obj, const EmbeddingModel& m,
                        const Vec& x);

/// Objective value only, from precomputed profile scores (no model pass).
double loss_from_scores(const AttackObjective& obj,
                        const std::vector<double>& scores);

// Decision rules of the three tasks.
bool asv_accept(double score, double theta);
/// Arg-max speaker index, ties toward the lowest index.
int csi_decide(const std::vector<double>& scores);
/// Arg-max speaker index when the best score clears theta, -1 (reject)
/// otherwise.
int osi_decide(const std::vector<double>& scores, double theta);

}  // namespace stamdct
