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

#include "stamdct/objectives.hpp"

#include <cmath>

namespace stamdct {

namespace {

void check_objective(const AttackObjective& obj) {
  const int r = static_cast<int>(obj.profiles.size());
  switch (obj.task) {
    case AttackTask::kAsvImpersonation:
    case AttackTask::kAsvEvasion:
      if (r != 1)
        throw std::invalid_argument(
            "ASV objective requires exactly one enrollment profile, got " +
            std::to_string(r));
      break;
    case AttackTask::kCsiTargeted:
      if (r < 2)
        throw std::invalid_argument(
            "CSI objective requires at least two enrolled speakers, got " +
            std::to_string(r));
      if (obj.target < 0 || obj.target >= r)
        throw std::invalid_argument("CSI objective: target index out of range");
      break;
    case AttackTask::kOsiTargeted:
      if (r < 1)
        throw std::invalid_argument("OSI objective requires enrolled speakers");
      if (obj.target < 0 || obj.target >= r)
        throw std::invalid_argument("OSI objective: target index out of range");
      if (std::isnan(obj.threshold))
        throw std::invalid_argument("OSI objective: threshold is not set");
      break;
  }
}

// Index of the best competitor, ties toward the lowest index.
int best_competitor(const std::vector<double>& scores, int target) {
  int best = -1;
  for (int r = 0; r < static_cast<int>(scores.size()); ++r) {
    if (r == target) continue;
    if (best < 0 || scores[r] > scores[best]) best = r;
  }
  return best;
}

}  // namespace

const char* attack_task_name(AttackTask task) {
  switch (task) {
    case AttackTask::kAsvImpersonation: return "asv-imp";
    case AttackTask::kAsvEvasion: return "asv-eva";
    case AttackTask::kCsiTargeted: return "csi";
    case AttackTask::kOsiTargeted: return "osi";
  }
  return "?";
}

double loss_from_scores(const AttackObjective& obj,
                        const std::vector<double>& scores) {
  switch (obj.task) {
    case AttackTask::kAsvImpersonation:
      return scores[0];
    case AttackTask::kAsvEvasion:
      return -scores[0];
    case AttackTask::kCsiTargeted: {
      const int j = best_competitor(scores, obj.target);
      return scores[obj.target] - scores[j];
    }
    case AttackTask::kOsiTargeted: {
      const int j = best_competitor(scores, obj.target);
      const double other = j < 0 ? obj.threshold
                                 : std::max(scores[j], obj.threshold);
      return scores[obj.target] - other;
    }
  }
  return 0.0;
}

LossValue evaluate_loss(const AttackObjective& obj, const EmbeddingModel& m,
                        const Vec& x) {
  check_objective(obj);
  ActivationCache cache;
  const Vec e = m.embed(x, &cache);
  std::vector<double> scores(obj.profiles.size());
  for (size_t r = 0; r < obj.profiles.size(); ++r)
    scores[r] = score(obj.profiles[r].embedding, e);

  // d loss / d embedding, by task.
  Vec de;
  switch (obj.task) {
    case AttackTask::kAsvImpersonation:
      de = obj.profiles[0].embedding;
      break;
    case AttackTask::kAsvEvasion:
      de = -obj.profiles[0].embedding;
      break;
    case AttackTask::kCsiTargeted: {
      const int j = best_competitor(scores, obj.target);
      de = obj.profiles[obj.target].embedding - obj.profiles[j].embedding;
      break;
    }
    case AttackTask::kOsiTargeted: {
      const int j = best_competitor(scores, obj.target);
      de = obj.profiles[obj.target].embedding;
      // Subgradient through whichever term attains the outer max; the theta
      // branch is constant in x.
      if (j >= 0 && scores[j] >= obj.threshold)
        de -= obj.profiles[j].embedding;
      break;
    }
  }

  LossValue out;
  out.value = loss_from_scores(obj, scores);
  out.grad = input_gradient(m, cache, de);
  return out;
}

bool asv_accept(double s, double theta) { return s > theta; }

int csi_decide(const std::vector<double>& scores) {
  if (scores.empty()) throw std::invalid_argument("csi_decide: no scores");
  int best = 0;
  for (int r = 1; r < static_cast<int>(scores.size()); ++r)
    if (scores[r] > scores[best]) best = r;
  return best;
}

int osi_decide(const std::vector<double>& scores, double theta) {
  const int best = csi_decide(scores);
  return scores[best] > theta ? best : -1;
}

}  // namespace stamdct
