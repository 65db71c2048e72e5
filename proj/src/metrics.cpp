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

#include "stamdct/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace stamdct {

namespace {

// Candidate thresholds: one below every score, the midpoints between adjacent
// distinct scores, one above every score. Accept means score > threshold, so
// midpoints make the sweep unambiguous.
std::vector<double> candidate_thresholds(const ScoreSet& s) {
  std::vector<double> all;
  all.reserve(s.target.size() + s.nontarget.size());
  all.insert(all.end(), s.target.begin(), s.target.end());
  all.insert(all.end(), s.nontarget.begin(), s.nontarget.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<double> cand;
  cand.reserve(all.size() + 1);
  cand.push_back(all.front() - 1.0);
  for (size_t i = 0; i + 1 < all.size(); ++i)
    cand.push_back(0.5 * (all[i] + all[i + 1]));
  cand.push_back(all.back() + 1.0);
  return cand;
}

void check_two_classes(const ScoreSet& s, const char* what) {
  if (s.target.empty() || s.nontarget.empty())
    throw std::invalid_argument(std::string(what) +
                                ": need at least one target and one "
                                "non-target score");
  for (double v : s.target)
    if (!std::isfinite(v))
      throw std::invalid_argument(std::string(what) + ": non-finite score");
  for (double v : s.nontarget)
    if (!std::isfinite(v))
      throw std::invalid_argument(std::string(what) + ": non-finite score");
}

struct OperatingPoint {
  double threshold;
  double far;
  double frr;
};

std::vector<OperatingPoint> sweep(const ScoreSet& s) {
  std::vector<double> tar = s.target;
  std::vector<double> non = s.nontarget;
  std::sort(tar.begin(), tar.end());
  std::sort(non.begin(), non.end());
  const std::vector<double> cand = candidate_thresholds(s);
  std::vector<OperatingPoint> pts;
  pts.reserve(cand.size());
  size_t ti = 0, ni = 0;
  for (double th : cand) {
    while (ti < tar.size() && tar[ti] <= th) ++ti;
    while (ni < non.size() && non[ni] <= th) ++ni;
    const double frr = static_cast<double>(ti) / tar.size();
    const double far = static_cast<double>(non.size() - ni) / non.size();
    pts.push_back({th, far, frr});
  }
  return pts;
}

}  // namespace

EerResult eer(const ScoreSet& s) {
  check_two_classes(s, "eer");
  const std::vector<OperatingPoint> pts = sweep(s);
  // far - frr walks from 1 down to -1; find the crossing.
  for (size_t k = 0; k < pts.size(); ++k) {
    const double d = pts[k].far - pts[k].frr;
    if (d == 0.0) return {pts[k].far, pts[k].threshold};
    if (d < 0.0) {
      const OperatingPoint& a = pts[k - 1];
      const OperatingPoint& b = pts[k];
      const double da = a.far - a.frr;
      const double db = b.far - b.frr;
      const double t = da / (da - db);
      return {a.frr + t * (b.frr - a.frr),
              a.threshold + t * (b.threshold - a.threshold)};
    }
  }
  // Unreachable: the last operating point has far - frr = -1.
  return {pts.back().far, pts.back().threshold};
}

double min_dcf(const ScoreSet& s, double p_target, double c_miss, double c_fa) {
  check_two_classes(s, "min_dcf");
  if (!(p_target > 0.0 && p_target < 1.0))
    throw std::invalid_argument("min_dcf: p_target must be in (0, 1)");
  if (c_miss <= 0.0 || c_fa <= 0.0)
    throw std::invalid_argument("min_dcf: costs must be positive");
  const double norm = std::min(c_miss * p_target, c_fa * (1.0 - p_target));
  double best = std::numeric_limits<double>::infinity();
  for (const OperatingPoint& p : sweep(s)) {
    const double cost =
        (c_miss * p.frr * p_target + c_fa * p.far * (1.0 - p_target)) / norm;
    best = std::min(best, cost);
  }
  return best;
}

double snr_db(const Vec& x, const Vec& x_adv) {
  if (x.size() != x_adv.size())
    throw std::invalid_argument("snr_db: length mismatch");
  const double p_x = x.squaredNorm() / static_cast<double>(x.size());
  const double p_d = (x_adv - x).squaredNorm() / static_cast<double>(x.size());
  if (p_d == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(p_x / p_d);
}

L2Result l2(const Vec& x, const Vec& x_adv) {
  if (x.size() != x_adv.size())
    throw std::invalid_argument("l2: length mismatch");
  L2Result r;
  r.raw = (x_adv - x).norm() / std::sqrt(static_cast<double>(x.size()));
  r.unit = r.raw / 32768.0;
  return r;
}

TaskKind task_from_name(const std::string& name) {
  if (name == "asv") return TaskKind::kAsv;
  if (name == "csi") return TaskKind::kCsi;
  if (name == "osi") return TaskKind::kOsi;
  throw std::invalid_argument("unknown task: " + name);
}

const char* task_name(TaskKind task) {
  switch (task) {
    case TaskKind::kAsv: return "asv";
    case TaskKind::kCsi: return "csi";
    case TaskKind::kOsi: return "osi";
  }
  return "?";
}

TrialSet mixed_trial_set(const TrialSet& originals, const TrialSet& adversarial,
                         double budget_db, const std::vector<int>& replace_set) {
  if (originals.size() != adversarial.size())
    throw std::invalid_argument("mixed_trial_set: trial sets are not aligned");
  for (size_t i = 0; i < originals.size(); ++i) {
    if (originals[i].enroll_speaker != adversarial[i].enroll_speaker ||
        originals[i].is_target != adversarial[i].is_target)
      throw std::invalid_argument("mixed_trial_set: trial " +
                                  std::to_string(i) + " is misaligned");
  }
  std::vector<bool> in_set(originals.size(), false);
  for (int i : replace_set) {
    if (i < 0 || static_cast<size_t>(i) >= originals.size())
      throw std::invalid_argument("mixed_trial_set: replace index " +
                                  std::to_string(i) + " out of range");
    if (adversarial[static_cast<size_t>(i)].adv_wave < 0 ||
        std::isnan(adversarial[static_cast<size_t>(i)].adv_snr_db))
      throw std::invalid_argument(
          "mixed_trial_set: trial " + std::to_string(i) +
          " is in the replacement set but has no adversarial waveform");
    in_set[static_cast<size_t>(i)] = true;
  }
  TrialSet mixed(originals.size());
  for (size_t i = 0; i < originals.size(); ++i) {
    const bool replace = in_set[i] && adversarial[i].adv_snr_db >= budget_db;
    mixed[i] = replace ? adversarial[i] : originals[i];
  }
  return mixed;
}

Rates rates(TaskKind task, const TrialSet& trials,
            const std::vector<Decision>& decisions) {
  if (trials.size() != decisions.size())
    throw std::invalid_argument("rates: trial/decision counts differ");
  int non = 0, non_accepted = 0;
  int adv = 0, adv_hit = 0;
  int total = 0, wrong = 0;
  for (size_t i = 0; i < trials.size(); ++i) {
    const Trial& t = trials[i];
    const Decision& d = decisions[i];
    ++total;
    const bool adversarial = t.adv_wave >= 0;
    switch (task) {
      case TaskKind::kAsv: {
        if (!t.is_target) {
          ++non;
          if (d.accepted) ++non_accepted;
        }
        if (adversarial) {
          ++adv;
          // Impersonation wants a non-target trial accepted; evasion wants a
          // target trial rejected.
          if (t.is_target ? !d.accepted : d.accepted) ++adv_hit;
        }
        break;
      }
      case TaskKind::kCsi: {
        if (d.decided_speaker != t.test_speaker) ++wrong;
        if (adversarial) {
          ++adv;
          if (d.decided_speaker == t.target_speaker) ++adv_hit;
        }
        break;
      }
      case TaskKind::kOsi: {
        const bool enrolled = t.truth_in_enrollment;
        const bool correct = enrolled
                                 ? (d.accepted && d.decided_speaker == t.test_speaker)
                                 : !d.accepted;
        if (!correct) ++wrong;
        if (adversarial) {
          ++adv;
          if (d.accepted && d.decided_speaker == t.target_speaker) ++adv_hit;
        }
        break;
      }
    }
  }
  Rates r;
  if (task == TaskKind::kAsv && non > 0)
    r.far = static_cast<double>(non_accepted) / non;
  if (adv > 0) r.tasr = static_cast<double>(adv_hit) / adv;
  if (task != TaskKind::kAsv && total > 0)
    r.ier = static_cast<double>(wrong) / total;
  return r;
}

}  // namespace stamdct
