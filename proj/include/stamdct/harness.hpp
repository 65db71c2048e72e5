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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stamdct/attackers.hpp"
#include "stamdct/metrics.hpp"
#include "stamdct/nets.hpp"
#include "stamdct/training.hpp"

namespace stamdct {

struct ExperimentPlan {
  TaskKind task = TaskKind::kAsv;
  std::string corpus_dir;
  std::vector<std::string> surrogates;  // one ensemble group
  std::vector<std::string> victims;
  std::vector<AttackerKind> attackers;
  int trials = 100;
  int enroll_utts = 3;
  int enrolled_speakers = 10;  // R for identification tasks
  uint64_t seed = 1;
  AttackConfig attack;
  int mdct_window = 1024;
  double kbd_beta = 4.0;
  std::vector<double> snr_budgets;  // sweep grid; empty disables the sweep
  bool saliency = false;
  int saliency_count = 4;
  std::string out_dir;
};

ExperimentPlan load_plan(const std::string& path);
/// Fully-resolved plan as key = value text plus a config hash; loading the
/// manifest back with load_plan reproduces the run.
std::string manifest_text(const ExperimentPlan& plan);

/// Trial protocol and audio shared by every model of a run.
struct PreparedTask {
  TaskKind kind = TaskKind::kAsv;
  TrialSet trials;
  std::vector<Waveform> waves;          // test utterances, trial.wave indexes
  std::vector<std::string> enrolled;    // enrolled speaker ids
  std::map<std::string, std::vector<Waveform>> enroll_audio;
  // OSI only: held-out utterances of enrolled speakers, used to calibrate the
  // open-set threshold.
  std::vector<Waveform> calibration_audio;
};

/// Deterministic trial construction. ASV: balanced target/non-target pairs.
/// CSI: test utterances of enrolled speakers, targets drawn uniformly
/// excluding the ground truth. OSI: test speakers disjoint from the
/// enrollment, targets uniform over enrolled.
PreparedTask build_trials(const ExperimentPlan& plan, const Corpus& corpus);

/// A model plus everything evaluation needs: per-model enrollment profiles,
/// the clean decision threshold calibrated at the EER operating point, and
/// the clean trial scores.
struct ModelContext {
  std::string path;
  std::string name;
  EmbeddingModel model;
  std::vector<SpeakerProfile> profiles;
  double theta = 0.0;
  double clean_eer = 0.0;
};

ModelContext prepare_model(const std::string& path, const PreparedTask& task);
ModelContext prepare_model(std::string name, EmbeddingModel model,
                           const PreparedTask& task);

struct AdversarialExample {
  int trial = -1;
  Waveform wav;  // rounded to the integer sample grid, as written to PCM
  double snr_db = 0.0;
  double l2_unit = 0.0;
  double l2_raw = 0.0;
};

/// Generates adversarial audio for every trial of the task on the surrogate
/// ensemble. Victim models are deliberately not reachable from here.
std::vector<AdversarialExample> attack_trials(
    const PreparedTask& task, const std::vector<const ModelContext*>& surrogates,
    AttackerKind attacker, const AttackConfig& cfg);

struct CellMetrics {
  double eer = 0.0;
  double min_dcf = 0.0;
  std::optional<double> far, tasr, ier;
  double snr_mean_db = 0.0;
  double l2_unit_mean = 0.0;
  bool white_box = false;
};

/// Victim-side evaluation of an adversarial set (the victim never sees the
/// surrogate). For ASV the adversarial scores replace all trials, mirroring
/// the headline protocol; identification tasks score the adversarial audio
/// against the victim's enrollment.
CellMetrics evaluate_cell(const PreparedTask& task, const ModelContext& victim,
                          const std::vector<AdversarialExample>& adversarial);

/// Victim ASV scores for an arbitrary trial set (used by the budget sweep).
ScoreSet asv_scores(const PreparedTask& task, const ModelContext& victim,
                    const TrialSet& trials,
                    const std::vector<AdversarialExample>& adversarial);

struct BudgetPoint {
  double budget_db;
  double eer_impersonation, dcf_impersonation;
  double eer_evasion, dcf_evasion;
};

/// Fig.-style SNR-budget sweep: impersonation mixes adversarial non-target
/// trials, evasion mixes adversarial target trials.
std::vector<BudgetPoint> snr_budget_sweep(
    const PreparedTask& task, const ModelContext& victim,
    const std::vector<AdversarialExample>& adversarial,
    const std::vector<double>& budgets);

/// Runs the whole plan and writes
///   <out>/<surrogate>__<attacker>__<victim>.csv
///   <out>/sweep__<attacker>__<victim>.csv      (when budgets are given)
///   <out>/saliency/*.pgm + .csv                (when enabled)
///   <out>/manifest.txt
/// Rerunning from the manifest reproduces every file byte for byte.
void run(const ExperimentPlan& plan);

}  // namespace stamdct
