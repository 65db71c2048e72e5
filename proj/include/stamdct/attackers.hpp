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

#include <functional>
#include <string>
#include <vector>

#include "stamdct/objectives.hpp"
#include "stamdct/transform.hpp"
#include "stamdct/types.hpp"

namespace stamdct {

enum class AttackerKind {
  kFgsm,
  kIfgsm,
  kMifgsm,
  kNifgsm,
  kAcg,
  kStaMdct,
  kStaDct,
};

AttackerKind attacker_from_name(const std::string& name);
const char* attacker_name(AttackerKind kind);

/// Inner update rule for the spectrum-transformation attack. The published
/// algorithm uses I-FGSM; the other rules are an extrapolation kept behind
/// this knob.
enum class InnerRule { kIfgsm, kMifgsm, kNifgsm, kAcg };

struct AttackConfig {
  double epsilon = 40.0;  // max L-inf perturbation, 16-bit sample scale
  int iterations = 10;    // T
  double step = 4.0;      // alpha = epsilon / T
  double momentum = 1.0;  // mu
  int n_transforms = 20;  // N
  SpectrumTransformParams transform;
  uint64_t seed = 0;
  InnerRule sta_inner = InnerRule::kIfgsm;
};

void validate(const AttackConfig& cfg);

/// Per-sample clamp to [x - eps, x + eps], then to the valid sample range.
Vec clip_to_ball(const Vec& x_adv, const Vec& x, double eps);

/// Exact ball membership, evaluated with the same bound expressions clip uses.
bool in_epsilon_ball(const Vec& x, const Vec& x_adv, double eps);

/// Loss and gradient at an arbitrary query point; the iteration index feeds
/// seed derivation for stochastic objectives.
using LossGradFn = std::function<LossValue(const Vec& x, int iteration)>;

struct IterationTrace {
  int iteration = 0;
  double loss = 0.0;       // of the gradient evaluation this step used
  double eta = 0.0;        // step size used (ACG)
  double beta = 0.0;       // conjugate coefficient (ACG)
  Vec direction;           // gradient estimate before the sign
  Vec iterate;             // x_adv after the step
};
using AttackObserver = std::function<void(const IterationTrace&)>;

// Optimizer drivers over an abstract objective. Exposed so tests can run them
// against analytic surrogates.
Vec fgsm_step(const LossGradFn& f, const Vec& x, double eps);
Vec iterate_signed(const LossGradFn& f, const Vec& x, const AttackConfig& cfg,
                   InnerRule rule, const AttackObserver& observer = {});

// Model-level attackers.
Vec fgsm(const Vec& x, const AttackObjective& obj, const EmbeddingModel& m,
         double eps);
Vec ifgsm(const Vec& x, const AttackObjective& obj, const EmbeddingModel& m,
          const AttackConfig& cfg, const AttackObserver& observer = {});
Vec mifgsm(const Vec& x, const AttackObjective& obj, const EmbeddingModel& m,
           const AttackConfig& cfg, const AttackObserver& observer = {});
Vec nifgsm(const Vec& x, const AttackObjective& obj, const EmbeddingModel& m,
           const AttackConfig& cfg, const AttackObserver& observer = {});
/// Auto conjugate gradient; returns the best-loss iterate encountered.
Vec acg(const Vec& x, const AttackObjective& obj, const EmbeddingModel& m,
        const AttackConfig& cfg, const AttackObserver& observer = {});

/// Spectrum-transformation attack: per outer iteration, N fresh transform
/// draws (seeded from cfg.seed and the (t, i) pair), exact adjoint pull-back
/// of each gradient, averaged into one update direction.
Vec sta_attack(const Vec& x, const AttackObjective& obj,
               const EmbeddingModel& m, const AttackConfig& cfg,
               const AttackObserver& observer = {});

/// Ensemble variant: per model, the N-sample averaged gradient, fused with
/// the ensemble weights. Transform draws are shared across models.
Vec ensemble_sta_attack(const Vec& x, const std::vector<AttackObjective>& objs,
                        const std::vector<const EmbeddingModel*>& models,
                        const Vec& weights, const AttackConfig& cfg,
                        const AttackObserver& observer = {});

/// Dispatch by attacker kind; single-model attackers require one model, the
/// STA attackers accept an ensemble.
Vec run_attack(AttackerKind kind, const Vec& x,
               const std::vector<AttackObjective>& objs,
               const std::vector<const EmbeddingModel*>& models,
               const Vec& weights, const AttackConfig& cfg);

}  // namespace stamdct
