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

#include "stamdct/attackers.hpp"

#include <cmath>

namespace stamdct {

namespace {

constexpr double kL1Guard = 1e-12;
constexpr double kHsGuard = 1e-12;

inline double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

Vec sign(const Vec& v) {
  Vec out(v.size());
  for (Index i = 0; i < v.size(); ++i) out[i] = sign_of(v[i]);
  return out;
}

void check_finite(const LossValue& lv, int iteration) {
  if (!std::isfinite(lv.value) || !lv.grad.allFinite())
    throw std::runtime_error("attack: non-finite gradient at iteration " +
                             std::to_string(iteration));
}

LossGradFn model_loss(const AttackObjective& obj, const EmbeddingModel& m) {
  return [&obj, &m](const Vec& x, int) { return evaluate_loss(obj, m, x); };
}

// Averaged transformed gradient of Algorithm 1's inner loop: N fresh draws,
// exact adjoint pull-back, arithmetic mean.
LossGradFn sta_loss(const std::vector<AttackObjective>& objs,
                    const std::vector<const EmbeddingModel*>& models,
                    const Vec& weights, const SpectrumTransform& transform,
                    const AttackConfig& cfg) {
  return [&objs, &models, weights, &transform, &cfg](const Vec& x, int t) {
    const int q = static_cast<int>(models.size());
    const int n = cfg.n_transforms;
    std::vector<Vec> k(q, Vec::Zero(x.size()));
    std::vector<double> loss(q, 0.0);
    for (int i = 1; i <= n; ++i) {
      const TransformSample s =
          transform.sample(transform_seed(cfg.seed, t, i), x.size());
      const Vec xt = transform.apply(x, s);
      for (int j = 0; j < q; ++j) {
        const LossValue lv = evaluate_loss(objs[j], *models[j], xt);
        loss[j] += lv.value;
        k[j] += transform.apply_adjoint(lv.grad, s);
      }
    }
    LossValue out;
    out.value = 0.0;
    out.grad = Vec::Zero(x.size());
    for (int j = 0; j < q; ++j) {
      out.value += weights[j] * (loss[j] / n);
      out.grad += weights[j] * (k[j] / n);
    }
    return out;
  };
}

void check_ensemble(const std::vector<AttackObjective>& objs,
                    const std::vector<const EmbeddingModel*>& models,
                    const Vec& weights) {
  if (models.empty()) throw std::invalid_argument("attack: empty ensemble");
  if (objs.size() != models.size() ||
      weights.size() != static_cast<Index>(models.size()))
    throw std::invalid_argument(
        "attack: objectives, models and weights must have equal counts");
  double sum = 0.0;
  for (Index j = 0; j < weights.size(); ++j) {
    if (weights[j] < 0.0)
      throw std::invalid_argument("attack: ensemble weights must be >= 0");
    sum += weights[j];
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("attack: ensemble weights must sum to 1");
}

}  // namespace

AttackerKind attacker_from_name(const std::string& name) {
  if (name == "fgsm") return AttackerKind::kFgsm;
  if (name == "i-fgsm") return AttackerKind::kIfgsm;
  if (name == "mi-fgsm") return AttackerKind::kMifgsm;
  if (name == "ni-fgsm") return AttackerKind::kNifgsm;
  if (name == "acg") return AttackerKind::kAcg;
  if (name == "sta-mdct") return AttackerKind::kStaMdct;
  if (name == "sta-dct") return AttackerKind::kStaDct;
  throw std::invalid_argument("unknown attacker: " + name);
}

const char* attacker_name(AttackerKind kind) {
  switch (kind) {
    case AttackerKind::kFgsm: return "fgsm";
    case AttackerKind::kIfgsm: return "i-fgsm";
    case AttackerKind::kMifgsm: return "mi-fgsm";
    case AttackerKind::kNifgsm: return "ni-fgsm";
    case AttackerKind::kAcg: return "acg";
    case AttackerKind::kStaMdct: return "sta-mdct";
    case AttackerKind::kStaDct: return "sta-dct";
  }
  return "?";
}

void validate(const AttackConfig& cfg) {
  if (cfg.epsilon <= 0.0) throw std::invalid_argument("attack: epsilon must be > 0");
  if (cfg.iterations < 1) throw std::invalid_argument("attack: iterations must be >= 1");
  if (cfg.step <= 0.0) throw std::invalid_argument("attack: step must be > 0");
  if (cfg.n_transforms < 1) throw std::invalid_argument("attack: n_transforms must be >= 1");
  if (cfg.momentum < 0.0) throw std::invalid_argument("attack: momentum must be >= 0");
}

Vec clip_to_ball(const Vec& x_adv, const Vec& x, double eps) {
  if (x_adv.size() != x.size())
    throw std::invalid_argument("clip: length mismatch (" +
                                std::to_string(x_adv.size()) + " vs " +
                                std::to_string(x.size()) + ")");
  Vec out(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    double v = std::clamp(x_adv[i], x[i] - eps, x[i] + eps);
    out[i] = std::clamp(v, kSampleMin, kSampleMax);
  }
  return out;
}

bool in_epsilon_ball(const Vec& x, const Vec& x_adv, double eps) {
  if (x_adv.size() != x.size()) return false;
  for (Index i = 0; i < x.size(); ++i) {
    // Same bound expressions as clip_to_ball, so the check is exact.
    if (!(x_adv[i] >= x[i] - eps && x_adv[i] <= x[i] + eps)) return false;
    if (!(x_adv[i] >= kSampleMin && x_adv[i] <= kSampleMax)) return false;
  }
  return true;
}

Vec fgsm_step(const LossGradFn& f, const Vec& x, double eps) {
  if (eps < 0.0) throw std::invalid_argument("fgsm: epsilon must be >= 0");
  const LossValue lv = f(x, 0);
  check_finite(lv, 0);
  Vec out = x + eps * sign(lv.grad);
  for (Index i = 0; i < out.size(); ++i)
    out[i] = std::clamp(out[i], kSampleMin, kSampleMax);
  return out;
}

Vec iterate_signed(const LossGradFn& f, const Vec& x, const AttackConfig& cfg,
                   InnerRule rule, const AttackObserver& observer) {
  validate(cfg);
  const double eps = cfg.epsilon;
  Vec x_adv = x;

  if (rule == InnerRule::kAcg) {
    // Hestenes-Stiefel conjugate directions with a halving step schedule;
    // returns the best-loss iterate encountered.
    const int t_total = cfg.iterations;
    auto is_checkpoint = [t_total](int k) {
      return k == (t_total + 3) / 4 || k == (t_total + 1) / 2 ||
             k == (3 * t_total + 3) / 4;
    };
    double eta = 2.0 * eps / t_total;
    LossValue cur = f(x_adv, 0);
    check_finite(cur, 0);
    Vec best_x = x_adv;
    double best_loss = cur.value;
    Vec s = Vec::Zero(x.size());
    Vec g_prev;
    for (int t = 0; t < t_total; ++t) {
      double beta = 0.0;
      if (t == 0) {
        s = cur.grad;
      } else {
        const Vec y = g_prev - cur.grad;
        const double denom = s.dot(y);
        beta = std::abs(denom) < kHsGuard ? 0.0 : (-cur.grad).dot(y) / denom;
        s = cur.grad + beta * s;
      }
      const double eta_used = eta;
      Vec x_next = clip_to_ball(x_adv + eta * sign(s), x, eps);
      LossValue next = f(x_next, t + 1);
      check_finite(next, t + 1);
      const bool improved = next.value > best_loss;
      if (improved) {
        best_loss = next.value;
        best_x = x_next;
      }
      if (!improved || is_checkpoint(t + 1)) eta *= 0.5;
      if (observer)
        observer(IterationTrace{t, next.value, eta_used, beta, s, x_next});
      g_prev = std::move(cur.grad);
      cur = std::move(next);
      x_adv = std::move(x_next);
    }
    return best_x;
  }

  Vec g_momentum = Vec::Zero(x.size());
  for (int t = 0; t < cfg.iterations; ++t) {
    LossValue lv;
    if (rule == InnerRule::kNifgsm) {
      const Vec look_ahead = x_adv + cfg.step * cfg.momentum * g_momentum;
      lv = f(look_ahead, t);
    } else {
      lv = f(x_adv, t);
    }
    check_finite(lv, t);
    Vec direction;
    if (rule == InnerRule::kIfgsm) {
      direction = lv.grad;
    } else {
      const double l1 = std::max(lv.grad.lpNorm<1>(), kL1Guard);
      g_momentum = cfg.momentum * g_momentum + lv.grad / l1;
      direction = g_momentum;
    }
    x_adv = clip_to_ball(x_adv + cfg.step * sign(direction), x, eps);
    if (observer)
      observer(IterationTrace{t, lv.value, cfg.step, 0.0, direction, x_adv});
  }
  return x_adv;
}

Vec fgsm(const Vec& x, const AttackObjective& obj, const EmbeddingModel& m,
         double eps) {
  return fgsm_step(model_loss(obj, m), x, eps);
}

Vec ifgsm(const Vec& x, const AttackObjective& obj, const EmbeddingModel& m,
          const AttackConfig& cfg, const AttackObserver& observer) {
  return iterate_signed(model_loss(obj, m), x, cfg, InnerRule::kIfgsm, observer);
}

Vec mifgsm(const Vec& x, const AttackObjective& obj, const EmbeddingModel& m,
           const AttackConfig& cfg, const AttackObserver& observer) {
  return iterate_signed(model_loss(obj, m), x, cfg, InnerRule::kMifgsm, observer);
}

Vec nifgsm(const Vec& x, const AttackObjective& obj, const EmbeddingModel& m,
           const AttackConfig& cfg, const AttackObserver& observer) {
  return iterate_signed(model_loss(obj, m), x, cfg, InnerRule::kNifgsm, observer);
}

Vec acg(const Vec& x, const AttackObjective& obj, const EmbeddingModel& m,
        const AttackConfig& cfg, const AttackObserver& observer) {
  return iterate_signed(model_loss(obj, m), x, cfg, InnerRule::kAcg, observer);
}

Vec sta_attack(const Vec& x, const AttackObjective& obj,
               const EmbeddingModel& m, const AttackConfig& cfg,
               const AttackObserver& observer) {
  std::vector<AttackObjective> objs{obj};
  std::vector<const EmbeddingModel*> models{&m};
  return ensemble_sta_attack(x, objs, models, Vec::Ones(1), cfg, observer);
}

Vec ensemble_sta_attack(const Vec& x, const std::vector<AttackObjective>& objs,
                        const std::vector<const EmbeddingModel*>& models,
                        const Vec& weights, const AttackConfig& cfg,
                        const AttackObserver& observer) {
  validate(cfg);
  check_ensemble(objs, models, weights);
  const SpectrumTransform transform(cfg.transform);
  const LossGradFn f = sta_loss(objs, models, weights, transform, cfg);
  return iterate_signed(f, x, cfg, cfg.sta_inner, observer);
}

Vec run_attack(AttackerKind kind, const Vec& x,
               const std::vector<AttackObjective>& objs,
               const std::vector<const EmbeddingModel*>& models,
               const Vec& weights, const AttackConfig& cfg) {
  const bool is_sta =
      kind == AttackerKind::kStaMdct || kind == AttackerKind::kStaDct;
  if (!is_sta && models.size() != 1)
    throw std::invalid_argument(std::string(attacker_name(kind)) +
                                " uses a single surrogate model");
  switch (kind) {
    case AttackerKind::kFgsm:
      return fgsm(x, objs[0], *models[0], cfg.epsilon);
    case AttackerKind::kIfgsm:
      return ifgsm(x, objs[0], *models[0], cfg);
    case AttackerKind::kMifgsm:
      return mifgsm(x, objs[0], *models[0], cfg);
    case AttackerKind::kNifgsm:
      return nifgsm(x, objs[0], *models[0], cfg);
    case AttackerKind::kAcg:
      return acg(x, objs[0], *models[0], cfg);
    case AttackerKind::kStaMdct: {
      AttackConfig c = cfg;
      c.transform.variant = TransformVariant::kMdct;
      return ensemble_sta_attack(x, objs, models, weights, c);
    }
    case AttackerKind::kStaDct: {
      AttackConfig c = cfg;
      c.transform.variant = TransformVariant::kDct;
      return ensemble_sta_attack(x, objs, models, weights, c);
    }
  }
  throw std::invalid_argument("run_attack: unknown attacker");
}

}  // namespace stamdct
