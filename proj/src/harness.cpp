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

#include "stamdct/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "stamdct/config.hpp"
#include "stamdct/saliency.hpp"

namespace stamdct {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt(*v) : std::string();
}

std::string stem_of(const std::string& path) {
  return fs::path(path).stem().string();
}

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

const char* inner_rule_name(InnerRule rule) {
  switch (rule) {
    case InnerRule::kIfgsm: return "i-fgsm";
    case InnerRule::kMifgsm: return "mi-fgsm";
    case InnerRule::kNifgsm: return "ni-fgsm";
    case InnerRule::kAcg: return "acg";
  }
  return "?";
}

InnerRule inner_rule_from_name(const std::string& name) {
  if (name == "i-fgsm") return InnerRule::kIfgsm;
  if (name == "mi-fgsm") return InnerRule::kMifgsm;
  if (name == "ni-fgsm") return InnerRule::kNifgsm;
  if (name == "acg") return InnerRule::kAcg;
  throw std::invalid_argument("unknown STA inner rule: " + name);
}

// Round to the integer sample grid, as a PCM round trip would.
Waveform quantize(const Vec& x) {
  Waveform w;
  w.samples.resize(x.size());
  for (Index i = 0; i < x.size(); ++i)
    w.samples[i] = std::clamp(std::round(x[i]), kSampleMin, kSampleMax);
  return w;
}

const SpeakerProfile& profile_of(const ModelContext& ctx,
                                 const std::string& speaker) {
  for (const SpeakerProfile& p : ctx.profiles)
    if (p.speaker == speaker) return p;
  throw std::runtime_error("no enrollment profile for speaker " + speaker +
                           " in model " + ctx.name);
}

AttackObjective trial_objective(const Trial& trial, const ModelContext& ctx,
                                TaskKind task) {
  AttackObjective obj;
  switch (task) {
    case TaskKind::kAsv:
      obj.task = trial.is_target ? AttackTask::kAsvEvasion
                                 : AttackTask::kAsvImpersonation;
      obj.profiles = {profile_of(ctx, trial.enroll_speaker)};
      break;
    case TaskKind::kCsi:
    case TaskKind::kOsi: {
      obj.task = task == TaskKind::kCsi ? AttackTask::kCsiTargeted
                                        : AttackTask::kOsiTargeted;
      obj.profiles = ctx.profiles;
      obj.target = -1;
      for (int r = 0; r < static_cast<int>(ctx.profiles.size()); ++r)
        if (ctx.profiles[r].speaker == trial.target_speaker) obj.target = r;
      if (obj.target < 0)
        throw std::runtime_error("attack target " + trial.target_speaker +
                                 " is not enrolled");
      if (task == TaskKind::kOsi) obj.threshold = ctx.theta;
      break;
    }
  }
  return obj;
}

std::vector<double> id_scores(const ModelContext& ctx, const Vec& x) {
  const Vec e = ctx.model.embed(x);
  std::vector<double> s(ctx.profiles.size());
  for (size_t r = 0; r < ctx.profiles.size(); ++r)
    s[r] = score(ctx.profiles[r].embedding, e);
  return s;
}

}  // namespace

PreparedTask build_trials(const ExperimentPlan& plan, const Corpus& corpus) {
  if (plan.trials < 1)
    throw std::invalid_argument("build_trials: trial count must be >= 1");
  PreparedTask task;
  task.kind = plan.task;
  const std::vector<std::string> speakers = corpus.speaker_ids();
  Rng rng(mix_seed(plan.seed, 0xB117D0ULL,
                   static_cast<uint64_t>(plan.task)));

  // Deterministic speaker order for enrollment selection.
  std::vector<std::string> shuffled = speakers;
  for (int i = static_cast<int>(shuffled.size()) - 1; i > 0; --i)
    std::swap(shuffled[i], shuffled[rng.uniform_int(i + 1)]);

  auto utterances_of = [&](const std::string& id) {
    return corpus.by_speaker(id);
  };

  if (plan.task == TaskKind::kAsv) {
    for (const std::string& id : speakers) {
      const auto utts = utterances_of(id);
      if (static_cast<int>(utts.size()) < plan.enroll_utts + 1)
        throw std::invalid_argument(
            "build_trials: speaker " + id + " has " +
            std::to_string(utts.size()) + " utterances; need enroll_utts + 1");
      for (int k = 0; k < plan.enroll_utts; ++k)
        task.enroll_audio[id].push_back(utts[k]->wav);
    }
    task.enrolled = speakers;
    const int n_target = plan.trials / 2;
    for (int i = 0; i < plan.trials; ++i) {
      const bool is_target = i < n_target;
      Trial t;
      t.is_target = is_target;
      const int enroll_idx = rng.uniform_int(static_cast<int>(speakers.size()));
      t.enroll_speaker = speakers[static_cast<size_t>(enroll_idx)];
      if (is_target) {
        t.test_speaker = t.enroll_speaker;
      } else {
        int other = rng.uniform_int(static_cast<int>(speakers.size()) - 1);
        if (other >= enroll_idx) ++other;
        t.test_speaker = speakers[static_cast<size_t>(other)];
      }
      t.target_speaker = t.enroll_speaker;
      const auto pool = utterances_of(t.test_speaker);
      const int pick = plan.enroll_utts +
                       rng.uniform_int(static_cast<int>(pool.size()) -
                                       plan.enroll_utts);
      t.wave = static_cast<int>(task.waves.size());
      task.waves.push_back(pool[static_cast<size_t>(pick)]->wav);
      task.trials.push_back(std::move(t));
    }
    return task;
  }

  // Identification tasks.
  const int r = plan.enrolled_speakers;
  if (r < 2 || r > static_cast<int>(speakers.size()))
    throw std::invalid_argument(
        "build_trials: enrolled_speakers must be in [2, n_speakers]");
  task.enrolled.assign(shuffled.begin(), shuffled.begin() + r);
  std::sort(task.enrolled.begin(), task.enrolled.end());
  for (const std::string& id : task.enrolled) {
    const auto utts = utterances_of(id);
    const int need =
        plan.task == TaskKind::kCsi ? plan.enroll_utts + 1 : plan.enroll_utts;
    if (static_cast<int>(utts.size()) < need)
      throw std::invalid_argument("build_trials: speaker " + id +
                                  " is too small for enrollment");
    for (int k = 0; k < plan.enroll_utts; ++k)
      task.enroll_audio[id].push_back(utts[k]->wav);
  }

  if (plan.task == TaskKind::kCsi) {
    for (int i = 0; i < plan.trials; ++i) {
      Trial t;
      const int truth = rng.uniform_int(r);
      t.test_speaker = task.enrolled[static_cast<size_t>(truth)];
      t.enroll_speaker = t.test_speaker;
      const auto pool = utterances_of(t.test_speaker);
      const int pick = plan.enroll_utts +
                       rng.uniform_int(static_cast<int>(pool.size()) -
                                       plan.enroll_utts);
      int tgt = rng.uniform_int(r - 1);
      if (tgt >= truth) ++tgt;
      t.target_speaker = task.enrolled[static_cast<size_t>(tgt)];
      t.wave = static_cast<int>(task.waves.size());
      task.waves.push_back(pool[static_cast<size_t>(pick)]->wav);
      task.trials.push_back(std::move(t));
    }
    return task;
  }

  // OSI: test speakers disjoint from the enrollment.
  std::vector<std::string> outside(shuffled.begin() + r, shuffled.end());
  std::sort(outside.begin(), outside.end());
  if (outside.empty())
    throw std::invalid_argument(
        "build_trials: OSI needs speakers outside the enrollment set");
  for (const std::string& id : task.enrolled) {
    const auto utts = utterances_of(id);
    const int held_out =
        std::min<int>(3, static_cast<int>(utts.size()) - plan.enroll_utts);
    for (int k = 0; k < held_out; ++k)
      task.calibration_audio.push_back(utts[plan.enroll_utts + k]->wav);
  }
  for (int i = 0; i < plan.trials; ++i) {
    Trial t;
    t.truth_in_enrollment = false;
    t.test_speaker = outside[static_cast<size_t>(
        rng.uniform_int(static_cast<int>(outside.size())))];
    t.enroll_speaker = t.test_speaker;
    const auto pool = utterances_of(t.test_speaker);
    t.target_speaker = task.enrolled[static_cast<size_t>(rng.uniform_int(r))];
    t.wave = static_cast<int>(task.waves.size());
    task.waves.push_back(
        pool[static_cast<size_t>(rng.uniform_int(static_cast<int>(pool.size())))]
            ->wav);
    task.trials.push_back(std::move(t));
  }
  return task;
}

ModelContext prepare_model(const std::string& path, const PreparedTask& task) {
  return prepare_model(stem_of(path), EmbeddingModel::load(path), task);
}

ModelContext prepare_model(std::string name, EmbeddingModel model,
                           const PreparedTask& task) {
  ModelContext ctx;
  ctx.path = name;
  ctx.name = std::move(name);
  ctx.model = std::move(model);
  for (const std::string& id : task.enrolled)
    ctx.profiles.push_back(enroll(ctx.model, task.enroll_audio.at(id), id));

  ScoreSet calib;
  switch (task.kind) {
    case TaskKind::kAsv: {
      // Threshold at the EER operating point of the clean trial scores.
      for (const Trial& t : task.trials) {
        const double s = score(profile_of(ctx, t.enroll_speaker).embedding,
                               ctx.model.embed(task.waves[t.wave].samples));
        (t.is_target ? calib.target : calib.nontarget).push_back(s);
      }
      break;
    }
    case TaskKind::kCsi:
      // Arg-max decisions need no threshold.
      ctx.theta = std::numeric_limits<double>::quiet_NaN();
      ctx.clean_eer = 0.0;
      return ctx;
    case TaskKind::kOsi: {
      // Max-score verification: positives are held-out utterances of the
      // enrolled speakers, negatives the out-of-set clean trials.
      for (const Waveform& w : task.calibration_audio) {
        const std::vector<double> s = id_scores(ctx, w.samples);
        calib.target.push_back(*std::max_element(s.begin(), s.end()));
      }
      for (const Trial& t : task.trials) {
        const std::vector<double> s = id_scores(ctx, task.waves[t.wave].samples);
        calib.nontarget.push_back(*std::max_element(s.begin(), s.end()));
      }
      break;
    }
  }
  const EerResult r = eer(calib);
  ctx.theta = r.threshold;
  ctx.clean_eer = r.eer;
  return ctx;
}

std::vector<AdversarialExample> attack_trials(
    const PreparedTask& task,
    const std::vector<const ModelContext*>& surrogates, AttackerKind attacker,
    const AttackConfig& cfg) {
  if (surrogates.empty())
    throw std::invalid_argument("attack_trials: no surrogate models");
  const TaskKind kind = task.kind;
  std::vector<const EmbeddingModel*> models;
  for (const ModelContext* s : surrogates) models.push_back(&s->model);
  const Vec weights =
      Vec::Constant(static_cast<Index>(models.size()),
                    1.0 / static_cast<double>(models.size()));

  std::vector<AdversarialExample> out(task.trials.size());
  for (size_t i = 0; i < task.trials.size(); ++i) {
    const Trial& trial = task.trials[i];
    std::vector<AttackObjective> objs;
    for (const ModelContext* s : surrogates)
      objs.push_back(trial_objective(trial, *s, kind));
    const Vec& x = task.waves[trial.wave].samples;
    AttackConfig per_trial = cfg;
    per_trial.seed = mix_seed(cfg.seed, 0xA77ACCULL, i);
    const Vec x_adv = run_attack(attacker, x, objs, models, weights, per_trial);
    if (!in_epsilon_ball(x, x_adv, cfg.epsilon))
      throw std::runtime_error("attack_trials: epsilon-ball violation at trial " +
                               std::to_string(i));
    AdversarialExample ex;
    ex.trial = static_cast<int>(i);
    ex.wav = quantize(x_adv);
    if (!in_epsilon_ball(x, ex.wav.samples, cfg.epsilon))
      throw std::runtime_error(
          "attack_trials: quantized example violates the epsilon ball at "
          "trial " + std::to_string(i));
    ex.snr_db = snr_db(x, ex.wav.samples);
    const L2Result l = l2(x, ex.wav.samples);
    ex.l2_unit = l.unit;
    ex.l2_raw = l.raw;
    out[i] = std::move(ex);
  }
  return out;
}

ScoreSet asv_scores(const PreparedTask& task, const ModelContext& victim,
                    const TrialSet& trials,
                    const std::vector<AdversarialExample>& adversarial) {
  ScoreSet s;
  for (const Trial& t : trials) {
    const Vec& x = t.adv_wave >= 0
                       ? adversarial[static_cast<size_t>(t.adv_wave)].wav.samples
                       : task.waves[t.wave].samples;
    const double v =
        score(profile_of(victim, t.enroll_speaker).embedding,
              victim.model.embed(x));
    (t.is_target ? s.target : s.nontarget).push_back(v);
  }
  return s;
}

CellMetrics evaluate_cell(const PreparedTask& task, const ModelContext& victim,
                          const std::vector<AdversarialExample>& adversarial) {
  if (adversarial.size() != task.trials.size())
    throw std::invalid_argument("evaluate_cell: adversarial set mismatch");
  CellMetrics cell;
  double snr_sum = 0.0, l2_sum = 0.0;
  int snr_n = 0;
  for (const AdversarialExample& ex : adversarial) {
    if (std::isfinite(ex.snr_db)) {
      snr_sum += ex.snr_db;
      ++snr_n;
    }
    l2_sum += ex.l2_unit;
  }
  cell.snr_mean_db = snr_n ? snr_sum / snr_n
                           : std::numeric_limits<double>::infinity();
  cell.l2_unit_mean = adversarial.empty()
                          ? 0.0
                          : l2_sum / static_cast<double>(adversarial.size());

  const bool osi = task.kind == TaskKind::kOsi;
  const bool asv = task.kind == TaskKind::kAsv;

  TrialSet adv_trials = task.trials;
  for (size_t i = 0; i < adv_trials.size(); ++i) {
    adv_trials[i].adv_wave = static_cast<int>(i);
    adv_trials[i].adv_snr_db = adversarial[i].snr_db;
  }

  if (asv) {
    const ScoreSet s = asv_scores(task, victim, adv_trials, adversarial);
    cell.eer = eer(s).eer;
    cell.min_dcf = min_dcf(s);
    std::vector<Decision> decisions;
    size_t ti = 0, ni = 0;
    for (const Trial& t : adv_trials) {
      const double v = t.is_target ? s.target[ti++] : s.nontarget[ni++];
      decisions.push_back(Decision{asv_accept(v, victim.theta), ""});
    }
    const Rates r = rates(TaskKind::kAsv, adv_trials, decisions);
    cell.far = r.far;
    cell.tasr = r.tasr;
    cell.ier = r.ier;
    return cell;
  }

  // Identification: decide every adversarial trial on the victim.
  std::vector<Decision> decisions;
  for (size_t i = 0; i < adv_trials.size(); ++i) {
    const std::vector<double> s =
        id_scores(victim, adversarial[i].wav.samples);
    Decision d;
    if (osi) {
      const int pick = osi_decide(s, victim.theta);
      d.accepted = pick >= 0;
      if (pick >= 0) d.decided_speaker = victim.profiles[pick].speaker;
    } else {
      const int pick = csi_decide(s);
      d.accepted = true;
      d.decided_speaker = victim.profiles[pick].speaker;
    }
    decisions.push_back(std::move(d));
  }
  const Rates r =
      rates(osi ? TaskKind::kOsi : TaskKind::kCsi, adv_trials, decisions);
  cell.far = r.far;
  cell.tasr = r.tasr;
  cell.ier = r.ier;
  cell.eer = std::numeric_limits<double>::quiet_NaN();
  cell.min_dcf = std::numeric_limits<double>::quiet_NaN();
  return cell;
}

std::vector<BudgetPoint> snr_budget_sweep(
    const PreparedTask& task, const ModelContext& victim,
    const std::vector<AdversarialExample>& adversarial,
    const std::vector<double>& budgets) {
  TrialSet originals = task.trials;
  TrialSet adv_trials = task.trials;
  std::vector<int> g_imp, g_eva;
  for (size_t i = 0; i < adv_trials.size(); ++i) {
    adv_trials[i].adv_wave = static_cast<int>(i);
    adv_trials[i].adv_snr_db = adversarial[i].snr_db;
    (originals[i].is_target ? g_eva : g_imp).push_back(static_cast<int>(i));
  }
  // Scores are cached once per victim; mixing only selects between them.
  std::vector<double> clean_score(task.trials.size());
  std::vector<double> adv_score(task.trials.size());
  for (size_t i = 0; i < task.trials.size(); ++i) {
    const Trial& t = task.trials[i];
    const Vec& p = profile_of(victim, t.enroll_speaker).embedding;
    clean_score[i] = score(p, victim.model.embed(task.waves[t.wave].samples));
    adv_score[i] = score(p, victim.model.embed(adversarial[i].wav.samples));
  }
  auto mixed_scores = [&](double b, const std::vector<int>& g) {
    const TrialSet mixed = mixed_trial_set(originals, adv_trials, b, g);
    ScoreSet s;
    for (size_t i = 0; i < mixed.size(); ++i) {
      const double v =
          mixed[i].adv_wave >= 0 ? adv_score[i] : clean_score[i];
      (mixed[i].is_target ? s.target : s.nontarget).push_back(v);
    }
    return s;
  };
  std::vector<BudgetPoint> out;
  for (double b : budgets) {
    BudgetPoint pt;
    pt.budget_db = b;
    const ScoreSet imp = mixed_scores(b, g_imp);
    pt.eer_impersonation = eer(imp).eer;
    pt.dcf_impersonation = min_dcf(imp);
    const ScoreSet eva = mixed_scores(b, g_eva);
    pt.eer_evasion = eer(eva).eer;
    pt.dcf_evasion = min_dcf(eva);
    out.push_back(pt);
  }
  return out;
}

ExperimentPlan load_plan(const std::string& path) {
  Config cfg = Config::parse_file(path);
  ExperimentPlan plan;
  plan.task = task_from_name(cfg.get_string("task", "asv"));
  plan.corpus_dir = cfg.require_string("corpus");
  plan.surrogates = cfg.get_list("surrogates");
  plan.victims = cfg.get_list("victims");
  for (const std::string& a : cfg.get_list("attackers"))
    plan.attackers.push_back(attacker_from_name(a));
  plan.trials = cfg.get_int("trials", plan.trials);
  plan.enroll_utts = cfg.get_int("enroll_utts", plan.enroll_utts);
  plan.enrolled_speakers =
      cfg.get_int("enrolled_speakers", plan.enrolled_speakers);
  plan.seed = cfg.get_u64("seed", plan.seed);
  plan.attack.epsilon = cfg.get_double("epsilon", plan.attack.epsilon);
  plan.attack.iterations = cfg.get_int("iterations", plan.attack.iterations);
  plan.attack.step = cfg.get_double("step", plan.attack.epsilon /
                                                plan.attack.iterations);
  plan.attack.momentum = cfg.get_double("momentum", plan.attack.momentum);
  plan.attack.n_transforms =
      cfg.get_int("n_transforms", plan.attack.n_transforms);
  plan.attack.transform.sigma =
      cfg.get_double("sigma", plan.attack.transform.sigma);
  plan.attack.transform.rho = cfg.get_double("rho", plan.attack.transform.rho);
  plan.mdct_window = cfg.get_int("mdct_window", plan.mdct_window);
  plan.kbd_beta = cfg.get_double("kbd_beta", plan.kbd_beta);
  plan.attack.sta_inner =
      inner_rule_from_name(cfg.get_string("sta_inner", "i-fgsm"));
  plan.attack.seed = plan.seed;
  plan.snr_budgets = cfg.get_double_list("snr_budgets");
  plan.saliency = cfg.get_bool("saliency", plan.saliency);
  plan.saliency_count = cfg.get_int("saliency_count", plan.saliency_count);
  plan.out_dir = cfg.get_string("out", plan.out_dir);
  cfg.get_u64("config_hash", 0);  // informational; recomputed on save
  cfg.check_consumed();
  if (plan.surrogates.empty() || plan.victims.empty() ||
      plan.attackers.empty())
    throw std::runtime_error(
        "plan: surrogates, victims and attackers must all be non-empty");
  plan.attack.transform.window = kbd_window(plan.mdct_window, plan.kbd_beta);
  return plan;
}

std::string manifest_text(const ExperimentPlan& plan) {
  std::ostringstream out;
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i)
      s += (i ? "," : "") + v[i];
    return s;
  };
  std::vector<std::string> attackers;
  for (AttackerKind k : plan.attackers) attackers.push_back(attacker_name(k));
  std::vector<std::string> budgets;
  for (double b : plan.snr_budgets) {
    if (std::isinf(b))
      budgets.push_back(b > 0 ? "inf" : "-inf");
    else
      budgets.push_back(fmt(b));
  }
  out << "task = " << task_name(plan.task) << "\n";
  out << "corpus = " << plan.corpus_dir << "\n";
  out << "surrogates = " << join(plan.surrogates) << "\n";
  out << "victims = " << join(plan.victims) << "\n";
  out << "attackers = " << join(attackers) << "\n";
  out << "trials = " << plan.trials << "\n";
  out << "enroll_utts = " << plan.enroll_utts << "\n";
  out << "enrolled_speakers = " << plan.enrolled_speakers << "\n";
  out << "seed = " << plan.seed << "\n";
  out << "epsilon = " << fmt(plan.attack.epsilon) << "\n";
  out << "iterations = " << plan.attack.iterations << "\n";
  out << "step = " << fmt(plan.attack.step) << "\n";
  out << "momentum = " << fmt(plan.attack.momentum) << "\n";
  out << "n_transforms = " << plan.attack.n_transforms << "\n";
  out << "sigma = " << fmt(plan.attack.transform.sigma) << "\n";
  out << "rho = " << fmt(plan.attack.transform.rho) << "\n";
  out << "mdct_window = " << plan.mdct_window << "\n";
  out << "kbd_beta = " << fmt(plan.kbd_beta) << "\n";
  out << "sta_inner = " << inner_rule_name(plan.attack.sta_inner) << "\n";
  if (!budgets.empty()) out << "snr_budgets = " << join(budgets) << "\n";
  out << "saliency = " << (plan.saliency ? 1 : 0) << "\n";
  out << "saliency_count = " << plan.saliency_count << "\n";
  out << "out = " << plan.out_dir << "\n";
  const std::string body = out.str();
  return body + "config_hash = " + std::to_string(fnv1a64(body)) + "\n";
}

void run(const ExperimentPlan& plan) {
  if (plan.out_dir.empty())
    throw std::invalid_argument("run: plan has no output directory");
  const Corpus corpus = load_corpus(plan.corpus_dir);
  const PreparedTask task = build_trials(plan, corpus);

  std::vector<ModelContext> surrogate_ctx;
  for (const std::string& p : plan.surrogates)
    surrogate_ctx.push_back(prepare_model(p, task));
  std::vector<ModelContext> victim_ctx;
  for (const std::string& p : plan.victims)
    victim_ctx.push_back(prepare_model(p, task));
  std::vector<const ModelContext*> surrogate_ptrs;
  std::string group;
  for (size_t i = 0; i < surrogate_ctx.size(); ++i) {
    surrogate_ptrs.push_back(&surrogate_ctx[i]);
    group += (i ? "+" : "") + surrogate_ctx[i].name;
  }
  std::set<std::string> surrogate_paths(plan.surrogates.begin(),
                                        plan.surrogates.end());

  fs::create_directories(plan.out_dir);
  {
    std::ofstream m(fs::path(plan.out_dir) / "manifest.txt", std::ios::trunc);
    m << manifest_text(plan);
  }

  for (AttackerKind attacker : plan.attackers) {
    const std::vector<AdversarialExample> adversarial =
        attack_trials(task, surrogate_ptrs, attacker, plan.attack);
    for (size_t v = 0; v < victim_ctx.size(); ++v) {
      const ModelContext& victim = victim_ctx[v];
      CellMetrics cell = evaluate_cell(task, victim, adversarial);
      cell.white_box = surrogate_paths.count(plan.victims[v]) > 0;
      const std::string base =
          group + "__" + attacker_name(attacker) + "__" + victim.name;
      {
        std::ofstream csv(fs::path(plan.out_dir) / (base + ".csv"),
                          std::ios::trunc);
        csv << "surrogate,attacker,victim,white_box,eer,min_dcf,far,tasr,ier,"
               "snr_db,l2_unit\n";
        csv << group << ',' << attacker_name(attacker) << ',' << victim.name
            << ',' << (cell.white_box ? 1 : 0) << ',' << fmt(cell.eer) << ','
            << fmt(cell.min_dcf) << ',' << fmt_opt(cell.far) << ','
            << fmt_opt(cell.tasr) << ',' << fmt_opt(cell.ier) << ','
            << fmt(cell.snr_mean_db) << ',' << fmt(cell.l2_unit_mean) << "\n";
      }
      if (!plan.snr_budgets.empty() && plan.task == TaskKind::kAsv) {
        const std::vector<BudgetPoint> sweep =
            snr_budget_sweep(task, victim, adversarial, plan.snr_budgets);
        std::ofstream csv(fs::path(plan.out_dir) / ("sweep__" + base + ".csv"),
                          std::ios::trunc);
        csv << "budget_db,eer_imp,min_dcf_imp,eer_eva,min_dcf_eva\n";
        for (const BudgetPoint& pt : sweep)
          csv << fmt(pt.budget_db) << ',' << fmt(pt.eer_impersonation) << ','
              << fmt(pt.dcf_impersonation) << ',' << fmt(pt.eer_evasion) << ','
              << fmt(pt.dcf_evasion) << "\n";
      }
    }
    // Saliency before/after dumps on the first victim with a conv layer.
    if (plan.saliency) {
      const ModelContext* cam_victim = nullptr;
      for (const ModelContext& v : victim_ctx)
        if (v.model.arch() == Arch::kConvNetA) {
          cam_victim = &v;
          break;
        }
      if (cam_victim) {
        const fs::path dir = fs::path(plan.out_dir) / "saliency";
        fs::create_directories(dir);
        const int count = std::min<int>(plan.saliency_count,
                                        static_cast<int>(task.trials.size()));
        for (int i = 0; i < count; ++i) {
          const Trial& t = task.trials[static_cast<size_t>(i)];
          const SpeakerProfile& p = profile_of(*cam_victim, t.enroll_speaker);
          const SaliencyMap clean = layer_cam(
              cam_victim->model, task.waves[t.wave].samples, p, "last-conv");
          const SaliencyMap adv =
              layer_cam(cam_victim->model,
                        adversarial[static_cast<size_t>(i)].wav.samples, p,
                        "last-conv");
          const std::string stem =
              std::string(attacker_name(attacker)) + "__trial" +
              std::to_string(i);
          render_pgm(clean, (dir / (stem + "__clean.pgm")).string());
          render_pgm(adv, (dir / (stem + "__adv.pgm")).string());
          write_matrix_csv(clean.normalized,
                           (dir / (stem + "__clean.csv")).string());
          write_matrix_csv(adv.normalized,
                           (dir / (stem + "__adv.csv")).string());
        }
      }
    }
  }
}

}  // namespace stamdct
