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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "stamdct/audio_io.hpp"
#include "stamdct/config.hpp"
#include "stamdct/harness.hpp"
#include "stamdct/saliency.hpp"

namespace fs = std::filesystem;
using namespace stamdct;

namespace {

struct AttackFlags {
  std::string attacker = "sta-mdct";
  std::vector<std::string> surrogates;
  std::vector<std::string> profile_files;
  std::string objective = "asv-imp";
  std::string in_wav, out_wav, config_file;
  std::string enroll_speaker, target_speaker, sta_inner;
  std::optional<double> epsilon, step, momentum, sigma, rho, theta, kbd_beta;
  std::optional<int> iterations, n_transforms, mdct_window;
  std::optional<uint64_t> seed;
};

void print_kv(const std::string& key, const std::string& value) {
  std::cout << key << " = " << value << "\n";
}

std::string fmt_num(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

AttackConfig resolve_attack_config(const AttackFlags& f, int* mdct_window_out,
                                   double* kbd_beta_out,
                                   std::string* inner_out) {
  AttackConfig cfg;
  int window = 1024;
  double beta = 4.0;
  std::string inner = "i-fgsm";
  bool step_given = false;
  if (!f.config_file.empty()) {
    Config file = Config::parse_file(f.config_file);
    cfg.epsilon = file.get_double("epsilon", cfg.epsilon);
    cfg.iterations = file.get_int("iterations", cfg.iterations);
    if (file.has("step")) {
      cfg.step = file.get_double("step", cfg.step);
      step_given = true;
    }
    cfg.momentum = file.get_double("momentum", cfg.momentum);
    cfg.n_transforms = file.get_int("n_transforms", cfg.n_transforms);
    cfg.transform.sigma = file.get_double("sigma", cfg.transform.sigma);
    cfg.transform.rho = file.get_double("rho", cfg.transform.rho);
    window = file.get_int("mdct_window", window);
    beta = file.get_double("kbd_beta", beta);
    cfg.seed = file.get_u64("seed", cfg.seed);
    inner = file.get_string("sta_inner", inner);
    file.check_consumed();
  }
  // Command-line flags override file values.
  if (f.epsilon) cfg.epsilon = *f.epsilon;
  if (f.iterations) cfg.iterations = *f.iterations;
  if (f.step) {
    cfg.step = *f.step;
    step_given = true;
  }
  if (!step_given) cfg.step = cfg.epsilon / cfg.iterations;
  if (f.momentum) cfg.momentum = *f.momentum;
  if (f.n_transforms) cfg.n_transforms = *f.n_transforms;
  if (f.sigma) cfg.transform.sigma = *f.sigma;
  if (f.rho) cfg.transform.rho = *f.rho;
  if (f.mdct_window) window = *f.mdct_window;
  if (f.kbd_beta) beta = *f.kbd_beta;
  if (f.seed) cfg.seed = *f.seed;
  if (!f.sta_inner.empty()) inner = f.sta_inner;
  if (inner == "i-fgsm") cfg.sta_inner = InnerRule::kIfgsm;
  else if (inner == "mi-fgsm") cfg.sta_inner = InnerRule::kMifgsm;
  else if (inner == "ni-fgsm") cfg.sta_inner = InnerRule::kNifgsm;
  else if (inner == "acg") cfg.sta_inner = InnerRule::kAcg;
  else throw std::runtime_error("unknown sta inner rule: " + inner);
  cfg.transform.window = kbd_window(window, beta);
  *mdct_window_out = window;
  *kbd_beta_out = beta;
  *inner_out = inner;
  return cfg;
}

void print_attack_config(const AttackConfig& cfg, int window, double beta,
                         const std::string& inner) {
  print_kv("epsilon", fmt_num(cfg.epsilon));
  print_kv("iterations", fmt_num(cfg.iterations));
  print_kv("step", fmt_num(cfg.step));
  print_kv("momentum", fmt_num(cfg.momentum));
  print_kv("n_transforms", fmt_num(cfg.n_transforms));
  print_kv("sigma", fmt_num(cfg.transform.sigma));
  print_kv("rho", fmt_num(cfg.transform.rho));
  print_kv("mdct_window", fmt_num(window));
  print_kv("kbd_beta", fmt_num(beta));
  print_kv("sta_inner", inner);
  print_kv("seed", std::to_string(cfg.seed));
}

int cmd_defaults() {
  // The attack defaults every command resolves to unless overridden.
  std::cout << "epsilon = 40        # max L-inf perturbation, 16-bit sample scale\n"
            << "iterations = 10     # T, optimizer steps\n"
            << "step = 4            # alpha = epsilon / T, per-step size\n"
            << "n_transforms = 20   # N, spectrum-transform draws per step\n"
            << "sigma = 44          # std-dev of the additive noise xi\n"
            << "rho = 0.75          # mask range, M ~ U(1 - rho, 1 + rho)\n"
            << "momentum = 1        # mu, decay for MI/NI-FGSM\n"
            << "mdct_window = 1024  # KBD window length (64 ms at 16 kHz)\n"
            << "kbd_beta = 4        # Kaiser shape of the KBD window\n"
            << "sta_inner = i-fgsm  # update rule inside the STA loop\n";
  return 0;
}

int cmd_synth(const std::string& spec_file, const std::string& out_dir,
              std::optional<uint64_t> seed) {
  CorpusSpec spec;
  if (!spec_file.empty()) {
    Config c = Config::parse_file(spec_file);
    spec.n_speakers = c.get_int("n_speakers", spec.n_speakers);
    spec.utterances_per_speaker =
        c.get_int("utterances_per_speaker", spec.utterances_per_speaker);
    spec.duration_s = c.get_double("duration", spec.duration_s);
    spec.seed = c.get_u64("seed", spec.seed);
    spec.target_rms = c.get_double("target_rms", spec.target_rms);
    spec.noise_snr_db = c.get_double("noise_snr_db", spec.noise_snr_db);
    c.check_consumed();
  }
  if (seed) spec.seed = *seed;
  print_kv("n_speakers", fmt_num(spec.n_speakers));
  print_kv("utterances_per_speaker", fmt_num(spec.utterances_per_speaker));
  print_kv("duration", fmt_num(spec.duration_s));
  print_kv("seed", std::to_string(spec.seed));
  print_kv("target_rms", fmt_num(spec.target_rms));
  print_kv("noise_snr_db", fmt_num(spec.noise_snr_db));
  print_kv("out", out_dir);
  save_corpus(synth_corpus(spec), out_dir);
  std::cout << "wrote " << spec.n_speakers * spec.utterances_per_speaker
            << " utterances\n";
  return 0;
}

int cmd_train(const std::string& model_name, const std::string& corpus_dir,
              const std::string& out_file, int epochs, double lr, int batch,
              uint64_t seed) {
  EmbeddingModel model = [&] {
    if (model_name == "A" || model_name == "a" || model_name == "conv-net-a")
      return EmbeddingModel::conv_net_a();
    if (model_name == "B" || model_name == "b" || model_name == "frame-net-b")
      return EmbeddingModel::frame_net_b();
    throw std::runtime_error("unknown model '" + model_name +
                             "' (want A or B)");
  }();
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.learning_rate = lr;
  cfg.batch_size = batch;
  cfg.seed = seed;
  print_kv("model", model.arch_name());
  print_kv("corpus", corpus_dir);
  print_kv("epochs", fmt_num(cfg.epochs));
  print_kv("learning_rate", fmt_num(cfg.learning_rate));
  print_kv("batch_size", fmt_num(cfg.batch_size));
  print_kv("seed", std::to_string(cfg.seed));
  print_kv("out", out_file);
  const Corpus corpus = load_corpus(corpus_dir);
  const TrainLog log = train(model, corpus, cfg);
  model.save(out_file);
  std::cout << "final_loss = " << log.epoch_loss.back() << "\n";
  std::cout << "train_accuracy = " << log.final_accuracy << "\n";
  return 0;
}

int cmd_enroll(const std::string& model_file, const std::string& corpus_dir,
               const std::string& out_file, int utts_per_speaker) {
  print_kv("model", model_file);
  print_kv("corpus", corpus_dir);
  print_kv("utts_per_speaker",
           utts_per_speaker > 0 ? fmt_num(utts_per_speaker) : "all");
  print_kv("out", out_file);
  const EmbeddingModel model = EmbeddingModel::load(model_file);
  const Corpus corpus = load_corpus(corpus_dir);
  std::vector<SpeakerProfile> profiles;
  for (const std::string& id : corpus.speaker_ids()) {
    std::vector<Waveform> utts;
    for (const Utterance* u : corpus.by_speaker(id)) {
      utts.push_back(u->wav);
      if (utts_per_speaker > 0 &&
          static_cast<int>(utts.size()) >= utts_per_speaker)
        break;
    }
    profiles.push_back(enroll(model, utts, id));
  }
  save_profiles(profiles, out_file);
  std::cout << "enrolled " << profiles.size() << " speakers\n";
  return 0;
}

int cmd_attack(const AttackFlags& f) {
  if (f.surrogates.empty()) throw std::runtime_error("attack: no surrogate model");
  if (f.profile_files.size() != f.surrogates.size())
    throw std::runtime_error(
        "attack: need one --profiles file per surrogate model");
  int window = 0;
  double beta = 0.0;
  std::string inner;
  const AttackConfig cfg = resolve_attack_config(f, &window, &beta, &inner);
  print_kv("attacker", f.attacker);
  print_kv("objective", f.objective);
  print_kv("in", f.in_wav);
  print_kv("out", f.out_wav);
  print_attack_config(cfg, window, beta, inner);

  const AttackerKind kind = attacker_from_name(f.attacker);
  const Waveform x = read_wav(f.in_wav);

  std::vector<EmbeddingModel> models;
  std::vector<const EmbeddingModel*> model_ptrs;
  for (const std::string& m : f.surrogates) models.push_back(EmbeddingModel::load(m));
  for (const EmbeddingModel& m : models) model_ptrs.push_back(&m);

  std::vector<AttackObjective> objs;
  for (size_t j = 0; j < models.size(); ++j) {
    const std::vector<SpeakerProfile> profiles =
        load_profiles(f.profile_files[j]);
    AttackObjective obj;
    if (f.objective == "asv-imp" || f.objective == "asv-eva") {
      obj.task = f.objective == "asv-imp" ? AttackTask::kAsvImpersonation
                                          : AttackTask::kAsvEvasion;
      if (f.enroll_speaker.empty())
        throw std::runtime_error("attack: --enroll-speaker is required for ASV");
      for (const SpeakerProfile& p : profiles)
        if (p.speaker == f.enroll_speaker) obj.profiles = {p};
      if (obj.profiles.empty())
        throw std::runtime_error("attack: speaker " + f.enroll_speaker +
                                 " not found in " + f.profile_files[j]);
    } else if (f.objective == "csi" || f.objective == "osi") {
      obj.task = f.objective == "csi" ? AttackTask::kCsiTargeted
                                      : AttackTask::kOsiTargeted;
      obj.profiles = profiles;
      obj.target = -1;
      for (int r = 0; r < static_cast<int>(profiles.size()); ++r)
        if (profiles[r].speaker == f.target_speaker) obj.target = r;
      if (obj.target < 0)
        throw std::runtime_error("attack: --target speaker not enrolled");
      if (f.objective == "osi") {
        if (!f.theta) throw std::runtime_error("attack: OSI needs --theta");
        obj.threshold = *f.theta;
      }
    } else {
      throw std::runtime_error("attack: unknown objective " + f.objective);
    }
    objs.push_back(std::move(obj));
  }

  const Vec weights = Vec::Constant(
      static_cast<Index>(models.size()), 1.0 / static_cast<double>(models.size()));
  const Vec x_adv = run_attack(kind, x.samples, objs, model_ptrs, weights, cfg);

  // Quantize as the file will store it, then verify the ball before writing.
  Waveform out;
  out.samples.resize(x_adv.size());
  for (Index i = 0; i < x_adv.size(); ++i)
    out.samples[i] = std::clamp(std::round(x_adv[i]), kSampleMin, kSampleMax);
  if (!in_epsilon_ball(x.samples, out.samples, cfg.epsilon))
    throw std::runtime_error(
        "attack: epsilon-ball violation detected before writing output");
  write_wav(f.out_wav, out);
  std::cout << "snr_db = " << snr_db(x.samples, out.samples) << "\n";
  std::cout << "l2_unit = " << l2(x.samples, out.samples).unit << "\n";
  return 0;
}

int cmd_evaluate(const std::string& victim_file, const std::string& profiles_file,
                 const std::string& trials_file, const std::string& out_file,
                 std::optional<double> theta_flag) {
  print_kv("victim", victim_file);
  print_kv("profiles", profiles_file);
  print_kv("trials", trials_file);
  print_kv("out", out_file);
  const EmbeddingModel victim = EmbeddingModel::load(victim_file);
  const std::vector<SpeakerProfile> profiles = load_profiles(profiles_file);
  auto profile_of = [&](const std::string& id) -> const SpeakerProfile& {
    for (const SpeakerProfile& p : profiles)
      if (p.speaker == id) return p;
    throw std::runtime_error("evaluate: no profile for speaker " + id);
  };

  std::ifstream in(trials_file);
  if (!in) throw std::runtime_error("evaluate: cannot open " + trials_file);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("evaluate: empty trial list");
  if (line != "enroll,path,label" && line != "enroll,path,label,adv_path")
    throw std::runtime_error(
        "evaluate: expected header enroll,path,label[,adv_path], got " + line);
  ScoreSet scores;
  TrialSet trials;
  std::vector<Decision> decisions;
  std::vector<double> all_scores;
  const fs::path base = fs::path(trials_file).parent_path();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string enroll_id, path, label, adv_path;
    std::getline(ss, enroll_id, ',');
    std::getline(ss, path, ',');
    std::getline(ss, label, ',');
    std::getline(ss, adv_path, ',');
    if (label != "target" && label != "nontarget")
      throw std::runtime_error("evaluate: label must be target|nontarget, got " +
                               label);
    Trial t;
    t.enroll_speaker = enroll_id;
    t.is_target = label == "target";
    t.adv_wave = adv_path.empty() ? -1 : 0;
    const std::string use = adv_path.empty() ? path : adv_path;
    const Waveform w = read_wav((base / use).string());
    const double s =
        score(profile_of(enroll_id).embedding, victim.embed(w.samples));
    (t.is_target ? scores.target : scores.nontarget).push_back(s);
    all_scores.push_back(s);
    trials.push_back(std::move(t));
  }
  const EerResult e = eer(scores);
  const double dcf = min_dcf(scores);
  const double theta = theta_flag ? *theta_flag : e.threshold;
  for (size_t i = 0; i < trials.size(); ++i)
    decisions.push_back(Decision{asv_accept(all_scores[i], theta), ""});
  const Rates r = rates(TaskKind::kAsv, trials, decisions);

  std::ofstream out(out_file, std::ios::trunc);
  if (!out) throw std::runtime_error("evaluate: cannot open " + out_file);
  out << "eer,min_dcf,far,tasr,theta,trials\n";
  out << e.eer << ',' << dcf << ',' << (r.far ? std::to_string(*r.far) : "")
      << ',' << (r.tasr ? std::to_string(*r.tasr) : "") << ',' << theta << ','
      << trials.size() << "\n";
  std::cout << "eer = " << e.eer << "\n"
            << "min_dcf = " << dcf << "\n"
            << "theta = " << theta << "\n";
  return 0;
}

int cmd_saliency(const std::string& model_file, const std::string& in_wav,
                 const std::string& profiles_file, const std::string& speaker,
                 const std::string& layer, const std::string& out_file) {
  print_kv("model", model_file);
  print_kv("in", in_wav);
  print_kv("profile", speaker);
  print_kv("layer", layer);
  print_kv("out", out_file);
  const EmbeddingModel model = EmbeddingModel::load(model_file);
  const Waveform x = read_wav(in_wav);
  const std::vector<SpeakerProfile> profiles = load_profiles(profiles_file);
  const SpeakerProfile* profile = nullptr;
  for (const SpeakerProfile& p : profiles)
    if (p.speaker == speaker) profile = &p;
  if (!profile)
    throw std::runtime_error("saliency: speaker " + speaker + " not enrolled");
  const SaliencyMap map = layer_cam(model, x.samples, *profile, layer);
  render_pgm(map, out_file);
  fs::path csv = out_file;
  csv.replace_extension(".csv");
  write_matrix_csv(map.normalized, csv.string());
  std::cout << "score = " << map.score << "\n";
  std::cout << "layer = " << map.layer << "\n";
  return 0;
}

int cmd_experiment(const std::string& plan_file, const std::string& out_override) {
  ExperimentPlan plan = load_plan(plan_file);
  if (!out_override.empty()) plan.out_dir = out_override;
  std::cout << manifest_text(plan);
  run(plan);
  std::cout << "results in " << plan.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transferable adversarial audio attacks on toy speaker models"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate the synthetic corpus");
  std::string synth_spec, synth_out;
  std::optional<uint64_t> synth_seed;
  synth->add_option("--spec", synth_spec, "corpus spec file (key = value)");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--seed", synth_seed, "seed override");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a toy embedding model");
  std::string train_model, train_corpus, train_out;
  int train_epochs = 24, train_batch = 32;
  double train_lr = 0.05;
  uint64_t train_seed = 7;
  train_cmd->add_option("--model", train_model, "A (spectrogram) or B (raw)")
      ->required();
  train_cmd->add_option("--corpus", train_corpus, "corpus directory")->required();
  train_cmd->add_option("--out", train_out, "model file to write")->required();
  train_cmd->add_option("--epochs", train_epochs, "training epochs");
  train_cmd->add_option("--lr", train_lr, "learning rate");
  train_cmd->add_option("--batch", train_batch, "mini-batch size");
  train_cmd->add_option("--seed", train_seed, "training seed");

  // enroll
  auto* enroll_cmd = app.add_subcommand("enroll", "Build speaker profiles");
  std::string enroll_model, enroll_corpus, enroll_out;
  int enroll_utts = 0;
  enroll_cmd->add_option("--model", enroll_model, "model file")->required();
  enroll_cmd->add_option("--corpus", enroll_corpus, "corpus directory")->required();
  enroll_cmd->add_option("--out", enroll_out, "profiles file to write")->required();
  enroll_cmd->add_option("--utts-per-speaker", enroll_utts,
                         "enrollment utterances per speaker (0 = all)");

  // attack
  auto* attack_cmd = app.add_subcommand("attack", "Craft an adversarial example");
  AttackFlags af;
  attack_cmd->add_option("--attacker", af.attacker,
                         "fgsm|i-fgsm|mi-fgsm|ni-fgsm|acg|sta-mdct|sta-dct");
  attack_cmd->add_option("--surrogate", af.surrogates,
                         "surrogate model file(s)")
      ->required()
      ->delimiter(',');
  attack_cmd->add_option("--profiles", af.profile_files,
                         "profiles file per surrogate")
      ->required()
      ->delimiter(',');
  attack_cmd->add_option("--objective", af.objective,
                         "asv-imp|asv-eva|csi|osi");
  attack_cmd->add_option("--in", af.in_wav, "input wav")->required();
  attack_cmd->add_option("--out", af.out_wav, "output wav")->required();
  attack_cmd->add_option("--config", af.config_file, "attack config file");
  attack_cmd->add_option("--enroll-speaker", af.enroll_speaker,
                         "enrollment speaker (ASV objectives)");
  attack_cmd->add_option("--target", af.target_speaker,
                         "target speaker (CSI/OSI objectives)");
  attack_cmd->add_option("--theta", af.theta, "decision threshold (OSI)");
  attack_cmd->add_option("--epsilon", af.epsilon, "max L-inf perturbation");
  attack_cmd->add_option("--iterations", af.iterations, "iterations T");
  attack_cmd->add_option("--step", af.step, "step size alpha");
  attack_cmd->add_option("--momentum", af.momentum, "momentum mu");
  attack_cmd->add_option("--n-transforms", af.n_transforms,
                         "transform draws N per iteration");
  attack_cmd->add_option("--sigma", af.sigma, "transform noise std-dev");
  attack_cmd->add_option("--rho", af.rho, "transform mask range");
  attack_cmd->add_option("--mdct-window", af.mdct_window, "MDCT window length");
  attack_cmd->add_option("--kbd-beta", af.kbd_beta, "KBD window shape");
  attack_cmd->add_option("--sta-inner", af.sta_inner,
                         "STA inner rule (i-fgsm|mi-fgsm|ni-fgsm|acg)");
  attack_cmd->add_option("--seed", af.seed, "attack seed");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a trial list");
  std::string eval_victim, eval_profiles, eval_trials, eval_out;
  std::optional<double> eval_theta;
  eval_cmd->add_option("--victim", eval_victim, "victim model file")->required();
  eval_cmd->add_option("--profiles", eval_profiles, "profiles file")->required();
  eval_cmd->add_option("--trials", eval_trials, "trial csv")->required();
  eval_cmd->add_option("--out", eval_out, "results csv")->required();
  eval_cmd->add_option("--theta", eval_theta, "decision threshold override");

  // saliency
  auto* sal_cmd = app.add_subcommand("saliency", "Layer-CAM saliency map");
  std::string sal_model, sal_in, sal_profiles, sal_speaker, sal_out;
  std::string sal_layer = "last-conv";
  sal_cmd->add_option("--model", sal_model, "model file")->required();
  sal_cmd->add_option("--in", sal_in, "input wav")->required();
  sal_cmd->add_option("--profiles", sal_profiles, "profiles file")->required();
  sal_cmd->add_option("--profile", sal_speaker, "speaker id")->required();
  sal_cmd->add_option("--layer", sal_layer, "layer name or last-conv");
  sal_cmd->add_option("--out", sal_out, "output PGM path")->required();

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "Run an experiment plan");
  std::string exp_plan, exp_out;
  exp_cmd->add_option("--plan", exp_plan, "plan file (or a manifest)")->required();
  exp_cmd->add_option("--out", exp_out, "output directory override");

  // defaults
  app.add_subcommand("defaults", "Print the attack parameter defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // help
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand("defaults")) return cmd_defaults();
    if (app.got_subcommand(synth))
      return cmd_synth(synth_spec, synth_out, synth_seed);
    if (app.got_subcommand(train_cmd))
      return cmd_train(train_model, train_corpus, train_out, train_epochs,
                       train_lr, train_batch, train_seed);
    if (app.got_subcommand(enroll_cmd))
      return cmd_enroll(enroll_model, enroll_corpus, enroll_out, enroll_utts);
    if (app.got_subcommand(attack_cmd)) return cmd_attack(af);
    if (app.got_subcommand(eval_cmd))
      return cmd_evaluate(eval_victim, eval_profiles, eval_trials, eval_out,
                          eval_theta);
    if (app.got_subcommand(sal_cmd))
      return cmd_saliency(sal_model, sal_in, sal_profiles, sal_speaker,
                          sal_layer, sal_out);
    if (app.got_subcommand(exp_cmd)) return cmd_experiment(exp_plan, exp_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
