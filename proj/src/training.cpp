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

#include "stamdct/training.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "stamdct/audio_io.hpp"

namespace stamdct {

namespace fs = std::filesystem;

std::vector<std::string> Corpus::speaker_ids() const {
  std::vector<std::string> ids;
  for (const Utterance& u : utterances)
    if (std::find(ids.begin(), ids.end(), u.speaker) == ids.end())
      ids.push_back(u.speaker);
  return ids;
}

std::vector<const Utterance*> Corpus::by_speaker(const std::string& id) const {
  std::vector<const Utterance*> out;
  for (const Utterance& u : utterances)
    if (u.speaker == id) out.push_back(&u);
  return out;
}

SpeakerSignature speaker_signature(const CorpusSpec& spec, int speaker) {
  // One RNG stream per speaker; collisions between speakers are resolved by
  // comparing against the lower-indexed signatures and redrawing.
  auto draw = [&](int spk, int attempt) {
    Rng rng(mix_seed(spec.seed, 0x5157u + static_cast<uint64_t>(spk),
                     static_cast<uint64_t>(attempt)));
    SpeakerSignature s;
    // Integer frequencies sit on exact DFT bins of a 1 s utterance.
    s.harmonics_hz[0] = 150 + rng.uniform_int(250);
    s.harmonics_hz[1] = 500 + rng.uniform_int(1000);
    s.harmonics_hz[2] = 1800 + rng.uniform_int(1800);
    s.formant_hz = 400.0 + rng.uniform(0.0, 2100.0);
    s.formant_bw_hz = 150.0 + rng.uniform(0.0, 150.0);
    return s;
  };
  std::vector<SpeakerSignature> prior(speaker + 1);
  for (int spk = 0; spk <= speaker; ++spk) {
    int attempt = 0;
    while (true) {
      SpeakerSignature cand = draw(spk, attempt);
      bool clash = false;
      for (int q = 0; q < spk && !clash; ++q)
        clash = prior[q].harmonics_hz == cand.harmonics_hz;
      if (!clash) {
        prior[spk] = cand;
        break;
      }
      ++attempt;
    }
  }
  return prior[speaker];
}

Corpus synth_corpus(const CorpusSpec& spec) {
  if (spec.n_speakers < 2)
    throw std::invalid_argument("synth_corpus: need at least 2 speakers");
  if (spec.utterances_per_speaker < 1)
    throw std::invalid_argument("synth_corpus: need at least 1 utterance");
  const Index n = static_cast<Index>(spec.duration_s * kSampleRate);
  Corpus corpus;
  corpus.utterances.reserve(static_cast<size_t>(spec.n_speakers) *
                            spec.utterances_per_speaker);
  for (int spk = 0; spk < spec.n_speakers; ++spk) {
    const SpeakerSignature sig = speaker_signature(spec, spk);
    char name[16];
    std::snprintf(name, sizeof(name), "spk%03d", spk);
    for (int u = 0; u < spec.utterances_per_speaker; ++u) {
      Rng rng(mix_seed(spec.seed, 0xA0D10u + static_cast<uint64_t>(spk),
                       static_cast<uint64_t>(u)));
      Vec x = Vec::Zero(n);
      // Harmonic stack, amplitudes shaped by the formant resonance but kept
      // well above the noise floor.
      for (double f : sig.harmonics_hz) {
        const double det = (f - sig.formant_hz) / sig.formant_bw_hz;
        const double shape = 1.0 / (1.0 + 0.25 * det * det);
        const double amp = (0.45 + 0.55 * shape) * rng.uniform(0.85, 1.15);
        const double phase = rng.uniform(0.0, 2.0 * M_PI);
        for (Index i = 0; i < n; ++i)
          x[i] += amp * std::sin(2.0 * M_PI * f * i / kSampleRate + phase);
      }
      const double sig_rms = std::sqrt(x.squaredNorm() / n);
      x *= spec.target_rms / sig_rms;

      // Formant-filtered white noise at the configured SNR below the signal.
      Vec noise(n);
      for (Index i = 0; i < n; ++i) noise[i] = rng.gaussian();
      const double r = std::exp(-M_PI * sig.formant_bw_hz / kSampleRate);
      const double a1 = -2.0 * r * std::cos(2.0 * M_PI * sig.formant_hz / kSampleRate);
      const double a2 = r * r;
      double y1 = 0.0, y2 = 0.0;
      for (Index i = 0; i < n; ++i) {
        const double y = noise[i] - a1 * y1 - a2 * y2;
        y2 = y1;
        y1 = y;
        noise[i] = y;
      }
      const double noise_rms_target =
          spec.target_rms * std::pow(10.0, -spec.noise_snr_db / 20.0);
      noise *= noise_rms_target / std::sqrt(noise.squaredNorm() / n);
      x += noise;

      // Integer samples, as if the corpus had gone through PCM files.
      for (Index i = 0; i < n; ++i)
        x[i] = std::clamp(std::round(x[i]), kSampleMin, kSampleMax);
      corpus.utterances.push_back(
          Utterance{name, Waveform{std::move(x), kSampleRate}});
    }
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& dir) {
  fs::create_directories(dir);
  std::ofstream manifest(fs::path(dir) / "manifest.csv", std::ios::trunc);
  if (!manifest)
    throw std::runtime_error("save_corpus: cannot write manifest in " + dir);
  manifest << "path,speaker\n";
  std::map<std::string, int> counter;
  for (const Utterance& u : corpus.utterances) {
    const int idx = counter[u.speaker]++;
    char name[16];
    std::snprintf(name, sizeof(name), "utt%03d.wav", idx);
    const fs::path spk_dir = fs::path(dir) / u.speaker;
    fs::create_directories(spk_dir);
    const fs::path p = spk_dir / name;
    write_wav(p.string(), u.wav);
    manifest << u.speaker << "/" << name << "," << u.speaker << "\n";
  }
}

Corpus load_corpus(const std::string& dir) {
  if (!fs::is_directory(dir))
    throw std::runtime_error("load_corpus: not a directory: " + dir);
  Corpus corpus;
  std::vector<fs::path> speakers;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_directory()) speakers.push_back(e.path());
  std::sort(speakers.begin(), speakers.end());
  for (const fs::path& spk : speakers) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(spk))
      if (e.path().extension() == ".wav") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files)
      corpus.utterances.push_back(
          Utterance{spk.filename().string(), read_wav(f.string())});
  }
  if (corpus.utterances.empty())
    throw std::runtime_error("load_corpus: no <speaker>/<utt>.wav files in " +
                             dir);
  return corpus;
}

TrainLog train(EmbeddingModel& model, const Corpus& corpus,
               const TrainConfig& cfg) {
  if (cfg.epochs < 1 || cfg.batch_size < 1 || cfg.learning_rate < 0.0)
    throw std::invalid_argument("train: epochs and batch size must be "
                                "positive, learning rate non-negative");
  const std::vector<std::string> ids = corpus.speaker_ids();
  const int n_classes = static_cast<int>(ids.size());
  if (n_classes < 2)
    throw std::invalid_argument("train: corpus must contain >= 2 speakers");
  std::map<std::string, int> class_of;
  for (int i = 0; i < n_classes; ++i) class_of[ids[i]] = i;

  const int n = static_cast<int>(corpus.utterances.size());
  std::vector<int> label(n);
  std::vector<Mat> trunk_inputs(n);  // frontend outputs, computed once
  for (int i = 0; i < n; ++i) {
    label[i] = class_of[corpus.utterances[i].speaker];
    trunk_inputs[i] = model.preprocess(corpus.utterances[i].wav.samples);
  }

  Rng rng(cfg.seed);
  model.init_params(rng.bits());
  const int e_dim = model.embedding_dim();
  Mat w_cls(n_classes, e_dim);
  Vec b_cls = Vec::Zero(n_classes);
  {
    const double a = std::sqrt(6.0 / (n_classes + e_dim));
    for (Index i = 0; i < w_cls.size(); ++i)
      w_cls.data()[i] = rng.uniform(-a, a);
  }

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  TrainLog log;
  BackwardOptions opt;
  opt.input_grad = false;
  opt.param_grad = true;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Seeded Fisher-Yates shuffle.
    for (int i = n - 1; i > 0; --i)
      std::swap(order[i], order[rng.uniform_int(i + 1)]);

    double loss_sum = 0.0;
    int correct = 0;
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int count = std::min(cfg.batch_size, n - start);
      Vec pgrad = Vec::Zero(model.param_count());
      Mat wc_grad = Mat::Zero(n_classes, e_dim);
      Vec bc_grad = Vec::Zero(n_classes);
      for (int b = 0; b < count; ++b) {
        const int i = order[start + b];
        ActivationCache cache;
        const Vec e = model.embed_preprocessed(trunk_inputs[i], &cache);
        Vec logits = w_cls * e + b_cls;
        const double zmax = logits.maxCoeff();
        Vec p = (logits.array() - zmax).exp();
        p /= p.sum();
        loss_sum += -std::log(std::max(p[label[i]], 1e-300));
        int arg = 0;
        logits.maxCoeff(&arg);
        if (arg == label[i]) ++correct;

        Vec dz = p;
        dz[label[i]] -= 1.0;
        wc_grad += dz * e.transpose();
        bc_grad += dz;
        const Vec de = w_cls.transpose() * dz;
        pgrad += model.backward(cache, de, opt).params;
      }
      const double scale = cfg.learning_rate / count;
      model.params() -= scale * pgrad;
      w_cls -= scale * wc_grad;
      b_cls -= scale * bc_grad;
    }
    const double mean_loss = loss_sum / n;
    if (!std::isfinite(mean_loss))
      throw std::runtime_error("train: loss diverged (NaN) at epoch " +
                               std::to_string(epoch));
    log.epoch_loss.push_back(mean_loss);
    log.epoch_accuracy.push_back(static_cast<double>(correct) / n);
  }

  // Final accuracy with the trained parameters.
  int correct = 0;
  for (int i = 0; i < n; ++i) {
    ActivationCache cache;
    const Vec e = model.embed_preprocessed(trunk_inputs[i], &cache);
    Vec logits = w_cls * e + b_cls;
    int arg = 0;
    logits.maxCoeff(&arg);
    if (arg == label[i]) ++correct;
  }
  log.final_accuracy = static_cast<double>(correct) / n;
  return log;
}

}  // namespace stamdct
