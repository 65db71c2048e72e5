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

#include <array>
#include <map>
#include <string>
#include <vector>

#include "stamdct/nets.hpp"
#include "stamdct/types.hpp"

namespace stamdct {

/// Synthetic multi-speaker corpus: each speaker owns three harmonic
/// frequencies and a formant-like resonance; utterances add white noise at a
/// fixed SNR. Samples are integer-valued on the 16-bit scale, as if read from
/// PCM files.
struct CorpusSpec {
  int n_speakers = 20;
  int utterances_per_speaker = 30;
  double duration_s = 1.0;
  uint64_t seed = 1;
  double target_rms = 2000.0;
  double noise_snr_db = 20.0;
};

struct Utterance {
  std::string speaker;
  Waveform wav;
};

struct Corpus {
  std::vector<Utterance> utterances;

  std::vector<std::string> speaker_ids() const;
  std::vector<const Utterance*> by_speaker(const std::string& id) const;
};

struct SpeakerSignature {
  std::array<double, 3> harmonics_hz;
  double formant_hz;
  double formant_bw_hz;
};

/// The deterministic per-speaker signature drawn by synth_corpus for the
/// given spec (exposed for tests and diagnostics).
SpeakerSignature speaker_signature(const CorpusSpec& spec, int speaker);

Corpus synth_corpus(const CorpusSpec& spec);

/// Directory layout corpus/<speaker>/<utterance>.wav plus manifest.csv with
/// path,speaker rows.
void save_corpus(const Corpus& corpus, const std::string& dir);
Corpus load_corpus(const std::string& dir);

struct TrainConfig {
  int epochs = 24;
  double learning_rate = 0.05;
  int batch_size = 32;
  uint64_t seed = 7;
};

struct TrainLog {
  std::vector<double> epoch_loss;      // mean cross-entropy per epoch
  std::vector<double> epoch_accuracy;  // training accuracy per epoch
  double final_accuracy = 0.0;
};

/// Softmax cross-entropy over speaker classes on top of the embedding;
/// mini-batch gradient descent; the classification head is discarded.
/// Deterministic given the seed. Throws if the loss turns NaN, naming the
/// epoch.
TrainLog train(EmbeddingModel& model, const Corpus& corpus,
               const TrainConfig& cfg);

}  // namespace stamdct
