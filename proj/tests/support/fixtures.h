// Copyright (c) 2026 The phraseboost Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Shared synthetic inputs: vocabularies, random trees and emissions, and the
// fixed corpora behind the recovery and end-of-sentence regression checks.

#ifndef PHRASEBOOST_TESTS_SUPPORT_FIXTURES_H_
#define PHRASEBOOST_TESTS_SUPPORT_FIXTURES_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "phraseboost/arc_table.h"
#include "phraseboost/context_list.h"
#include "phraseboost/decoder.h"
#include "phraseboost/emissions.h"
#include "phraseboost/prefix_tree.h"
#include "phraseboost/step_model.h"
#include "phraseboost/vocabulary.h"

namespace phraseboost::testing {

// "<blank>", " ", "a".."z" and, when with_eos, a trailing "<eos>".
Vocabulary CharVocab(bool with_eos = false);

// The {cat, cats, csv, sit} list over CharVocab.
ContextList FourPhraseList(const Vocabulary& vocab);

// Random phrases of random token ids drawn from a small alphabet so that
// suffix sharing is frequent. Token 0 is never used (kept for blank).
ContextList RandomContextList(std::mt19937_64& rng, int vocab_size,
                              int max_phrases, int max_len);

// Random normalized T x V log-probabilities with blank at id 0.
EmissionMatrix RandomEmissions(std::mt19937_64& rng, int num_frames,
                               int vocab_size, float spread = 3.0f);

struct Utterance {
  std::string id;
  std::string text;
  EmissionMatrix emissions;
};

struct SyntheticCorpus {
  Vocabulary vocab;
  ContextList phrases;
  std::vector<Utterance> utterances;
};

// Utterances "<filler> <keyphrase> <filler>" where every keyphrase token
// trails a distractor by margin nats over frames_per_token frames. Filler
// frames are clean.
// "filler keyphrase filler" utterances. The first trailing_tokens tokens of
// the keyphrase (all of them when 0) trail a distractor by margin nats.
SyntheticCorpus MakeRecoveryCorpus(int num_utterances, float margin,
                                   int trailing_tokens, uint64_t seed);

struct AedCase {
  std::string reference;
  std::vector<int> reference_ids;
  TableStepModel model;
};

struct AedFixture {
  Vocabulary vocab;
  ContextList phrases;
  std::vector<AedCase> cases;
  float lambda = 2.0f;
  int max_len = 0;
};

// Ten utterances "<opener> <noun>" ending in a phrase; "sip" is also a phrase.
// After the reference the model prefers eos, but a strongly boosted
// continuation overtakes it unless the end-of-sentence bonus applies.
AedFixture MakeAedOvergenerationFixture();

// Normalized row with the given (token, logprob) entries; remaining mass is
// spread evenly over the other tokens except those in excluded.
std::vector<float> ShapedRow(int vocab_size,
                             const std::vector<std::pair<int, float>>& fixed,
                             const std::vector<int>& excluded = {});

enum class DecoderKind { kCtcGreedy, kCtcBeam, kRnntGreedy, kRnntBeam, kAedBeam };

inline constexpr DecoderKind kAllDecoders[] = {
    DecoderKind::kCtcGreedy, DecoderKind::kCtcBeam, DecoderKind::kRnntGreedy,
    DecoderKind::kRnntBeam, DecoderKind::kAedBeam};

const char* DecoderName(DecoderKind kind);

// One random problem instance for every decoder family: CTC emissions with
// blank 0, a transducer step model with blank 0 and an AED step model with
// eos V - 1, all over the same vocabulary size.
struct RandomDecodeInput {
  EmissionMatrix emissions;
  RandomStepModel transducer;
  RandomStepModel aed;
  int num_frames;
};

RandomDecodeInput MakeRandomDecodeInput(std::mt19937_64& rng, int max_frames,
                                        int max_vocab);

DecodeResult RunDecoder(DecoderKind kind, const RandomDecodeInput& input,
                        const ArcTable* table, const DecodeConfig& config);

// Phrase list over ids 1..V-2 (never blank 0 or eos V-1).
ContextList RandomListForDecoding(std::mt19937_64& rng, int vocab_size);

std::string TempPath(const std::string& name);

}  // namespace phraseboost::testing

#endif  // PHRASEBOOST_TESTS_SUPPORT_FIXTURES_H_
