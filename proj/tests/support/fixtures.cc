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

#include "support/fixtures.h"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <set>

#include "json.hpp"

namespace phraseboost::testing {

namespace {

const char* const kFillers[] = {
    "the",  "we",   "go",   "now",  "here", "then", "yes", "no",
    "bring", "keep", "open", "look", "for",  "our",  "new", "way",
    "hold", "feel", "home", "word"};

const char* const kKeyphrases[] = {"qubit", "zinc", "jackal", "vortex",
                                   "oxygen", "kayak", "quartz", "zephyr"};

int Id(const Vocabulary& vocab, const std::string& symbol) {
  return *vocab.Find(symbol);
}

// JSON has no infinities; the step-model format spells them "-inf".
nlohmann::json RowJson(const std::vector<float>& row) {
  nlohmann::json out = nlohmann::json::array();
  for (float x : row) {
    if (std::isinf(x)) {
      out.push_back("-inf");
    } else {
      out.push_back(x);
    }
  }
  return out;
}

}  // namespace

Vocabulary CharVocab(bool with_eos) {
  std::vector<std::string> tokens = {"<blank>", " "};
  for (char c = 'a'; c <= 'z'; ++c) tokens.emplace_back(1, c);
  std::optional<int> eos;
  if (with_eos) {
    eos = static_cast<int>(tokens.size());
    tokens.push_back("<eos>");
  }
  return Vocabulary(std::move(tokens), 0, eos);
}

ContextList FourPhraseList(const Vocabulary& vocab) {
  const std::vector<std::string> lines = {"cat", "cats", "csv", "sit"};
  return BuildContextList(lines, vocab, TokenizeMode::kChar);
}

ContextList RandomContextList(std::mt19937_64& rng, int vocab_size,
                              int max_phrases, int max_len) {
  const int alphabet =
      std::min(vocab_size - 1, 2 + static_cast<int>(rng() % 6));
  const int count = 1 + static_cast<int>(rng() % max_phrases);
  ContextList list;
  std::set<std::vector<int>> seen;
  for (int p = 0; p < count; ++p) {
    const int len = 1 + static_cast<int>(rng() % max_len);
    Phrase phrase;
    for (int i = 0; i < len; ++i) {
      const int tok = 1 + static_cast<int>(rng() % alphabet);
      phrase.token_ids.push_back(tok);
      if (i > 0) phrase.text += ' ';
      phrase.text += std::to_string(tok);
    }
    if (seen.insert(phrase.token_ids).second) {
      list.phrases.push_back(std::move(phrase));
    }
  }
  return list;
}

EmissionMatrix RandomEmissions(std::mt19937_64& rng, int num_frames,
                               int vocab_size, float spread) {
  std::uniform_real_distribution<float> u(-spread, spread);
  EmissionMatrix em;
  em.num_frames = num_frames;
  em.vocab_size = vocab_size;
  em.blank_id = 0;
  em.logprobs.resize(static_cast<size_t>(num_frames) * vocab_size);
  for (int t = 0; t < num_frames; ++t) {
    std::span<float> row = em.MutableRow(t);
    for (float& x : row) x = u(rng);
    LogSoftmax(row);
  }
  return em;
}

SyntheticCorpus MakeRecoveryCorpus(int num_utterances, float margin,
                                   int trailing_tokens, uint64_t seed) {
  SyntheticCorpus corpus{CharVocab(), {}, {}};
  std::vector<std::string> lines(std::begin(kKeyphrases),
                                 std::end(kKeyphrases));
  corpus.phrases =
      BuildContextList(lines, corpus.vocab, TokenizeMode::kChar);
  std::vector<int> avoid;
  for (const Phrase& p : corpus.phrases.phrases) {
    avoid.insert(avoid.end(), p.token_ids.begin(), p.token_ids.end());
  }
  std::mt19937_64 rng(seed);
  const int num_fillers = static_cast<int>(std::size(kFillers));
  const int num_phrases = static_cast<int>(std::size(kKeyphrases));
  for (int u = 0; u < num_utterances; ++u) {
    const std::string before = kFillers[rng() % num_fillers];
    const std::string after = kFillers[rng() % num_fillers];
    const std::string key = kKeyphrases[u % num_phrases];
    const std::string text = before + " " + key + " " + after;
    const std::vector<int> ids =
        Tokenize(text, corpus.vocab, TokenizeMode::kChar);
    SynthOptions opts;
    opts.margin = margin;
    opts.seed = seed * 1000003ull + u;
    opts.avoid = avoid;
    opts.designated.assign(ids.size(), false);
    const size_t start = before.size() + 1;
    const size_t trailing =
        trailing_tokens > 0 ? std::min<size_t>(trailing_tokens, key.size())
                            : key.size();
    for (size_t i = start; i < start + trailing; ++i) {
      opts.designated[i] = true;
    }
    corpus.utterances.push_back(
        {"utt" + std::to_string(u), text,
         SynthCtcEmissions(ids, corpus.vocab.size(), 0, opts)});
  }
  return corpus;
}

std::vector<float> ShapedRow(int vocab_size,
                             const std::vector<std::pair<int, float>>& fixed,
                             const std::vector<int>& excluded) {
  std::vector<float> row(vocab_size, 0.0f);
  std::vector<bool> is_fixed(vocab_size, false);
  double used = 0.0;
  for (const auto& [tok, lp] : fixed) {
    row[tok] = lp;
    is_fixed[tok] = true;
    used += std::exp(static_cast<double>(lp));
  }
  int rest = 0;
  for (int v = 0; v < vocab_size; ++v) {
    const bool skip = std::find(excluded.begin(), excluded.end(), v) !=
                      excluded.end();
    if (!is_fixed[v] && !skip) ++rest;
  }
  const float neg_inf = -std::numeric_limits<float>::infinity();
  const float share =
      rest > 0 ? static_cast<float>(std::log((1.0 - used) / rest)) : neg_inf;
  for (int v = 0; v < vocab_size; ++v) {
    if (is_fixed[v]) continue;
    const bool skip = std::find(excluded.begin(), excluded.end(), v) !=
                      excluded.end();
    row[v] = skip ? neg_inf : share;
  }
  LogSoftmax(row);
  return row;
}

AedFixture MakeAedOvergenerationFixture() {
  AedFixture fx;
  fx.vocab = CharVocab(/*with_eos=*/true);
  const std::vector<std::string> nouns = {"cat", "dog", "map", "cup", "pen"};
  std::vector<std::string> lines = nouns;
  // A short phrase starting with "s": after a noun, "s" is a cheap, boosted
  // continuation, which is what makes the unbumped decoder keep going.
  lines.push_back("sip");
  fx.phrases = BuildContextList(lines, fx.vocab, TokenizeMode::kChar);
  const std::vector<std::string> openers = {"the", "big", "my", "red", "old",
                                            "one", "her", "wet", "tiny",
                                            "lost"};
  const int V = fx.vocab.size();
  const int eos = *fx.vocab.eos_id();
  const int s_id = Id(fx.vocab, "s");
  const std::vector<int> no_blank = {0};
  for (size_t u = 0; u < openers.size(); ++u) {
    AedCase c;
    c.reference = openers[u] + " " + nouns[u % nouns.size()];
    c.reference_ids = Tokenize(c.reference, fx.vocab, TokenizeMode::kChar);
    nlohmann::json spec;
    spec["flavor"] = "aed";
    spec["vocab_size"] = V;
    spec["blank_id"] = 0;
    spec["eos_id"] = eos;
    // Off-path contexts: ending is by far the most likely continuation.
    spec["default"] = RowJson(ShapedRow(V, {{eos, -0.01f}}, no_blank));
    nlohmann::json rows = nlohmann::json::object();
    std::string key;
    for (size_t k = 0; k <= c.reference_ids.size(); ++k) {
      std::vector<float> row;
      if (k < c.reference_ids.size()) {
        row = ShapedRow(V, {{c.reference_ids[k], -1e-4f}, {eos, -30.0f}},
                        no_blank);
      } else {
        row = ShapedRow(V, {{eos, -0.5f}, {s_id, -1.2f}}, no_blank);
      }
      rows[key] = RowJson(row);
      if (k < c.reference_ids.size()) {
        if (!key.empty()) key += ' ';
        key += std::to_string(c.reference_ids[k]);
      }
    }
    spec["rows"] = rows;
    c.model = TableStepModel::FromJson(spec.dump());
    fx.max_len = std::max(fx.max_len,
                          2 * static_cast<int>(c.reference_ids.size()));
    fx.cases.push_back(std::move(c));
  }
  return fx;
}

const char* DecoderName(DecoderKind kind) {
  switch (kind) {
    case DecoderKind::kCtcGreedy:
      return "ctc-greedy";
    case DecoderKind::kCtcBeam:
      return "ctc-beam";
    case DecoderKind::kRnntGreedy:
      return "rnnt-greedy";
    case DecoderKind::kRnntBeam:
      return "rnnt-beam";
    case DecoderKind::kAedBeam:
      return "aed-beam";
  }
  return "?";
}

RandomDecodeInput MakeRandomDecodeInput(std::mt19937_64& rng, int max_frames,
                                        int max_vocab) {
  const int T = 1 + static_cast<int>(rng() % max_frames);
  const int V = 3 + static_cast<int>(rng() % (max_vocab - 2));
  EmissionMatrix em = RandomEmissions(rng, T, V);
  RandomStepModel transducer(StepFlavor::kTransducer, V, rng(), 0,
                             std::nullopt, 4.0f, 1.5f);
  RandomStepModel aed(StepFlavor::kAed, V, rng(), std::nullopt, V - 1, 4.0f,
                      0.0f, -1.0f);
  return {std::move(em), std::move(transducer), std::move(aed), T};
}

DecodeResult RunDecoder(DecoderKind kind, const RandomDecodeInput& input,
                        const ArcTable* table, const DecodeConfig& config) {
  switch (kind) {
    case DecoderKind::kCtcGreedy:
      return CtcGreedyDecode(input.emissions, table, config);
    case DecoderKind::kCtcBeam:
      return CtcBeamDecode(input.emissions, table, config).front();
    case DecoderKind::kRnntGreedy:
      return TransducerGreedyDecode(input.transducer, input.num_frames, table,
                                    config);
    case DecoderKind::kRnntBeam:
      return TransducerBeamDecode(input.transducer, input.num_frames, table,
                                  config)
          .front();
    case DecoderKind::kAedBeam:
      return AedBeamDecode(input.aed, table, config, input.num_frames).front();
  }
  return {};
}

ContextList RandomListForDecoding(std::mt19937_64& rng, int vocab_size) {
  ContextList list = RandomContextList(rng, vocab_size - 1, 12, 4);
  // RandomContextList draws ids from 1..; they already avoid 0 and, with
  // vocab_size - 1 as the bound, never reach vocab_size - 1.
  return list;
}

std::string TempPath(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("phraseboost_tests_" + std::to_string(getpid()));
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace phraseboost::testing
