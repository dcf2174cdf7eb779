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

#include "decode_common.h"
#include "phraseboost/decoder.h"
#include "phraseboost/error.h"

namespace phraseboost {

using internal::kNegInf;

namespace {

struct Hyp {
  std::vector<int> tokens;
  float am = 0.0f;
  Score boost = 0.0f;
  int32_t state = ArcTable::kRoot;
  bool ended = false;
  Score eos_bonus = 0.0f;
};

}  // namespace

NBest AedBeamDecode(const StepModel& model, const ArcTable* table,
                    const DecodeConfig& config, int max_len) {
  config.Validate();
  Require(model.flavor() == StepFlavor::kAed,
          "AED decoding needs an aed-flavor step model");
  Require(model.eos_id().has_value(), "AED decoding needs an eos id");
  Require(max_len >= 1, "max_len must be >= 1");
  internal::CheckTableVocab(table, model.vocab_size());
  const bool boosting = internal::Boosting(table, config);
  const bool bump = boosting && config.eos_bump_enabled;
  const int eos = *model.eos_id();
  const std::optional<int> blank = model.blank_id();
  const int vocab = model.vocab_size();
  const float lambda = config.lambda;

  auto before = [lambda](const Hyp& a, const Hyp& b) {
    return internal::RanksBefore(a.am + lambda * a.boost, a.am, a.tokens,
                                 b.am + lambda * b.boost, b.am, b.tokens);
  };

  std::vector<Hyp> beam(1);
  std::vector<int32_t> states;
  std::vector<size_t> active;
  ScoreQueryResult q;
  for (int step = 0; step < max_len; ++step) {
    active.clear();
    for (size_t i = 0; i < beam.size(); ++i) {
      if (!beam[i].ended) active.push_back(i);
    }
    if (active.empty()) break;
    if (boosting) {
      states.clear();
      for (size_t i : active) states.push_back(beam[i].state);
      table->GetScoresBatch(states, &q);
    }
    std::vector<Hyp> candidates;
    for (const Hyp& h : beam) {
      if (h.ended) candidates.push_back(h);
    }
    for (size_t k = 0; k < active.size(); ++k) {
      const Hyp& h = beam[active[k]];
      const std::vector<float> row = model.LogProbs(h.tokens, step);
      Require(static_cast<int>(row.size()) == vocab,
              "step model returned a row of the wrong size");
      std::span<const Score> scores;
      std::span<const int32_t> next_states;
      if (boosting) {
        scores = q.scores_row(static_cast<int>(k));
        next_states = q.next_row(static_cast<int>(k));
      }
      for (int v = 0; v < vocab; ++v) {
        if (v == eos || v == blank || row[v] == kNegInf) continue;
        Hyp ext;
        ext.tokens.reserve(h.tokens.size() + 1);
        ext.tokens = h.tokens;
        ext.tokens.push_back(v);
        ext.am = h.am + row[v];
        ext.boost = h.boost;
        ext.state = h.state;
        if (boosting) {
          ext.boost += scores[v];
          ext.state = next_states[v];
        }
        candidates.push_back(std::move(ext));
      }
      Hyp fin = h;
      fin.am += row[eos];
      fin.ended = true;
      if (bump) {
        fin.eos_bonus = ComputeEosBonus(*table, h.state, scores, eos, blank).total();
        fin.boost += fin.eos_bonus;
      }
      candidates.push_back(std::move(fin));
    }
    const size_t keep =
        std::min(candidates.size(), static_cast<size_t>(config.beam_size));
    std::partial_sort(candidates.begin(), candidates.begin() + keep,
                      candidates.end(), before);
    candidates.resize(keep);
    beam = std::move(candidates);
  }

  std::sort(beam.begin(), beam.end(), before);
  NBest nbest;
  for (const Hyp& h : beam) {
    DecodeResult r;
    r.tokens = h.tokens;
    r.am_score = h.am;
    r.boost_score = boosting ? h.boost : 0.0f;
    r.tree_state = h.state;
    r.ended = h.ended;
    internal::AttachReplayTrace(table, config, &r);
    if (config.keep_trace && h.ended) {
      r.trace.push_back({static_cast<int>(h.tokens.size()), eos, h.eos_bonus,
                         h.state});
    }
    nbest.push_back(std::move(r));
  }
  return nbest;
}

}  // namespace phraseboost
