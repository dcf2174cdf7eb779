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

#include <unordered_map>

#include "decode_common.h"
#include "phraseboost/decoder.h"
#include "phraseboost/error.h"

namespace phraseboost {

using internal::ArgMax;
using internal::kNegInf;

namespace {

int CheckTransducerInputs(const StepModel& model, int num_frames,
                          const ArcTable* table, const DecodeConfig& config) {
  config.Validate();
  Require(model.flavor() == StepFlavor::kTransducer,
          "transducer decoding needs a transducer-flavor step model");
  Require(model.blank_id().has_value(), "transducer model has no blank id");
  internal::CheckTableVocab(table, model.vocab_size());
  const int frames = num_frames > 0 ? num_frames : model.num_frames();
  Require(frames >= 1, "number of encoder frames must be >= 1");
  return frames;
}

struct Hyp {
  std::vector<int> tokens;
  float am = 0.0f;
  Score boost = 0.0f;
  int32_t state = ArcTable::kRoot;
};

// Hypotheses keyed by token sequence; a duplicate keeps the better copy.
class HypSet {
 public:
  void Add(Hyp&& h, float lambda) {
    const auto [it, inserted] = index_.emplace(h.tokens, hyps_.size());
    if (inserted) {
      hyps_.push_back(std::move(h));
      return;
    }
    Hyp& old = hyps_[it->second];
    if (internal::RanksBefore(h.am + lambda * h.boost, h.am, h.tokens,
                              old.am + lambda * old.boost, old.am,
                              old.tokens)) {
      old = std::move(h);
    }
  }

  std::vector<Hyp> TakeBest(int beam_size, float lambda) {
    auto before = [lambda](const Hyp& a, const Hyp& b) {
      return internal::RanksBefore(a.am + lambda * a.boost, a.am, a.tokens,
                                   b.am + lambda * b.boost, b.am, b.tokens);
    };
    const size_t keep = std::min(hyps_.size(), static_cast<size_t>(beam_size));
    std::partial_sort(hyps_.begin(), hyps_.begin() + keep, hyps_.end(), before);
    hyps_.resize(keep);
    index_.clear();
    return std::move(hyps_);
  }

  bool empty() const { return hyps_.empty(); }

 private:
  std::vector<Hyp> hyps_;
  std::unordered_map<std::vector<int>, size_t, internal::TokenSeqHash> index_;
};

}  // namespace

DecodeResult TransducerGreedyDecode(const StepModel& model, int num_frames,
                                    const ArcTable* table,
                                    const DecodeConfig& config) {
  const int frames = CheckTransducerInputs(model, num_frames, table, config);
  const bool boosting = internal::Boosting(table, config);
  const int blank = *model.blank_id();
  const int vocab = model.vocab_size();

  DecodeResult result;
  int32_t state = ArcTable::kRoot;
  for (int t = 0; t < frames; ++t) {
    for (int s = 0; s < config.max_symbols_per_frame; ++s) {
      const std::vector<float> row = model.LogProbs(result.tokens, t);
      Require(static_cast<int>(row.size()) == vocab,
              "step model returned a row of the wrong size");
      const int top = ArgMax(row);
      if (top == blank) {
        result.am_score += row[blank];
        break;
      }
      int chosen = top;
      Score delta = 0.0f;
      int32_t next = state;
      if (boosting) {
        const ArcTable::Pick pick =
            table->RerankBest(state, row, config.lambda, blank);
        chosen = pick.token;
        delta = pick.score;
        next = pick.next;
      }
      result.am_score += row[chosen];
      result.boost_score += delta;
      state = next;
      result.tokens.push_back(chosen);
      if (config.keep_trace) result.trace.push_back({t, chosen, delta, state});
    }
  }
  result.tree_state = state;
  return result;
}

NBest TransducerBeamDecode(const StepModel& model, int num_frames,
                           const ArcTable* table, const DecodeConfig& config) {
  const int frames = CheckTransducerInputs(model, num_frames, table, config);
  const bool boosting = internal::Boosting(table, config);
  const int blank = *model.blank_id();
  const int vocab = model.vocab_size();
  const float lambda = config.lambda;
  const int cap = config.max_symbols_per_frame;

  std::vector<Hyp> beam(1);
  std::vector<int32_t> states;
  ScoreQueryResult q;
  for (int t = 0; t < frames; ++t) {
    HypSet done;  // hypotheses that finished frame t
    std::vector<Hyp> active = std::move(beam);
    for (int s = 0; s < cap && !active.empty(); ++s) {
      if (boosting) {
        states.clear();
        for (const Hyp& h : active) states.push_back(h.state);
        table->GetScoresBatch(states, &q);
      }
      HypSet expanded;
      const bool last_round = s + 1 == cap;
      for (size_t i = 0; i < active.size(); ++i) {
        const Hyp& h = active[i];
        const std::vector<float> row = model.LogProbs(h.tokens, t);
        Require(static_cast<int>(row.size()) == vocab,
                "step model returned a row of the wrong size");
        if (row[blank] != kNegInf) {
          Hyp stay = h;
          stay.am += row[blank];
          done.Add(std::move(stay), lambda);
        }
        for (int v = 0; v < vocab; ++v) {
          if (v == blank || row[v] == kNegInf) continue;
          Hyp ext;
          ext.tokens.reserve(h.tokens.size() + 1);
          ext.tokens = h.tokens;
          ext.tokens.push_back(v);
          ext.am = h.am + row[v];
          ext.boost = h.boost;
          ext.state = h.state;
          if (boosting) {
            const size_t cell = i * static_cast<size_t>(vocab) + v;
            ext.boost += q.scores[cell];
            ext.state = q.next_states[cell];
          }
          // The symbol cap forces a frame advance without a blank.
          (last_round ? done : expanded).Add(std::move(ext), lambda);
        }
      }
      active = expanded.TakeBest(config.beam_size, lambda);
    }
    beam = done.TakeBest(config.beam_size, lambda);
    Require(!beam.empty(), "transducer beam search lost every hypothesis");
  }

  NBest nbest;
  for (const Hyp& h : beam) {
    DecodeResult r;
    r.tokens = h.tokens;
    r.am_score = h.am;
    r.boost_score = boosting ? h.boost : 0.0f;
    r.tree_state = h.state;
    internal::AttachReplayTrace(table, config, &r);
    nbest.push_back(std::move(r));
  }
  return nbest;
}

}  // namespace phraseboost
