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
using internal::LogAdd;

namespace {

void CheckCtcInputs(const EmissionMatrix& em, const ArcTable* table,
                    const DecodeConfig& config) {
  config.Validate();
  Require(em.num_frames >= 1 && em.vocab_size >= 1, "empty emission matrix");
  Require(em.blank_id.has_value(), "CTC decoding needs a blank id");
  Require(*em.blank_id >= 0 && *em.blank_id < em.vocab_size,
          "blank id out of range");
  internal::CheckTableVocab(table, em.vocab_size);
}

struct PrefixHyp {
  std::vector<int> tokens;
  float p_blank = kNegInf;     // paths ending in blank
  float p_nonblank = kNegInf;  // paths ending in the last label
  Score boost = 0.0f;
  int32_t state = ArcTable::kRoot;

  float am() const { return LogAdd(p_blank, p_nonblank); }
};

}  // namespace

DecodeResult CtcGreedyDecode(const EmissionMatrix& em, const ArcTable* table,
                             const DecodeConfig& config) {
  CheckCtcInputs(em, table, config);
  const bool boosting = internal::Boosting(table, config);
  const int blank = *em.blank_id;

  DecodeResult result;
  int prev = -1;  // previous frame's raw symbol
  int32_t state = ArcTable::kRoot;
  for (int t = 0; t < em.num_frames; ++t) {
    const std::span<const float> row = em.Row(t);
    const int top = ArgMax(row);
    if (top == blank || top == prev) {
      // Blank advances nothing; a repeat continues the previous label.
      result.am_score += row[top];
      prev = top;
      continue;
    }
    int chosen = top;
    Score delta = 0.0f;
    int32_t next = state;
    if (boosting) {
      const ArcTable::Pick pick =
          table->RerankBest(state, row, config.lambda, blank, prev);
      chosen = pick.token;
      delta = pick.score;
      next = pick.next;
    }
    result.am_score += row[chosen];
    result.boost_score += delta;
    state = next;
    prev = chosen;
    result.tokens.push_back(chosen);
    if (config.keep_trace) result.trace.push_back({t, chosen, delta, state});
  }
  result.tree_state = state;
  return result;
}

NBest CtcBeamDecode(const EmissionMatrix& em, const ArcTable* table,
                    const DecodeConfig& config) {
  CheckCtcInputs(em, table, config);
  const bool boosting = internal::Boosting(table, config);
  const int blank = *em.blank_id;
  const int vocab = em.vocab_size;
  const float lambda = config.lambda;

  std::vector<PrefixHyp> beam(1);
  beam[0].p_blank = 0.0f;

  std::vector<int32_t> states;
  ScoreQueryResult q;
  std::vector<PrefixHyp> next;
  std::unordered_map<std::vector<int>, size_t, internal::TokenSeqHash> index;

  for (int t = 0; t < em.num_frames; ++t) {
    const std::span<const float> row = em.Row(t);
    if (boosting) {
      states.clear();
      for (const PrefixHyp& h : beam) states.push_back(h.state);
      table->GetScoresBatch(states, &q);
    }
    next.clear();
    index.clear();
    auto slot = [&](const std::vector<int>& tokens, Score boost,
                    int32_t state) -> PrefixHyp& {
      const auto [it, inserted] = index.emplace(tokens, next.size());
      if (inserted) {
        PrefixHyp h;
        h.tokens = tokens;
        h.boost = boost;
        h.state = state;
        next.push_back(std::move(h));
      }
      return next[it->second];
    };

    for (size_t b = 0; b < beam.size(); ++b) {
      const PrefixHyp& h = beam[b];
      const float total = h.am();
      const int last = h.tokens.empty() ? -1 : h.tokens.back();
      {
        PrefixHyp& same = slot(h.tokens, h.boost, h.state);
        same.p_blank = LogAdd(same.p_blank, total + row[blank]);
        if (last >= 0) {
          same.p_nonblank = LogAdd(same.p_nonblank, h.p_nonblank + row[last]);
        }
      }
      std::vector<int> extended = h.tokens;
      extended.push_back(0);
      for (int v = 0; v < vocab; ++v) {
        if (v == blank) continue;
        // A repeated label needs a blank in between to count again.
        const float p = (v == last ? h.p_blank : total) + row[v];
        if (p == kNegInf) continue;
        extended.back() = v;
        Score boost = h.boost;
        int32_t state = h.state;
        if (boosting) {
          const size_t cell = b * static_cast<size_t>(vocab) + v;
          boost += q.scores[cell];
          state = q.next_states[cell];
        }
        PrefixHyp& ext = slot(extended, boost, state);
        ext.p_nonblank = LogAdd(ext.p_nonblank, p);
      }
    }

    std::vector<std::pair<float, size_t>> order;  // (am, index)
    order.reserve(next.size());
    for (size_t i = 0; i < next.size(); ++i) order.emplace_back(next[i].am(), i);
    const size_t keep = std::min(order.size(), static_cast<size_t>(config.beam_size));
    auto before = [&](const std::pair<float, size_t>& x,
                      const std::pair<float, size_t>& y) {
      const PrefixHyp& a = next[x.second];
      const PrefixHyp& c = next[y.second];
      return internal::RanksBefore(x.first + lambda * a.boost, x.first,
                                   a.tokens, y.first + lambda * c.boost,
                                   y.first, c.tokens);
    };
    std::partial_sort(order.begin(), order.begin() + keep, order.end(), before);
    std::vector<PrefixHyp> pruned;
    pruned.reserve(keep);
    for (size_t i = 0; i < keep; ++i) {
      pruned.push_back(std::move(next[order[i].second]));
    }
    beam = std::move(pruned);
  }

  NBest nbest;
  for (const PrefixHyp& h : beam) {
    DecodeResult r;
    r.tokens = h.tokens;
    r.am_score = h.am();
    r.boost_score = boosting ? h.boost : 0.0f;
    r.tree_state = h.state;
    internal::AttachReplayTrace(table, config, &r);
    nbest.push_back(std::move(r));
  }
  return nbest;
}

}  // namespace phraseboost
