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

#include <string>

#include "phraseboost/error.h"

namespace phraseboost {

void DecodeConfig::Validate() const {
  Require(std::isfinite(lambda) && lambda >= 0.0f, "lambda must be >= 0");
  Require(beam_size >= 1, "beam_size must be >= 1");
  Require(max_symbols_per_frame >= 1, "max_symbols_per_frame must be >= 1");
}

EosBonus ComputeEosBonus(const ArcTable& table, int32_t state,
                         std::span<const Score> scores_row,
                         std::optional<int> eos_id,
                         std::optional<int> blank_id) {
  EosBonus bonus;
  Score best = 0.0f;
  for (int v = 0; v < static_cast<int>(scores_row.size()); ++v) {
    if (v == eos_id || v == blank_id) continue;
    best = std::max(best, scores_row[v]);
  }
  bonus.max_component = best;
  if (table.is_final(state)) bonus.final_component = table.final_score(state);
  return bonus;
}

std::vector<TraceStep> ReplayTrace(const ArcTable& table,
                                   std::span<const int> tokens) {
  std::vector<TraceStep> trace;
  int32_t state = ArcTable::kRoot;
  ScoreQueryResult q;
  for (size_t i = 0; i < tokens.size(); ++i) {
    table.GetScoresBatch(std::span<const int32_t>(&state, 1), &q);
    TraceStep step;
    step.step = static_cast<int>(i);
    step.token = tokens[i];
    step.boost_delta = q.scores[tokens[i]];
    step.tree_state = q.next_states[tokens[i]];
    state = step.tree_state;
    trace.push_back(step);
  }
  return trace;
}

namespace internal {

void CheckTableVocab(const ArcTable* table, int vocab_size) {
  if (table == nullptr) return;
  Require(table->vocab_size() == vocab_size,
          "vocabulary size mismatch: model has " + std::to_string(vocab_size) +
              ", boosting table has " + std::to_string(table->vocab_size()));
}

void AttachReplayTrace(const ArcTable* table, const DecodeConfig& config,
                       DecodeResult* result) {
  if (!config.keep_trace) return;
  if (Boosting(table, config)) {
    result->trace = ReplayTrace(*table, result->tokens);
    return;
  }
  result->trace.clear();
  for (size_t i = 0; i < result->tokens.size(); ++i) {
    result->trace.push_back({static_cast<int>(i), result->tokens[i], 0.0f, 0});
  }
}

}  // namespace internal
}  // namespace phraseboost
