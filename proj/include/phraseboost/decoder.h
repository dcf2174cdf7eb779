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

#ifndef PHRASEBOOST_DECODER_H_
#define PHRASEBOOST_DECODER_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "phraseboost/arc_table.h"
#include "phraseboost/emissions.h"
#include "phraseboost/step_model.h"

namespace phraseboost {

inline constexpr int kDefaultBeamSize = 8;
inline constexpr int kDefaultAedBeamSize = 3;

struct DecodeConfig {
  float lambda = 1.0f;  // shallow-fusion weight of the boosting score
  int beam_size = kDefaultBeamSize;
  int max_symbols_per_frame = 5;  // transducer only
  bool eos_bump_enabled = true;   // AED only
  bool boost_enabled = true;
  bool keep_trace = false;

  void Validate() const;
};

// One emitted symbol. For greedy decoders step is the frame index; beam
// decoders report the output position. tree_state is the state reached
// after the token. For AED the final eos entry carries the eos bonus.
struct TraceStep {
  int step = 0;
  int token = 0;
  Score boost_delta = 0.0f;
  int32_t tree_state = 0;
};

struct DecodeResult {
  std::vector<int> tokens;  // collapsed output, no blank / eos
  float am_score = 0.0f;    // accumulated acoustic log-prob
  Score boost_score = 0.0f; // accumulated raw boosting score (before lambda)
  int32_t tree_state = 0;
  bool ended = false;       // AED: terminated by eos
  std::vector<TraceStep> trace;

  float TotalScore(float lambda) const { return am_score + lambda * boost_score; }
};

// n-best list, best first. Greedy decoders return a single entry.
using NBest = std::vector<DecodeResult>;

// table may be null; decoding then runs the unboosted baseline. The same
// happens when config.boost_enabled is false.

// Two-stage greedy CTC: unboosted argmax first; blank and repeated symbols
// pass through untouched, anything else is re-selected among non-blank,
// non-repeated tokens by logp + lambda * boost.
DecodeResult CtcGreedyDecode(const EmissionMatrix& em, const ArcTable* table,
                             const DecodeConfig& config);

// CTC prefix beam search with boosting applied to label extensions.
NBest CtcBeamDecode(const EmissionMatrix& em, const ArcTable* table,
                    const DecodeConfig& config);

// Frame-synchronous greedy transducer decoding with two-stage selection.
DecodeResult TransducerGreedyDecode(const StepModel& model, int num_frames,
                                    const ArcTable* table,
                                    const DecodeConfig& config);

// Frame-synchronous transducer beam search; at most max_symbols_per_frame
// labels per frame, duplicates merged by max.
NBest TransducerBeamDecode(const StepModel& model, int num_frames,
                           const ArcTable* table, const DecodeConfig& config);

// Label-synchronous AED beam search. The eos candidate of a hypothesis in
// tree state s receives, when eos_bump_enabled, an extra
//   max(0, max_v score(s, v)) + (final(s) ? final_score(s) : 0)
// in raw boost units (scaled by lambda like every boost).
NBest AedBeamDecode(const StepModel& model, const ArcTable* table,
                    const DecodeConfig& config, int max_len);

// Raw eos bonus components for a hypothesis in the given state; scores_row is
// the full boosting row for that state.
struct EosBonus {
  Score max_component = 0.0f;
  Score final_component = 0.0f;
  Score total() const { return max_component + final_component; }
};
EosBonus ComputeEosBonus(const ArcTable& table, int32_t state,
                         std::span<const Score> scores_row,
                         std::optional<int> eos_id,
                         std::optional<int> blank_id);

// Replays tokens through the table from the root and returns the per-token
// trace (step = output position).
std::vector<TraceStep> ReplayTrace(const ArcTable& table,
                                   std::span<const int> tokens);

}  // namespace phraseboost

#endif  // PHRASEBOOST_DECODER_H_
