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

#ifndef PHRASEBOOST_DECODE_COMMON_H_
#define PHRASEBOOST_DECODE_COMMON_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "phraseboost/decoder.h"

namespace phraseboost::internal {

inline constexpr float kNegInf = -std::numeric_limits<float>::infinity();

inline float LogAdd(float a, float b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const float hi = std::max(a, b);
  const float lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// Index of the largest entry; ties go to the lowest index.
inline int ArgMax(std::span<const float> row) {
  int best = 0;
  for (int v = 1; v < static_cast<int>(row.size()); ++v) {
    if (row[v] > row[best]) best = v;
  }
  return best;
}

// Whether boosting participates in this decode.
inline bool Boosting(const ArcTable* table, const DecodeConfig& config) {
  return table != nullptr && config.boost_enabled;
}

// Ranking order shared by all beam decoders: combined score, then acoustic
// score, then lexicographically smaller token sequence.
inline bool RanksBefore(float total_a, float am_a, const std::vector<int>& a,
                        float total_b, float am_b, const std::vector<int>& b) {
  if (total_a != total_b) return total_a > total_b;
  if (am_a != am_b) return am_a > am_b;
  return a < b;
}

inline bool RanksBefore(const DecodeResult& a, const DecodeResult& b,
                        float lambda) {
  return RanksBefore(a.TotalScore(lambda), a.am_score, a.tokens,
                     b.TotalScore(lambda), b.am_score, b.tokens);
}

void CheckTableVocab(const ArcTable* table, int vocab_size);

// Fills trace from tokens when the config asks for it.
void AttachReplayTrace(const ArcTable* table, const DecodeConfig& config,
                       DecodeResult* result);

struct TokenSeqHash {
  size_t operator()(const std::vector<int>& v) const {
    uint64_t h = 1469598103934665603ull;
    for (int x : v) {
      h ^= static_cast<uint64_t>(static_cast<uint32_t>(x));
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

}  // namespace phraseboost::internal

#endif  // PHRASEBOOST_DECODE_COMMON_H_
