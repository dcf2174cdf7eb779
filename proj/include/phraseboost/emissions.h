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

#ifndef PHRASEBOOST_EMISSIONS_H_
#define PHRASEBOOST_EMISSIONS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace phraseboost {

inline constexpr float kDefaultFrameDuration = 0.04f;  // seconds
inline constexpr float kNormalizationTolerance = 1e-4f;

// T x V log-probabilities, row-major.
struct EmissionMatrix {
  int num_frames = 0;
  int vocab_size = 0;
  std::vector<float> logprobs;
  float frame_duration = kDefaultFrameDuration;
  std::optional<int> blank_id;

  std::span<const float> Row(int t) const {
    return {logprobs.data() + static_cast<size_t>(t) * vocab_size,
            static_cast<size_t>(vocab_size)};
  }
  std::span<float> MutableRow(int t) {
    return {logprobs.data() + static_cast<size_t>(t) * vocab_size,
            static_cast<size_t>(vocab_size)};
  }
  double duration_seconds() const {
    return static_cast<double>(num_frames) * frame_duration;
  }
};

// log-sum-exp of a row; 0 for a normalized distribution.
double LogSumExp(std::span<const float> row);

// Largest |log-sum-exp| over all rows.
double MaxNormalizationError(const EmissionMatrix& em);

// Throws kFormat on shape problems or non-finite values other than -inf.
// With strict set, rows further than kNormalizationTolerance from a
// normalized distribution are rejected too.
void ValidateEmissions(const EmissionMatrix& em, bool strict);

// TBT1: one JSON header line {"magic":"TBT1","shape":[T,V],"dtype":"f32"}
// followed by T*V little-endian float32 values.
EmissionMatrix LoadEmissions(const std::string& path, bool strict = true);
void SaveEmissions(const EmissionMatrix& em, const std::string& path);
EmissionMatrix ParseEmissions(const std::string& bytes, bool strict = true);
std::string SerializeEmissions(const EmissionMatrix& em);

// In-place log-softmax.
void LogSoftmax(std::span<float> row);

struct SynthOptions {
  float margin = 0.5f;  // nats by which the distractor leads on designated frames
  uint64_t seed = 0;
  int frames_per_token = 1;
  int blank_frames = 1;     // blank frames after each token (and one leading)
  float clean_gap = 40.0f;  // lead of the intended symbol on clean frames
  // Per target position; empty means every position is designated.
  std::vector<bool> designated;
  // Tokens that may not serve as distractors (besides blank and the target).
  std::vector<int> avoid;
};

// Deterministic CTC emissions spelling target. Each position gets
// frames_per_token frames; on designated positions a seeded distractor leads
// the target by exactly margin, elsewhere the target leads by clean_gap.
// Blank frames separate positions.
EmissionMatrix SynthCtcEmissions(std::span<const int> target, int vocab_size,
                                 int blank_id, const SynthOptions& options);

// Frame indices that carry a designated position, in order, along with the
// distractor chosen for each. Mirrors SynthCtcEmissions layout.
struct SynthLayout {
  std::vector<int> designated_frames;
  std::vector<int> distractors;  // per designated frame
};
SynthLayout DescribeSynthLayout(std::span<const int> target, int vocab_size,
                                int blank_id, const SynthOptions& options);

}  // namespace phraseboost

#endif  // PHRASEBOOST_EMISSIONS_H_
