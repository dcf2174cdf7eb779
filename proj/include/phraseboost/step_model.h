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

#ifndef PHRASEBOOST_STEP_MODEL_H_
#define PHRASEBOOST_STEP_MODEL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phraseboost/emissions.h"

namespace phraseboost {

enum class StepFlavor {
  kTransducer,  // conditioned on the last emitted non-blank token and frame
  kAed,         // conditioned on the full prefix; vocabulary includes eos
};

// Deterministic stand-in for a decoder network: maps (emitted prefix, step)
// to a normalized log-probability vector over the vocabulary. For the
// transducer flavor, step is the encoder frame index; for AED it is the
// label position.
class StepModel {
 public:
  virtual ~StepModel() = default;

  virtual std::vector<float> LogProbs(std::span<const int> prefix,
                                      int step) const = 0;

  virtual StepFlavor flavor() const = 0;
  virtual int vocab_size() const = 0;
  virtual std::optional<int> blank_id() const = 0;
  virtual std::optional<int> eos_id() const = 0;
  // Encoder frames the model was built for, or 0 when unbounded.
  virtual int num_frames() const { return 0; }
};

// Lookup-table model read from JSON:
//
//   {"flavor": "transducer" | "aed", "vocab_size": V,
//    "blank_id": 0, "eos_id": 5,            (as the flavor requires)
//    "default": [V log-probs],
//    "frames": [[...], ...],                 (optional per-step rows)
//    "rows": {"<context>": [...], "<step>|<context>": [...]}}
//
// The context key is the space-separated id prefix for AED and the last
// token id for transducers; the empty string denotes an empty prefix.
// Lookup order: "<step>|<context>", "<context>", frames[step], default.
class TableStepModel : public StepModel {
 public:
  static TableStepModel FromJson(const std::string& text);
  static TableStepModel Load(const std::string& path);

  // Context-independent transducer/AED model whose row at step t is the
  // emission row t (the last row repeats past the end).
  static TableStepModel FromEmissions(const EmissionMatrix& em,
                                      StepFlavor flavor,
                                      std::optional<int> blank_id,
                                      std::optional<int> eos_id);

  std::vector<float> LogProbs(std::span<const int> prefix,
                              int step) const override;
  StepFlavor flavor() const override { return flavor_; }
  int vocab_size() const override { return vocab_size_; }
  std::optional<int> blank_id() const override { return blank_id_; }
  std::optional<int> eos_id() const override { return eos_id_; }
  int num_frames() const override {
    return static_cast<int>(frames_.size());
  }

  std::string ContextKey(std::span<const int> prefix) const;

 private:
  void ValidateRow(const std::vector<float>& row, const std::string& where) const;

  StepFlavor flavor_ = StepFlavor::kTransducer;
  int vocab_size_ = 0;
  std::optional<int> blank_id_;
  std::optional<int> eos_id_;
  std::vector<float> default_;
  std::vector<std::vector<float>> frames_;
  std::map<std::string, std::vector<float>> rows_;
};

// Seeded pseudo-random model; rows are a pure function of (seed, context,
// step). blank_bias / eos_bias shift the corresponding logits before
// normalization.
class RandomStepModel : public StepModel {
 public:
  RandomStepModel(StepFlavor flavor, int vocab_size, uint64_t seed,
                  std::optional<int> blank_id, std::optional<int> eos_id,
                  float spread = 4.0f, float blank_bias = 0.0f,
                  float eos_bias = 0.0f, int num_frames = 0);

  std::vector<float> LogProbs(std::span<const int> prefix,
                              int step) const override;
  StepFlavor flavor() const override { return flavor_; }
  int vocab_size() const override { return vocab_size_; }
  std::optional<int> blank_id() const override { return blank_id_; }
  std::optional<int> eos_id() const override { return eos_id_; }
  int num_frames() const override { return num_frames_; }

 private:
  StepFlavor flavor_;
  int vocab_size_;
  uint64_t seed_;
  std::optional<int> blank_id_;
  std::optional<int> eos_id_;
  float spread_;
  float blank_bias_;
  float eos_bias_;
  int num_frames_;
};

}  // namespace phraseboost

#endif  // PHRASEBOOST_STEP_MODEL_H_
