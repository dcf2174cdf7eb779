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

#include "phraseboost/step_model.h"

#include <cmath>
#include <random>

#include "file_util.h"
#include "json.hpp"
#include "phraseboost/error.h"

namespace phraseboost {
namespace {

std::optional<int> OptionalId(const nlohmann::json& spec, const char* key) {
  if (!spec.contains(key) || spec[key].is_null()) return std::nullopt;
  if (!spec[key].is_number_integer()) {
    Fail(ErrorCode::kFormat, std::string("step model field '") + key +
                                 "' must be an integer");
  }
  return spec[key].get<int>();
}

std::vector<float> ParseRow(const nlohmann::json& value,
                            const std::string& where) {
  if (!value.is_array()) {
    Fail(ErrorCode::kFormat, "step model row " + where + " is not an array");
  }
  std::vector<float> row;
  row.reserve(value.size());
  for (const auto& x : value) {
    if (x.is_number()) {
      row.push_back(x.get<float>());
    } else if (x.is_string() && x.get<std::string>() == "-inf") {
      row.push_back(-std::numeric_limits<float>::infinity());
    } else {
      Fail(ErrorCode::kFormat, "step model row " + where +
                                   " holds a non-numeric entry");
    }
  }
  return row;
}

uint64_t Mix(uint64_t h, uint64_t x) {
  // splitmix64 finalizer over a running combination.
  h ^= x + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
  h ^= h >> 30;
  h *= 0xBF58476D1CE4E5B9ull;
  h ^= h >> 27;
  h *= 0x94D049BB133111EBull;
  h ^= h >> 31;
  return h;
}

}  // namespace

void TableStepModel::ValidateRow(const std::vector<float>& row,
                                 const std::string& where) const {
  if (static_cast<int>(row.size()) != vocab_size_) {
    Fail(ErrorCode::kFormat, "step model row " + where + " has " +
                                 std::to_string(row.size()) +
                                 " entries, expected " +
                                 std::to_string(vocab_size_));
  }
  const double err = std::abs(LogSumExp(row));
  if (!(err <= kNormalizationTolerance)) {
    Fail(ErrorCode::kFormat, "step model row " + where + " is not normalized");
  }
  if (flavor_ == StepFlavor::kAed && !std::isfinite(row[*eos_id_])) {
    Fail(ErrorCode::kFormat,
         "step model row " + where + " gives eos a non-finite log-prob");
  }
}

TableStepModel TableStepModel::FromJson(const std::string& text) {
  nlohmann::json spec;
  try {
    spec = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kFormat, std::string("bad step model JSON: ") + e.what());
  }
  if (!spec.is_object()) Fail(ErrorCode::kFormat, "step model must be an object");
  TableStepModel model;
  const std::string flavor = spec.value("flavor", "");
  if (flavor == "transducer") {
    model.flavor_ = StepFlavor::kTransducer;
  } else if (flavor == "aed") {
    model.flavor_ = StepFlavor::kAed;
  } else {
    Fail(ErrorCode::kFormat, "step model flavor must be 'transducer' or 'aed'");
  }
  if (!spec.contains("default")) {
    Fail(ErrorCode::kFormat, "step model has no default row");
  }
  model.default_ = ParseRow(spec["default"], "default");
  model.vocab_size_ = spec.contains("vocab_size")
                          ? spec["vocab_size"].get<int>()
                          : static_cast<int>(model.default_.size());
  if (model.vocab_size_ < 1) Fail(ErrorCode::kFormat, "vocab_size must be positive");
  model.blank_id_ = OptionalId(spec, "blank_id");
  model.eos_id_ = OptionalId(spec, "eos_id");
  auto check_id = [&](const std::optional<int>& id, const char* name) {
    if (id && (*id < 0 || *id >= model.vocab_size_)) {
      Fail(ErrorCode::kFormat, std::string(name) + " out of range");
    }
  };
  check_id(model.blank_id_, "blank_id");
  check_id(model.eos_id_, "eos_id");
  if (model.flavor_ == StepFlavor::kTransducer && !model.blank_id_) {
    Fail(ErrorCode::kFormat, "transducer step model needs blank_id");
  }
  if (model.flavor_ == StepFlavor::kAed && !model.eos_id_) {
    Fail(ErrorCode::kFormat, "aed step model needs eos_id");
  }
  model.ValidateRow(model.default_, "default");
  if (spec.contains("frames")) {
    const auto& frames = spec["frames"];
    if (!frames.is_array()) Fail(ErrorCode::kFormat, "frames must be an array");
    for (size_t t = 0; t < frames.size(); ++t) {
      const std::string where = "frames[" + std::to_string(t) + "]";
      model.frames_.push_back(ParseRow(frames[t], where));
      model.ValidateRow(model.frames_.back(), where);
    }
  }
  if (spec.contains("rows")) {
    const auto& rows = spec["rows"];
    if (!rows.is_object()) Fail(ErrorCode::kFormat, "rows must be an object");
    for (const auto& [key, value] : rows.items()) {
      std::vector<float> row = ParseRow(value, "'" + key + "'");
      model.ValidateRow(row, "'" + key + "'");
      model.rows_.emplace(key, std::move(row));
    }
  }
  return model;
}

TableStepModel TableStepModel::Load(const std::string& path) {
  try {
    return FromJson(internal::ReadFile(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    Fail(e.code(), path + ": " + e.what());
  }
}

TableStepModel TableStepModel::FromEmissions(const EmissionMatrix& em,
                                             StepFlavor flavor,
                                             std::optional<int> blank_id,
                                             std::optional<int> eos_id) {
  ValidateEmissions(em, /*strict=*/true);
  TableStepModel model;
  model.flavor_ = flavor;
  model.vocab_size_ = em.vocab_size;
  model.blank_id_ = blank_id;
  model.eos_id_ = eos_id;
  Require(flavor != StepFlavor::kTransducer || blank_id.has_value(),
          "transducer model needs a blank id");
  Require(flavor != StepFlavor::kAed || eos_id.has_value(),
          "aed model needs an eos id");
  for (int t = 0; t < em.num_frames; ++t) {
    const auto row = em.Row(t);
    model.frames_.emplace_back(row.begin(), row.end());
    model.ValidateRow(model.frames_.back(), "frame " + std::to_string(t));
  }
  model.default_ = model.frames_.back();
  return model;
}

std::string TableStepModel::ContextKey(std::span<const int> prefix) const {
  if (flavor_ == StepFlavor::kTransducer) {
    return prefix.empty() ? std::string() : std::to_string(prefix.back());
  }
  std::string key;
  for (size_t i = 0; i < prefix.size(); ++i) {
    if (i > 0) key += ' ';
    key += std::to_string(prefix[i]);
  }
  return key;
}

std::vector<float> TableStepModel::LogProbs(std::span<const int> prefix,
                                            int step) const {
  const std::string context = ContextKey(prefix);
  if (!rows_.empty()) {
    auto it = rows_.find(std::to_string(step) + "|" + context);
    if (it != rows_.end()) return it->second;
    it = rows_.find(context);
    if (it != rows_.end()) return it->second;
  }
  if (step >= 0 && step < static_cast<int>(frames_.size())) {
    return frames_[step];
  }
  return default_;
}

RandomStepModel::RandomStepModel(StepFlavor flavor, int vocab_size,
                                 uint64_t seed, std::optional<int> blank_id,
                                 std::optional<int> eos_id, float spread,
                                 float blank_bias, float eos_bias,
                                 int num_frames)
    : flavor_(flavor),
      vocab_size_(vocab_size),
      seed_(seed),
      blank_id_(blank_id),
      eos_id_(eos_id),
      spread_(spread),
      blank_bias_(blank_bias),
      eos_bias_(eos_bias),
      num_frames_(num_frames) {
  Require(vocab_size >= 2, "random step model needs V >= 2");
  Require(flavor != StepFlavor::kTransducer || blank_id.has_value(),
          "transducer model needs a blank id");
  Require(flavor != StepFlavor::kAed || eos_id.has_value(),
          "aed model needs an eos id");
}

std::vector<float> RandomStepModel::LogProbs(std::span<const int> prefix,
                                             int step) const {
  uint64_t h = Mix(seed_, static_cast<uint64_t>(step) + 1);
  if (flavor_ == StepFlavor::kTransducer) {
    h = Mix(h, prefix.empty() ? ~0ull : static_cast<uint64_t>(prefix.back()));
  } else {
    h = Mix(h, prefix.size());
    for (int t : prefix) h = Mix(h, static_cast<uint64_t>(t));
  }
  std::mt19937_64 rng(h);
  std::vector<float> row(vocab_size_);
  for (float& x : row) {
    x = static_cast<float>((static_cast<double>(rng() >> 11) * 0x1.0p-53) *
                           spread_);
  }
  if (blank_id_) row[*blank_id_] += blank_bias_;
  if (eos_id_) row[*eos_id_] += eos_bias_;
  LogSoftmax(row);
  return row;
}

}  // namespace phraseboost
