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

#include "phraseboost/emissions.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "file_util.h"
#include "json.hpp"
#include "phraseboost/error.h"

namespace phraseboost {
namespace {

constexpr float kNegInf = -std::numeric_limits<float>::infinity();

double Uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Distractor choice and per-row jitter share one generator so that the
// layout and the matrix stay consistent.
struct SynthPlan {
  std::vector<int> frame_symbol;  // intended symbol per frame
  std::vector<int> distractor;    // -1 on non-designated frames
};

SynthPlan PlanSynth(std::span<const int> target, int vocab_size, int blank_id,
                    const SynthOptions& o, std::mt19937_64& rng) {
  Require(vocab_size >= 2, "vocabulary too small for synthesis");
  Require(blank_id >= 0 && blank_id < vocab_size, "blank id out of range");
  Require(std::isfinite(o.margin) && o.margin > 0.0f, "margin must be > 0");
  Require(o.frames_per_token >= 1, "frames_per_token must be >= 1");
  Require(o.blank_frames >= 0, "blank_frames must be >= 0");
  Require(o.clean_gap > o.margin, "clean_gap must exceed margin");
  Require(o.designated.empty() || o.designated.size() == target.size(),
          "designated mask length differs from target length");
  std::vector<bool> banned(vocab_size, false);
  banned[blank_id] = true;
  for (int t : o.avoid) {
    if (t >= 0 && t < vocab_size) banned[t] = true;
  }
  SynthPlan plan;
  auto add_blanks = [&](int count) {
    for (int i = 0; i < count; ++i) {
      plan.frame_symbol.push_back(blank_id);
      plan.distractor.push_back(-1);
    }
  };
  add_blanks(std::max(1, o.blank_frames));
  for (size_t i = 0; i < target.size(); ++i) {
    const int tok = target[i];
    Require(tok >= 0 && tok < vocab_size, "target token out of range");
    Require(tok != blank_id, "target token must not be blank");
    const bool designated = o.designated.empty() || o.designated[i];
    int distractor = -1;
    if (designated) {
      std::vector<int> pool;
      for (int v = 0; v < vocab_size; ++v) {
        if (!banned[v] && v != tok) pool.push_back(v);
      }
      Require(!pool.empty(), "no admissible distractor token");
      distractor = pool[rng() % pool.size()];
    }
    for (int k = 0; k < o.frames_per_token; ++k) {
      plan.frame_symbol.push_back(tok);
      plan.distractor.push_back(distractor);
    }
    add_blanks(o.blank_frames);
  }
  return plan;
}

}  // namespace

double LogSumExp(std::span<const float> row) {
  float peak = kNegInf;
  for (float x : row) peak = std::max(peak, x);
  if (peak == kNegInf) return -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (float x : row) sum += std::exp(static_cast<double>(x) - peak);
  return peak + std::log(sum);
}

void LogSoftmax(std::span<float> row) {
  const double z = LogSumExp(row);
  for (float& x : row) x = static_cast<float>(x - z);
}

double MaxNormalizationError(const EmissionMatrix& em) {
  double worst = 0.0;
  for (int t = 0; t < em.num_frames; ++t) {
    worst = std::max(worst, std::abs(LogSumExp(em.Row(t))));
  }
  return worst;
}

void ValidateEmissions(const EmissionMatrix& em, bool strict) {
  if (em.num_frames < 1 || em.vocab_size < 1) {
    Fail(ErrorCode::kFormat, "emission matrix must have T >= 1 and V >= 1");
  }
  if (em.logprobs.size() !=
      static_cast<size_t>(em.num_frames) * em.vocab_size) {
    Fail(ErrorCode::kFormat, "emission data size does not match shape");
  }
  for (float x : em.logprobs) {
    if (std::isnan(x) || x == std::numeric_limits<float>::infinity()) {
      Fail(ErrorCode::kFormat, "emission matrix holds NaN or +inf");
    }
  }
  if (strict) {
    for (int t = 0; t < em.num_frames; ++t) {
      const double err = std::abs(LogSumExp(em.Row(t)));
      if (!(err <= kNormalizationTolerance)) {
        Fail(ErrorCode::kFormat, "emission row " + std::to_string(t) +
                                     " is not normalized (log-sum-exp off by " +
                                     std::to_string(err) + ")");
      }
    }
  }
}

std::string SerializeEmissions(const EmissionMatrix& em) {
  ValidateEmissions(em, /*strict=*/false);
  nlohmann::ordered_json header;
  header["magic"] = "TBT1";
  header["shape"] = {em.num_frames, em.vocab_size};
  header["dtype"] = "f32";
  std::string out = header.dump();
  out += '\n';
  out.reserve(out.size() + em.logprobs.size() * 4);
  for (float x : em.logprobs) {
    uint32_t bits;
    std::memcpy(&bits, &x, 4);
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((bits >> (8 * k)) & 0xFF));
  }
  return out;
}

EmissionMatrix ParseEmissions(const std::string& bytes, bool strict) {
  const size_t eol = bytes.find('\n');
  if (eol == std::string::npos) {
    Fail(ErrorCode::kFormat, "TBT1 header line missing");
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(0, eol));
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kFormat, std::string("bad TBT1 header: ") + e.what());
  }
  if (!header.is_object() || header.value("magic", "") != "TBT1") {
    Fail(ErrorCode::kFormat, "bad TBT1 magic");
  }
  if (header.value("dtype", "") != "f32") {
    Fail(ErrorCode::kFormat, "unsupported dtype (expected f32)");
  }
  const auto shape = header.value("shape", nlohmann::json::array());
  if (!shape.is_array() || shape.size() != 2 || !shape[0].is_number_integer() ||
      !shape[1].is_number_integer()) {
    Fail(ErrorCode::kFormat, "TBT1 shape must be [T, V]");
  }
  const int64_t t = shape[0].get<int64_t>();
  const int64_t v = shape[1].get<int64_t>();
  if (t < 1 || v < 1 || t > INT32_MAX || v > INT32_MAX) {
    Fail(ErrorCode::kFormat, "TBT1 shape must be positive");
  }
  const size_t payload = bytes.size() - eol - 1;
  if (payload != static_cast<size_t>(t) * static_cast<size_t>(v) * 4) {
    Fail(ErrorCode::kFormat, "TBT1 payload size does not match shape");
  }
  EmissionMatrix em;
  em.num_frames = static_cast<int>(t);
  em.vocab_size = static_cast<int>(v);
  em.logprobs.resize(static_cast<size_t>(t) * v);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + eol + 1;
  for (size_t i = 0; i < em.logprobs.size(); ++i, p += 4) {
    const uint32_t bits = static_cast<uint32_t>(p[0]) |
                          (static_cast<uint32_t>(p[1]) << 8) |
                          (static_cast<uint32_t>(p[2]) << 16) |
                          (static_cast<uint32_t>(p[3]) << 24);
    std::memcpy(&em.logprobs[i], &bits, 4);
  }
  ValidateEmissions(em, strict);
  return em;
}

EmissionMatrix LoadEmissions(const std::string& path, bool strict) {
  try {
    return ParseEmissions(internal::ReadFile(path), strict);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    Fail(e.code(), path + ": " + e.what());
  }
}

void SaveEmissions(const EmissionMatrix& em, const std::string& path) {
  internal::WriteFile(path, SerializeEmissions(em));
}

SynthLayout DescribeSynthLayout(std::span<const int> target, int vocab_size,
                                int blank_id, const SynthOptions& options) {
  std::mt19937_64 rng(options.seed);
  const SynthPlan plan = PlanSynth(target, vocab_size, blank_id, options, rng);
  SynthLayout layout;
  for (size_t f = 0; f < plan.distractor.size(); ++f) {
    if (plan.distractor[f] >= 0) {
      layout.designated_frames.push_back(static_cast<int>(f));
      layout.distractors.push_back(plan.distractor[f]);
    }
  }
  return layout;
}

EmissionMatrix SynthCtcEmissions(std::span<const int> target, int vocab_size,
                                 int blank_id, const SynthOptions& options) {
  std::mt19937_64 rng(options.seed);
  const SynthPlan plan = PlanSynth(target, vocab_size, blank_id, options, rng);
  EmissionMatrix em;
  em.num_frames = static_cast<int>(plan.frame_symbol.size());
  em.vocab_size = vocab_size;
  em.blank_id = blank_id;
  em.logprobs.resize(static_cast<size_t>(em.num_frames) * vocab_size);
  const double floor = -static_cast<double>(options.clean_gap);
  for (int t = 0; t < em.num_frames; ++t) {
    std::span<float> row = em.MutableRow(t);
    // Background tokens sit at least clean_gap below the leader.
    for (float& x : row) x = static_cast<float>(floor - Uniform01(rng));
    const int symbol = plan.frame_symbol[t];
    const int distractor = plan.distractor[t];
    if (distractor >= 0) {
      row[distractor] = 0.0f;
      row[symbol] = -options.margin;
    } else {
      row[symbol] = 0.0f;
    }
    // Normalize by shifting the row; the shift preserves every difference
    // up to float rounding.
    const double z = LogSumExp(row);
    for (float& x : row) x = static_cast<float>(static_cast<double>(x) - z);
  }
  return em;
}

}  // namespace phraseboost
