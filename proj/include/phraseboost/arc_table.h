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

#ifndef PHRASEBOOST_ARC_TABLE_H_
#define PHRASEBOOST_ARC_TABLE_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phraseboost/prefix_tree.h"

namespace phraseboost {

// Row-major [batch x vocab] boosting scores and successor states.
struct ScoreQueryResult {
  int batch = 0;
  int vocab_size = 0;
  std::vector<Score> scores;
  std::vector<int32_t> next_states;

  std::span<const Score> scores_row(int b) const {
    return {scores.data() + static_cast<size_t>(b) * vocab_size,
            static_cast<size_t>(vocab_size)};
  }
  std::span<const int32_t> next_row(int b) const {
    return {next_states.data() + static_cast<size_t>(b) * vocab_size,
            static_cast<size_t>(vocab_size)};
  }
};

// Flat, immutable boosting automaton. Arcs are stored as parallel arrays
// sorted by (from_state, token); state s owns arcs [arc_start(s),
// arc_end(s)). Tokens without an explicit arc anywhere on the backoff chain
// resolve to the implicit root self-loop carrying unk_score.
//
// State ids coincide with the node ids of the PrefixTree the table was
// compiled from.
class ArcTable {
 public:
  static constexpr int32_t kRoot = 0;
  static constexpr uint32_t kFormatVersion = 1;

  ArcTable() = default;

  // Requires fail links on the tree.
  static ArcTable Compile(const PrefixTree& tree, Score unk_score = 0.0f);

  // Table over an empty phrase list: every query resolves to the root.
  static ArcTable Empty(int vocab_size, Score unk_score = 0.0f);

  int num_states() const { return static_cast<int>(backoff_to_.size()); }
  int num_arcs() const { return static_cast<int>(arc_token_.size()); }
  int vocab_size() const { return vocab_size_; }
  Score unk_score() const { return unk_score_; }

  std::span<const int32_t> arc_from() const { return arc_from_; }
  std::span<const int32_t> arc_token() const { return arc_token_; }
  std::span<const int32_t> arc_to() const { return arc_to_; }
  std::span<const Score> arc_weight() const { return arc_weight_; }
  int32_t arc_start(int state) const { return arc_start_[state]; }
  int32_t arc_end(int state) const { return arc_end_[state]; }
  int32_t backoff_to(int state) const { return backoff_to_[state]; }
  Score backoff_weight(int state) const { return backoff_weight_[state]; }
  bool is_final(int state) const { return is_final_[state] != 0; }
  Score final_score(int state) const { return final_score_[state]; }

  bool IsValidState(int state) const {
    return state >= 0 && state < num_states();
  }

  // Full-vocabulary scores for every state in the batch. Each row is built by
  // gathering the arc ranges along the backoff chain, so the cost per row is
  // O(V + arcs on the chain).
  void GetScoresBatch(std::span<const int32_t> states,
                      ScoreQueryResult* out) const;
  ScoreQueryResult GetScoresBatch(std::span<const int32_t> states) const;

  // Greedy re-ranking: the token maximizing am[v] + lambda * score(state, v)
  // over v not in {skip1, skip2}, lowest id on ties. Scores are bit-identical
  // to GetScoresBatch, but only the arcs on the backoff chain are visited
  // besides one pass over am.
  struct Pick {
    int token = -1;
    Score score = 0.0f;
    int32_t next = kRoot;
  };
  Pick RerankBest(int32_t state, std::span<const float> am, float lambda,
                  int skip1, int skip2 = -1) const;

  // Token path spelling the state, recovered from the arc structure.
  std::vector<int> StateTokens(int state) const;
  int depth(int state) const { return depth_[state]; }
  int num_finals() const;
  int max_depth() const;

  // Checks every structural invariant; throws Error(kFormat) on violation.
  void Validate() const;

  void Save(const std::string& path) const;
  static ArcTable Load(const std::string& path);
  std::string Serialize() const;
  static ArcTable Deserialize(const std::string& bytes);

  bool operator==(const ArcTable& other) const;

 private:
  void BuildDerived();
  void ScoreRow(int32_t state, Score* scores, int32_t* next) const;
  struct Shadow {
    int32_t token;
    Score score;
    int32_t next;
  };
  // Arcs of the non-root states on the backoff chain (first occurrence per
  // token, sorted by token); returns the backoff sum down to the root.
  Score ChainShadows(int32_t state, std::vector<Shadow>* shadows) const;

  int vocab_size_ = 0;
  Score unk_score_ = 0.0f;
  std::vector<int32_t> arc_from_;
  std::vector<int32_t> arc_token_;
  std::vector<int32_t> arc_to_;
  std::vector<Score> arc_weight_;
  std::vector<int32_t> arc_start_;
  std::vector<int32_t> arc_end_;
  std::vector<int32_t> backoff_to_;
  std::vector<Score> backoff_weight_;
  std::vector<uint8_t> is_final_;
  std::vector<Score> final_score_;

  // Derived, not serialized.
  std::vector<int32_t> parent_arc_;
  std::vector<int32_t> depth_;
  std::vector<Score> root_score_;   // root arc weight, else unk_score
  std::vector<int32_t> root_next_;  // root arc target, else kRoot
};

// Reference resolution of a single (state, token) query walking the
// PrefixTree directly. Used as the oracle for GetScoresBatch.
std::pair<Score, int> NaiveScore(const PrefixTree& tree, int state, int token,
                                 Score unk_score);

}  // namespace phraseboost

#endif  // PHRASEBOOST_ARC_TABLE_H_
