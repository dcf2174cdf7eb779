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

#ifndef PHRASEBOOST_PREFIX_TREE_H_
#define PHRASEBOOST_PREFIX_TREE_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "phraseboost/context_list.h"
#include "phraseboost/vocabulary.h"

namespace phraseboost {

// Boosting scores live in the log domain and are stored as 32-bit floats.
using Score = float;

enum class WeightMode {
  kDepthScaled,  // c0 at depth 1, c0 * beta + ln(depth) below
  kUniform,      // c0 at every depth, optional bonus on the final arc
};

struct TreeParams {
  float c0 = 1.0f;
  float beta = 2.0f;
  WeightMode weight_mode = WeightMode::kDepthScaled;
  float uniform_final_bonus = 0.0f;

  void Validate() const;
};

// Score of the arc entering a node at the given depth (root children have
// depth 1).
Score ArcScore(int depth, const TreeParams& params);

struct TreeNode {
  int parent = -1;
  int token = -1;  // label of the arc from parent
  int depth = 0;
  Score arc_score = 0.0f;  // score of the arc from parent
  Score acc_score = 0.0f;  // sum of arc scores on the root path
  bool is_final = false;
  int fail = -1;  // -1 until ComputeFailLinks()
  std::map<int, int> children;  // token -> node id
};

// Aho-Corasick prefix tree over tokenized phrases. Node 0 is the root.
class PrefixTree {
 public:
  static constexpr int kRoot = 0;

  // Inserts every phrase; failure links are left unset.
  static PrefixTree Build(const ContextList& list, const TreeParams& params,
                          int vocab_size);

  // Links each node to the node spelling its longest proper suffix, filled
  // in breadth-first order.
  void ComputeFailLinks();

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int vocab_size() const { return vocab_size_; }
  const TreeParams& params() const { return params_; }
  const TreeNode& node(int id) const { return nodes_.at(id); }
  bool has_fail_links() const { return has_fail_links_; }

  int Child(int node, int token) const;  // -1 when absent
  int Find(std::span<const int> tokens) const;
  std::vector<int> NodeTokens(int id) const;
  int num_finals() const;
  int max_depth() const;

  // Tab-separated listing: id, string, depth, arc_score, acc_score, final,
  // fail. With a vocabulary the string is the detokenized node path,
  // otherwise space-separated ids.
  std::string DebugDump(const Vocabulary* vocab = nullptr) const;

 private:
  std::vector<TreeNode> nodes_;
  TreeParams params_;
  int vocab_size_ = 0;
  bool has_fail_links_ = false;
};

// Build followed by ComputeFailLinks.
PrefixTree BuildAutomaton(const ContextList& list, const TreeParams& params,
                          int vocab_size);

}  // namespace phraseboost

#endif  // PHRASEBOOST_PREFIX_TREE_H_
