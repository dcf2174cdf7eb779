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

#include "phraseboost/prefix_tree.h"

#include <cmath>
#include <cstdio>
#include <deque>

#include "phraseboost/error.h"

namespace phraseboost {

void TreeParams::Validate() const {
  Require(std::isfinite(c0) && c0 >= 0.0f, "c0 must be finite and >= 0");
  Require(std::isfinite(beta) && beta >= 0.0f, "beta must be finite and >= 0");
  Require(std::isfinite(uniform_final_bonus) && uniform_final_bonus >= 0.0f,
          "uniform_final_bonus must be finite and >= 0");
}

Score ArcScore(int depth, const TreeParams& params) {
  Require(depth >= 1, "arc depth must be >= 1");
  if (params.weight_mode == WeightMode::kUniform || depth == 1) {
    return params.c0;
  }
  const double score = static_cast<double>(params.c0) * params.beta +
                       std::log(static_cast<double>(depth));
  return static_cast<Score>(score);
}

PrefixTree PrefixTree::Build(const ContextList& list, const TreeParams& params,
                             int vocab_size) {
  params.Validate();
  Require(vocab_size > 0, "vocabulary size must be positive");
  PrefixTree tree;
  tree.params_ = params;
  tree.vocab_size_ = vocab_size;
  tree.nodes_.emplace_back();

  for (const Phrase& phrase : list.phrases) {
    Require(!phrase.token_ids.empty(), "empty phrase '" + phrase.text + "'");
    int cur = kRoot;
    for (int token : phrase.token_ids) {
      Require(token >= 0 && token < vocab_size,
              "token id " + std::to_string(token) + " in phrase '" +
                  phrase.text + "' is out of range");
      const auto it = tree.nodes_[cur].children.find(token);
      if (it != tree.nodes_[cur].children.end()) {
        cur = it->second;
        continue;
      }
      const int id = tree.num_nodes();
      TreeNode child;
      child.parent = cur;
      child.token = token;
      child.depth = tree.nodes_[cur].depth + 1;
      tree.nodes_[cur].children.emplace(token, id);
      tree.nodes_.push_back(std::move(child));
      cur = id;
    }
    tree.nodes_[cur].is_final = true;
  }

  // Scores are assigned after the structure is complete so that the uniform
  // final bonus does not depend on insertion order. Parents precede children
  // in node id order.
  const bool uniform = params.weight_mode == WeightMode::kUniform;
  for (int id = 1; id < tree.num_nodes(); ++id) {
    TreeNode& n = tree.nodes_[id];
    n.arc_score = ArcScore(n.depth, params);
    if (uniform && n.is_final) n.arc_score += params.uniform_final_bonus;
    n.acc_score = tree.nodes_[n.parent].acc_score + n.arc_score;
  }
  return tree;
}

void PrefixTree::ComputeFailLinks() {
  nodes_[kRoot].fail = kRoot;
  std::deque<int> queue;
  for (const auto& [token, child] : nodes_[kRoot].children) {
    nodes_[child].fail = kRoot;
    queue.push_back(child);
  }
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const auto& [token, v] : nodes_[u].children) {
      int f = nodes_[u].fail;
      int target = Child(f, token);
      while (target < 0 && f != kRoot) {
        f = nodes_[f].fail;
        target = Child(f, token);
      }
      nodes_[v].fail = target >= 0 ? target : kRoot;
      queue.push_back(v);
    }
  }
  has_fail_links_ = true;
}

int PrefixTree::Child(int node, int token) const {
  const auto& children = nodes_[node].children;
  const auto it = children.find(token);
  return it == children.end() ? -1 : it->second;
}

int PrefixTree::Find(std::span<const int> tokens) const {
  int cur = kRoot;
  for (int token : tokens) {
    cur = Child(cur, token);
    if (cur < 0) return -1;
  }
  return cur;
}

std::vector<int> PrefixTree::NodeTokens(int id) const {
  std::vector<int> tokens(nodes_.at(id).depth);
  for (int cur = id; cur != kRoot; cur = nodes_[cur].parent) {
    tokens[nodes_[cur].depth - 1] = nodes_[cur].token;
  }
  return tokens;
}

int PrefixTree::num_finals() const {
  int count = 0;
  for (const TreeNode& n : nodes_) count += n.is_final ? 1 : 0;
  return count;
}

int PrefixTree::max_depth() const {
  int depth = 0;
  for (const TreeNode& n : nodes_) depth = std::max(depth, n.depth);
  return depth;
}

std::string PrefixTree::DebugDump(const Vocabulary* vocab) const {
  std::string out = "# id\tstring\tdepth\tarc_score\tacc_score\tfinal\tfail\n";
  char buf[128];
  for (int id = 0; id < num_nodes(); ++id) {
    const TreeNode& n = nodes_[id];
    const std::vector<int> tokens = NodeTokens(id);
    std::string label;
    if (id == kRoot) {
      label = "<root>";
    } else if (vocab != nullptr) {
      label = Detokenize(tokens, *vocab);
    } else {
      for (size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) label += ' ';
        label += std::to_string(tokens[i]);
      }
    }
    std::snprintf(buf, sizeof(buf), "%d\t", id);
    out += buf;
    out += label;
    std::snprintf(buf, sizeof(buf), "\t%d\t%.4f\t%.4f\t%d\t%d\n", n.depth,
                  static_cast<double>(n.arc_score),
                  static_cast<double>(n.acc_score), n.is_final ? 1 : 0,
                  n.fail);
    out += buf;
  }
  return out;
}

PrefixTree BuildAutomaton(const ContextList& list, const TreeParams& params,
                          int vocab_size) {
  PrefixTree tree = PrefixTree::Build(list, params, vocab_size);
  tree.ComputeFailLinks();
  return tree;
}

}  // namespace phraseboost
