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

#include "phraseboost/arc_table.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <deque>
#include <numeric>
#include <limits>
#include <tuple>

#include "file_util.h"
#include "phraseboost/error.h"

namespace phraseboost {
namespace {

constexpr char kMagic[4] = {'G', 'P', 'B', '1'};

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559,
              "IEEE 754 binary32 required");

template <typename T>
void PutLE(std::string* out, T value) {
  static_assert(sizeof(T) == 4);
  uint32_t bits;
  std::memcpy(&bits, &value, 4);
  const char bytes[4] = {static_cast<char>(bits & 0xFF),
                         static_cast<char>((bits >> 8) & 0xFF),
                         static_cast<char>((bits >> 16) & 0xFF),
                         static_cast<char>((bits >> 24) & 0xFF)};
  out->append(bytes, 4);
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T Get() {
    static_assert(sizeof(T) == 4);
    if (pos_ + 4 > bytes_.size()) {
      Fail(ErrorCode::kFormat, "arc table file is truncated");
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes_.data()) + pos_;
    const uint32_t bits = static_cast<uint32_t>(p[0]) |
                          (static_cast<uint32_t>(p[1]) << 8) |
                          (static_cast<uint32_t>(p[2]) << 16) |
                          (static_cast<uint32_t>(p[3]) << 24);
    pos_ += 4;
    T value;
    std::memcpy(&value, &bits, 4);
    return value;
  }

  template <typename T>
  std::vector<T> GetArray(size_t n) {
    if (n > (bytes_.size() - pos_) / 4) {
      Fail(ErrorCode::kFormat, "arc table file is truncated");
    }
    std::vector<T> values(n);
    for (auto& v : values) v = Get<T>();
    return values;
  }

  size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::string& bytes_;
  size_t pos_ = 4;  // after magic
};

void Check(bool ok, const std::string& what) {
  if (!ok) Fail(ErrorCode::kFormat, "invalid arc table: " + what);
}

}  // namespace

ArcTable ArcTable::Compile(const PrefixTree& tree, Score unk_score) {
  Require(tree.has_fail_links(), "prefix tree has no fail links");
  Require(std::isfinite(unk_score), "unk_score must be finite");
  ArcTable table;
  table.vocab_size_ = tree.vocab_size();
  table.unk_score_ = unk_score;
  const int n = tree.num_nodes();

  // Collect arcs in BFS order, then sort by (from_state, token).
  struct Arc {
    int32_t from, token, to;
    Score weight;
  };
  std::vector<Arc> arcs;
  arcs.reserve(n > 0 ? n - 1 : 0);
  std::deque<int> queue = {PrefixTree::kRoot};
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const auto& [token, child] : tree.node(u).children) {
      arcs.push_back({u, token, child, tree.node(child).arc_score});
      queue.push_back(child);
    }
  }
  std::stable_sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
    return std::tie(a.from, a.token) < std::tie(b.from, b.token);
  });

  table.arc_from_.reserve(arcs.size());
  table.arc_token_.reserve(arcs.size());
  table.arc_to_.reserve(arcs.size());
  table.arc_weight_.reserve(arcs.size());
  for (const Arc& a : arcs) {
    table.arc_from_.push_back(a.from);
    table.arc_token_.push_back(a.token);
    table.arc_to_.push_back(a.to);
    table.arc_weight_.push_back(a.weight);
  }

  table.arc_start_.assign(n, 0);
  table.arc_end_.assign(n, 0);
  table.backoff_to_.assign(n, kRoot);
  table.backoff_weight_.assign(n, 0.0f);
  table.is_final_.assign(n, 0);
  table.final_score_.assign(n, 0.0f);
  int32_t a = 0;
  for (int s = 0; s < n; ++s) {
    table.arc_start_[s] = a;
    while (a < static_cast<int32_t>(arcs.size()) && arcs[a].from == s) ++a;
    table.arc_end_[s] = a;
  }
  for (int s = 1; s < n; ++s) {
    const TreeNode& node = tree.node(s);
    table.backoff_to_[s] = node.fail;
    table.is_final_[s] = node.is_final ? 1 : 0;
    if (node.is_final) {
      table.final_score_[s] = node.acc_score;
    } else {
      table.backoff_weight_[s] = tree.node(node.fail).acc_score - node.acc_score;
    }
  }
  table.BuildDerived();
  return table;
}

ArcTable ArcTable::Empty(int vocab_size, Score unk_score) {
  return Compile(BuildAutomaton(ContextList{}, TreeParams{}, vocab_size),
                 unk_score);
}

void ArcTable::BuildDerived() {
  const int n = num_states();
  parent_arc_.assign(n, -1);
  for (int a = 0; a < num_arcs(); ++a) {
    const int32_t to = arc_to_[a];
    if (to >= 0 && to < n) parent_arc_[to] = a;
  }
  depth_.assign(n, -1);
  root_score_.assign(vocab_size_, unk_score_);
  root_next_.assign(vocab_size_, kRoot);
  if (n == 0) return;
  for (int32_t a = arc_start_[kRoot]; a < arc_end_[kRoot]; ++a) {
    const int32_t t = arc_token_[a];
    if (t < 0 || t >= vocab_size_) continue;
    root_score_[t] = arc_weight_[a];
    root_next_[t] = arc_to_[a];
  }
  depth_[kRoot] = 0;
  // Arcs only point to states created later in BFS, but loaded files are
  // untrusted, so walk breadth-first from the root instead.
  std::deque<int32_t> queue = {kRoot};
  while (!queue.empty()) {
    const int32_t u = queue.front();
    queue.pop_front();
    for (int32_t a = arc_start_[u]; a < arc_end_[u]; ++a) {
      const int32_t v = arc_to_[a];
      if (v < 0 || v >= n || depth_[v] >= 0) continue;
      depth_[v] = depth_[u] + 1;
      queue.push_back(v);
    }
  }
}

void ArcTable::ScoreRow(int32_t state, Score* scores, int32_t* next) const {
  const int v_size = vocab_size_;
  std::fill(next, next + v_size, -1);
  Score carry = 0.0f;
  int32_t cur = state;
  while (true) {
    const int32_t begin = arc_start_[cur];
    const int32_t end = arc_end_[cur];
    const int32_t* tokens = arc_token_.data();
    for (int32_t a = begin; a < end; ++a) {
      const int32_t t = tokens[a];
      if (next[t] < 0) {
        next[t] = arc_to_[a];
        scores[t] = carry + arc_weight_[a];
      }
    }
    if (cur == kRoot) break;
    carry += backoff_weight_[cur];
    cur = backoff_to_[cur];
  }
  const Score fallback = carry + unk_score_;
  for (int v = 0; v < v_size; ++v) {
    if (next[v] < 0) {
      next[v] = kRoot;
      scores[v] = fallback;
    }
  }
}

Score ArcTable::ChainShadows(int32_t state, std::vector<Shadow>* shadows) const {
  shadows->clear();
  Score carry = 0.0f;
  for (int32_t cur = state; cur != kRoot; cur = backoff_to_[cur]) {
    for (int32_t a = arc_start_[cur]; a < arc_end_[cur]; ++a) {
      const int32_t t = arc_token_[a];
      const bool seen =
          std::any_of(shadows->begin(), shadows->end(),
                      [t](const Shadow& x) { return x.token == t; });
      if (!seen) shadows->push_back({t, carry + arc_weight_[a], arc_to_[a]});
    }
    carry += backoff_weight_[cur];
  }
  std::sort(shadows->begin(), shadows->end(),
            [](const Shadow& x, const Shadow& y) { return x.token < y.token; });
  return carry;
}

ArcTable::Pick ArcTable::RerankBest(int32_t state, std::span<const float> am,
                                   float lambda, int skip1, int skip2) const {
  Require(IsValidState(state), "state id out of range");
  Require(static_cast<int>(am.size()) == vocab_size_,
          "score row does not match the table vocabulary");
  // Per-thread scratch; greedy decoders call this once per emitted label.
  thread_local std::vector<Shadow> shadows;
  thread_local std::vector<int32_t> cuts;
  const Score carry = ChainShadows(state, &shadows);

  // Root-row tokens are scanned in tight runs between the excluded ids
  // (skips and shadowed tokens); shadows are scored separately.
  cuts.clear();
  for (const Shadow& x : shadows) cuts.push_back(x.token);
  if (skip1 >= 0 && skip1 < vocab_size_) cuts.push_back(skip1);
  if (skip2 >= 0 && skip2 < vocab_size_) cuts.push_back(skip2);
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(vocab_size_);

  float best = -std::numeric_limits<float>::infinity();
  int best_v = -1;
  const float* a = am.data();
  const Score* root = root_score_.data();
  int32_t from = 0;
  for (int32_t cut : cuts) {
    for (int32_t v = from; v < cut; ++v) {
      const Score score = carry + root[v];
      const float total = a[v] + lambda * score;
      if (total > best || best_v < 0) {
        best = total;
        best_v = v;
      }
    }
    from = std::max(from, cut + 1);
  }
  Pick pick;
  if (best_v >= 0) pick = {best_v, carry + root[best_v], root_next_[best_v]};
  for (const Shadow& x : shadows) {
    if (x.token == skip1 || x.token == skip2) continue;
    const float total = a[x.token] + lambda * x.score;
    if (pick.token < 0 || total > best || (total == best && x.token < pick.token)) {
      best = total;
      pick = {x.token, x.score, x.next};
    }
  }
  return pick;
}

void ArcTable::GetScoresBatch(std::span<const int32_t> states,
                              ScoreQueryResult* out) const {
  for (int32_t s : states) {
    Require(IsValidState(s), "state id " + std::to_string(s) +
                                 " out of range [0, " +
                                 std::to_string(num_states()) + ")");
  }
  out->batch = static_cast<int>(states.size());
  out->vocab_size = vocab_size_;
  const size_t cells = states.size() * static_cast<size_t>(vocab_size_);
  out->scores.resize(cells);
  out->next_states.resize(cells);
  for (size_t b = 0; b < states.size(); ++b) {
    ScoreRow(states[b], out->scores.data() + b * vocab_size_,
             out->next_states.data() + b * vocab_size_);
  }
}

ScoreQueryResult ArcTable::GetScoresBatch(
    std::span<const int32_t> states) const {
  ScoreQueryResult out;
  GetScoresBatch(states, &out);
  return out;
}

std::vector<int> ArcTable::StateTokens(int state) const {
  Require(IsValidState(state), "state id out of range");
  std::vector<int> tokens;
  for (int32_t cur = state; cur != kRoot;) {
    const int32_t a = parent_arc_[cur];
    tokens.push_back(arc_token_[a]);
    cur = arc_from_[a];
  }
  std::reverse(tokens.begin(), tokens.end());
  return tokens;
}

int ArcTable::num_finals() const {
  return static_cast<int>(std::count(is_final_.begin(), is_final_.end(), 1));
}

int ArcTable::max_depth() const {
  return depth_.empty() ? 0 : *std::max_element(depth_.begin(), depth_.end());
}

void ArcTable::Validate() const {
  const int n = num_states();
  const int m = num_arcs();
  Check(n >= 1, "no states");
  Check(vocab_size_ >= 1, "vocabulary size must be positive");
  Check(std::isfinite(unk_score_), "non-finite unk_score");
  Check(static_cast<int>(arc_from_.size()) == m &&
            static_cast<int>(arc_to_.size()) == m &&
            static_cast<int>(arc_weight_.size()) == m,
        "arc array lengths differ");
  Check(static_cast<int>(arc_start_.size()) == n &&
            static_cast<int>(arc_end_.size()) == n &&
            static_cast<int>(backoff_weight_.size()) == n &&
            static_cast<int>(is_final_.size()) == n &&
            static_cast<int>(final_score_.size()) == n,
        "state array lengths differ");
  for (int a = 0; a < m; ++a) {
    Check(arc_from_[a] >= 0 && arc_from_[a] < n, "arc source out of range");
    Check(arc_to_[a] > 0 && arc_to_[a] < n, "arc target out of range");
    Check(arc_token_[a] >= 0 && arc_token_[a] < vocab_size_,
          "arc token out of range");
    Check(std::isfinite(arc_weight_[a]), "non-finite arc weight");
    if (a > 0) {
      Check(std::tie(arc_from_[a - 1], arc_token_[a - 1]) <
                std::tie(arc_from_[a], arc_token_[a]),
            "arcs not strictly sorted by (from_state, token)");
    }
  }
  for (int s = 0; s < n; ++s) {
    Check(arc_start_[s] >= 0 && arc_start_[s] <= arc_end_[s] &&
              arc_end_[s] <= m,
          "bad arc range for state " + std::to_string(s));
    for (int32_t a = arc_start_[s]; a < arc_end_[s]; ++a) {
      Check(arc_from_[a] == s, "arc range of state " + std::to_string(s) +
                                   " holds foreign arcs");
    }
  }
  // Tree shape: every non-root state has exactly one incoming arc and is
  // reachable from the root.
  std::vector<int> indegree(n, 0);
  for (int a = 0; a < m; ++a) ++indegree[arc_to_[a]];
  Check(indegree[kRoot] == 0, "root has an incoming arc");
  for (int s = 1; s < n; ++s) {
    Check(indegree[s] == 1, "state " + std::to_string(s) +
                                " does not have exactly one incoming arc");
    Check(depth_[s] > 0, "state " + std::to_string(s) + " unreachable");
  }
  // Accumulated scores recomputed from the arcs, in the same float order the
  // tree used.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return depth_[x] < depth_[y]; });
  std::vector<Score> acc(n, 0.0f);
  for (int s : order) {
    if (s == kRoot) continue;
    const int32_t a = parent_arc_[s];
    acc[s] = acc[arc_from_[a]] + arc_weight_[a];
  }
  Check(backoff_to_[kRoot] == kRoot && backoff_weight_[kRoot] == 0.0f,
        "root backoff must be a zero-weight self-loop");
  Check(!is_final_[kRoot], "root cannot be final");
  for (int s = 1; s < n; ++s) {
    const int32_t b = backoff_to_[s];
    Check(b >= 0 && b < n, "backoff target out of range");
    Check(depth_[b] < depth_[s],
          "backoff of state " + std::to_string(s) + " does not shorten");
    Check(is_final_[s] <= 1, "bad final flag");
    if (is_final_[s]) {
      Check(backoff_weight_[s] == 0.0f, "final state with non-zero backoff");
      Check(final_score_[s] == acc[s], "final score differs from acc score");
    } else {
      Check(backoff_weight_[s] == acc[b] - acc[s],
            "backoff weight of state " + std::to_string(s) +
                " differs from acc(backoff) - acc(state)");
      Check(final_score_[s] == 0.0f, "non-final state with final score");
    }
  }
}

std::string ArcTable::Serialize() const {
  std::string out(kMagic, 4);
  const auto n = static_cast<uint32_t>(num_states());
  const auto m = static_cast<uint32_t>(num_arcs());
  PutLE(&out, kFormatVersion);
  PutLE(&out, n);
  PutLE(&out, static_cast<uint32_t>(vocab_size_));
  PutLE(&out, unk_score_);
  PutLE(&out, m);
  for (auto v : arc_from_) PutLE(&out, v);
  for (auto v : arc_token_) PutLE(&out, v);
  for (auto v : arc_to_) PutLE(&out, v);
  for (auto v : arc_weight_) PutLE(&out, v);
  for (auto v : arc_start_) PutLE(&out, v);
  for (auto v : arc_end_) PutLE(&out, v);
  for (auto v : backoff_to_) PutLE(&out, v);
  for (auto v : backoff_weight_) PutLE(&out, v);
  for (auto v : is_final_) PutLE(&out, static_cast<int32_t>(v));
  for (auto v : final_score_) PutLE(&out, v);
  return out;
}

ArcTable ArcTable::Deserialize(const std::string& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    Fail(ErrorCode::kFormat, "not an arc table file (bad magic)");
  }
  Reader in(bytes);
  const auto version = in.Get<uint32_t>();
  if (version != kFormatVersion) {
    Fail(ErrorCode::kFormat, "unsupported arc table version " +
                                 std::to_string(version));
  }
  const auto n = in.Get<uint32_t>();
  const auto v = in.Get<uint32_t>();
  ArcTable table;
  table.unk_score_ = in.Get<float>();
  const auto m = in.Get<uint32_t>();
  Check(n >= 1 && n <= static_cast<uint32_t>(INT32_MAX) &&
            v >= 1 && v <= static_cast<uint32_t>(INT32_MAX) &&
            m <= static_cast<uint32_t>(INT32_MAX),
        "header counts out of range");
  const size_t expected = 24 + 16ull * m + 24ull * n;
  if (bytes.size() != expected) {
    Fail(ErrorCode::kFormat,
         bytes.size() < expected ? "arc table file is truncated"
                                 : "arc table file has trailing bytes");
  }
  table.vocab_size_ = static_cast<int>(v);
  table.arc_from_ = in.GetArray<int32_t>(m);
  table.arc_token_ = in.GetArray<int32_t>(m);
  table.arc_to_ = in.GetArray<int32_t>(m);
  table.arc_weight_ = in.GetArray<float>(m);
  table.arc_start_ = in.GetArray<int32_t>(n);
  table.arc_end_ = in.GetArray<int32_t>(n);
  table.backoff_to_ = in.GetArray<int32_t>(n);
  table.backoff_weight_ = in.GetArray<float>(n);
  for (int32_t flag : in.GetArray<int32_t>(n)) {
    Check(flag == 0 || flag == 1, "final flag must be 0 or 1");
    table.is_final_.push_back(static_cast<uint8_t>(flag));
  }
  table.final_score_ = in.GetArray<float>(n);
  // Ranges must be sane before the derived arrays index through them.
  for (uint32_t s = 0; s < n; ++s) {
    Check(table.arc_start_[s] >= 0 && table.arc_start_[s] <= table.arc_end_[s] &&
              table.arc_end_[s] <= static_cast<int32_t>(m),
          "bad arc range for state " + std::to_string(s));
  }
  table.BuildDerived();
  table.Validate();
  return table;
}

void ArcTable::Save(const std::string& path) const {
  internal::WriteFile(path, Serialize());
}

ArcTable ArcTable::Load(const std::string& path) {
  return Deserialize(internal::ReadFile(path));
}

bool ArcTable::operator==(const ArcTable& o) const {
  return vocab_size_ == o.vocab_size_ &&
         std::memcmp(&unk_score_, &o.unk_score_, sizeof(Score)) == 0 &&
         arc_from_ == o.arc_from_ && arc_token_ == o.arc_token_ &&
         arc_to_ == o.arc_to_ && arc_weight_ == o.arc_weight_ &&
         arc_start_ == o.arc_start_ && arc_end_ == o.arc_end_ &&
         backoff_to_ == o.backoff_to_ && backoff_weight_ == o.backoff_weight_ &&
         is_final_ == o.is_final_ && final_score_ == o.final_score_;
}

std::pair<Score, int> NaiveScore(const PrefixTree& tree, int state, int token,
                                 Score unk_score) {
  Require(tree.has_fail_links(), "prefix tree has no fail links");
  Require(state >= 0 && state < tree.num_nodes(), "state id out of range");
  Require(token >= 0 && token < tree.vocab_size(), "token id out of range");
  Score carry = 0.0f;
  int cur = state;
  while (true) {
    const int child = tree.Child(cur, token);
    if (child >= 0) return {carry + tree.node(child).arc_score, child};
    if (cur == PrefixTree::kRoot) return {carry + unk_score, PrefixTree::kRoot};
    const TreeNode& node = tree.node(cur);
    if (!node.is_final) {
      carry += tree.node(node.fail).acc_score - node.acc_score;
    }
    cur = node.fail;
  }
}

}  // namespace phraseboost
