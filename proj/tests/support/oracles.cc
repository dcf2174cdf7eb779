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

#include "support/oracles.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

namespace phraseboost::testing {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogAddD(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

bool Better(const SeqScore& a, const SeqScore& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.am != b.am) return a.am > b.am;
  return a.tokens < b.tokens;
}

Words Lowered(const Words& w) {
  Words out = w;
  for (std::string& s : out) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace

int BruteForceFail(const PrefixTree& tree, int node) {
  if (node == PrefixTree::kRoot) return PrefixTree::kRoot;
  const std::vector<int> s = tree.NodeTokens(node);
  for (size_t start = 1; start < s.size(); ++start) {
    const int found =
        tree.Find(std::span<const int>(s.data() + start, s.size() - start));
    if (found >= 0) return found;
  }
  return PrefixTree::kRoot;
}

std::pair<double, int> ReferenceScore(const PrefixTree& tree, int state,
                                      int token, double unk_score) {
  double total = 0.0;
  int s = state;
  while (true) {
    const int child = tree.Child(s, token);
    if (child >= 0) {
      return {total + tree.node(child).acc_score - tree.node(s).acc_score,
              child};
    }
    if (s == PrefixTree::kRoot) return {total + unk_score, PrefixTree::kRoot};
    const int fail = BruteForceFail(tree, s);
    if (!tree.node(s).is_final) {
      total += tree.node(fail).acc_score - tree.node(s).acc_score;
    }
    s = fail;
  }
}

std::vector<int> CtcCollapse(std::span<const int> path, int blank) {
  std::vector<int> out;
  int prev = -1;
  for (int x : path) {
    if (x != prev && x != blank) out.push_back(x);
    prev = x;
  }
  return out;
}

SeqScore CtcExhaustiveBest(const EmissionMatrix& em) {
  const int T = em.num_frames;
  const int V = em.vocab_size;
  std::map<std::vector<int>, double> mass;
  std::vector<int> path(T, 0);
  while (true) {
    double score = 0.0;
    for (int t = 0; t < T; ++t) score += em.Row(t)[path[t]];
    auto key = CtcCollapse(path, *em.blank_id);
    auto [it, inserted] = mass.emplace(key, score);
    if (!inserted) it->second = LogAddD(it->second, score);
    int pos = 0;
    while (pos < T && ++path[pos] == V) path[pos++] = 0;
    if (pos == T) break;
  }
  SeqScore best;
  bool have = false;
  for (const auto& [tokens, m] : mass) {
    SeqScore cand{tokens, m, m};
    if (!have || Better(cand, best)) {
      best = cand;
      have = true;
    }
  }
  return best;
}

SeqScore TransducerExhaustiveBest(const StepModel& model, int num_frames,
                                  int max_symbols, const ArcTable* table,
                                  float lambda) {
  const int blank = *model.blank_id();
  const int V = model.vocab_size();
  SeqScore best;
  bool have = false;
  std::vector<int> tokens;
  // (frame, symbols emitted in this frame, am, boost, state)
  std::function<void(int, int, double, double, int)> walk =
      [&](int t, int emitted, double am, double boost, int state) {
        if (t == num_frames) {
          SeqScore cand{tokens, am + lambda * boost, am};
          if (!have || Better(cand, best)) {
            best = cand;
            have = true;
          }
          return;
        }
        const std::vector<float> row = model.LogProbs(tokens, t);
        if (row[blank] != -std::numeric_limits<float>::infinity()) {
          walk(t + 1, 0, am + row[blank], boost, state);
        }
        for (int v = 0; v < V; ++v) {
          if (v == blank || row[v] == -std::numeric_limits<float>::infinity()) {
            continue;
          }
          double delta = 0.0;
          int next = state;
          if (table != nullptr) {
            const auto q = table->GetScoresBatch(std::vector<int32_t>{state});
            delta = q.scores[v];
            next = q.next_states[v];
          }
          tokens.push_back(v);
          if (emitted + 1 == max_symbols) {
            walk(t + 1, 0, am + row[v], boost + delta, next);
          } else {
            walk(t, emitted + 1, am + row[v], boost + delta, next);
          }
          tokens.pop_back();
        }
      };
  walk(0, 0, 0.0, 0.0, ArcTable::kRoot);
  return best;
}

SeqScore AedExhaustiveBest(const StepModel& model, const ArcTable* table,
                           float lambda, int max_len, bool eos_bump) {
  const int eos = *model.eos_id();
  const std::optional<int> blank = model.blank_id();
  const int V = model.vocab_size();
  SeqScore best;
  bool have = false;
  std::vector<int> tokens;
  auto offer = [&](double am, double boost) {
    SeqScore cand{tokens, am + lambda * boost, am};
    if (!have || Better(cand, best)) {
      best = cand;
      have = true;
    }
  };
  std::function<void(double, double, int)> walk = [&](double am, double boost,
                                                       int state) {
    if (static_cast<int>(tokens.size()) == max_len) {
      offer(am, boost);
      return;
    }
    const std::vector<float> row =
        model.LogProbs(tokens, static_cast<int>(tokens.size()));
    ScoreQueryResult q;
    if (table != nullptr) q = table->GetScoresBatch(std::vector<int32_t>{state});
    double bonus = 0.0;
    if (table != nullptr && eos_bump) {
      double top = 0.0;
      for (int v = 0; v < V; ++v) {
        if (v == eos || (blank && v == *blank)) continue;
        top = std::max(top, static_cast<double>(q.scores[v]));
      }
      bonus = top + (table->is_final(state) ? table->final_score(state) : 0.0);
    }
    offer(am + row[eos], boost + bonus);
    for (int v = 0; v < V; ++v) {
      if (v == eos || (blank && v == *blank)) continue;
      if (row[v] == -std::numeric_limits<float>::infinity()) continue;
      tokens.push_back(v);
      walk(am + row[v], boost + (table ? q.scores[v] : 0.0),
           table ? q.next_states[v] : 0);
      tokens.pop_back();
    }
  };
  walk(0.0, 0.0, ArcTable::kRoot);
  return best;
}

int CountOccurrencesOracle(const Words& words, const Words& phrase) {
  if (phrase.empty()) return 0;
  int count = 0;
  for (size_t i = 0; i < words.size(); ++i) {
    for (size_t j = i + 1; j <= words.size(); ++j) {
      if (Words(words.begin() + i, words.begin() + j) == phrase) ++count;
    }
  }
  return count;
}

PrfCounts KeyphraseCountsOracle(const std::vector<Words>& refs,
                                const std::vector<Words>& hyps,
                                const std::vector<Words>& phrases) {
  PrfCounts c;
  for (size_t u = 0; u < refs.size(); ++u) {
    for (const Words& p : phrases) {
      const int r = CountOccurrencesOracle(Lowered(refs[u]), Lowered(p));
      const int h = CountOccurrencesOracle(Lowered(hyps[u]), Lowered(p));
      c.tp += std::min(r, h);
      c.fp += std::max(h - r, 0);
      c.fn += std::max(r - h, 0);
    }
  }
  return c;
}

int EditDistanceOracle(const Words& a, const Words& b) {
  std::map<std::pair<size_t, size_t>, int> memo;
  std::function<int(size_t, size_t)> d = [&](size_t i, size_t j) -> int {
    if (i == a.size()) return static_cast<int>(b.size() - j);
    if (j == b.size()) return static_cast<int>(a.size() - i);
    auto it = memo.find({i, j});
    if (it != memo.end()) return it->second;
    const int r = std::min({d(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1),
                            d(i + 1, j) + 1, d(i, j + 1) + 1});
    memo[{i, j}] = r;
    return r;
  };
  return d(0, 0);
}

}  // namespace phraseboost::testing
