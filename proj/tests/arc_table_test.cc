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

#include <random>

#include <gtest/gtest.h>

#include "phraseboost/error.h"
#include "support/fixtures.h"
#include "support/oracles.h"

namespace phraseboost {
namespace {

class FourPhraseTable : public ::testing::Test {
 protected:
  FourPhraseTable()
      : vocab_(testing::CharVocab()),
        tree_(BuildAutomaton(testing::FourPhraseList(vocab_), TreeParams(),
                             vocab_.size())),
        table_(ArcTable::Compile(tree_)) {}

  int State(const std::string& s) const {
    return tree_.Find(Tokenize(s, vocab_, TokenizeMode::kChar));
  }
  int Tok(char c) const { return *vocab_.Find(std::string(1, c)); }
  std::pair<float, int> Query(const std::string& state, char c) const {
    const auto q = table_.GetScoresBatch(std::vector<int32_t>{State(state)});
    return {q.scores[Tok(c)], q.next_states[Tok(c)]};
  }

  Vocabulary vocab_;
  PrefixTree tree_;
  ArcTable table_;
};

TEST_F(FourPhraseTable, Backoffs) {
  EXPECT_NEAR(table_.backoff_weight(State("ca")), -3.6931, 1e-4);
  EXPECT_EQ(table_.backoff_to(State("ca")), 0);
  EXPECT_NEAR(table_.backoff_weight(State("cs")), -2.6931, 1e-4);
  EXPECT_EQ(table_.backoff_to(State("cs")), State("s"));
  for (const char* f : {"cat", "cats", "csv", "sit"}) {
    EXPECT_EQ(table_.backoff_weight(State(f)), 0.0f) << f;
    EXPECT_TRUE(table_.is_final(State(f)));
    EXPECT_FLOAT_EQ(table_.final_score(State(f)),
                    tree_.node(State(f)).acc_score);
  }
  EXPECT_EQ(table_.backoff_to(0), 0);
  EXPECT_EQ(table_.backoff_weight(0), 0.0f);
}

TEST_F(FourPhraseTable, Queries) {
  auto [s1, n1] = Query("", 'c');
  EXPECT_FLOAT_EQ(s1, 1.0f);
  EXPECT_EQ(n1, State("c"));
  auto [s2, n2] = Query("ca", 't');
  EXPECT_NEAR(s2, 3.0986, 1e-4);
  EXPECT_EQ(n2, State("cat"));
  auto [s3, n3] = Query("ca", 'x');
  EXPECT_NEAR(s3, -3.6931, 1e-4);
  EXPECT_EQ(n3, 0);
  auto [s4, n4] = Query("cs", 'i');
  EXPECT_NEAR(s4, 0.0, 1e-6);
  EXPECT_EQ(n4, State("si"));
  auto [s5, n5] = Query("cat", 'x');
  EXPECT_EQ(s5, 0.0f);
  EXPECT_EQ(n5, 0);
  auto [s6, n6] = Query("", 's');
  EXPECT_FLOAT_EQ(s6, 1.0f);
  EXPECT_EQ(n6, State("s"));
}

TEST_F(FourPhraseTable, ArcsSortedAndRanged) {
  EXPECT_EQ(table_.num_states(), 10);
  EXPECT_EQ(table_.num_arcs(), 9);
  for (int i = 1; i < table_.num_arcs(); ++i) {
    const auto a = std::pair(table_.arc_from()[i - 1], table_.arc_token()[i - 1]);
    const auto b = std::pair(table_.arc_from()[i], table_.arc_token()[i]);
    EXPECT_LT(a, b);
  }
  for (int s = 0; s < table_.num_states(); ++s) {
    for (int a = table_.arc_start(s); a < table_.arc_end(s); ++a) {
      EXPECT_EQ(table_.arc_from()[a], s);
    }
  }
  EXPECT_NO_THROW(table_.Validate());
}

TEST_F(FourPhraseTable, SaveLoadRoundTrip) {
  const std::string path = testing::TempPath("fig1.gpb");
  table_.Save(path);
  const ArcTable loaded = ArcTable::Load(path);
  EXPECT_TRUE(loaded == table_);
  EXPECT_EQ(loaded.Serialize(), table_.Serialize());
  const std::string bytes = table_.Serialize();
  EXPECT_EQ(bytes.size(), 24u + 16u * 9 + 24u * 10);
  EXPECT_EQ(bytes.substr(0, 4), "GPB1");
}

TEST_F(FourPhraseTable, TruncatedOrCorruptFilesAreRejected) {
  const std::string bytes = table_.Serialize();
  for (size_t cut : {size_t{0}, size_t{3}, size_t{20}, bytes.size() - 1}) {
    try {
      ArcTable::Deserialize(bytes.substr(0, cut));
      FAIL() << "accepted " << cut << " bytes";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kFormat);
    }
  }
  EXPECT_THROW(ArcTable::Deserialize(bytes + "x"), Error);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(ArcTable::Deserialize(bad_magic), Error);
  std::string bad_version = bytes;
  bad_version[4] = 2;
  EXPECT_THROW(ArcTable::Deserialize(bad_version), Error);
  // A changed arc weight no longer agrees with the stored final scores.
  std::string bad_weight = bytes;
  const size_t weight_offset = 24 + 12 * 9;
  bad_weight[weight_offset + 3] ^= 0x40;
  EXPECT_THROW(ArcTable::Deserialize(bad_weight), Error);
  EXPECT_THROW(ArcTable::Load(testing::TempPath("does_not_exist.gpb")), Error);
}

TEST(ArcTableTest, EmptyListScoresUnkEverywhere) {
  for (float unk : {0.0f, -0.5f, 0.75f}) {
    const PrefixTree tree = BuildAutomaton(ContextList(), TreeParams(), 16);
    const ArcTable table = ArcTable::Compile(tree, unk);
    EXPECT_EQ(table.num_states(), 1);
    const auto q = table.GetScoresBatch(std::vector<int32_t>{0, 0});
    for (float s : q.scores) EXPECT_EQ(s, unk);
    for (int n : q.next_states) EXPECT_EQ(n, 0);
    EXPECT_TRUE(table == ArcTable::Empty(16, unk));
  }
}

TEST(ArcTableTest, RejectsInvalidStates) {
  const ArcTable table = ArcTable::Empty(4);
  EXPECT_FALSE(table.IsValidState(1));
  EXPECT_FALSE(table.IsValidState(-1));
}

struct RandomCase {
  PrefixTree tree;
  ArcTable table;
  float unk;
};

RandomCase MakeRandomCase(uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int V = 2 + rng() % 63;
  TreeParams p;
  if (rng() % 4 == 0) {
    p.weight_mode = WeightMode::kUniform;
    p.uniform_final_bonus = static_cast<float>(rng() % 3);
  }
  const float unk = (rng() % 3 == 0) ? -0.25f * (rng() % 4) : 0.0f;
  PrefixTree tree = BuildAutomaton(testing::RandomContextList(rng, V, 50, 8), p, V);
  ArcTable table = ArcTable::Compile(tree, unk);
  return {std::move(tree), std::move(table), unk};
}

class RandomTableTest : public ::testing::TestWithParam<int> {};

TEST_P(RandomTableTest, RerankBestMatchesDenseRow) {
  const RandomCase c = MakeRandomCase(GetParam());
  std::mt19937_64 rng(91 + GetParam());
  std::normal_distribution<float> am(0.0f, 2.0f);
  const int V = c.table.vocab_size();
  for (int s = 0; s < c.table.num_states(); ++s) {
    std::vector<float> row(V);
    for (float& x : row) x = am(rng);
    const float lambda = 0.5f * (rng() % 4);
    const int skip1 = rng() % V;
    const int skip2 = (rng() % 2) ? static_cast<int>(rng() % V) : -1;
    const auto q = c.table.GetScoresBatch(std::vector<int32_t>{s});
    int want = -1;
    float best = 0.0f;
    for (int v = 0; v < V; ++v) {
      if (v == skip1 || v == skip2) continue;
      const float total = row[v] + lambda * q.scores[v];
      if (want < 0 || total > best) {
        best = total;
        want = v;
      }
    }
    const ArcTable::Pick pick = c.table.RerankBest(s, row, lambda, skip1, skip2);
    ASSERT_EQ(pick.token, want);
    if (want < 0) continue;
    EXPECT_EQ(pick.score, q.scores[want]);
    EXPECT_EQ(pick.next, q.next_states[want]);

  }
}

TEST_P(RandomTableTest, BatchMatchesNaiveAndReference) {
  const RandomCase c = MakeRandomCase(GetParam());
  ASSERT_NO_THROW(c.table.Validate());
  std::mt19937_64 rng(77 + GetParam());
  const int V = c.table.vocab_size();
  std::vector<int32_t> states;
  for (int i = 0; i < 64; ++i) states.push_back(rng() % c.table.num_states());
  const auto q = c.table.GetScoresBatch(states);
  ASSERT_EQ(q.scores.size(), states.size() * V);
  for (size_t b = 0; b < states.size(); ++b) {
    for (int v = 0; v < V; ++v) {
      const auto [ns, nn] = NaiveScore(c.tree, states[b], v, c.unk);
      EXPECT_EQ(q.next_row(b)[v], nn);
      EXPECT_NEAR(q.scores_row(b)[v], ns, 1e-6);
      const auto [rs, rn] = testing::ReferenceScore(c.tree, states[b], v, c.unk);
      EXPECT_EQ(rn, nn);
      EXPECT_NEAR(rs, ns, 1e-4);
    }
  }
}

TEST_P(RandomTableTest, BatchEqualsSingleQueries) {
  const RandomCase c = MakeRandomCase(GetParam());
  std::vector<int32_t> states;
  for (int s = 0; s < c.table.num_states(); ++s) states.push_back(s);
  const auto all = c.table.GetScoresBatch(states);
  for (int s = 0; s < c.table.num_states(); ++s) {
    const auto one = c.table.GetScoresBatch(std::vector<int32_t>{s});
    EXPECT_TRUE(std::equal(one.scores.begin(), one.scores.end(),
                           all.scores_row(s).begin()));
    EXPECT_TRUE(std::equal(one.next_states.begin(), one.next_states.end(),
                           all.next_row(s).begin()));
  }
}

TEST_P(RandomTableTest, Telescoping) {
  // Scores that end on an explicit arc and cross no final backoff equal
  // acc(next) - acc(s).
  const RandomCase c = MakeRandomCase(GetParam());
  for (int s = 0; s < c.table.num_states(); ++s) {
    for (int v = 0; v < c.table.vocab_size(); ++v) {
      int cur = s;
      bool crossed_final = false;
      int hit = -1;
      while (true) {
        hit = c.tree.Child(cur, v);
        if (hit >= 0 || cur == 0) break;
        crossed_final = crossed_final || c.tree.node(cur).is_final;
        cur = c.tree.node(cur).fail;
      }
      if (hit < 0 || crossed_final) continue;
      const auto [score, next] = NaiveScore(c.tree, s, v, c.unk);
      EXPECT_EQ(next, hit);
      EXPECT_NEAR(score, c.tree.node(hit).acc_score - c.tree.node(s).acc_score,
                  1e-5);
    }
  }
}

TEST_P(RandomTableTest, SerializationRoundTrip) {
  const RandomCase c = MakeRandomCase(GetParam());
  const std::string bytes = c.table.Serialize();
  const ArcTable back = ArcTable::Deserialize(bytes);
  EXPECT_TRUE(back == c.table);
  EXPECT_EQ(back.Serialize(), bytes);
  EXPECT_EQ(bytes.size(), 24u + 16u * c.table.num_arcs() +
                              24u * c.table.num_states());
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomTableTest, ::testing::Range(0, 60));

// Feeding a phrase from the root collects acc(final); the zero final backoff
// keeps it when the next token continues nothing.
TEST(ArcTablePropertyTest, FullPhraseRewardAndMismatchNeutralization) {
  std::mt19937_64 rng(4242);
  for (int iter = 0; iter < 100; ++iter) {
    const int V = 8 + rng() % 20;
    const ContextList list = testing::RandomContextList(rng, V, 20, 6);
    const PrefixTree tree = BuildAutomaton(list, TreeParams(), V);
    const ArcTable table = ArcTable::Compile(tree);
    // V - 1 is outside the random alphabet (ids 1..7), so it starts nothing.
    const int stranger = V - 1;
    for (const Phrase& p : list.phrases) {
      int32_t state = 0;
      float total = 0.0f;
      for (int tok : p.token_ids) {
        const auto q = table.GetScoresBatch(std::vector<int32_t>{state});
        total += q.scores[tok];
        state = q.next_states[tok];
      }
      const int node = tree.Find(p.token_ids);
      EXPECT_EQ(state, node);
      EXPECT_NEAR(total, tree.node(node).acc_score, 1e-4);
      // Resolution from a final state may pass through non-final suffix
      // states, so only the direct case is exact.
      const auto q = table.GetScoresBatch(std::vector<int32_t>{state});
      if (tree.node(node).fail == 0) {
        EXPECT_EQ(q.scores[stranger], 0.0f);
        EXPECT_EQ(q.next_states[stranger], 0);
      }
      EXPECT_EQ(q.next_states[stranger], 0);
      // Any proper prefix followed by the stranger is fully neutralized.
      for (size_t k = 1; k < p.token_ids.size(); ++k) {
        int32_t st = 0;
        float acc = 0.0f;
        bool passed_final = false;
        for (size_t i = 0; i < k; ++i) {
          const auto r = table.GetScoresBatch(std::vector<int32_t>{st});
          acc += r.scores[p.token_ids[i]];
          st = r.next_states[p.token_ids[i]];
          passed_final = passed_final || table.is_final(st);
        }
        for (int f = st; f != 0; f = tree.node(f).fail) {
          passed_final = passed_final || tree.node(f).is_final;
        }
        if (passed_final) continue;
        const auto r = table.GetScoresBatch(std::vector<int32_t>{st});
        acc += r.scores[stranger];
        EXPECT_EQ(r.next_states[stranger], 0);
        EXPECT_NEAR(acc, 0.0f, 1e-4) << "prefix length " << k;
      }
    }
  }
}

TEST(ArcTableTest, StateTokensSpellTreeStrings) {
  std::mt19937_64 rng(9);
  const int V = 20;
  const PrefixTree tree =
      BuildAutomaton(testing::RandomContextList(rng, V, 30, 6), TreeParams(), V);
  const ArcTable table = ArcTable::Compile(tree);
  for (int s = 0; s < table.num_states(); ++s) {
    EXPECT_EQ(table.StateTokens(s), tree.NodeTokens(s));
    EXPECT_EQ(table.depth(s), tree.node(s).depth);
  }
  EXPECT_EQ(table.num_finals(), tree.num_finals());
  EXPECT_EQ(table.max_depth(), tree.max_depth());
}

TEST(ArcTableTest, CompileNeedsFailLinks) {
  const Vocabulary v = testing::CharVocab();
  const PrefixTree tree =
      PrefixTree::Build(testing::FourPhraseList(v), TreeParams(), v.size());
  EXPECT_THROW(ArcTable::Compile(tree), Error);
}

}  // namespace
}  // namespace phraseboost
