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

#ifndef PHRASEBOOST_VOCABULARY_H_
#define PHRASEBOOST_VOCABULARY_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace phraseboost {

// Token inventory with implicit 0-based ids and optional blank / eos symbols.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> tokens,
                      std::optional<int> blank_id = std::nullopt,
                      std::optional<int> eos_id = std::nullopt);

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::string& token(int id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<int> Find(std::string_view token) const;

  std::optional<int> blank_id() const { return blank_id_; }
  std::optional<int> eos_id() const { return eos_id_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
  std::optional<int> blank_id_;
  std::optional<int> eos_id_;
};

// One token per line; the line number is the id. Special symbols are
// resolved by exact string match.
Vocabulary LoadVocabulary(const std::string& path,
                          const std::optional<std::string>& blank_symbol = {},
                          const std::optional<std::string>& eos_symbol = {});

enum class TokenizeMode {
  kChar,  // every UTF-8 code point must be a vocabulary token
  kIds,   // whitespace-separated integer ids
};

std::vector<int> Tokenize(std::string_view text, const Vocabulary& vocab,
                          TokenizeMode mode);

std::string Detokenize(std::span<const int> ids, const Vocabulary& vocab);

// Splits into UTF-8 code points; invalid sequences are rejected.
std::vector<std::string_view> SplitUtf8(std::string_view text);

}  // namespace phraseboost

#endif  // PHRASEBOOST_VOCABULARY_H_
