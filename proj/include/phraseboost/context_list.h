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

#ifndef PHRASEBOOST_CONTEXT_LIST_H_
#define PHRASEBOOST_CONTEXT_LIST_H_

#include <span>
#include <string>
#include <vector>

#include "phraseboost/vocabulary.h"

namespace phraseboost {

inline constexpr int kDefaultMinChars = 3;

struct Phrase {
  std::string text;
  std::vector<int> token_ids;
};

struct ContextList {
  std::vector<Phrase> phrases;
  int min_chars = kDefaultMinChars;
  // Bookkeeping for CLI warnings.
  int num_duplicates = 0;
  int num_too_short = 0;

  bool empty() const { return phrases.empty(); }
  int size() const { return static_cast<int>(phrases.size()); }
};

// Builds a list from raw lines. Blank lines and lines starting with '#' are
// skipped, phrases shorter than min_chars characters are dropped, and
// duplicate token sequences keep their first occurrence. Tokenization errors
// carry the 1-based line number.
ContextList BuildContextList(std::span<const std::string> lines,
                             const Vocabulary& vocab, TokenizeMode mode,
                             int min_chars = kDefaultMinChars);

ContextList LoadContextList(const std::string& path, const Vocabulary& vocab,
                            TokenizeMode mode,
                            int min_chars = kDefaultMinChars);

// Writes one phrase text per line; loading the result reproduces the list.
void SaveContextList(const ContextList& list, const std::string& path);

// Surface length used by the min_chars filter: code points of the text in
// char mode, code points of the detokenized string in ids mode.
int PhraseCharLength(const Phrase& phrase, const Vocabulary& vocab,
                     TokenizeMode mode);

}  // namespace phraseboost

#endif  // PHRASEBOOST_CONTEXT_LIST_H_
