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

#include "phraseboost/context_list.h"

#include <set>

#include "file_util.h"
#include "phraseboost/error.h"

namespace phraseboost {

int PhraseCharLength(const Phrase& phrase, const Vocabulary& vocab,
                     TokenizeMode mode) {
  if (mode == TokenizeMode::kChar) {
    return static_cast<int>(SplitUtf8(phrase.text).size());
  }
  return static_cast<int>(
      SplitUtf8(Detokenize(phrase.token_ids, vocab)).size());
}

ContextList BuildContextList(std::span<const std::string> lines,
                             const Vocabulary& vocab, TokenizeMode mode,
                             int min_chars) {
  Require(min_chars >= 0, "min_chars must be non-negative");
  ContextList list;
  list.min_chars = min_chars;
  std::set<std::vector<int>> seen;
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line.front() == '#') continue;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Phrase phrase;
    phrase.text = line;
    try {
      phrase.token_ids = Tokenize(line, vocab, mode);
    } catch (const Error& e) {
      Fail(ErrorCode::kInvalidArgument,
           "context list line " + std::to_string(i + 1) + ": " + e.what());
    }
    if (phrase.token_ids.empty()) continue;
    if (PhraseCharLength(phrase, vocab, mode) < min_chars) {
      ++list.num_too_short;
      continue;
    }
    if (!seen.insert(phrase.token_ids).second) {
      ++list.num_duplicates;
      continue;
    }
    list.phrases.push_back(std::move(phrase));
  }
  return list;
}

ContextList LoadContextList(const std::string& path, const Vocabulary& vocab,
                            TokenizeMode mode, int min_chars) {
  const std::vector<std::string> lines = internal::ReadLines(path);
  return BuildContextList(lines, vocab, mode, min_chars);
}

void SaveContextList(const ContextList& list, const std::string& path) {
  std::string bytes;
  for (const Phrase& p : list.phrases) {
    bytes += p.text;
    bytes += '\n';
  }
  internal::WriteFile(path, bytes);
}

}  // namespace phraseboost
