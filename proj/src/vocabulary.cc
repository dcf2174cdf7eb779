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

#include "phraseboost/vocabulary.h"

#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include "file_util.h"
#include "phraseboost/error.h"

namespace phraseboost {

namespace internal {

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) Fail(ErrorCode::kIo, "read error on " + path);
  return bytes;
}

void WriteFile(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorCode::kIo, "write error on " + path);
}

std::vector<std::string> ReadLines(const std::string& path) {
  const std::string bytes = ReadFile(path);
  std::vector<std::string> lines;
  size_t pos = 0;
  while (pos < bytes.size()) {
    size_t end = bytes.find('\n', pos);
    if (end == std::string::npos) end = bytes.size();
    std::string line = bytes.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    pos = end + 1;
  }
  return lines;
}

}  // namespace internal

Vocabulary::Vocabulary(std::vector<std::string> tokens,
                       std::optional<int> blank_id, std::optional<int> eos_id)
    : tokens_(std::move(tokens)), blank_id_(blank_id), eos_id_(eos_id) {
  Require(!tokens_.empty(), "vocabulary is empty");
  index_.reserve(tokens_.size());
  for (int i = 0; i < size(); ++i) {
    Require(!tokens_[i].empty(),
            "empty token at line " + std::to_string(i + 1));
    const auto [it, inserted] = index_.emplace(tokens_[i], i);
    Require(inserted, "duplicate token '" + tokens_[i] + "' at lines " +
                          std::to_string(it->second + 1) + " and " +
                          std::to_string(i + 1));
  }
  if (blank_id_) {
    Require(*blank_id_ >= 0 && *blank_id_ < size(), "blank id out of range");
  }
  if (eos_id_) {
    Require(*eos_id_ >= 0 && *eos_id_ < size(), "eos id out of range");
  }
  if (blank_id_ && eos_id_) {
    Require(*blank_id_ != *eos_id_, "blank and eos must be distinct tokens");
  }
}

std::optional<int> Vocabulary::Find(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary LoadVocabulary(const std::string& path,
                          const std::optional<std::string>& blank_symbol,
                          const std::optional<std::string>& eos_symbol) {
  std::vector<std::string> tokens = internal::ReadLines(path);
  Require(!tokens.empty(), "vocabulary file " + path + " is empty");
  Vocabulary probe(tokens);
  std::optional<int> blank_id;
  std::optional<int> eos_id;
  if (blank_symbol) {
    blank_id = probe.Find(*blank_symbol);
    Require(blank_id.has_value(),
            "blank symbol '" + *blank_symbol + "' not found in " + path);
  }
  if (eos_symbol) {
    eos_id = probe.Find(*eos_symbol);
    Require(eos_id.has_value(),
            "eos symbol '" + *eos_symbol + "' not found in " + path);
  }
  return Vocabulary(std::move(tokens), blank_id, eos_id);
}

std::vector<std::string_view> SplitUtf8(std::string_view text) {
  std::vector<std::string_view> chars;
  size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    size_t len = 1;
    if (lead >= 0xF0 && lead < 0xF8) {
      len = 4;
    } else if (lead >= 0xE0) {
      len = 3;
    } else if (lead >= 0xC0) {
      len = 2;
    } else if (lead >= 0x80) {
      Fail(ErrorCode::kInvalidArgument,
           "invalid UTF-8 lead byte at offset " + std::to_string(i));
    }
    Require(lead < 0xF8 && i + len <= text.size(),
            "truncated UTF-8 sequence at offset " + std::to_string(i));
    for (size_t k = 1; k < len; ++k) {
      const auto cont = static_cast<unsigned char>(text[i + k]);
      Require((cont & 0xC0) == 0x80,
              "invalid UTF-8 continuation at offset " + std::to_string(i + k));
    }
    chars.push_back(text.substr(i, len));
    i += len;
  }
  return chars;
}

std::vector<int> Tokenize(std::string_view text, const Vocabulary& vocab,
                          TokenizeMode mode) {
  std::vector<int> ids;
  if (mode == TokenizeMode::kChar) {
    int position = 0;
    for (std::string_view ch : SplitUtf8(text)) {
      const auto id = vocab.Find(ch);
      Require(id.has_value(), "unmappable character '" + std::string(ch) +
                                  "' at position " + std::to_string(position));
      ids.push_back(*id);
      ++position;
    }
    return ids;
  }
  std::istringstream in{std::string(text)};
  std::string field;
  while (in >> field) {
    int id = -1;
    const auto [end, ec] =
        std::from_chars(field.data(), field.data() + field.size(), id);
    Require(ec == std::errc() && end == field.data() + field.size(),
            "not an integer token id: '" + field + "'");
    Require(id >= 0 && id < vocab.size(),
            "token id " + field + " out of range [0, " +
                std::to_string(vocab.size()) + ")");
    ids.push_back(id);
  }
  return ids;
}

std::string Detokenize(std::span<const int> ids, const Vocabulary& vocab) {
  std::string text;
  for (int id : ids) {
    Require(id >= 0 && id < vocab.size(),
            "token id " + std::to_string(id) + " out of range");
    text += vocab.token(id);
  }
  return text;
}

}  // namespace phraseboost
