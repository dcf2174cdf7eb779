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

#ifndef PHRASEBOOST_FILE_UTIL_H_
#define PHRASEBOOST_FILE_UTIL_H_

#include <string>
#include <vector>

namespace phraseboost::internal {

// Reads a text file as LF-separated lines. A trailing CR on each line is
// dropped; the empty remainder after a final LF is not a line.
std::vector<std::string> ReadLines(const std::string& path);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& bytes);

}  // namespace phraseboost::internal

#endif  // PHRASEBOOST_FILE_UTIL_H_
