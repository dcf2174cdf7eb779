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

#ifndef PHRASEBOOST_ERROR_H_
#define PHRASEBOOST_ERROR_H_

#include <stdexcept>
#include <string>

namespace phraseboost {

enum class ErrorCode {
  kInvalidArgument,  // bad user input: malformed files, unknown symbols, ...
  kIo,               // file could not be opened / read / written
  kFormat,           // binary or JSON payload failed validation
  kInternal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void Require(bool condition, const std::string& what) {
  if (!condition) throw Error(ErrorCode::kInvalidArgument, what);
}

}  // namespace phraseboost

#endif  // PHRASEBOOST_ERROR_H_
