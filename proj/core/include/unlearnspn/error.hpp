// Copyright 2026 The unlearnspn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace unlearnspn {

enum class ErrorCode {
  kUsage,       // bad arguments or configuration
  kParse,       // malformed CSV / schema text
  kSchema,      // schema invariants or arity mismatch
  kDomain,      // value outside its declared domain
  kRowAbsent,   // row id unknown or already removed
  kExhausted,   // removal would empty the data
  kEmpty,       // empty view / empty leaf
  kVersion,     // model file written by an incompatible version
  kCorruption,  // checksum or framing failure
  kIo,
};

// Single exception type for the library; the code drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace unlearnspn
