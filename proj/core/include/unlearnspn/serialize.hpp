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

#include <string>
#include <string_view>

#include "unlearnspn/spn.hpp"

namespace unlearnspn {

// Model file layout: magic "USPNMODL", u32 format version, u64 payload
// length, u32 CRC-32 of the payload, payload. The payload holds tagged
// sections CONF, SCHM, DATA, REMV, TREE in that order. Integers are little
// endian; doubles are stored as their raw bit patterns, so a round trip is
// exact.
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::string SerializeModel(const Spn& spn);

// Throws Error(kVersion) for an unknown format version and Error(kCorruption)
// for a bad magic, checksum, truncation or a model that fails validation.
Spn DeserializeModel(std::string_view bytes);

void SaveModel(const Spn& spn, const std::string& path);
Spn LoadModel(const std::string& path);

// Writes to a sibling temporary file and renames it over `path`.
void WriteFileAtomic(const std::string& path, std::string_view contents);
std::string ReadFile(const std::string& path);

}  // namespace unlearnspn
