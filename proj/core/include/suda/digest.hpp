// Copyright (c) 2026 SUDA contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SUDA_DIGEST_HPP_
#define SUDA_DIGEST_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include "suda/protocol.hpp"

namespace suda {

// Lower-case hex SHA-256.
std::string Sha256Hex(std::string_view data);
std::string Sha256File(const std::filesystem::path& path);

// Fingerprint of a corpus: the manifest text followed by every referenced
// file's bytes, in manifest order. Paths resolve against root.
std::string CorpusHash(const Manifest& manifest, const std::filesystem::path& root);

}  // namespace suda

#endif  // SUDA_DIGEST_HPP_
