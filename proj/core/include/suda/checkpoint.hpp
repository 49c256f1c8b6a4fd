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

#ifndef SUDA_CHECKPOINT_HPP_
#define SUDA_CHECKPOINT_HPP_

#include <filesystem>
#include <map>
#include <string>

#include "suda/network.hpp"

namespace suda {

// SUDA1 checkpoint layout (integers u32 little-endian, values f64 LE):
//   "SUDA1"
//   u32 header_bytes, header_bytes of UTF-8 "key=value\n" lines
//   u32 tensor_count
//   per tensor: u32 name_len, name, u32 rank, rank x u32 dims, values
// The header holds every SudaConfig key plus free-form provenance entries
// (optimizer, learning rate, seed). Tensors follow SudaParams::Named() order.
struct Checkpoint {
  SudaConfig config;
  SudaParams params;
  std::map<std::string, std::string> metadata;
};

std::string EncodeCheckpoint(const Checkpoint& ckpt);
Checkpoint DecodeCheckpoint(const std::string& bytes, const std::string& origin);

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace suda

#endif  // SUDA_CHECKPOINT_HPP_
