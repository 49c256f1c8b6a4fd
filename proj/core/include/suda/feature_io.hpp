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

#ifndef SUDA_FEATURE_IO_HPP_
#define SUDA_FEATURE_IO_HPP_

#include <filesystem>
#include <string>

#include "suda/frontend.hpp"

namespace suda {

// FEAT1 layout (all little-endian):
//   'F' 'T' '0' '1' | u32 num_frames | u32 dim | num_frames*dim float32
// Values are stored row-major. Reading widens back to double.
std::string EncodeFeat1(const FeatureMatrix& features);
FeatureMatrix DecodeFeat1(const std::string& bytes, const std::string& origin);

void WriteFeat1(const std::filesystem::path& path, const FeatureMatrix& features);
FeatureMatrix ReadFeat1(const std::filesystem::path& path);

}  // namespace suda

#endif  // SUDA_FEATURE_IO_HPP_
