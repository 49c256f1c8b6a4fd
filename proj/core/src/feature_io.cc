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

#include "suda/feature_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "suda/error.hpp"

namespace suda {

namespace {

constexpr char kMagic[4] = {'F', 'T', '0', '1'};

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

std::uint32_t GetU32(const std::string& s, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= std::uint32_t(static_cast<unsigned char>(s[pos + i])) << (8 * i);
  }
  return v;
}

}  // namespace

std::string EncodeFeat1(const FeatureMatrix& features) {
  if (features.rank() != 2) {
    throw Error(ErrorKind::kDimension, "FEAT1 needs a rank-2 matrix");
  }
  const auto rows = static_cast<std::uint32_t>(features.dim(0));
  const auto cols = static_cast<std::uint32_t>(features.dim(1));
  std::string out(kMagic, 4);
  PutU32(out, rows);
  PutU32(out, cols);
  out.reserve(out.size() + 4 * features.size());
  for (double v : features.values()) {
    PutU32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

FeatureMatrix DecodeFeat1(const std::string& bytes, const std::string& origin) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorKind::kFormat, origin + ": missing FEAT1 magic");
  }
  const std::uint32_t rows = GetU32(bytes, 4);
  const std::uint32_t cols = GetU32(bytes, 8);
  const std::size_t n = std::size_t(rows) * cols;
  if (rows == 0 || cols == 0 || bytes.size() != 12 + 4 * n) {
    throw Error(ErrorKind::kFormat, origin + ": FEAT1 size mismatch for " +
                                        std::to_string(rows) + "x" +
                                        std::to_string(cols));
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = std::bit_cast<float>(GetU32(bytes, 12 + 4 * i));
  }
  return FeatureMatrix({rows, cols}, std::move(values));
}

void WriteFeat1(const std::filesystem::path& path, const FeatureMatrix& features) {
  const std::string bytes = EncodeFeat1(features);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

FeatureMatrix ReadFeat1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return DecodeFeat1(bytes, path.string());
}

}  // namespace suda
