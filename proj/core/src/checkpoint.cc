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

#include "suda/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "suda/error.hpp"

namespace suda {

namespace {

constexpr char kMagic[] = "SUDA1";
constexpr std::size_t kMagicLen = 5;

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void PutU64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  Reader(const std::string& bytes, const std::string& origin)
      : bytes_(bytes), origin_(origin) {}

  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= std::uint32_t(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  double F64() {
    Need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= std::uint64_t(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return std::bit_cast<double>(v);
  }

  std::string Bytes(std::size_t n) {
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

  [[noreturn]] void Fail(const std::string& why) const {
    throw Error(ErrorKind::kFormat, origin_ + ": " + why);
  }

 private:
  void Need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) Fail("truncated checkpoint");
  }

  const std::string& bytes_;
  const std::string& origin_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string EncodeCheckpoint(const Checkpoint& ckpt) {
  std::map<std::string, std::string> header = ckpt.metadata;
  for (const auto& [k, v] : ckpt.config.ToKeyValues()) header[k] = v;
  std::string text;
  for (const auto& [k, v] : header) text += k + "=" + v + "\n";

  std::string out(kMagic, kMagicLen);
  PutU32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  const auto named = ckpt.params.Named();
  PutU32(out, static_cast<std::uint32_t>(named.size()));
  for (const auto& [name, tensor] : named) {
    PutU32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    PutU32(out, static_cast<std::uint32_t>(tensor.rank()));
    for (std::size_t d : tensor.shape()) PutU32(out, static_cast<std::uint32_t>(d));
    for (double v : tensor.values()) PutU64(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

Checkpoint DecodeCheckpoint(const std::string& bytes, const std::string& origin) {
  Reader r(bytes, origin);
  if (r.Bytes(kMagicLen) != std::string(kMagic, kMagicLen)) {
    r.Fail("missing SUDA1 magic");
  }
  const std::string text = r.Bytes(r.U32());
  std::map<std::string, std::string> header;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) r.Fail("malformed header line '" + line + "'");
    header[line.substr(0, eq)] = line.substr(eq + 1);
  }

  Checkpoint ckpt;
  for (const std::string& key : ckpt.config.ApplyKeyValues(header)) {
    ckpt.metadata[key] = header[key];
  }
  try {
    ckpt.config.Validate();
  } catch (const Error& e) {
    r.Fail(e.what());
  }

  // Initialize the expected layout, then overwrite values in order.
  ckpt.params = InitParams(ckpt.config, 0);
  auto named = ckpt.params.Named();
  const std::uint32_t count = r.U32();
  if (count != named.size()) {
    r.Fail("expected " + std::to_string(named.size()) + " tensors, found " +
           std::to_string(count));
  }
  for (auto& [name, tensor] : named) {
    const std::string got = r.Bytes(r.U32());
    if (got != name) r.Fail("expected tensor '" + name + "', found '" + got + "'");
    const std::uint32_t rank = r.U32();
    ad::Shape shape(rank);
    for (auto& d : shape) d = r.U32();
    if (shape != tensor.shape()) {
      r.Fail(name + ": shape " + ad::ShapeToString(shape) + " does not match config " +
             ad::ShapeToString(tensor.shape()));
    }
    for (double& v : tensor.mutable_values()) v = r.F64();
  }
  if (!r.done()) r.Fail("trailing bytes after last tensor");
  return ckpt;
}

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const std::string bytes = EncodeCheckpoint(ckpt);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return DecodeCheckpoint(bytes, path.string());
}

}  // namespace suda
