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

#ifndef SUDA_ERROR_HPP_
#define SUDA_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace suda {

enum class ErrorKind {
  kDimension,
  kUtteranceTooShort,
  kEmptyInput,
  kOutOfRange,
  kNonFinite,
  kManifest,
  kDegenerateEnrollment,
  kFormat,
  kIo,
  kConfig,
};

const char* ErrorKindName(ErrorKind kind);

// All library failures are reported through this exception. The kind lets
// callers (and tests) distinguish e.g. a too-short utterance from a bad file.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace suda

#endif  // SUDA_ERROR_HPP_
