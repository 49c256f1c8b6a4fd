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

#ifndef SUDA_TESTS_SUPPORT_FIXTURES_HPP_
#define SUDA_TESTS_SUPPORT_FIXTURES_HPP_

#include <cstdint>

#include "oracles.hpp"
#include "suda/frontend.hpp"
#include "suda/network.hpp"

namespace suda::testing {

// hidden 8, channels 8, two speakers, two phrases.
inline SudaConfig MicroConfig(bool masks = true) {
  SudaConfig c;
  c.shared_hidden = 8;
  c.branch_hidden = 8;
  c.conv_channels = 8;
  c.embedding_dim = 8;
  c.n_speakers = 2;
  c.n_phrases = 2;
  c.masks_enabled = masks;
  return c;
}

inline FeatureMatrix RandomFeatures(std::size_t nf, std::uint64_t seed,
                                    std::size_t dim = kFeatureDim) {
  return FeatureMatrix({nf, dim}, RandomVector(nf * dim, seed, -2.0, 2.0));
}

}  // namespace suda::testing

#endif  // SUDA_TESTS_SUPPORT_FIXTURES_HPP_
