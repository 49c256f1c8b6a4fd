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

#ifndef SUDA_WAV_HPP_
#define SUDA_WAV_HPP_

#include <filesystem>
#include <vector>

namespace suda {

// Mono waveform with samples nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;
};

// Mono 16-bit signed PCM WAV. Samples are scaled by 1/32768 on read and
// rounded/clipped to int16 on write.
Waveform ReadWav(const std::filesystem::path& path);
void WriteWav(const std::filesystem::path& path, const Waveform& wave);

// Round-trips a waveform through the int16 representation WriteWav stores.
Waveform QuantizeToPcm16(const Waveform& wave);

}  // namespace suda

#endif  // SUDA_WAV_HPP_
