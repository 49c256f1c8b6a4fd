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

#ifndef SUDA_PROTOCOL_HPP_
#define SUDA_PROTOCOL_HPP_

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace suda {

enum class Split { kBackground, kDevelopment, kEvaluation };

std::string_view SplitName(Split split);
Split ParseSplit(std::string_view name);

// One manifest row: utt_id, speaker, phrase, session (1..9), split, path.
struct Utterance {
  std::string utt_id;
  std::string speaker;
  std::string phrase;
  int session = 1;
  Split split = Split::kBackground;
  std::string path;

  bool operator==(const Utterance&) const = default;
};

using Manifest = std::vector<Utterance>;

// UTF-8, one tab-separated row per utterance, no header.
std::string FormatManifest(const Manifest& manifest);
Manifest ParseManifest(std::string_view text, const std::string& origin);
void WriteManifest(const std::filesystem::path& path, const Manifest& manifest);
Manifest ReadManifest(const std::filesystem::path& path);

// Session range and (speaker, phrase, session) uniqueness per split.
void ValidateManifest(const Manifest& manifest);

Manifest FilterSplit(const Manifest& manifest, Split split);

inline constexpr std::array<int, 3> kEnrollmentSessions = {1, 4, 7};
bool IsEnrollmentSession(int session);

struct EnrollmentSplit {
  Manifest enroll;
  Manifest test;
};

// Sessions 1, 4, 7 of every (speaker, phrase) enroll; the rest are tests.
// A missing enrollment session raises kManifest naming the triple.
EnrollmentSplit SplitEnrollment(const Manifest& manifest);

// Enrollment model of one speaker saying one phrase.
struct ModelId {
  std::string speaker;
  std::string phrase;

  std::string Name() const { return speaker + "_" + phrase; }
  auto operator<=>(const ModelId&) const = default;
};

// Distinct (speaker, phrase) pairs of the enrollment set, sorted.
std::vector<ModelId> EnrollmentModels(const Manifest& enroll);

enum class TrialCategory { kTC, kTW, kIC, kIW };
enum class Condition { kTW, kIC, kIW };

std::string_view CategoryName(TrialCategory category);
TrialCategory ParseCategory(std::string_view name);
std::string_view ConditionName(Condition condition);
Condition ParseCondition(std::string_view name);
TrialCategory NonTargetCategory(Condition condition);

// TC: same speaker and phrase; TW: same speaker only; IC: same phrase only;
// IW: neither.
TrialCategory Categorize(const ModelId& model, const Utterance& test);

struct Trial {
  std::string model;     // ModelId::Name()
  std::string test_utt;  // utt_id
  TrialCategory category = TrialCategory::kTC;

  bool operator==(const Trial&) const = default;
};

// All TC trials plus all trials of the condition's non-target category,
// ordered by model name then test utt_id.
std::vector<Trial> GenerateTrials(std::span<const ModelId> models,
                                  const Manifest& tests, Condition condition);

std::string FormatTrials(std::span<const Trial> trials);
std::vector<Trial> ParseTrials(std::string_view text, const std::string& origin);
void WriteTrials(const std::filesystem::path& path, std::span<const Trial> trials);
std::vector<Trial> ReadTrials(const std::filesystem::path& path);

// Mean of exactly three session embeddings, length-normalized. A zero mean
// raises kDegenerateEnrollment.
std::vector<double> EnrollModel(std::span<const std::vector<double>> embeddings);

}  // namespace suda

#endif  // SUDA_PROTOCOL_HPP_
