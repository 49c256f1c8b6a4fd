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

#include "suda/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "suda/error.hpp"
#include "text_util.hpp"

namespace suda {

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kBackground: return "background";
    case Split::kDevelopment: return "development";
    case Split::kEvaluation: return "evaluation";
  }
  return "?";
}

Split ParseSplit(std::string_view name) {
  if (name == "background") return Split::kBackground;
  if (name == "development") return Split::kDevelopment;
  if (name == "evaluation") return Split::kEvaluation;
  throw Error(ErrorKind::kFormat, "unknown split '" + std::string(name) + "'");
}

std::string FormatManifest(const Manifest& manifest) {
  std::string out;
  for (const Utterance& u : manifest) {
    out += u.utt_id + '\t' + u.speaker + '\t' + u.phrase + '\t' +
           std::to_string(u.session) + '\t' + std::string(SplitName(u.split)) + '\t' +
           u.path + '\n';
  }
  return out;
}

Manifest ParseManifest(std::string_view text, const std::string& origin) {
  Manifest manifest;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (internal::Trim(line).empty()) continue;
    const auto f = internal::SplitTabs(line);
    const std::string where = origin + ":" + std::to_string(line_no);
    if (f.size() != 6) {
      throw Error(ErrorKind::kManifest,
                  where + ": expected 6 tab-separated fields, got " +
                      std::to_string(f.size()));
    }
    Utterance u;
    u.utt_id = f[0];
    u.speaker = f[1];
    u.phrase = f[2];
    try {
      u.session = static_cast<int>(internal::ParseUnsigned("session", f[3]));
      u.split = ParseSplit(f[4]);
    } catch (const Error& e) {
      throw Error(ErrorKind::kManifest, where + ": " + e.what());
    }
    u.path = f[5];
    manifest.push_back(std::move(u));
  }
  ValidateManifest(manifest);
  return manifest;
}

void WriteManifest(const std::filesystem::path& path, const Manifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << FormatManifest(manifest);
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

Manifest ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open manifest " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return ParseManifest(text, path.string());
}

void ValidateManifest(const Manifest& manifest) {
  std::set<std::tuple<Split, std::string, std::string, int>> seen;
  std::set<std::string> ids;
  for (const Utterance& u : manifest) {
    if (u.session < 1 || u.session > 9) {
      throw Error(ErrorKind::kManifest, u.utt_id + ": session " +
                                            std::to_string(u.session) +
                                            " outside 1..9");
    }
    if (!seen.emplace(u.split, u.speaker, u.phrase, u.session).second) {
      throw Error(ErrorKind::kManifest,
                  "duplicate (speaker, phrase, session) = (" + u.speaker + ", " +
                      u.phrase + ", " + std::to_string(u.session) + ") in split " +
                      std::string(SplitName(u.split)));
    }
    if (!ids.insert(u.utt_id).second) {
      throw Error(ErrorKind::kManifest, "duplicate utt_id " + u.utt_id);
    }
  }
}

Manifest FilterSplit(const Manifest& manifest, Split split) {
  Manifest out;
  std::copy_if(manifest.begin(), manifest.end(), std::back_inserter(out),
               [split](const Utterance& u) { return u.split == split; });
  return out;
}

bool IsEnrollmentSession(int session) {
  return std::find(kEnrollmentSessions.begin(), kEnrollmentSessions.end(), session) !=
         kEnrollmentSessions.end();
}

EnrollmentSplit SplitEnrollment(const Manifest& manifest) {
  EnrollmentSplit out;
  std::map<std::pair<std::string, std::string>, std::set<int>> sessions;
  for (const Utterance& u : manifest) {
    sessions[{u.speaker, u.phrase}].insert(u.session);
    (IsEnrollmentSession(u.session) ? out.enroll : out.test).push_back(u);
  }
  for (const auto& [key, have] : sessions) {
    for (int s : kEnrollmentSessions) {
      if (!have.count(s)) {
        throw Error(ErrorKind::kManifest,
                    "missing enrollment session (speaker, phrase, session) = (" +
                        key.first + ", " + key.second + ", " + std::to_string(s) + ")");
      }
    }
  }
  return out;
}

std::vector<ModelId> EnrollmentModels(const Manifest& enroll) {
  std::set<ModelId> models;
  for (const Utterance& u : enroll) models.insert({u.speaker, u.phrase});
  return {models.begin(), models.end()};
}

std::string_view CategoryName(TrialCategory category) {
  switch (category) {
    case TrialCategory::kTC: return "TC";
    case TrialCategory::kTW: return "TW";
    case TrialCategory::kIC: return "IC";
    case TrialCategory::kIW: return "IW";
  }
  return "?";
}

TrialCategory ParseCategory(std::string_view name) {
  if (name == "TC") return TrialCategory::kTC;
  if (name == "TW") return TrialCategory::kTW;
  if (name == "IC") return TrialCategory::kIC;
  if (name == "IW") return TrialCategory::kIW;
  throw Error(ErrorKind::kFormat, "unknown trial category '" + std::string(name) + "'");
}

std::string_view ConditionName(Condition condition) {
  return CategoryName(NonTargetCategory(condition));
}

Condition ParseCondition(std::string_view name) {
  if (name == "TW") return Condition::kTW;
  if (name == "IC") return Condition::kIC;
  if (name == "IW") return Condition::kIW;
  throw Error(ErrorKind::kConfig,
              "condition must be TW, IC or IW, got '" + std::string(name) + "'");
}

TrialCategory NonTargetCategory(Condition condition) {
  switch (condition) {
    case Condition::kTW: return TrialCategory::kTW;
    case Condition::kIC: return TrialCategory::kIC;
    case Condition::kIW: return TrialCategory::kIW;
  }
  return TrialCategory::kIW;
}

TrialCategory Categorize(const ModelId& model, const Utterance& test) {
  const bool same_speaker = model.speaker == test.speaker;
  const bool same_phrase = model.phrase == test.phrase;
  if (same_speaker) return same_phrase ? TrialCategory::kTC : TrialCategory::kTW;
  return same_phrase ? TrialCategory::kIC : TrialCategory::kIW;
}

std::vector<Trial> GenerateTrials(std::span<const ModelId> models,
                                  const Manifest& tests, Condition condition) {
  std::vector<ModelId> sorted_models(models.begin(), models.end());
  std::sort(sorted_models.begin(), sorted_models.end(),
            [](const ModelId& a, const ModelId& b) { return a.Name() < b.Name(); });
  std::vector<const Utterance*> sorted_tests;
  for (const Utterance& u : tests) sorted_tests.push_back(&u);
  std::sort(sorted_tests.begin(), sorted_tests.end(),
            [](const Utterance* a, const Utterance* b) { return a->utt_id < b->utt_id; });

  const TrialCategory wanted = NonTargetCategory(condition);
  std::vector<Trial> trials;
  for (const ModelId& m : sorted_models) {
    for (const Utterance* u : sorted_tests) {
      if (IsEnrollmentSession(u->session)) continue;
      const TrialCategory c = Categorize(m, *u);
      if (c == TrialCategory::kTC || c == wanted) {
        trials.push_back({m.Name(), u->utt_id, c});
      }
    }
  }
  return trials;
}

std::string FormatTrials(std::span<const Trial> trials) {
  std::string out;
  for (const Trial& t : trials) {
    out += t.model + '\t' + t.test_utt + '\t' + std::string(CategoryName(t.category)) +
           '\n';
  }
  return out;
}

std::vector<Trial> ParseTrials(std::string_view text, const std::string& origin) {
  std::vector<Trial> trials;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (internal::Trim(line).empty()) continue;
    const auto f = internal::SplitTabs(internal::Trim(line));
    if (f.size() != 3) {
      throw Error(ErrorKind::kFormat, origin + ":" + std::to_string(line_no) +
                                          ": expected 3 tab-separated fields");
    }
    trials.push_back({f[0], f[1], ParseCategory(f[2])});
  }
  return trials;
}

void WriteTrials(const std::filesystem::path& path, std::span<const Trial> trials) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << FormatTrials(trials);
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

std::vector<Trial> ReadTrials(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open trial list " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return ParseTrials(text, path.string());
}

std::vector<double> EnrollModel(std::span<const std::vector<double>> embeddings) {
  if (embeddings.size() != kEnrollmentSessions.size()) {
    throw Error(ErrorKind::kDimension, "enrollment needs exactly 3 embeddings, got " +
                                           std::to_string(embeddings.size()));
  }
  const std::size_t dim = embeddings[0].size();
  std::vector<double> mean(dim, 0.0);
  for (const auto& e : embeddings) {
    if (e.size() != dim) throw Error(ErrorKind::kDimension, "enrollment length mismatch");
    for (std::size_t i = 0; i < dim; ++i) mean[i] += e[i];
  }
  double norm = 0.0;
  for (double& v : mean) {
    v /= static_cast<double>(embeddings.size());
    norm += v * v;
  }
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) {
    throw Error(ErrorKind::kDegenerateEnrollment, "enrollment mean has zero norm");
  }
  for (double& v : mean) v /= norm;
  return mean;
}

}  // namespace suda
