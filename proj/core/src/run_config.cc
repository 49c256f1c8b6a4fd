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

#include "suda/run_config.hpp"

#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "suda/error.hpp"
#include "text_util.hpp"

namespace suda {

namespace {

using internal::FormatDouble;

std::string_view PhraseLengthName(PhraseLength length) {
  return length == PhraseLength::kShort ? "short" : "long";
}

PhraseLength ParsePhraseLength(std::string_view key, std::string_view v) {
  if (v == "short") return PhraseLength::kShort;
  if (v == "long") return PhraseLength::kLong;
  throw Error(ErrorKind::kConfig, std::string(key) + ": expected short or long, got '" +
                                      std::string(v) + "'");
}

}  // namespace

void RunConfig::Validate() const {
  auto fail = [](const std::string& key, const std::string& why) {
    throw Error(ErrorKind::kConfig, key + ": " + why);
  };
  if (optimizer != "sgd_momentum") fail("optimizer", "only sgd_momentum is supported");
  if (!(learning_rate > 0.0)) fail("learning_rate", "must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) fail("momentum", "must be in [0, 1)");
  if (lr_patience == 0) fail("lr_patience", "must be positive");
  if (batch_size == 0) fail("batch_size", "must be positive");
  if (epochs == 0) fail("epochs", "must be positive");
  if (!(grad_clip >= 0.0)) fail("grad_clip", "must be non-negative");
  if (!(triplet_margin >= 0.0)) fail("triplet_margin", "must be non-negative");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha", "must be in [0, 1]");
  if (corpus_speakers < 2) fail("corpus_speakers", "must be at least 2");
  if (corpus_phrases < 2) fail("corpus_phrases", "must be at least 2");
  if (!(background_fraction > 0.0 && development_fraction >= 0.0 &&
        background_fraction + development_fraction < 1.0)) {
    fail("background_fraction", "split fractions must be positive and sum below 1");
  }
  if (corpus_dir.empty()) fail("corpus_dir", "must not be empty");
  if (feature_dir.empty()) fail("feature_dir", "must not be empty");
  if (work_dir.empty()) fail("work_dir", "must not be empty");
  SudaConfig probe = model;
  probe.n_speakers = std::max<std::size_t>(probe.n_speakers, 2);
  probe.n_phrases = std::max<std::size_t>(probe.n_phrases, 2);
  probe.Validate();
}

std::map<std::string, std::string> RunConfig::Provenance() const {
  std::map<std::string, std::string> kv = model.ToKeyValues();
  kv["optimizer"] = optimizer;
  kv["learning_rate"] = FormatDouble(learning_rate);
  kv["momentum"] = FormatDouble(momentum);
  kv["lr_patience"] = std::to_string(lr_patience);
  kv["batch_size"] = std::to_string(batch_size);
  kv["epochs"] = std::to_string(epochs);
  kv["grad_clip"] = FormatDouble(grad_clip);
  kv["triplet_margin"] = FormatDouble(triplet_margin);
  kv["seed"] = std::to_string(seed);
  kv["dev_eval"] = dev_eval ? "true" : "false";
  kv["alpha"] = FormatDouble(alpha);
  kv["corpus_speakers"] = std::to_string(corpus_speakers);
  kv["corpus_phrases"] = std::to_string(corpus_phrases);
  kv["background_fraction"] = FormatDouble(background_fraction);
  kv["development_fraction"] = FormatDouble(development_fraction);
  kv["phrase_length"] = std::string(PhraseLengthName(phrase_length));
  kv["corpus_dir"] = corpus_dir;
  kv["feature_dir"] = feature_dir;
  kv["work_dir"] = work_dir;
  return kv;
}

std::string RunConfig::Serialize() const {
  std::string out;
  for (const auto& [k, v] : Provenance()) out += k + " = " + v + "\n";
  return out;
}

RunConfig RunConfig::Parse(std::string_view text, const std::string& origin) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = internal::Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(line_no);
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::kConfig, where + ": expected 'key = value'");
    }
    const std::string key(internal::Trim(line.substr(0, eq)));
    const std::string value(internal::Trim(line.substr(eq + 1)));
    if (key.empty()) throw Error(ErrorKind::kConfig, where + ": empty key");
    if (!kv.emplace(key, value).second) {
      throw Error(ErrorKind::kConfig, where + ": duplicate key '" + key + "'");
    }
  }

  RunConfig c;
  std::map<std::string, std::string> rest;
  for (const auto& [key, v] : kv) {
    using namespace internal;
    if (key == "optimizer") c.optimizer = v;
    else if (key == "learning_rate") c.learning_rate = ParseDouble(key, v);
    else if (key == "momentum") c.momentum = ParseDouble(key, v);
    else if (key == "lr_patience") c.lr_patience = ParseUnsigned(key, v);
    else if (key == "batch_size") c.batch_size = ParseUnsigned(key, v);
    else if (key == "epochs") c.epochs = ParseUnsigned(key, v);
    else if (key == "grad_clip") c.grad_clip = ParseDouble(key, v);
    else if (key == "triplet_margin") c.triplet_margin = ParseDouble(key, v);
    else if (key == "seed") c.seed = ParseUnsigned(key, v);
    else if (key == "dev_eval") c.dev_eval = ParseBool(key, v);
    else if (key == "alpha") c.alpha = ParseDouble(key, v);
    else if (key == "corpus_speakers") c.corpus_speakers = ParseUnsigned(key, v);
    else if (key == "corpus_phrases") c.corpus_phrases = ParseUnsigned(key, v);
    else if (key == "background_fraction") c.background_fraction = ParseDouble(key, v);
    else if (key == "development_fraction") c.development_fraction = ParseDouble(key, v);
    else if (key == "phrase_length") c.phrase_length = ParsePhraseLength(key, v);
    else if (key == "corpus_dir") c.corpus_dir = v;
    else if (key == "feature_dir") c.feature_dir = v;
    else if (key == "work_dir") c.work_dir = v;
    else rest.emplace(key, v);
  }
  const std::vector<std::string> unknown = c.model.ApplyKeyValues(rest);
  if (!unknown.empty()) {
    throw Error(ErrorKind::kConfig, origin + ": unknown key '" + unknown.front() + "'");
  }
  c.Validate();
  return c;
}

RunConfig RunConfig::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return Parse(text, path.string());
}

void RunConfig::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << Serialize();
}

CorpusConfig RunConfig::Corpus() const {
  CorpusConfig c;
  c.n_speakers = corpus_speakers;
  c.n_phrases = corpus_phrases;
  c.seed = seed;
  c.background_fraction = background_fraction;
  c.development_fraction = development_fraction;
  c.phrase_length = phrase_length;
  return c;
}

}  // namespace suda
