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

#include "suda/pipeline.hpp"

#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "suda/error.hpp"
#include "suda/feature_io.hpp"
#include "suda/synth.hpp"
#include "suda/tensor.hpp"
#include "suda/wav.hpp"
#include "text_util.hpp"

namespace suda {

namespace {

namespace fs = std::filesystem;
using internal::FormatDouble;

constexpr Condition kConditions[] = {Condition::kTW, Condition::kIC, Condition::kIW};

void EnsureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

Manifest LoadManifest(const Layout& layout) {
  if (!fs::exists(layout.Manifest())) {
    throw Error(ErrorKind::kIo, "missing manifest " + layout.Manifest().string() +
                                    " (run synth first)");
  }
  Manifest m = ReadManifest(layout.Manifest());
  ValidateManifest(m);
  return m;
}

std::string VariantName(bool masks) { return masks ? "suda" : "mod_suv"; }

std::string JoinIds(const std::vector<std::string>& ids) {
  std::string out;
  for (const std::string& id : ids) out += (out.empty() ? "" : ",") + id;
  return out;
}

// Trains one variant in memory with a development-split snapshot per epoch.
TrainResult TrainVariant(const RunConfig& config, bool masks, const Manifest& manifest,
                         const FeatureStore& features, const StepObserver& observer = {}) {
  const Manifest background = FilterSplit(manifest, Split::kBackground);
  const TrainingSet data = MakeTrainingSet(background, [&](const Utterance& u) {
    return features.at(u.utt_id);
  });
  SudaConfig model = config.model;
  model.masks_enabled = masks;

  DevEvaluator dev;
  if (!FilterSplit(manifest, Split::kDevelopment).empty()) {
    dev = [&](const SudaParams& params, const SudaConfig& cfg) {
      std::map<std::string, double> out;
      const SplitEvaluation e =
          EvaluateSplit(params, cfg, manifest, Split::kDevelopment, features, config.alpha);
      for (const auto& [c, r] : e.eers) out[std::string(ConditionName(c))] = r.eer_percent;
      return out;
    };
  }
  return Train(config, model, data, dev, observer);
}

}  // namespace

Layout::Layout(const RunConfig& config)
    : corpus_dir(config.corpus_dir),
      feature_dir(config.feature_dir),
      work_dir(config.work_dir) {}

fs::path Layout::Checkpoint(bool masks) const {
  return work_dir / (VariantName(masks) + ".ckpt");
}
fs::path Layout::StepLog(bool masks) const {
  return work_dir / (VariantName(masks) + "_steps.tsv");
}
fs::path Layout::EpochLog(bool masks) const {
  return work_dir / (VariantName(masks) + "_epochs.tsv");
}

FeatureStore LoadFeatures(const Layout& layout, const Manifest& manifest) {
  FeatureStore store;
  for (const Utterance& u : manifest) {
    const fs::path path = layout.Features(u.utt_id);
    if (!fs::exists(path)) {
      throw Error(ErrorKind::kIo, "missing features " + path.string() + " (run extract first)");
    }
    store.emplace(u.utt_id, ReadFeat1(path));
  }
  return store;
}

EmbeddingTable ComputeEmbeddings(const SudaParams& params, const SudaConfig& config,
                                 const Manifest& manifest, const FeatureStore& features) {
  ad::NoGradGuard no_grad;
  EmbeddingTable table;
  for (const Utterance& u : manifest) {
    const auto it = features.find(u.utt_id);
    if (it == features.end()) {
      throw Error(ErrorKind::kManifest, "no features for utterance " + u.utt_id);
    }
    const BranchActivations a = Forward(it->second, params, config);
    table[u.utt_id] = {std::vector<double>(a.emb_s.values().begin(), a.emb_s.values().end()),
                       std::vector<double>(a.emb_u.values().begin(), a.emb_u.values().end())};
  }
  return table;
}

std::string FormatEmbeddings(const EmbeddingTable& table) {
  std::string out;
  for (const auto& [utt, e] : table) {
    out += utt + "\t" + std::to_string(e.spk.size());
    for (const auto* vec : {&e.spk, &e.utt}) {
      out += "\t";
      for (std::size_t i = 0; i < vec->size(); ++i) {
        out += (i ? " " : "") + FormatDouble((*vec)[i]);
      }
    }
    out += "\n";
  }
  return out;
}

EmbeddingTable ParseEmbeddings(std::string_view text, const std::string& origin) {
  EmbeddingTable table;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    const auto f = internal::SplitTabs(line);
    if (f.size() != 4) throw Error(ErrorKind::kFormat, where + ": expected 4 fields");
    UtteranceEmbedding e;
    std::size_t dim = 0;
    try {
      dim = internal::ParseUnsigned("dim", f[1]);
      for (int b = 0; b < 2; ++b) {
        std::vector<double>& vec = b == 0 ? e.spk : e.utt;
        std::istringstream values(f[2 + b]);
        for (std::string tok; values >> tok;) vec.push_back(internal::ParseDouble("value", tok));
      }
    } catch (const Error& err) {
      throw Error(ErrorKind::kFormat, where + ": " + err.what());
    }
    if (dim == 0 || e.spk.size() != dim || e.utt.size() != dim) {
      throw Error(ErrorKind::kFormat, where + ": vector length does not match dim");
    }
    if (!table.emplace(f[0], std::move(e)).second) {
      throw Error(ErrorKind::kFormat, where + ": duplicate utterance " + f[0]);
    }
  }
  return table;
}

void WriteEmbeddings(const fs::path& path, const EmbeddingTable& table) {
  WriteText(path, FormatEmbeddings(table));
}

EmbeddingTable ReadEmbeddings(const fs::path& path) {
  return ParseEmbeddings(ReadText(path), path.string());
}

std::vector<Trial> ConditionTrials(const Manifest& split_manifest, Condition condition) {
  const EnrollmentSplit parts = SplitEnrollment(split_manifest);
  const std::vector<ModelId> models = EnrollmentModels(parts.enroll);
  return GenerateTrials(models, parts.test, condition);
}

std::vector<Trial> AllConditionTrials(const Manifest& split_manifest) {
  std::vector<Trial> out;
  for (Condition c : kConditions) {
    for (const Trial& t : ConditionTrials(split_manifest, c)) {
      const bool first = c == kConditions[0];
      if (t.category != TrialCategory::kTC || first) out.push_back(t);
    }
  }
  return out;
}

std::vector<ScoreRecord> ScoreTrials(const EmbeddingTable& embeddings,
                                     const Manifest& split_manifest,
                                     std::span<const Trial> trials, double alpha) {
  Fuse(0.0, 0.0, alpha);  // validates alpha before any work
  const EnrollmentSplit parts = SplitEnrollment(split_manifest);
  std::map<std::string, std::vector<const Utterance*>> enroll_by_model;
  for (const Utterance& u : parts.enroll) {
    enroll_by_model[ModelId{u.speaker, u.phrase}.Name()].push_back(&u);
  }
  auto lookup = [&](const std::string& utt) -> const UtteranceEmbedding& {
    const auto it = embeddings.find(utt);
    if (it == embeddings.end()) {
      throw Error(ErrorKind::kManifest, "no embedding for utterance " + utt);
    }
    return it->second;
  };

  std::map<std::string, UtteranceEmbedding> models;
  auto model = [&](const std::string& name) -> const UtteranceEmbedding& {
    if (auto it = models.find(name); it != models.end()) return it->second;
    const auto found = enroll_by_model.find(name);
    if (found == enroll_by_model.end()) {
      throw Error(ErrorKind::kManifest, "trial references unknown model " + name);
    }
    std::vector<std::vector<double>> spk, utt;
    for (const Utterance* u : found->second) {
      spk.push_back(lookup(u->utt_id).spk);
      utt.push_back(lookup(u->utt_id).utt);
    }
    return models[name] = {EnrollModel(spk), EnrollModel(utt)};
  };

  std::vector<ScoreRecord> scores;
  scores.reserve(trials.size());
  for (const Trial& t : trials) {
    const UtteranceEmbedding& m = model(t.model);
    const UtteranceEmbedding& x = lookup(t.test_utt);
    ScoreRecord r;
    r.trial = t;
    r.s_spk = CosineScore(m.spk, x.spk);
    r.s_utt = CosineScore(m.utt, x.utt);
    r.fused = Fuse(r.s_spk, r.s_utt, alpha);
    scores.push_back(r);
  }
  return scores;
}

std::map<Condition, EerResult> EvaluateScores(std::span<const ScoreRecord> scores) {
  std::set<TrialCategory> present;
  for (const ScoreRecord& s : scores) present.insert(s.trial.category);
  std::map<Condition, EerResult> out;
  for (Condition c : kConditions) {
    if (present.count(NonTargetCategory(c))) out[c] = EvalCondition(scores, c);
  }
  if (out.empty()) {
    throw Error(ErrorKind::kEmptyInput, "score list has no non-target trials");
  }
  return out;
}

std::string FormatEvaluation(const std::map<Condition, EerResult>& eers) {
  std::string out;
  for (const auto& [c, r] : eers) out += FormatEerReport(ConditionName(c), r) + "\n";
  return out;
}

SplitEvaluation EvaluateSplit(const SudaParams& params, const SudaConfig& config,
                              const Manifest& manifest, Split split,
                              const FeatureStore& features, double alpha) {
  const Manifest part = FilterSplit(manifest, split);
  if (part.empty()) {
    throw Error(ErrorKind::kManifest, "split " + std::string(SplitName(split)) + " is empty");
  }
  SplitEvaluation e;
  const EmbeddingTable table = ComputeEmbeddings(params, config, part, features);
  const std::vector<Trial> trials = AllConditionTrials(part);
  e.scores = ScoreTrials(table, part, trials, alpha);
  e.eers = EvaluateScores(e.scores);
  return e;
}

Manifest CmdSynth(const RunConfig& config) {
  config.Validate();
  const Layout layout(config);
  return GenerateCorpus(config.Corpus(), layout.corpus_dir);
}

std::size_t CmdExtract(const RunConfig& config) {
  config.Validate();
  const Layout layout(config);
  const Manifest manifest = LoadManifest(layout);
  EnsureDir(layout.feature_dir);
  for (const Utterance& u : manifest) {
    const Waveform wave = ReadWav(layout.corpus_dir / u.path);
    WriteFeat1(layout.Features(u.utt_id), ExtractFeatures(wave));
  }
  return manifest.size();
}

TrainResult CmdTrain(const RunConfig& config, bool masks) {
  config.Validate();
  const Layout layout(config);
  const Manifest manifest = LoadManifest(layout);
  Manifest needed = FilterSplit(manifest, Split::kBackground);
  for (const Utterance& u : FilterSplit(manifest, Split::kDevelopment)) needed.push_back(u);
  const FeatureStore features = LoadFeatures(layout, needed);

  TrainResult result = TrainVariant(config, masks, manifest, features);
  EnsureDir(layout.work_dir);

  std::map<std::string, std::string> header = config.Provenance();
  for (const auto& [k, v] : result.config.ToKeyValues()) header[k] = v;
  header["variant"] = VariantName(masks);
  WriteText(layout.StepLog(masks), result.log.FormatSteps(header));
  WriteText(layout.EpochLog(masks), result.log.FormatEpochs(header));

  Checkpoint ckpt{result.config, result.params, config.Provenance()};
  ckpt.metadata["variant"] = VariantName(masks);
  const TrainingSet labels =
      MakeTrainingSet(FilterSplit(manifest, Split::kBackground),
                      [](const Utterance&) { return FeatureMatrix(); });
  ckpt.metadata["speaker_labels"] = JoinIds(labels.speakers);
  ckpt.metadata["phrase_labels"] = JoinIds(labels.phrases);
  SaveCheckpoint(layout.Checkpoint(masks), ckpt);
  return result;
}

EmbeddingTable CmdEmbed(const RunConfig& config, const fs::path& checkpoint, Split split,
                        const fs::path& out) {
  config.Validate();
  const Layout layout(config);
  const Checkpoint ckpt = LoadCheckpoint(checkpoint);
  const Manifest part = FilterSplit(LoadManifest(layout), split);
  if (part.empty()) {
    throw Error(ErrorKind::kManifest, "split " + std::string(SplitName(split)) + " is empty");
  }
  const EmbeddingTable table =
      ComputeEmbeddings(ckpt.params, ckpt.config, part, LoadFeatures(layout, part));
  if (out.has_parent_path()) EnsureDir(out.parent_path());
  WriteEmbeddings(out, table);
  return table;
}

std::vector<Trial> CmdTrials(const RunConfig& config, Split split, Condition condition,
                             const fs::path& out) {
  config.Validate();
  const Manifest part = FilterSplit(LoadManifest(Layout(config)), split);
  if (part.empty()) {
    throw Error(ErrorKind::kManifest, "split " + std::string(SplitName(split)) + " is empty");
  }
  std::vector<Trial> trials = ConditionTrials(part, condition);
  if (out.has_parent_path()) EnsureDir(out.parent_path());
  WriteTrials(out, trials);
  return trials;
}

std::vector<ScoreRecord> CmdScore(const RunConfig& config, const fs::path& source,
                                  const fs::path& trials_path, double alpha,
                                  const fs::path& out) {
  config.Validate();
  const Layout layout(config);
  const Manifest manifest = LoadManifest(layout);
  const std::vector<Trial> trials = ReadTrials(trials_path);
  if (trials.empty()) throw Error(ErrorKind::kEmptyInput, trials_path.string() + ": no trials");

  // The split is the one holding the first test utterance.
  Split split = Split::kEvaluation;
  bool found = false;
  for (const Utterance& u : manifest) {
    if (u.utt_id == trials.front().test_utt) {
      split = u.split;
      found = true;
      break;
    }
  }
  if (!found) {
    throw Error(ErrorKind::kManifest, trials_path.string() + ": utterance " +
                                          trials.front().test_utt + " not in manifest");
  }
  const Manifest part = FilterSplit(manifest, split);

  const std::string head = ReadText(source).substr(0, 5);
  EmbeddingTable table;
  if (head == "SUDA1") {
    const Checkpoint ckpt = LoadCheckpoint(source);
    table = ComputeEmbeddings(ckpt.params, ckpt.config, part, LoadFeatures(layout, part));
  } else {
    table = ReadEmbeddings(source);
  }
  std::vector<ScoreRecord> scores = ScoreTrials(table, part, trials, alpha);
  if (out.has_parent_path()) EnsureDir(out.parent_path());
  WriteScores(out, scores);
  return scores;
}

std::string CmdEval(const fs::path& scores) {
  const std::vector<ScoreRecord> records = ReadScores(scores);
  if (records.empty()) throw Error(ErrorKind::kEmptyInput, scores.string() + ": no scores");
  return FormatEvaluation(EvaluateScores(records));
}

std::string AblationReport::Format() const {
  std::string out = "seed\tvariant\tTW\tIC\tIW\n";
  auto row = [&](const std::string& seed, const std::string& variant,
                 const std::map<Condition, double>& eer) {
    out += seed + "\t" + variant;
    for (Condition c : kConditions) out += "\t" + FormatDouble(eer.at(c));
    out += "\n";
  };
  auto eers = [](const std::map<Condition, EerResult>& r) {
    std::map<Condition, double> m;
    for (const auto& [c, e] : r) m[c] = e.eer_percent;
    return m;
  };
  for (const AblationRow& r : rows) {
    row(std::to_string(r.seed), "suda", eers(r.suda));
    row(std::to_string(r.seed), "mod_suv", eers(r.mod_suv));
  }
  row("mean", "suda", mean_suda);
  row("mean", "mod_suv", mean_mod_suv);
  return out;
}

AblationReport CmdAblate(const RunConfig& config, std::span<const std::uint64_t> seeds) {
  config.Validate();
  if (seeds.empty()) throw Error(ErrorKind::kConfig, "ablate: no seeds given");
  const Layout layout(config);
  const Manifest manifest = LoadManifest(layout);
  const FeatureStore features = LoadFeatures(layout, manifest);

  AblationReport report;
  for (std::uint64_t seed : seeds) {
    RunConfig run = config;
    run.seed = seed;
    AblationRow row;
    row.seed = seed;
    for (bool masks : {true, false}) {
      const TrainResult trained = TrainVariant(run, masks, manifest, features);
      (masks ? row.suda : row.mod_suv) =
          EvaluateSplit(trained.params, trained.config, manifest, Split::kEvaluation,
                        features, config.alpha)
              .eers;
    }
    report.rows.push_back(std::move(row));
  }
  for (Condition c : kConditions) {
    double s = 0.0, m = 0.0;
    for (const AblationRow& r : report.rows) {
      s += r.suda.at(c).eer_percent;
      m += r.mod_suv.at(c).eer_percent;
    }
    report.mean_suda[c] = s / static_cast<double>(report.rows.size());
    report.mean_mod_suv[c] = m / static_cast<double>(report.rows.size());
  }
  EnsureDir(layout.work_dir);
  WriteText(layout.work_dir / "ablation.tsv", report.Format());
  return report;
}

}  // namespace suda
