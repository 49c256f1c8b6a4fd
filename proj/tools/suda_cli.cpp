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

// Command-line driver for the full pipeline:
//   suda [--config PATH] [--seed N] <synth|extract|train|embed|trials|score|eval|ablate>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "suda/error.hpp"
#include "suda/pipeline.hpp"
#include "suda/run_config.hpp"

namespace {

suda::RunConfig LoadConfig(const std::string& path, std::optional<std::uint64_t> seed) {
  suda::RunConfig config = path.empty() ? suda::RunConfig{} : suda::RunConfig::Load(path);
  if (seed) config.seed = *seed;
  config.Validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SUDA speaker-utterance verification pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "key = value run configuration")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "override the configured seed");

  auto* synth = app.add_subcommand("synth", "generate the synthetic corpus");
  auto* extract = app.add_subcommand("extract", "write FEAT1 features for the corpus");

  auto* train = app.add_subcommand("train", "train a model on the background split");
  bool no_masks = false;
  train->add_flag("--no-masks", no_masks, "train the mod-SUV variant without masking");

  std::string split_name = "evaluation";
  auto* embed = app.add_subcommand("embed", "write per-utterance embeddings");
  std::string checkpoint;
  std::string out;
  embed->add_option("--checkpoint", checkpoint, "checkpoint (default: work_dir/suda.ckpt)");
  embed->add_option("--split", split_name, "background|development|evaluation");
  embed->add_option("--out", out, "output file (default: work_dir/embeddings_<split>.tsv)");

  auto* trials = app.add_subcommand("trials", "generate a trial list for one condition");
  std::string condition;
  trials->add_option("--condition", condition, "TW|IC|IW")->required();
  trials->add_option("--split", split_name, "background|development|evaluation");
  trials->add_option("--out", out, "output file (default: work_dir/trials_<cond>.tsv)");

  auto* score = app.add_subcommand("score", "score a trial list");
  std::optional<double> alpha;
  std::string source;
  std::string trials_path;
  score->add_option("--alpha", alpha, "fusion weight of the speaker score");
  score->add_option("--source", source, "checkpoint or embedding file")->required();
  score->add_option("--trials", trials_path, "trial list")->required();
  score->add_option("--out", out, "output file (default: work_dir/scores.tsv)");

  auto* eval = app.add_subcommand("eval", "EER report for a score file");
  std::string scores_path;
  eval->add_option("--scores", scores_path, "score file")->required();

  auto* ablate = app.add_subcommand("ablate", "paired SUDA vs mod-SUV comparison");
  std::vector<std::uint64_t> seeds;
  ablate->add_option("--seeds", seeds, "training seeds (default: seed, seed+1, seed+2)");

  CLI11_PARSE(app, argc, argv);

  try {
    const suda::RunConfig config = LoadConfig(config_path, seed);
    const suda::Layout layout(config);
    if (synth->parsed()) {
      const suda::Manifest m = suda::CmdSynth(config);
      std::cout << "wrote " << m.size() << " utterances to " << layout.corpus_dir.string()
                << "\n";
    } else if (extract->parsed()) {
      const std::size_t n = suda::CmdExtract(config);
      std::cout << "wrote " << n << " feature files to " << layout.feature_dir.string()
                << "\n";
    } else if (train->parsed()) {
      const suda::TrainResult r = suda::CmdTrain(config, !no_masks);
      const suda::EpochRecord& last = r.log.epochs.back();
      std::cout << "trained " << r.log.epochs.size() << " epochs, final mean loss "
                << last.mean_loss << "; checkpoint " << layout.Checkpoint(!no_masks).string()
                << "\n";
    } else if (embed->parsed()) {
      const suda::Split split = suda::ParseSplit(split_name);
      const std::filesystem::path ckpt =
          checkpoint.empty() ? layout.Checkpoint(true) : std::filesystem::path(checkpoint);
      const std::filesystem::path dest =
          out.empty() ? layout.work_dir / ("embeddings_" + split_name + ".tsv")
                      : std::filesystem::path(out);
      const auto table = suda::CmdEmbed(config, ckpt, split, dest);
      std::cout << "wrote " << table.size() << " embeddings to " << dest.string() << "\n";
    } else if (trials->parsed()) {
      const suda::Condition c = suda::ParseCondition(condition);
      const std::filesystem::path dest =
          out.empty() ? layout.work_dir / ("trials_" + condition + ".tsv")
                      : std::filesystem::path(out);
      const auto list = suda::CmdTrials(config, suda::ParseSplit(split_name), c, dest);
      std::cout << "wrote " << list.size() << " trials to " << dest.string() << "\n";
    } else if (score->parsed()) {
      const std::filesystem::path dest =
          out.empty() ? layout.work_dir / "scores.tsv" : std::filesystem::path(out);
      const auto records =
          suda::CmdScore(config, source, trials_path, alpha.value_or(config.alpha), dest);
      std::cout << "wrote " << records.size() << " scores to " << dest.string() << "\n";
    } else if (eval->parsed()) {
      std::cout << suda::CmdEval(scores_path);
    } else if (ablate->parsed()) {
      if (seeds.empty()) seeds = {config.seed, config.seed + 1, config.seed + 2};
      std::cout << suda::CmdAblate(config, seeds).Format();
    }
  } catch (const suda::Error& e) {
    std::cerr << "suda: " << suda::ErrorKindName(e.kind()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "suda: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
