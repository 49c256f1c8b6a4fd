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

#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "suda/error.hpp"
#include "suda/run_config.hpp"

namespace suda {
namespace {

ErrorKind KindOf(const std::string& text) {
  try {
    RunConfig::Parse(text, "test.conf");
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ErrorKind::kFormat;
}

TEST(RunConfig, DefaultsAreValid) {
  RunConfig c;
  EXPECT_NO_THROW(c.Validate());
  EXPECT_EQ(c.model.conv_channels, 512u);
  EXPECT_DOUBLE_EQ(c.triplet_margin, 0.2);
  EXPECT_DOUBLE_EQ(c.alpha, 0.5);
  EXPECT_EQ(c.seed, 2020u);
}

TEST(RunConfig, SerializeParseRoundTrip) {
  RunConfig c;
  c.learning_rate = 0.037;
  c.model.conv_channels = 64;
  c.model.embedding_dim = 64;
  c.model.masks_enabled = false;
  c.phrase_length = PhraseLength::kLong;
  c.work_dir = "somewhere/else";
  c.dev_eval = false;
  const RunConfig back = RunConfig::Parse(c.Serialize(), "mem");
  EXPECT_EQ(back, c);
  EXPECT_EQ(back.Serialize(), c.Serialize());
}

TEST(RunConfig, SaveLoad) {
  const auto path = std::filesystem::temp_directory_path() / "suda_run_config_test.conf";
  RunConfig c;
  c.batch_size = 7;
  c.Save(path);
  EXPECT_EQ(RunConfig::Load(path), c);
  std::filesystem::remove(path);
}

TEST(RunConfig, CommentsAndBlankLines) {
  const RunConfig c = RunConfig::Parse(
      "# comment\n\n  epochs = 3   # trailing\nconv_channels=16\nembedding_dim = 16\n", "x");
  EXPECT_EQ(c.epochs, 3u);
  EXPECT_EQ(c.model.conv_channels, 16u);
}

TEST(RunConfig, RejectsBadInput) {
  EXPECT_EQ(KindOf("no_such_key = 1\n"), ErrorKind::kConfig);
  EXPECT_EQ(KindOf("epochs = 1\nepochs = 2\n"), ErrorKind::kConfig);
  EXPECT_EQ(KindOf("epochs\n"), ErrorKind::kConfig);
  EXPECT_EQ(KindOf("epochs = many\n"), ErrorKind::kConfig);
  EXPECT_EQ(KindOf("learning_rate = -1\n"), ErrorKind::kConfig);
  EXPECT_EQ(KindOf("alpha = 1.5\n"), ErrorKind::kConfig);
  EXPECT_EQ(KindOf("optimizer = adam\n"), ErrorKind::kConfig);
  EXPECT_EQ(KindOf("phrase_length = medium\n"), ErrorKind::kConfig);
  EXPECT_EQ(KindOf("background_fraction = 0.9\ndevelopment_fraction = 0.2\n"),
            ErrorKind::kConfig);
}

TEST(RunConfig, ErrorNamesTheKey) {
  try {
    RunConfig::Parse("momentum = 1.5\n", "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("momentum"), std::string::npos);
  }
}

TEST(RunConfig, CorpusView) {
  RunConfig c;
  c.seed = 99;
  c.corpus_speakers = 8;
  const CorpusConfig corpus = c.Corpus();
  EXPECT_EQ(corpus.seed, 99u);
  EXPECT_EQ(corpus.n_speakers, 8u);
  EXPECT_EQ(corpus.n_phrases, 4u);
}

}  // namespace
}  // namespace suda
