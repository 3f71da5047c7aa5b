// Copyright 2026 The blobtag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Drives the blobtag executable end to end.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "blobtag/blobtag.hpp"

namespace fs = std::filesystem;
using namespace blobtag;

namespace {

struct CliResult {
  int status;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("blobtag_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_ / "images");
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliResult run(const std::string& args) const {
    const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string(BLOBTAG_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write(const fs::path& p, const std::string& text) const { std::ofstream(dir_ / p) << text; }
  std::string path(const fs::path& p) const { return (dir_ / p).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SynthTrainAnnotateEvaluate) {
  ASSERT_EQ(run("synth --out " + path("corpus")).status, 0);

  const auto trained = run("train --images " + path("corpus/images") + " --manifest " + path("corpus/train.tsv") +
                           " --db " + path("db.xml") + " --export-table " + path("table.tsv"));
  ASSERT_EQ(trained.status, 0) << trained.err;
  EXPECT_NE(trained.out.find("images: 100\n"), std::string::npos) << trained.out;
  EXPECT_NE(trained.out.find("keywords: 20\n"), std::string::npos) << trained.out;

  // counts agree with the in-memory pipeline
  const auto db = load_db(dir_ / "db.xml");
  EXPECT_NE(trained.out.find("blobs: " + std::to_string(db.vocabulary.size()) + "\n"), std::string::npos);
  EXPECT_NE(trained.out.find("segments: " + std::to_string(db.segment_count()) + "\n"), std::string::npos);
  EXPECT_EQ(slurp(dir_ / "table.tsv").substr(0, 8), "keyword\t");

  const auto ann = run("annotate --db " + path("db.xml") + " " + path("corpus/images/test_g2_0.ppm"));
  ASSERT_EQ(ann.status, 0) << ann.err;
  EXPECT_EQ(ann.out.substr(0, 4), "sea\t");

  const auto one = run("annotate --db " + path("db.xml") + " --k 1 " + path("corpus/images/test_g0_1.ppm"));
  ASSERT_EQ(one.status, 0);
  EXPECT_EQ(std::count(one.out.begin(), one.out.end(), '\n'), 1);

  const auto eval = run("evaluate --db " + path("db.xml") + " --manifest " + path("corpus/test.tsv") + " --images " +
                        path("corpus/images") + " --jobs 3");
  ASSERT_EQ(eval.status, 0) << eval.err;
  EXPECT_NE(eval.out.find("n_test: 10\n"), std::string::npos) << eval.out;
  EXPECT_NE(eval.out.find("pct_at_least_one_correct: 100.0\n"), std::string::npos) << eval.out;

  // identical training set as test set
  const auto self = run("evaluate --db " + path("db.xml") + " --manifest " + path("corpus/train.tsv") + " --images " +
                        path("corpus/images"));
  EXPECT_NE(self.out.find("pct_at_least_one_correct: 100.0\n"), std::string::npos);
}

TEST_F(CliTest, UniformImageOnOneKeywordDatabase) {
  write_ppm(dir_ / "images" / "flat.ppm", make_image("flat", 6, 4, from_8bit(70, 90, 200)));
  write("m.tsv", "flat\tsky\n");
  ASSERT_EQ(run("train --images " + path("images") + " --manifest " + path("m.tsv") + " --db " + path("db.xml")).status, 0);
  const auto ann = run("annotate --db " + path("db.xml") + " " + path("images/flat.ppm"));
  ASSERT_EQ(ann.status, 0) << ann.err;
  EXPECT_EQ(ann.out, "sky\t1.000000\n");
}

TEST_F(CliTest, TrainErrors) {
  write("empty.tsv", "# nothing\n");
  auto r = run("train --images " + path("images") + " --manifest " + path("empty.tsv") + " --db " + path("db.xml"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("no training images"), std::string::npos) << r.err;

  write_ppm(dir_ / "images" / "a.ppm", make_image("a", 2, 2));
  write("dup.tsv", "a\tsky\na\tsea\n");
  r = run("train --images " + path("images") + " --manifest " + path("dup.tsv") + " --db " + path("db.xml"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("duplicate image id 'a'"), std::string::npos) << r.err;

  write("missing.tsv", "a\tsky\nghost\tsea\n");
  r = run("train --images " + path("images") + " --manifest " + path("missing.tsv") + " --db " + path("db.xml"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("ghost.ppm"), std::string::npos) << r.err;

  write("bad.tsv", "a sky\n");
  r = run("train --images " + path("images") + " --manifest " + path("bad.tsv") + " --db " + path("db.xml"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("line 1"), std::string::npos) << r.err;

  write("ok.tsv", "a\tsky\n");
  r = run("train --images " + path("images") + " --manifest " + path("ok.tsv") + " --db /nonexistent/dir/db.xml");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("/nonexistent/dir/db.xml"), std::string::npos) << r.err;
}

TEST_F(CliTest, AnnotateAndEvaluateErrors) {
  EXPECT_NE(run("annotate --db " + path("nope.xml") + " " + path("x.ppm")).status, 0);

  write_ppm(dir_ / "images" / "a.ppm", make_image("a", 2, 2));
  write("ok.tsv", "a\tsky\n");
  ASSERT_EQ(run("train --images " + path("images") + " --manifest " + path("ok.tsv") + " --db " + path("db.xml")).status, 0);
  EXPECT_NE(run("annotate --db " + path("db.xml") + " " + path("images/none.ppm")).status, 0);

  write("empty.tsv", "");
  const auto r = run("evaluate --db " + path("db.xml") + " --manifest " + path("empty.tsv") + " --images " + path("images"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("no test images"), std::string::npos);

  write("zebra.tsv", "a\tzebra\n");
  const auto z = run("evaluate --db " + path("db.xml") + " --manifest " + path("zebra.tsv") + " --images " + path("images"));
  ASSERT_EQ(z.status, 0) << z.err;
  EXPECT_NE(z.out.find("a\t0.000000\t0.000000\n"), std::string::npos) << z.out;
}

TEST_F(CliTest, FlagsAreAccepted) {
  write_ppm(dir_ / "images" / "a.ppm", make_image("a", 3, 3, from_8bit(10, 200, 30)));
  write("ok.tsv", "a\tgrass\n");
  const auto r = run("train --images " + path("images") + " --manifest " + path("ok.tsv") + " --db " + path("db.xml") +
                     " --max-passes 3 --feature-mode luminance --compat-cie --store-pixels --jobs 2");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(slurp(dir_ / "db.xml").find("<PixelIndex i=\"8\"/>"), std::string::npos);
  const auto a = run("annotate --db " + path("db.xml") + " --feature-mode l --compat-cie " + path("images/a.ppm"));
  EXPECT_EQ(a.out, "grass\t1.000000\n");
  EXPECT_NE(run("train --images x --manifest y --db z --feature-mode hsv").status, 0);
}
