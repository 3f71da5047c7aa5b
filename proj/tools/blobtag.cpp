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


// blobtag: train, annotate, evaluate.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blobtag/blobtag.hpp"

namespace fs = std::filesystem;
using namespace blobtag;

namespace {

struct CommonFlags {
  int max_passes = 100;
  FeatureMode feature_mode = FeatureMode::luv;
  bool compat_cie = false;
  unsigned jobs = 1;

  SegmentationOptions segmentation() const {
    SegmentationOptions s;
    s.clustering.max_passes = max_passes;
    s.feature_mode = feature_mode;
    s.cie = compat_cie ? CieConstants::compat : CieConstants::intent;
    return s;
  }
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--max-passes", flags.max_passes, "Upper bound on clustering passes")
      ->check(CLI::PositiveNumber)
      ->default_val(100);
  const std::map<std::string, FeatureMode> modes{
      {"luv", FeatureMode::luv}, {"luminance", FeatureMode::luminance}, {"l", FeatureMode::luminance}};
  cmd->add_option("--feature-mode", flags.feature_mode, "Segment signature: luv or luminance")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  cmd->add_flag("--compat-cie", flags.compat_cie, "Use eps=0.0085, k=903.3 instead of 216/24389, 24389/27");
  cmd->add_option("--jobs", flags.jobs, "Images segmented in parallel")->check(CLI::PositiveNumber);
}

fs::path image_path(const fs::path& dir, const std::string& id) { return dir / (id + ".ppm"); }

std::vector<LabeledImage> load_labeled(const fs::path& dir, const KeywordsManifest& manifest, unsigned jobs) {
  std::vector<LabeledImage> out(manifest.entries.size());
  parallel_for(out.size(), jobs, [&](std::size_t i) {
    const auto& e = manifest.entries[i];
    out[i] = {read_ppm(image_path(dir, e.image_id), e.image_id), e.keywords};
  });
  return out;
}

int cmd_train(const fs::path& images, const fs::path& manifest_path, const fs::path& db_path, const CommonFlags& flags,
              bool store_pixels, const std::string& table_out) {
  const auto manifest = read_manifest(manifest_path);
  if (manifest.entries.empty()) throw domain_error("no training images in " + manifest_path.string());
  const auto corpus = load_labeled(images, manifest, flags.jobs);

  TrainOptions opts{flags.segmentation(), store_pixels, flags.jobs};
  const auto db = train(corpus, opts);
  save_db(db, db_path);

  std::vector<Segment> segments;
  for (const auto& img : db.images) {
    for (const auto& s : img.segments) segments.push_back({s.image_id, s.segment_id, {}, s.feature, s.pixel_count});
  }
  std::cout << "images: " << db.images.size() << '\n'
            << "segments: " << db.segment_count() << '\n'
            << "blobs: " << db.vocabulary.size() << '\n'
            << "keywords: " << db.keyword_lexicon.size() << '\n'
            << "drifted segments: " << self_consistency_violations(segments, db.vocabulary).size() << '\n';

  if (!table_out.empty()) {
    std::ofstream out(table_out);
    if (!out) throw io_error("cannot write table " + table_out);
    write_table_tsv(build_table(db), out);
  }
  return 0;
}

int cmd_annotate(const fs::path& db_path, const std::vector<std::string>& images, std::size_t k,
                 const CommonFlags& flags) {
  const auto model = make_model(load_db(db_path), flags.segmentation(), k);
  for (const auto& path : images) {
    if (images.size() > 1) std::cout << "# " << path << '\n';
    for (const auto& tag : annotate(read_ppm(fs::path(path)), model).tags) {
      std::printf("%s\t%.6f\n", tag.keyword.c_str(), tag.score);
    }
  }
  return 0;
}

int cmd_evaluate(const fs::path& db_path, const fs::path& manifest_path, const fs::path& images, std::size_t k,
                 const CommonFlags& flags) {
  const auto model = make_model(load_db(db_path), flags.segmentation(), k);
  const auto manifest = read_manifest(manifest_path);
  if (manifest.entries.empty()) throw domain_error("no test images in " + manifest_path.string());
  const auto corpus = load_labeled(images, manifest, flags.jobs);

  std::vector<ImageScore> scores(corpus.size());
  parallel_for(corpus.size(), flags.jobs, [&](std::size_t i) {
    const auto ann = annotate(corpus[i].image, model);
    scores[i] = score_annotation(corpus[i].image.image_id, ann.tags, corpus[i].keywords);
  });
  const auto report = summarize(std::move(scores));

  std::printf("image_id\taccuracy\tprecision\n");
  for (const auto& s : report.per_image) std::printf("%s\t%.6f\t%.6f\n", s.image_id.c_str(), s.accuracy, s.precision);
  std::printf("n_test: %zu\n", report.n_test);
  std::printf("pct_at_least_one_correct: %.1f\n", report.pct_at_least_one_correct);
  std::printf("pct_accuracy_above_half: %.1f\n", report.pct_accuracy_above_half);
  return 0;
}

int cmd_synth(const fs::path& out_dir, std::uint64_t seed) {
  SyntheticCorpusOptions opts;
  opts.seed = seed;
  const auto corpus = make_synthetic_corpus(opts);
  fs::create_directories(out_dir / "images");
  auto emit = [&](const std::vector<LabeledImage>& set, const fs::path& manifest_path) {
    KeywordsManifest m;
    for (const auto& item : set) {
      write_ppm(image_path(out_dir / "images", item.image.image_id), item.image);
      m.entries.push_back({item.image.image_id, item.keywords});
    }
    std::ofstream out(manifest_path);
    if (!out) throw io_error("cannot write " + manifest_path.string());
    write_manifest(out, m);
  };
  emit(corpus.train, out_dir / "train.tsv");
  emit(corpus.test, out_dir / "test.tsv");
  std::cout << "train: " << corpus.train.size() << "\ntest: " << corpus.test.size() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Automatic keyword annotation of colour images"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string db, images, manifest, table_out, out_dir;
  std::size_t k = kDefaultTopK;
  bool store_pixels = false;
  std::vector<std::string> targets;
  std::uint64_t seed = SyntheticCorpusOptions{}.seed;

  auto* train_cmd = app.add_subcommand("train", "Build a training database from labelled images");
  train_cmd->add_option("--images", images, "Directory holding <image_id>.ppm files")->required();
  train_cmd->add_option("--manifest", manifest, "Keywords manifest")->required();
  train_cmd->add_option("--db", db, "Output database document")->required();
  train_cmd->add_flag("--store-pixels", store_pixels, "Record pixel indices of every segment");
  train_cmd->add_option("--export-table", table_out, "Also write p(keyword|blob) as TSV");
  add_common(train_cmd, flags);

  auto* annotate_cmd = app.add_subcommand("annotate", "Print ranked keywords for images");
  annotate_cmd->add_option("--db", db, "Training database")->required();
  annotate_cmd->add_option("--k", k, "Maximum number of tags")->check(CLI::PositiveNumber);
  annotate_cmd->add_option("image", targets, "Pixmap files")->required();
  add_common(annotate_cmd, flags);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score annotations against held-out keywords");
  evaluate_cmd->add_option("--db", db, "Training database")->required();
  evaluate_cmd->add_option("--manifest", manifest, "Test keywords manifest")->required();
  evaluate_cmd->add_option("--images", images, "Directory holding <image_id>.ppm files")->required();
  evaluate_cmd->add_option("--k", k, "Maximum number of tags")->check(CLI::PositiveNumber);
  add_common(evaluate_cmd, flags);

  auto* synth_cmd = app.add_subcommand("synth", "Write the synthetic five-group demo corpus");
  synth_cmd->add_option("--out", out_dir, "Output directory")->required();
  synth_cmd->add_option("--seed", seed, "Generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return cmd_train(images, manifest, db, flags, store_pixels, table_out);
    if (*annotate_cmd) return cmd_annotate(db, targets, k, flags);
    if (*evaluate_cmd) return cmd_evaluate(db, manifest, images, k, flags);
    if (*synth_cmd) return cmd_synth(out_dir, seed);
  } catch (const std::exception& e) {
    std::cerr << "blobtag: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
