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


// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "blobtag/blobtag.hpp"
#include "test_support.hpp"

using namespace blobtag;
namespace bt = blobtag::testkit;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

struct Criterion {
  const char* id;
  const char* title;
  double time_limit_s;
  std::function<Outcome()> check;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome color_chain() {
  Outcome o;
  const WhitePoint w;
  const auto white = rgb_to_luv(from_8bit(255, 255, 255), w);
  o.require(std::abs(white.l - 100.0) <= 1e-6 && std::abs(white.u) <= 1e-6 && std::abs(white.v) <= 1e-6,
            fmt("white -> (%.9f, %.3g, %.3g)", white.l, white.u, white.v));
  const auto black = rgb_to_luv(from_8bit(0, 0, 0), w);
  o.require(black.l == 0.0 && black.u == 0.0 && black.v == 0.0, "black is not exactly (0,0,0)");
  const auto gray = rgb_to_luv(from_8bit(128, 128, 128), w);
  const auto ref = bt::luv_oracle(128.0L / 255.0L, 128.0L / 255.0L, 128.0L / 255.0L);
  constexpr double kReference = 53.585013452169022712;  // 40-digit evaluation
  o.require(std::abs(gray.l - static_cast<double>(ref.l)) <= 0.01 && std::abs(gray.l - kReference) <= 0.01 &&
                std::abs(gray.l - 53.58) <= 0.01,
            fmt("gray 128 -> L=%.6f (oracle %.6f)", gray.l, static_cast<double>(ref.l)));
  if (o.ok) o.detail = fmt("white L=%.9f, black (0,0,0), gray128 L=%.6f", white.l, gray.l);
  return o;
}

Outcome cie_junction() {
  Outcome o;
  const WhitePoint w;
  const double gap = std::abs(116.0 * std::cbrt(w.epsilon()) - 16.0 - w.kappa() * w.epsilon());
  o.require(gap <= 1e-9, fmt("junction gap %.3g", gap));
  o.require(w.epsilon() == 216.0 / 24389.0 && w.kappa() == 24389.0 / 27.0, "constants are not 216/24389, 24389/27");
  if (o.ok) o.detail = fmt("gap %.3g", gap);
  return o;
}

// Equal values compressed into weighted points, nearest cluster by sorted search.
bt::Partition accelerated_partition(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  std::vector<ClusterPoint<1>> pts;
  std::vector<std::vector<std::size_t>> originals;
  for (auto i : order) {
    if (!pts.empty() && pts.back().feature[0] == values[i]) {
      ++pts.back().weight;
      originals.back().push_back(i);
    } else {
      pts.push_back({pts.size(), {values[i]}, 1});
      originals.push_back({i});
    }
  }
  ClusterConfig cfg;
  cfg.search = NearestSearch::sorted;
  bt::Partition out;
  for (const auto& c : run_close_clustering<1>(pts, cfg).clusters) {
    std::vector<std::size_t> ids;
    for (auto m : c.members) ids.insert(ids.end(), originals[m].begin(), originals[m].end());
    std::sort(ids.begin(), ids.end());
    out.insert(ids);
  }
  return out;
}

Outcome clustering_oracle() {
  Outcome o;
  std::mt19937_64 rng(20260202);
  std::size_t max_clusters = 0;
  for (int t = 0; t < 200 && o.ok; ++t) {
    const auto values = bt::random_multiset(rng, 1000);
    const auto expect = bt::naive_close_clustering(values);
    o.require(accelerated_partition(values) == expect, "accelerated partition differs on multiset " + std::to_string(t));
    max_clusters = std::max(max_clusters, expect.size());
  }
  const auto five = run_close_clustering<1>(bt::scalar_points({0, 1, 10, 11, 100}));
  o.require(bt::to_partition(five) == bt::Partition{{0, 1, 2, 3}, {4}} && five.passes_run == 2,
            "{0,1,10,11,100} did not give {{0,1,10,11},{100}} in 2 passes");
  const auto three = run_close_clustering<1>(bt::scalar_points({0, 50, 100}));
  o.require(three.clusters.size() == 3 && three.passes_run == 1, "{0,50,100} did not give 3 clusters in 1 pass");
  if (o.ok) o.detail = "200/200 multisets identical; hand traces exact";
  return o;
}

Outcome segmentation_partition() {
  Outcome o;
  std::mt19937_64 rng(20260303);
  for (int t = 0; t < 50 && o.ok; ++t) {
    const auto img = bt::random_image(rng, "a" + std::to_string(t), 64);
    const auto segs = segment_image(img);
    std::vector<int> hits(img.size(), 0);
    for (const auto& s : segs) {
      for (auto i : s.pixel_indices) ++hits[i];
    }
    o.require(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }),
              "segments do not partition image " + std::to_string(t));

    std::vector<std::size_t> perm(img.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto moved = img;
    for (std::size_t i = 0; i < perm.size(); ++i) moved.pixels[perm[i]] = img.pixels[i];
    const auto segs2 = segment_image(moved);
    bool same = segs2.size() == segs.size();
    for (std::size_t s = 0; same && s < segs.size(); ++s) {
      std::vector<std::size_t> mapped;
      for (auto i : segs[s].pixel_indices) mapped.push_back(perm[i]);
      std::sort(mapped.begin(), mapped.end());
      same = mapped == segs2[s].pixel_indices;
    }
    o.require(same, "segmentation changed under pixel permutation for image " + std::to_string(t));
  }
  if (o.ok) o.detail = "50/50 images partitioned and permutation-invariant";
  return o;
}

Outcome probability_oracle() {
  Outcome o;
  std::mt19937_64 rng(20260404);
  double worst = 0.0, worst_sum = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto db = bt::random_database(rng, 20, 8, 10);
    const auto table = build_table(db);
    for (std::size_t b = 0; b < table.n_blobs(); ++b) {
      double sum = 0.0;
      bool observed = false;
      for (const auto& img : db.images) observed |= img.blob_histogram.count(b) > 0;
      for (const auto& w : table.keywords()) {
        const double p = lookup(table, w, b);
        worst = std::max(worst, std::abs(p - bt::brute_force_probability(db, w, b)));
        sum += p;
      }
      if (observed) worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    }
  }
  o.require(worst <= 1e-12, fmt("max |table - brute force| = %.3g", worst));
  o.require(worst_sum <= 1e-9, fmt("max |column sum - 1| = %.3g", worst_sum));

  TrainingDatabase db;
  db.vocabulary.blobs = {{0, {0, 0, 0}, {{"i0", 0}, {"i0", 1}}}, {1, {1, 0, 0}, {{"i0", 2}, {"i1", 0}, {"i1", 1}}}};
  db.images.push_back({"i0", {"sky"}, {{0, 2}, {1, 1}},
                       {{0, "i0", 0, 1, {}, std::nullopt}, {0, "i0", 1, 1, {}, std::nullopt}, {1, "i0", 2, 1, {}, std::nullopt}}});
  db.images.push_back({"i1", {"sky", "sea"}, {{1, 2}}, {{1, "i1", 0, 1, {}, std::nullopt}, {1, "i1", 1, 1, {}, std::nullopt}}});
  db.keyword_lexicon = make_lexicon(db.images);
  const auto t = build_table(db);
  o.require(lookup(t, "sky", 1) == 0.6 && lookup(t, "sea", 1) == 0.4 && lookup(t, "sky", 0) == 1.0 &&
                lookup(t, "sea", 0) == 0.0,
            "worked corpus table is not {1, 0; 0.6, 0.4}");
  if (o.ok) o.detail = fmt("max deviation %.3g, max column error %.3g; worked corpus exact", worst, worst_sum);
  return o;
}

Outcome store_round_trip() {
  Outcome o;
  std::mt19937_64 rng(20260505);
  for (int t = 0; t < 50 && o.ok; ++t) {
    const auto db = bt::random_database(rng, 20, 8, 10, t % 2 == 0);
    std::ostringstream a, b;
    save_db(db, a);
    save_db(db, b);
    o.require(a.str() == b.str(), "save output not byte-identical for database " + std::to_string(t));
    std::istringstream in(a.str());
    o.require(bt::databases_equal(db, load_db(in), 1e-9), "round trip changed database " + std::to_string(t));
  }
  if (o.ok) o.detail = "50/50 databases round-trip; output byte-stable";
  return o;
}

Outcome end_to_end() {
  Outcome o;
  SyntheticCorpusOptions opts;
  opts.train_per_group = 20;
  opts.test_per_group = 2;
  opts.noise = 2;
  const auto corpus = make_synthetic_corpus(opts);
  o.require(corpus.train.size() == 100 && corpus.test.size() == 10, "corpus is not 5x20 training + 10 held out");

  TrainOptions train_opts;
  train_opts.jobs = 4;
  const auto db = train(corpus.train, train_opts);
  const auto model = make_model(db);
  std::vector<ImageScore> scores;
  for (const auto& item : corpus.test) {
    scores.push_back(score_annotation(item.image.image_id, annotate(item.image, model).tags, item.keywords));
  }
  const auto report = summarize(scores);
  o.require(report.pct_at_least_one_correct >= 90.0, fmt("at least one correct: %.1f%% < 90%%", report.pct_at_least_one_correct));
  o.require(report.pct_accuracy_above_half >= 79.0, fmt("accuracy above half: %.1f%% < 79%%", report.pct_accuracy_above_half));
  o.detail = fmt("at least one correct %.1f%%, accuracy > 50%% for %.1f%%, blobs %.0f", report.pct_at_least_one_correct,
                 report.pct_accuracy_above_half, static_cast<double>(db.vocabulary.size()));
  return o;
}

Outcome top_k_contract() {
  Outcome o;
  std::mt19937_64 rng(20260606);
  for (int t = 0; t < 500 && o.ok; ++t) {
    const auto table = bt::random_table(rng, 40, 12);
    std::vector<std::size_t> blobs(std::uniform_int_distribution<std::size_t>(1, 8)(rng));
    for (auto& b : blobs) b = std::uniform_int_distribution<std::size_t>(0, table.n_blobs() - 1)(rng);
    const std::size_t k = t % 2 == 0 ? kDefaultTopK : std::uniform_int_distribution<std::size_t>(1, 20)(rng);
    const auto scores = score_keywords(blobs, table);
    const auto tags = select_top_k(scores, k);
    std::size_t positive = 0;
    for (const auto& [w, s] : scores) positive += s > 0.0;
    o.require(tags.size() == std::min(k, positive), "tag count is not min(k, positive keywords)");
    for (std::size_t i = 0; i < tags.size(); ++i) {
      o.require(tags[i].score > 0.0, "non-positive tag emitted");
      if (i > 0) {
        o.require(tags[i - 1].score > tags[i].score ||
                      (tags[i - 1].score == tags[i].score && tags[i - 1].keyword < tags[i].keyword),
                  "tags out of order");
      }
    }
    o.require(select_top_k(scores, k) == tags, "ranking not deterministic");
  }
  if (o.ok) o.detail = "500 random tables; default k = 15";
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"AC1", "colour chain", 1.0, color_chain},
      {"AC2", "CIE junction continuity", 1.0, cie_junction},
      {"AC3", "clustering oracle", 30.0, clustering_oracle},
      {"AC4", "segmentation partition", 30.0, segmentation_partition},
      {"AC5", "probability table oracle", 10.0, probability_oracle},
      {"AC6", "store round trip", 10.0, store_round_trip},
      {"AC7", "synthetic end-to-end", 120.0, end_to_end},
      {"AC8", "top-k contract", 5.0, top_k_contract},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.time_limit_s) {
      o.ok = false;
      o.detail += fmt(" [runtime %.2fs exceeds %.0fs]", secs, c.time_limit_s);
    }
    std::printf("%s %s %-26s %s (%.3fs)\n", o.ok ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(), secs);
    failures += !o.ok;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
