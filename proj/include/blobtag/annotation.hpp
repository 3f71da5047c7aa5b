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


#pragma once

// Keyword annotation of unseen images.
//
// score(w) = (1/m) * sum_j p(w | b_j) over the image's m blob assignments;
// positive scores are ranked and the best top_k kept.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "blobtag/errors.hpp"
#include "blobtag/probability.hpp"
#include "blobtag/segmentation.hpp"
#include "blobtag/store.hpp"
#include "blobtag/vocabulary.hpp"

namespace blobtag {

inline constexpr std::size_t kDefaultTopK = 15;

struct AnnotationModel {
  BlobVocabulary vocabulary;
  ProbabilityTable table;
  SegmentationOptions segmentation{};
  std::size_t top_k = kDefaultTopK;
};

struct Tag {
  std::string keyword;
  double score = 0.0;

  friend bool operator==(const Tag&, const Tag&) = default;
};

struct Annotation {
  std::vector<Tag> tags;
  std::vector<std::size_t> blob_multiset;  // one entry per segment, segment order
};

inline AnnotationModel make_model(const TrainingDatabase& db, const SegmentationOptions& segmentation = {},
                                  std::size_t top_k = kDefaultTopK) {
  return {db.vocabulary, build_table(db), segmentation, top_k};
}

inline std::map<std::string, double> score_keywords(std::span<const std::size_t> blobs,
                                                    const ProbabilityTable& table) {
  if (blobs.empty()) throw domain_error("score_keywords: empty blob multiset");
  std::vector<double> sums(table.n_keywords(), 0.0);
  for (auto b : blobs) {
    if (b >= table.n_blobs()) throw domain_error("score_keywords: blob " + std::to_string(b) + " outside table");
    for (std::size_t w = 0; w < sums.size(); ++w) sums[w] += table.entries()(w, b);
  }
  std::map<std::string, double> scores;
  const double m = static_cast<double>(blobs.size());
  for (std::size_t w = 0; w < sums.size(); ++w) scores.emplace(table.keywords()[w], sums[w] / m);
  return scores;
}

// Scores are snapped to a 1e-12 grid before ranking, so last-bit noise from
// column normalization cannot split what are exact ties.
inline double snap_score(double s) { return std::round(s * 1e12) / 1e12; }

inline std::vector<Tag> select_top_k(const std::map<std::string, double>& scores, std::size_t k) {
  if (k < 1) throw domain_error("select_top_k: k must be at least 1");
  std::vector<Tag> tags;
  for (const auto& [w, s] : scores) {
    const double snapped = snap_score(s);
    if (snapped > 0.0) tags.push_back({w, snapped});
  }
  std::stable_sort(tags.begin(), tags.end(), [](const Tag& a, const Tag& b) {
    return a.score != b.score ? a.score > b.score : a.keyword < b.keyword;
  });
  if (tags.size() > k) tags.resize(k);
  return tags;
}

inline Annotation annotate(const RasterImage& img, const AnnotationModel& model) {
  if (model.vocabulary.empty() || model.table.n_keywords() == 0) throw domain_error("annotate: model is not trained");
  if (model.table.n_blobs() != model.vocabulary.size()) {
    throw domain_error("annotate: probability table does not match vocabulary");
  }
  Annotation out;
  for (const auto& seg : segment_image(img, model.segmentation)) {
    out.blob_multiset.push_back(nearest_blob(seg.feature, model.vocabulary));
  }
  out.tags = select_top_k(score_keywords(out.blob_multiset, model.table), model.top_k);
  return out;
}

}  // namespace blobtag
