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

// Held-out evaluation. Headline accuracy is recall against the true
// keyword set; precision is reported alongside.

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "blobtag/annotation.hpp"

namespace blobtag {

struct ImageScore {
  std::string image_id;
  double accuracy = 0.0;   // |predicted ∩ truth| / |truth|
  double precision = 0.0;  // |predicted ∩ truth| / |predicted|, 0 when nothing predicted
};

struct EvaluationReport {
  std::vector<ImageScore> per_image;
  double pct_at_least_one_correct = 0.0;
  double pct_accuracy_above_half = 0.0;
  std::size_t n_test = 0;
};

inline ImageScore score_annotation(std::string image_id, const std::vector<Tag>& predicted,
                                   const std::vector<std::string>& truth) {
  const std::set<std::string> truth_set(truth.begin(), truth.end());
  std::size_t hits = 0;
  for (const auto& t : predicted) hits += truth_set.count(t.keyword);
  ImageScore s{std::move(image_id), 0.0, 0.0};
  if (!truth_set.empty()) s.accuracy = static_cast<double>(hits) / static_cast<double>(truth_set.size());
  if (!predicted.empty()) s.precision = static_cast<double>(hits) / static_cast<double>(predicted.size());
  return s;
}

inline EvaluationReport summarize(std::vector<ImageScore> scores) {
  EvaluationReport r;
  r.n_test = scores.size();
  if (r.n_test > 0) {
    const auto n = static_cast<double>(r.n_test);
    const auto any = std::count_if(scores.begin(), scores.end(), [](const auto& s) { return s.accuracy > 0.0; });
    const auto half = std::count_if(scores.begin(), scores.end(), [](const auto& s) { return s.accuracy > 0.5; });
    r.pct_at_least_one_correct = 100.0 * static_cast<double>(any) / n;
    r.pct_accuracy_above_half = 100.0 * static_cast<double>(half) / n;
  }
  r.per_image = std::move(scores);
  return r;
}

}  // namespace blobtag
