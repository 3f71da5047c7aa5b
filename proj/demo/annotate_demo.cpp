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


// Trains on the synthetic corpus in memory and tags its held-out images.

#include <cstdio>

#include "blobtag/blobtag.hpp"

int main() {
  using namespace blobtag;

  const auto corpus = make_synthetic_corpus();
  const auto db = train(corpus.train);
  std::printf("%zu images -> %zu segments -> %zu blobs\n", db.images.size(), db.segment_count(), db.vocabulary.size());

  const auto model = make_model(db, {}, 5);
  for (const auto& item : corpus.test) {
    const auto ann = annotate(item.image, model);
    std::printf("%s:", item.image.image_id.c_str());
    for (const auto& tag : ann.tags) std::printf(" %s(%.3f)", tag.keyword.c_str(), tag.score);
    std::printf("\n");
  }
}
