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

// Corpus-level training: segment every image, build the blob vocabulary,
// and assemble the training database.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "blobtag/errors.hpp"
#include "blobtag/pixmap.hpp"
#include "blobtag/segmentation.hpp"
#include "blobtag/store.hpp"
#include "blobtag/vocabulary.hpp"

namespace blobtag {

struct LabeledImage {
  RasterImage image;
  std::vector<std::string> keywords;
};

struct TrainOptions {
  SegmentationOptions segmentation{};
  bool store_pixels = false;
  unsigned jobs = 1;
};

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
// thrown by any task is rethrown here.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < jobs; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

inline TrainingDatabase train(std::span<const LabeledImage> corpus, const TrainOptions& opts = {}) {
  if (corpus.empty()) throw domain_error("no training images");

  std::vector<const LabeledImage*> ordered;
  std::set<std::string> ids;
  for (const auto& item : corpus) {
    if (!ids.insert(item.image.image_id).second) throw validation_error("duplicate image id '" + item.image.image_id + "'");
    if (item.keywords.empty()) throw validation_error("image '" + item.image.image_id + "' has no keywords");
    ordered.push_back(&item);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->image.image_id < b->image.image_id; });

  std::vector<std::vector<Segment>> per_image(ordered.size());
  parallel_for(ordered.size(), opts.jobs,
               [&](std::size_t i) { per_image[i] = segment_image(ordered[i]->image, opts.segmentation); });

  std::vector<Segment> all;
  for (const auto& segs : per_image) all.insert(all.end(), segs.begin(), segs.end());

  TrainingDatabase db;
  db.vocabulary = build_vocabulary(all, opts.segmentation.clustering);

  std::map<SegmentKey, std::size_t> assignment;
  for (const auto& b : db.vocabulary.blobs) {
    for (const auto& m : b.members) assignment.emplace(m, b.blob_id);
  }

  for (std::size_t i = 0; i < ordered.size(); ++i) {
    ImageRecord rec{ordered[i]->image.image_id, ordered[i]->keywords, {}, {}};
    for (const auto& s : per_image[i]) {
      const auto blob = assignment.at({s.image_id, s.segment_id});
      ++rec.blob_histogram[blob];
      SegmentRecord sr{blob, s.image_id, s.segment_id, s.pixel_count, s.feature, std::nullopt};
      if (opts.store_pixels) sr.pixel_indices = s.pixel_indices;
      rec.segments.push_back(std::move(sr));
    }
    db.images.push_back(std::move(rec));
  }
  db.keyword_lexicon = make_lexicon(db.images);
  validate(db);
  return db;
}

}  // namespace blobtag
