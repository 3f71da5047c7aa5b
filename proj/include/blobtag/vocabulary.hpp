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

// Blob vocabulary: close clustering of segment features across the corpus.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blobtag/clustering.hpp"
#include "blobtag/errors.hpp"
#include "blobtag/segmentation.hpp"

namespace blobtag {

struct SegmentKey {
  std::string image_id;
  std::size_t segment_id = 0;

  friend auto operator<=>(const SegmentKey&, const SegmentKey&) = default;
};

struct BlobToken {
  std::size_t blob_id = 0;
  LuvFeature centroid{};
  std::vector<SegmentKey> members;  // ascending
};

struct BlobVocabulary {
  static constexpr std::size_t feature_dim = 3;

  std::vector<BlobToken> blobs;

  std::size_t size() const noexcept { return blobs.size(); }
  bool empty() const noexcept { return blobs.empty(); }

  // Blob a training segment was assigned to when the vocabulary was built.
  std::optional<std::size_t> recorded_blob(const SegmentKey& key) const {
    for (const auto& b : blobs) {
      if (std::binary_search(b.members.begin(), b.members.end(), key)) return b.blob_id;
    }
    return std::nullopt;
  }
};

inline BlobVocabulary build_vocabulary(std::span<const Segment> segments, const ClusterConfig& cfg = {}) {
  if (segments.empty()) throw domain_error("build_vocabulary: no segments");
  std::vector<ClusterPoint<3>> points;
  points.reserve(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) points.push_back({i, segments[i].feature, 1});

  const auto set = run_close_clustering<3>(points, cfg);
  BlobVocabulary vocab;
  for (const auto& c : set.clusters) {
    BlobToken blob{vocab.blobs.size(), c.centroid, {}};
    for (auto id : c.members) blob.members.push_back({segments[id].image_id, segments[id].segment_id});
    std::sort(blob.members.begin(), blob.members.end());
    vocab.blobs.push_back(std::move(blob));
  }
  return vocab;
}

inline std::size_t nearest_blob(const LuvFeature& feature, const BlobVocabulary& vocab) {
  if (vocab.empty()) throw domain_error("nearest_blob: empty vocabulary");
  std::size_t best = 0;
  double best_d = distance<3>(feature, vocab.blobs[0].centroid);
  for (std::size_t j = 1; j < vocab.blobs.size(); ++j) {
    const double d = distance<3>(feature, vocab.blobs[j].centroid);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return vocab.blobs[best].blob_id;
}

// Training segments keep their recorded blob; anything else maps to the
// nearest centroid.
inline std::map<std::size_t, std::size_t> blob_histogram(std::span<const Segment> segments,
                                                         const BlobVocabulary& vocab) {
  std::map<SegmentKey, std::size_t> recorded;
  for (const auto& b : vocab.blobs) {
    for (const auto& m : b.members) recorded.emplace(m, b.blob_id);
  }
  std::map<std::size_t, std::size_t> counts;
  for (const auto& s : segments) {
    const auto it = recorded.find({s.image_id, s.segment_id});
    ++counts[it != recorded.end() ? it->second : nearest_blob(s.feature, vocab)];
  }
  return counts;
}

struct ConsistencyViolation {
  SegmentKey segment;
  std::size_t recorded_blob = 0;
  std::size_t nearest = 0;
};

// Training segments whose feature is not strictly closest to their own
// blob's centroid. Pairwise-mean merging can drift a centroid away from
// some of its early members.
inline std::vector<ConsistencyViolation> self_consistency_violations(std::span<const Segment> segments,
                                                                     const BlobVocabulary& vocab) {
  std::vector<ConsistencyViolation> out;
  for (const auto& s : segments) {
    const SegmentKey key{s.image_id, s.segment_id};
    const auto own = vocab.recorded_blob(key);
    if (!own) continue;
    const double own_d = distance<3>(s.feature, vocab.blobs[*own].centroid);
    bool strictly_closest = true;
    for (const auto& b : vocab.blobs) {
      if (b.blob_id != *own && distance<3>(s.feature, b.centroid) <= own_d) {
        strictly_closest = false;
        break;
      }
    }
    if (!strictly_closest) out.push_back({key, *own, nearest_blob(s.feature, vocab)});
  }
  return out;
}

}  // namespace blobtag
