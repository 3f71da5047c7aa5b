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

// Image segmentation by close clustering of per-pixel luminance.
//
// Segments are luminance clusters, not connected regions: pixel layout plays
// no part, only the multiset of L values does.

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "blobtag/clustering.hpp"
#include "blobtag/colorspace.hpp"
#include "blobtag/errors.hpp"
#include "blobtag/pixmap.hpp"

namespace blobtag {

using LuvFeature = Feature<3>;

enum class FeatureMode {
  luv,        // mean (L, u, v)
  luminance,  // (mean L, 0, 0)
};

struct SegmentationOptions {
  ClusterConfig clustering{};
  CieConstants cie = CieConstants::intent;
  FeatureMode feature_mode = FeatureMode::luv;
};

struct Segment {
  std::string image_id;
  std::size_t segment_id = 0;
  std::vector<std::size_t> pixel_indices;  // ascending row-major positions
  LuvFeature feature{};
  std::size_t pixel_count = 0;
};

inline std::vector<LuvColor> image_to_luv(const RasterImage& img, CieConstants cie = CieConstants::intent) {
  const WhitePoint white(cie);
  std::vector<LuvColor> out;
  out.reserve(img.pixels.size());
  for (const auto& p : img.pixels) out.push_back(rgb_to_luv(p, white));
  return out;
}

namespace detail {

inline LuvFeature mean_feature(const std::vector<std::size_t>& indices, const std::vector<LuvColor>& luv,
                               FeatureMode mode) {
  double l = 0.0, u = 0.0, v = 0.0;
  for (auto i : indices) {
    l += luv[i].l;
    u += luv[i].u;
    v += luv[i].v;
  }
  const double n = static_cast<double>(indices.size());
  if (mode == FeatureMode::luminance) return {l / n, 0.0, 0.0};
  return {l / n, u / n, v / n};
}

}  // namespace detail

inline std::vector<Segment> segment_image(const RasterImage& img, const SegmentationOptions& opts = {}) {
  if (img.empty() || img.width == 0 || img.height == 0) throw domain_error("segment_image: empty image");
  if (img.pixels.size() != img.width * img.height) throw domain_error("segment_image: pixel count mismatch");

  const auto luv = image_to_luv(img, opts.cie);

  std::vector<double> levels;
  levels.reserve(luv.size());
  for (const auto& c : luv) levels.push_back(c.l);
  std::sort(levels.begin(), levels.end());

  std::vector<ClusterPoint<1>> points;
  for (double l : levels) {
    if (!points.empty() && points.back().feature[0] == l) {
      ++points.back().weight;
    } else {
      points.push_back({points.size(), {l}, 1});
    }
  }

  auto clusters = run_close_clustering<1>(points, opts.clustering).clusters;
  std::sort(clusters.begin(), clusters.end(),
            [](const auto& a, const auto& b) { return a.centroid[0] < b.centroid[0]; });

  // level id -> segment id
  std::vector<std::size_t> level_segment(points.size());
  for (std::size_t s = 0; s < clusters.size(); ++s) {
    for (auto id : clusters[s].members) level_segment[id] = s;
  }

  std::vector<Segment> segments(clusters.size());
  for (std::size_t s = 0; s < segments.size(); ++s) {
    segments[s].image_id = img.image_id;
    segments[s].segment_id = s;
  }
  for (std::size_t i = 0; i < luv.size(); ++i) {
    const auto it = std::lower_bound(points.begin(), points.end(), luv[i].l,
                                     [](const auto& p, double l) { return p.feature[0] < l; });
    segments[level_segment[static_cast<std::size_t>(it - points.begin())]].pixel_indices.push_back(i);
  }
  for (auto& seg : segments) {
    seg.pixel_count = seg.pixel_indices.size();
    seg.feature = detail::mean_feature(seg.pixel_indices, luv, opts.feature_mode);
  }
  return segments;
}

inline LuvFeature segment_feature(const Segment& seg, const RasterImage& img, const SegmentationOptions& opts = {}) {
  if (seg.image_id != img.image_id) {
    throw domain_error("segment_feature: segment of '" + seg.image_id + "' applied to image '" + img.image_id + "'");
  }
  if (seg.pixel_indices.empty()) throw domain_error("segment_feature: segment has no pixels");
  const WhitePoint white(opts.cie);
  std::vector<LuvColor> luv(img.pixels.size());
  for (auto i : seg.pixel_indices) {
    if (i >= img.pixels.size()) throw domain_error("segment_feature: pixel index outside image");
    luv[i] = rgb_to_luv(img.pixels[i], white);
  }
  return detail::mean_feature(seg.pixel_indices, luv, opts.feature_mode);
}

}  // namespace blobtag
