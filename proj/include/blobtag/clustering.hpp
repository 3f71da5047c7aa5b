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

// Close clustering: an iterative, range-gated single-pass merge that finds its
// own cluster count.
//
// Each pass walks the items in ascending lexicographic feature order. An item
// joins the nearest open cluster when it lies within `range` of that
// cluster's centroid, and the centroid becomes the plain average of the old
// centroid and the item. Otherwise the item opens a new cluster. The range is
// recomputed before every pass as (bounding-box diagonal of the current
// centroids) / (current cluster count). Passes repeat until the count stops
// changing, collapses to one, or max_passes is hit.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "blobtag/errors.hpp"

namespace blobtag {

template <std::size_t Dim>
using Feature = std::array<double, Dim>;

template <std::size_t Dim>
struct ClusterPoint {
  std::size_t id = 0;
  Feature<Dim> feature{};
  std::size_t weight = 1;
};

template <std::size_t Dim>
struct Cluster {
  std::size_t index = 0;
  Feature<Dim> centroid{};
  std::vector<std::size_t> members;  // ascending point ids
  std::size_t weight = 0;            // summed point multiplicity
};

enum class NearestSearch {
  automatic,  // sorted for Dim == 1, linear otherwise
  linear,     // scan every open cluster
  sorted,     // binary search over ascending centroids; Dim == 1 only
};

struct ClusterConfig {
  int max_passes = 100;
  NearestSearch search = NearestSearch::automatic;
};

template <std::size_t Dim>
struct ClusterSet {
  std::vector<Cluster<Dim>> clusters;
  int passes_run = 0;
  double final_range = 0.0;
};

template <std::size_t Dim>
double distance(const Feature<Dim>& a, const Feature<Dim>& b) {
  if constexpr (Dim == 1) {
    return std::abs(a[0] - b[0]);
  } else {
    double sum = 0.0;
    for (std::size_t k = 0; k < Dim; ++k) {
      const double d = a[k] - b[k];
      sum += d * d;
    }
    return std::sqrt(sum);
  }
}

template <std::size_t Dim>
double compute_range(std::span<const Feature<Dim>> centroids, std::size_t n_clusters) {
  if (centroids.empty()) throw domain_error("compute_range: no centroids");
  if (n_clusters == 0) throw domain_error("compute_range: cluster count must be positive");
  Feature<Dim> lo = centroids.front();
  Feature<Dim> hi = centroids.front();
  for (const auto& c : centroids) {
    for (std::size_t k = 0; k < Dim; ++k) {
      lo[k] = std::min(lo[k], c[k]);
      hi[k] = std::max(hi[k], c[k]);
    }
  }
  return distance<Dim>(lo, hi) / static_cast<double>(n_clusters);
}

namespace detail {

template <std::size_t Dim>
bool canonical_less(const Cluster<Dim>& a, const Cluster<Dim>& b) {
  if (a.centroid != b.centroid) return a.centroid < b.centroid;
  return a.members.front() < b.members.front();
}

template <std::size_t Dim>
void absorb(Cluster<Dim>& into, const Cluster<Dim>& item) {
  for (std::size_t k = 0; k < Dim; ++k) {
    into.centroid[k] = (into.centroid[k] + item.centroid[k]) / 2.0;
  }
  into.members.insert(into.members.end(), item.members.begin(), item.members.end());
  into.weight += item.weight;
}

template <std::size_t Dim>
std::size_t nearest_linear(const std::vector<Cluster<Dim>>& open, const Feature<Dim>& f, double& best) {
  std::size_t best_index = 0;
  best = distance<Dim>(open[0].centroid, f);
  for (std::size_t j = 1; j < open.size(); ++j) {
    const double d = distance<Dim>(open[j].centroid, f);
    if (d < best) {
      best = d;
      best_index = j;
    }
  }
  return best_index;
}

// Open centroids stay ascending when items arrive in ascending order, so
// the nearest one is a neighbour of the insertion point.
inline std::size_t nearest_sorted(const std::vector<double>& centroids, double x, double& best) {
  auto pos = std::upper_bound(centroids.begin(), centroids.end(), x);
  std::size_t idx = 0;
  if (pos == centroids.end()) {
    idx = centroids.size() - 1;
  } else if (pos == centroids.begin()) {
    idx = 0;
  } else {
    const auto hi = static_cast<std::size_t>(pos - centroids.begin());
    idx = (x - centroids[hi - 1] <= centroids[hi] - x) ? hi - 1 : hi;
  }
  // Lowest index among equal centroids.
  idx = static_cast<std::size_t>(std::lower_bound(centroids.begin(), centroids.end(), centroids[idx]) -
                                 centroids.begin());
  best = std::abs(centroids[idx] - x);
  return idx;
}

}  // namespace detail

// One left-to-right pass. `items` must already be in canonical order.
template <std::size_t Dim>
std::vector<Cluster<Dim>> cluster_pass(std::span<const Cluster<Dim>> items, double range,
                                       NearestSearch search = NearestSearch::automatic) {
  if (search == NearestSearch::automatic) {
    search = Dim == 1 ? NearestSearch::sorted : NearestSearch::linear;
  }
  if (search == NearestSearch::sorted && Dim != 1) {
    throw domain_error("sorted nearest search needs one-dimensional features");
  }

  std::vector<Cluster<Dim>> open;
  std::vector<double> sorted_centroids;  // mirrors open[j].centroid[0] when searching sorted
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    if (item.members.empty()) throw domain_error("cluster_pass: item without members");
    if (i > 0 && detail::canonical_less(item, items[i - 1])) {
      throw domain_error("cluster_pass: items are not in canonical order");
    }
    if (!open.empty()) {
      double best = 0.0;
      const std::size_t j = search == NearestSearch::sorted
                                ? detail::nearest_sorted(sorted_centroids, item.centroid[0], best)
                                : detail::nearest_linear(open, item.centroid, best);
      if (best <= range) {
        detail::absorb(open[j], item);
        if (search == NearestSearch::sorted) sorted_centroids[j] = open[j].centroid[0];
        continue;
      }
    }
    Cluster<Dim> fresh = item;
    fresh.index = open.size();
    open.push_back(std::move(fresh));
    if (search == NearestSearch::sorted) sorted_centroids.push_back(item.centroid[0]);
  }
  for (auto& c : open) std::sort(c.members.begin(), c.members.end());
  return open;
}

template <std::size_t Dim>
ClusterSet<Dim> run_close_clustering(std::span<const ClusterPoint<Dim>> points, const ClusterConfig& cfg = {}) {
  if (points.empty()) throw domain_error("run_close_clustering: no points");
  if (cfg.max_passes < 1) throw domain_error("run_close_clustering: max_passes must be at least 1");

  std::vector<ClusterPoint<Dim>> sorted(points.begin(), points.end());
  for (const auto& p : sorted) {
    if (p.weight < 1) throw domain_error("run_close_clustering: point weight must be at least 1");
    for (double v : p.feature) {
      if (!std::isfinite(v)) throw domain_error("run_close_clustering: non-finite feature");
    }
  }
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.feature != b.feature ? a.feature < b.feature : a.id < b.id;
  });

  // Points with identical features enter as a single item.
  std::vector<Cluster<Dim>> items;
  for (const auto& p : sorted) {
    if (!items.empty() && items.back().centroid == p.feature) {
      items.back().members.push_back(p.id);
      items.back().weight += p.weight;
    } else {
      items.push_back({items.size(), p.feature, {p.id}, p.weight});
    }
  }

  ClusterSet<Dim> result;
  std::vector<Feature<Dim>> centroids;
  while (true) {
    centroids.clear();
    for (const auto& c : items) centroids.push_back(c.centroid);
    const double range = compute_range<Dim>(centroids, items.size());
    auto next = cluster_pass<Dim>(items, range, cfg.search);
    ++result.passes_run;
    result.final_range = range;

    const bool settled = next.size() == items.size() || next.size() == 1 || result.passes_run >= cfg.max_passes;
    items = std::move(next);
    if (settled) break;
    std::sort(items.begin(), items.end(), detail::canonical_less<Dim>);
  }

  for (std::size_t j = 0; j < items.size(); ++j) items[j].index = j;
  result.clusters = std::move(items);
  return result;
}

template <std::size_t Dim>
ClusterSet<Dim> run_close_clustering(const std::vector<ClusterPoint<Dim>>& points, const ClusterConfig& cfg = {}) {
  return run_close_clustering<Dim>(std::span<const ClusterPoint<Dim>>(points), cfg);
}

}  // namespace blobtag
