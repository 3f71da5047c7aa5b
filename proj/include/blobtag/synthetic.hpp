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

// Synthetic labelled corpus: five keyword groups, each drawn as two flat
// colours sharing a luminance band, with small per-pixel channel noise.

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "blobtag/pixmap.hpp"
#include "blobtag/pipeline.hpp"

namespace blobtag {

struct SyntheticGroup {
  std::array<std::string, 4> keywords;  // first is always applied
  std::array<std::array<int, 3>, 2> palette;
};

inline const std::vector<SyntheticGroup>& synthetic_groups() {
  static const std::vector<SyntheticGroup> groups{
      {{"night", "sky", "stars", "dark"}, {{{18, 20, 42}, {26, 24, 48}}}},
      {{"forest", "tree", "leaf", "green"}, {{{44, 96, 38}, {58, 104, 48}}}},
      {{"sea", "water", "wave", "blue"}, {{{84, 128, 196}, {104, 136, 188}}}},
      {{"beach", "sand", "sun", "coast"}, {{{214, 190, 140}, {224, 196, 150}}}},
      {{"snow", "ice", "winter", "white"}, {{{238, 242, 250}, {246, 248, 252}}}},
  };
  return groups;
}

struct SyntheticCorpusOptions {
  std::size_t train_per_group = 20;
  std::size_t test_per_group = 2;
  int noise = 2;  // max absolute per-channel perturbation, 8-bit units
  std::size_t min_side = 24;
  std::size_t max_side = 40;
  std::uint64_t seed = 20260101;
};

struct SyntheticCorpus {
  std::vector<LabeledImage> train;
  std::vector<LabeledImage> test;
};

inline LabeledImage synthetic_image(std::string id, const SyntheticGroup& group, const SyntheticCorpusOptions& opts,
                                    std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> side(opts.min_side, opts.max_side);
  std::uniform_int_distribution<int> noise(-opts.noise, opts.noise);
  std::bernoulli_distribution coin(0.5);

  const auto w = side(rng);
  const auto h = side(rng);
  const auto split = std::uniform_int_distribution<std::size_t>(w / 4, (3 * w) / 4)(rng);
  auto img = make_image(std::move(id), w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const auto& base = group.palette[x < split ? 0 : 1];
      std::array<unsigned, 3> c{};
      for (int k = 0; k < 3; ++k) c[k] = static_cast<unsigned>(std::clamp(base[k] + noise(rng), 0, 255));
      img.pixels[y * w + x] = from_8bit(c[0], c[1], c[2]);
    }
  }

  std::vector<std::string> words{group.keywords[0]};
  for (std::size_t k = 1; k < group.keywords.size(); ++k) {
    if (coin(rng)) words.push_back(group.keywords[k]);
  }
  return {std::move(img), std::move(words)};
}

inline SyntheticCorpus make_synthetic_corpus(const SyntheticCorpusOptions& opts = {}) {
  std::mt19937_64 rng(opts.seed);
  SyntheticCorpus corpus;
  const auto& groups = synthetic_groups();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t i = 0; i < opts.train_per_group; ++i) {
      corpus.train.push_back(synthetic_image(
          "train_g" + std::to_string(g) + "_" + std::to_string(i), groups[g], opts, rng));
    }
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t i = 0; i < opts.test_per_group; ++i) {
      corpus.test.push_back(synthetic_image(
          "test_g" + std::to_string(g) + "_" + std::to_string(i), groups[g], opts, rng));
    }
  }
  return corpus;
}

}  // namespace blobtag
