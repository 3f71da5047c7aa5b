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

// Keywords manifest: one image per line, "image_id<TAB>kw,kw,...".
// Blank lines and lines starting with '#' are ignored.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <set>
#include <string>
#include <vector>

#include "blobtag/errors.hpp"

namespace blobtag {

struct ManifestEntry {
  std::string image_id;
  std::vector<std::string> keywords;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct KeywordsManifest {
  std::vector<ManifestEntry> entries;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline KeywordsManifest parse_manifest(std::istream& in) {
  KeywordsManifest manifest;
  std::set<std::string> ids;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const auto probe = detail::trim(raw);
    if (probe.empty() || probe.front() == '#') continue;

    const auto tab = raw.find('\t');
    if (tab == std::string::npos) throw parse_error("manifest: expected '<image_id>\\t<keywords>'", line_no);
    ManifestEntry entry{detail::trim(raw.substr(0, tab)), {}};
    const std::string words = raw.substr(tab + 1);
    if (entry.image_id.empty()) throw parse_error("manifest: empty image id", line_no);
    if (words.find('\t') != std::string::npos) throw parse_error("manifest: keywords may not contain tabs", line_no);

    std::size_t start = 0;
    while (start <= words.size()) {
      auto comma = words.find(',', start);
      if (comma == std::string::npos) comma = words.size();
      auto word = detail::trim(words.substr(start, comma - start));
      if (word.empty()) throw parse_error("manifest: empty keyword for '" + entry.image_id + "'", line_no);
      std::transform(word.begin(), word.end(), word.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      if (std::find(entry.keywords.begin(), entry.keywords.end(), word) != entry.keywords.end()) {
        throw parse_error("manifest: keyword '" + word + "' repeated for '" + entry.image_id + "'", line_no);
      }
      entry.keywords.push_back(std::move(word));
      start = comma + 1;
    }
    if (!ids.insert(entry.image_id).second) {
      throw validation_error("manifest line " + std::to_string(line_no) + ": duplicate image id '" + entry.image_id + "'");
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

inline KeywordsManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open manifest " + path.string());
  try {
    return parse_manifest(in);
  } catch (const parse_error& e) {
    throw parse_error(path.string() + ": " + e.what());
  }
}

inline void write_manifest(std::ostream& out, const KeywordsManifest& manifest) {
  for (const auto& e : manifest.entries) {
    out << e.image_id << '\t';
    for (std::size_t i = 0; i < e.keywords.size(); ++i) out << (i ? "," : "") << e.keywords[i];
    out << '\n';
  }
}

}  // namespace blobtag
