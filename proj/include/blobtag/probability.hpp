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

// Keyword/blob incidence and the conditional table p(word | blob).
//
// With M_W the N x W image-keyword indicator and M_B the N x B image-blob
// count matrix, C = M_W^T * M_B counts keyword/blob co-occurrences. Dividing
// each column of C by its sum gives p(w | b). Blobs never seen with any
// keyword keep an all-zero column.

#include <cstddef>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "blobtag/errors.hpp"
#include "blobtag/store.hpp"

namespace blobtag {

template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

struct IncidenceMatrix {
  std::size_t n_images = 0;
  std::size_t n_keywords = 0;
  std::size_t n_blobs = 0;
  Matrix<unsigned char> word_part;  // N x W, entries 0/1
  Matrix<std::size_t> blob_part;    // N x B, segment counts
  std::vector<std::string> keywords;
  std::vector<std::string> image_ids;
};

class ProbabilityTable {
 public:
  ProbabilityTable() = default;
  ProbabilityTable(Matrix<double> entries, std::vector<std::string> keywords)
      : entries_(std::move(entries)), keywords_(std::move(keywords)) {
    if (entries_.rows() != keywords_.size()) throw domain_error("probability table: keyword count mismatch");
    for (std::size_t i = 0; i < keywords_.size(); ++i) {
      if (!index_.emplace(keywords_[i], i).second) throw domain_error("probability table: repeated keyword " + keywords_[i]);
    }
  }

  std::size_t n_keywords() const noexcept { return entries_.rows(); }
  std::size_t n_blobs() const noexcept { return entries_.cols(); }
  const std::vector<std::string>& keywords() const noexcept { return keywords_; }
  const Matrix<double>& entries() const noexcept { return entries_; }

  std::size_t keyword_index(const std::string& w) const {
    const auto it = index_.find(w);
    if (it == index_.end()) throw domain_error("unknown keyword '" + w + "'");
    return it->second;
  }

  double at(std::size_t keyword, std::size_t blob) const {
    if (keyword >= n_keywords()) throw domain_error("keyword index out of range");
    if (blob >= n_blobs()) throw domain_error("unknown blob " + std::to_string(blob));
    return entries_(keyword, blob);
  }

 private:
  Matrix<double> entries_;
  std::vector<std::string> keywords_;
  std::map<std::string, std::size_t> index_;
};

inline IncidenceMatrix build_incidence(const TrainingDatabase& db) {
  IncidenceMatrix m;
  m.n_images = db.images.size();
  m.n_keywords = db.keyword_lexicon.size();
  m.n_blobs = db.vocabulary.size();
  m.keywords = db.keyword_lexicon;
  m.word_part = Matrix<unsigned char>(m.n_images, m.n_keywords);
  m.blob_part = Matrix<std::size_t>(m.n_images, m.n_blobs);

  std::map<std::string, std::size_t> word_index;
  for (std::size_t w = 0; w < m.keywords.size(); ++w) word_index.emplace(m.keywords[w], w);

  for (std::size_t i = 0; i < db.images.size(); ++i) {
    const auto& img = db.images[i];
    m.image_ids.push_back(img.image_id);
    if (img.keywords.empty()) throw validation_error("Image(id=" + img.image_id + ") has no keywords");
    for (const auto& w : img.keywords) {
      const auto it = word_index.find(w);
      if (it == word_index.end()) throw validation_error("Image(id=" + img.image_id + ") keyword '" + w + "' missing from lexicon");
      m.word_part(i, it->second) = 1;
    }
    for (const auto& [blob, count] : img.blob_histogram) {
      if (blob >= m.n_blobs) throw validation_error("Image(id=" + img.image_id + ") references undeclared blob " + std::to_string(blob));
      m.blob_part(i, blob) = count;
    }
  }
  return m;
}

// C = M_W^T * M_B
inline Matrix<double> cooccurrence(const IncidenceMatrix& m) {
  if (m.word_part.rows() != m.n_images || m.blob_part.rows() != m.n_images || m.word_part.cols() != m.n_keywords ||
      m.blob_part.cols() != m.n_blobs || m.keywords.size() != m.n_keywords) {
    throw domain_error("incidence matrix dimensions disagree");
  }
  Matrix<double> c(m.n_keywords, m.n_blobs);
  for (std::size_t i = 0; i < m.n_images; ++i) {
    for (std::size_t w = 0; w < m.n_keywords; ++w) {
      if (!m.word_part(i, w)) continue;
      for (std::size_t b = 0; b < m.n_blobs; ++b) c(w, b) += static_cast<double>(m.blob_part(i, b));
    }
  }
  return c;
}

inline Matrix<double> normalize_columns(Matrix<double> c) {
  for (std::size_t b = 0; b < c.cols(); ++b) {
    double sum = 0.0;
    for (std::size_t w = 0; w < c.rows(); ++w) {
      if (c(w, b) < 0.0) throw domain_error("negative co-occurrence count");
      sum += c(w, b);
    }
    if (sum <= 0.0) continue;
    for (std::size_t w = 0; w < c.rows(); ++w) c(w, b) /= sum;
  }
  return c;
}

inline ProbabilityTable build_table(const IncidenceMatrix& m) {
  return ProbabilityTable(normalize_columns(cooccurrence(m)), m.keywords);
}

inline ProbabilityTable build_table(const TrainingDatabase& db) { return build_table(build_incidence(db)); }

inline double lookup(const ProbabilityTable& table, const std::string& keyword, std::size_t blob) {
  return table.at(table.keyword_index(keyword), blob);
}

// Tab-separated: header "keyword" then blob ids, one row per keyword.
inline void write_table_tsv(const ProbabilityTable& table, std::ostream& out) {
  out << "keyword";
  for (std::size_t b = 0; b < table.n_blobs(); ++b) out << '\t' << b;
  out << '\n';
  for (std::size_t w = 0; w < table.n_keywords(); ++w) {
    out << table.keywords()[w];
    for (std::size_t b = 0; b < table.n_blobs(); ++b) out << '\t' << detail::format_real(table.entries()(w, b));
    out << '\n';
  }
}

}  // namespace blobtag
