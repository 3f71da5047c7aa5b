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

// Training database and its XML document form.
//
//   <TrainingDatabase version="1">
//     <Blobs>
//       <Blob id cL cu cv>
//         <Segment image segment pixels fL fu fv> [<PixelIndex i/>...] </Segment>
//     <Images>
//       <Image id> <Keyword text/>... <BlobCount blob count/>...
//
// Numbers are written with 12 significant digits; output is byte-stable for
// equal databases.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "blobtag/errors.hpp"
#include "blobtag/segmentation.hpp"
#include "blobtag/vocabulary.hpp"

namespace blobtag {

struct SegmentRecord {
  std::size_t blob_id = 0;
  std::string image_id;
  std::size_t segment_id = 0;
  std::size_t pixel_count = 0;
  LuvFeature feature{};
  std::optional<std::vector<std::size_t>> pixel_indices;
};

struct ImageRecord {
  std::string image_id;
  std::vector<std::string> keywords;
  std::map<std::size_t, std::size_t> blob_histogram;
  std::vector<SegmentRecord> segments;  // ascending segment_id
};

struct TrainingDatabase {
  BlobVocabulary vocabulary;
  std::vector<ImageRecord> images;            // ascending image_id
  std::vector<std::string> keyword_lexicon;   // ascending, distinct

  std::size_t segment_count() const {
    std::size_t n = 0;
    for (const auto& img : images) n += img.segments.size();
    return n;
  }
};

inline std::vector<std::string> make_lexicon(const std::vector<ImageRecord>& images) {
  std::set<std::string> words;
  for (const auto& img : images) words.insert(img.keywords.begin(), img.keywords.end());
  return {words.begin(), words.end()};
}

// Throws validation_error naming the first offending element.
inline void validate(const TrainingDatabase& db) {
  const auto& blobs = db.vocabulary.blobs;
  for (std::size_t j = 0; j < blobs.size(); ++j) {
    if (blobs[j].blob_id != j) throw validation_error("Blob ids must be dense from 0; found id " + std::to_string(blobs[j].blob_id) + " at position " + std::to_string(j));
  }
  if (!std::is_sorted(db.keyword_lexicon.begin(), db.keyword_lexicon.end()) ||
      std::adjacent_find(db.keyword_lexicon.begin(), db.keyword_lexicon.end()) != db.keyword_lexicon.end()) {
    throw validation_error("keyword lexicon must be sorted and distinct");
  }

  std::set<std::string> image_ids;
  std::set<SegmentKey> seen_segments;
  std::map<std::size_t, std::set<SegmentKey>> members_from_records;
  for (const auto& img : db.images) {
    const std::string where = "Image(id=" + img.image_id + ")";
    if (!image_ids.insert(img.image_id).second) throw validation_error("duplicate " + where);
    if (img.keywords.empty()) throw validation_error(where + " has no keywords");
    std::set<std::string> own;
    for (const auto& w : img.keywords) {
      if (!own.insert(w).second) throw validation_error(where + " repeats keyword '" + w + "'");
      if (!std::binary_search(db.keyword_lexicon.begin(), db.keyword_lexicon.end(), w)) {
        throw validation_error(where + " keyword '" + w + "' missing from lexicon");
      }
    }
    std::map<std::size_t, std::size_t> counts;
    for (const auto& s : img.segments) {
      const std::string seg = "Segment(image=" + s.image_id + ", segment=" + std::to_string(s.segment_id) + ")";
      if (s.image_id != img.image_id) throw validation_error(seg + " filed under " + where);
      if (!seen_segments.insert({s.image_id, s.segment_id}).second) throw validation_error("duplicate " + seg);
      if (s.blob_id >= blobs.size()) throw validation_error(seg + " references undeclared blob " + std::to_string(s.blob_id));
      if (s.pixel_count < 1) throw validation_error(seg + " has no pixels");
      if (s.pixel_indices && s.pixel_indices->size() != s.pixel_count) {
        throw validation_error(seg + " pixel index count differs from pixels attribute");
      }
      ++counts[s.blob_id];
      members_from_records[s.blob_id].insert({s.image_id, s.segment_id});
    }
    for (const auto& [blob, count] : img.blob_histogram) {
      if (blob >= blobs.size()) throw validation_error(where + " BlobCount references undeclared blob " + std::to_string(blob));
    }
    if (counts != img.blob_histogram) throw validation_error(where + " BlobCount entries disagree with its segments");
  }
  const auto lexicon = make_lexicon(db.images);
  if (lexicon != db.keyword_lexicon) throw validation_error("keyword lexicon contains words used by no image");

  for (const auto& b : blobs) {
    const std::set<SegmentKey> members(b.members.begin(), b.members.end());
    if (members != members_from_records[b.blob_id]) {
      throw validation_error("Blob(id=" + std::to_string(b.blob_id) + ") member list disagrees with segment records");
    }
  }
}

namespace detail {

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  std::string s(buf);
  return s == "-0" ? "0" : s;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

using boost::property_tree::ptree;

inline std::string attr(const ptree& node, const char* element, const char* name) {
  const auto a = node.get_child_optional(std::string("<xmlattr>.") + name);
  if (!a) throw parse_error(std::string(element) + " missing attribute '" + name + "'");
  return a->data();
}

inline std::size_t attr_index(const ptree& node, const char* element, const char* name) {
  const auto s = attr(node, element, name);
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw parse_error(std::string(element) + " attribute '" + name + "' is not a nonnegative integer: '" + s + "'");
  }
  return v;
}

inline double attr_real(const ptree& node, const char* element, const char* name) {
  const auto s = attr(node, element, name);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
    throw parse_error(std::string(element) + " attribute '" + name + "' is not a number: '" + s + "'");
  }
  return v;
}

inline void expect_only(const ptree& node, const char* element, std::initializer_list<std::string_view> allowed) {
  for (const auto& [name, child] : node) {
    if (name == "<xmlattr>" || name == "<xmlcomment>") continue;
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
      throw parse_error(std::string("unexpected element <") + name + "> inside <" + element + ">");
    }
  }
}

}  // namespace detail

inline void save_db(const TrainingDatabase& db, std::ostream& out) {
  validate(db);
  using detail::format_real;
  using detail::xml_escape;

  std::map<std::size_t, std::vector<const SegmentRecord*>> by_blob;
  for (const auto& img : db.images) {
    for (const auto& s : img.segments) by_blob[s.blob_id].push_back(&s);
  }
  for (auto& [blob, list] : by_blob) {
    std::sort(list.begin(), list.end(), [](const auto* a, const auto* b) {
      return std::tie(a->image_id, a->segment_id) < std::tie(b->image_id, b->segment_id);
    });
  }
  std::vector<const ImageRecord*> images;
  for (const auto& img : db.images) images.push_back(&img);
  std::sort(images.begin(), images.end(), [](const auto* a, const auto* b) { return a->image_id < b->image_id; });

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<TrainingDatabase version=\"1\">\n";
  if (db.vocabulary.empty()) {
    out << "  <Blobs/>\n";
  } else {
    out << "  <Blobs>\n";
    for (const auto& b : db.vocabulary.blobs) {
      out << "    <Blob id=\"" << b.blob_id << "\" cL=\"" << format_real(b.centroid[0]) << "\" cu=\""
          << format_real(b.centroid[1]) << "\" cv=\"" << format_real(b.centroid[2]) << "\"";
      const auto& segs = by_blob[b.blob_id];
      if (segs.empty()) {
        out << "/>\n";
        continue;
      }
      out << ">\n";
      for (const auto* s : segs) {
        out << "      <Segment image=\"" << xml_escape(s->image_id) << "\" segment=\"" << s->segment_id
            << "\" pixels=\"" << s->pixel_count << "\" fL=\"" << format_real(s->feature[0]) << "\" fu=\""
            << format_real(s->feature[1]) << "\" fv=\"" << format_real(s->feature[2]) << "\"";
        if (!s->pixel_indices) {
          out << "/>\n";
          continue;
        }
        out << ">\n";
        for (auto i : *s->pixel_indices) out << "        <PixelIndex i=\"" << i << "\"/>\n";
        out << "      </Segment>\n";
      }
      out << "    </Blob>\n";
    }
    out << "  </Blobs>\n";
  }
  if (images.empty()) {
    out << "  <Images/>\n";
  } else {
    out << "  <Images>\n";
    for (const auto* img : images) {
      out << "    <Image id=\"" << xml_escape(img->image_id) << "\">\n";
      for (const auto& w : img->keywords) out << "      <Keyword text=\"" << xml_escape(w) << "\"/>\n";
      for (const auto& [blob, count] : img->blob_histogram) {
        out << "      <BlobCount blob=\"" << blob << "\" count=\"" << count << "\"/>\n";
      }
      out << "    </Image>\n";
    }
    out << "  </Images>\n";
  }
  out << "</TrainingDatabase>\n";
  if (!out) throw io_error("failed writing training database");
}

inline void save_db(const TrainingDatabase& db, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open database for writing: " + path.string());
  try {
    save_db(db, out);
  } catch (const io_error& e) {
    throw io_error(path.string() + ": " + e.what());
  }
  out.close();
  if (!out) throw io_error("failed closing database " + path.string());
}

inline TrainingDatabase load_db(std::istream& in) {
  using detail::attr;
  using detail::attr_index;
  using detail::attr_real;
  using detail::ptree;

  ptree doc;
  try {
    boost::property_tree::read_xml(in, doc, boost::property_tree::xml_parser::no_comments);
  } catch (const boost::property_tree::xml_parser_error& e) {
    throw parse_error("malformed database document: " + e.message(), e.line());
  }
  const auto root = doc.get_child_optional("TrainingDatabase");
  if (!root || doc.size() != 1) throw parse_error("document root must be <TrainingDatabase>");
  const auto version = attr(*root, "TrainingDatabase", "version");
  if (version != "1") throw parse_error("unsupported database version '" + version + "'");
  detail::expect_only(*root, "TrainingDatabase", {"Blobs", "Images"});
  if (root->count("Blobs") != 1 || root->count("Images") != 1) {
    throw parse_error("<TrainingDatabase> needs exactly one <Blobs> and one <Images>");
  }

  TrainingDatabase db;
  std::map<std::string, std::vector<SegmentRecord>> segments_by_image;
  const auto& blobs = root->get_child("Blobs");
  detail::expect_only(blobs, "Blobs", {"Blob"});
  for (const auto& [name, node] : blobs) {
    if (name != "Blob") continue;
    detail::expect_only(node, "Blob", {"Segment"});
    BlobToken blob{attr_index(node, "Blob", "id"),
                   {attr_real(node, "Blob", "cL"), attr_real(node, "Blob", "cu"), attr_real(node, "Blob", "cv")},
                   {}};
    for (const auto& [sname, snode] : node) {
      if (sname != "Segment") continue;
      detail::expect_only(snode, "Segment", {"PixelIndex"});
      SegmentRecord rec;
      rec.blob_id = blob.blob_id;
      rec.image_id = attr(snode, "Segment", "image");
      rec.segment_id = attr_index(snode, "Segment", "segment");
      rec.pixel_count = attr_index(snode, "Segment", "pixels");
      rec.feature = {attr_real(snode, "Segment", "fL"), attr_real(snode, "Segment", "fu"),
                     attr_real(snode, "Segment", "fv")};
      if (snode.count("PixelIndex") > 0) {
        rec.pixel_indices.emplace();
        for (const auto& [pname, pnode] : snode) {
          if (pname == "PixelIndex") rec.pixel_indices->push_back(attr_index(pnode, "PixelIndex", "i"));
        }
      }
      blob.members.push_back({rec.image_id, rec.segment_id});
      segments_by_image[rec.image_id].push_back(std::move(rec));
    }
    std::sort(blob.members.begin(), blob.members.end());
    db.vocabulary.blobs.push_back(std::move(blob));
  }
  std::sort(db.vocabulary.blobs.begin(), db.vocabulary.blobs.end(),
            [](const auto& a, const auto& b) { return a.blob_id < b.blob_id; });
  for (std::size_t j = 0; j < db.vocabulary.blobs.size(); ++j) {
    if (db.vocabulary.blobs[j].blob_id != j) {
      throw validation_error("Blob ids must be dense from 0 and unique; missing or repeated id near " + std::to_string(j));
    }
  }

  const auto& images = root->get_child("Images");
  detail::expect_only(images, "Images", {"Image"});
  for (const auto& [name, node] : images) {
    if (name != "Image") continue;
    detail::expect_only(node, "Image", {"Keyword", "BlobCount"});
    ImageRecord img;
    img.image_id = attr(node, "Image", "id");
    for (const auto& [cname, cnode] : node) {
      if (cname == "Keyword") {
        img.keywords.push_back(attr(cnode, "Keyword", "text"));
      } else if (cname == "BlobCount") {
        const auto blob = attr_index(cnode, "BlobCount", "blob");
        const auto count = attr_index(cnode, "BlobCount", "count");
        if (count == 0) throw validation_error("Image(id=" + img.image_id + ") BlobCount for blob " + std::to_string(blob) + " is zero");
        if (!img.blob_histogram.emplace(blob, count).second) {
          throw validation_error("Image(id=" + img.image_id + ") repeats BlobCount for blob " + std::to_string(blob));
        }
      }
    }
    if (auto it = segments_by_image.find(img.image_id); it != segments_by_image.end()) {
      img.segments = std::move(it->second);
      segments_by_image.erase(it);
      std::sort(img.segments.begin(), img.segments.end(),
                [](const auto& a, const auto& b) { return a.segment_id < b.segment_id; });
    }
    db.images.push_back(std::move(img));
  }
  if (!segments_by_image.empty()) {
    throw validation_error("Segment(image=" + segments_by_image.begin()->first + ") references an undeclared Image");
  }
  std::sort(db.images.begin(), db.images.end(), [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
  db.keyword_lexicon = make_lexicon(db.images);
  validate(db);
  return db;
}

inline TrainingDatabase load_db(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open database " + path.string());
  try {
    return load_db(in);
  } catch (const parse_error& e) {
    throw parse_error(path.string() + ": " + e.what());
  }
}

}  // namespace blobtag
