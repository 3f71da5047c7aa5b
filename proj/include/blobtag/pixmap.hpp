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

// Portable pixmap (P6 binary / P3 ASCII) with maxval 255.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "blobtag/colorspace.hpp"
#include "blobtag/errors.hpp"

namespace blobtag {

struct RasterImage {
  std::string image_id;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<RgbPixel> pixels;  // row-major

  std::size_t size() const noexcept { return pixels.size(); }
  bool empty() const noexcept { return pixels.empty(); }
};

inline RasterImage make_image(std::string id, std::size_t width, std::size_t height, RgbPixel fill = {}) {
  return {std::move(id), width, height, std::vector<RgbPixel>(width * height, fill)};
}

namespace detail {

class PnmHeaderReader {
 public:
  explicit PnmHeaderReader(std::istream& in) : in_(in) {}

  unsigned long next_number(const char* what) {
    skip_space_and_comments();
    std::string digits;
    while (std::isdigit(in_.peek())) digits.push_back(static_cast<char>(in_.get()));
    if (digits.empty() || digits.size() > 9) throw parse_error(std::string("pixmap: bad ") + what, line_);
    return std::stoul(digits);
  }

  std::size_t line() const noexcept { return line_; }

 private:
  void skip_space_and_comments() {
    while (true) {
      const int c = in_.peek();
      if (c == '#') {
        while (in_.peek() != '\n' && in_.peek() != EOF) in_.get();
      } else if (c != EOF && std::isspace(c)) {
        if (in_.get() == '\n') ++line_;
      } else {
        return;
      }
    }
  }

  std::istream& in_;
  std::size_t line_ = 1;
};

inline std::uint8_t to_8bit(double c) {
  detail::check_channel(c, "pixel");
  return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

}  // namespace detail

inline RasterImage read_ppm(std::istream& in, std::string image_id) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || (magic[1] != '6' && magic[1] != '3')) {
    throw parse_error("pixmap: expected magic P6 or P3", 1);
  }
  const bool binary = magic[1] == '6';

  detail::PnmHeaderReader header(in);
  const auto width = header.next_number("width");
  const auto height = header.next_number("height");
  const auto maxval = header.next_number("maxval");
  if (width == 0 || height == 0) throw parse_error("pixmap: zero-sized image", header.line());
  if (maxval != 255) {
    throw parse_error("pixmap: unsupported maxval " + std::to_string(maxval) + " (only 255)", header.line());
  }

  RasterImage img{std::move(image_id), width, height, {}};
  img.pixels.reserve(width * height);
  if (binary) {
    const int sep = in.get();
    if (sep == EOF || !std::isspace(sep)) throw parse_error("pixmap: missing raster separator", header.line());
    std::vector<unsigned char> raw(width * height * 3);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw parse_error("pixmap: truncated raster");
    for (std::size_t i = 0; i < raw.size(); i += 3) img.pixels.push_back(from_8bit(raw[i], raw[i + 1], raw[i + 2]));
  } else {
    for (std::size_t i = 0; i < width * height; ++i) {
      unsigned long c[3];
      for (auto& v : c) {
        v = header.next_number("sample");
        if (v > 255) throw parse_error("pixmap: sample exceeds maxval", header.line());
      }
      img.pixels.push_back(from_8bit(c[0], c[1], c[2]));
    }
  }
  return img;
}

inline RasterImage read_ppm(const std::filesystem::path& path, std::string image_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open image " + path.string());
  try {
    return read_ppm(in, std::move(image_id));
  } catch (const parse_error& e) {
    throw parse_error(path.string() + ": " + e.what());
  }
}

// Image id defaults to the file stem.
inline RasterImage read_ppm(const std::filesystem::path& path) { return read_ppm(path, path.stem().string()); }

inline void write_ppm(std::ostream& out, const RasterImage& img, bool binary = true) {
  if (img.pixels.size() != img.width * img.height) throw domain_error("write_ppm: pixel count mismatch");
  out << (binary ? "P6" : "P3") << '\n' << img.width << ' ' << img.height << "\n255\n";
  if (binary) {
    std::vector<char> raw;
    raw.reserve(img.pixels.size() * 3);
    for (const auto& p : img.pixels) {
      raw.push_back(static_cast<char>(detail::to_8bit(p.r)));
      raw.push_back(static_cast<char>(detail::to_8bit(p.g)));
      raw.push_back(static_cast<char>(detail::to_8bit(p.b)));
    }
    out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  } else {
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      const auto& p = img.pixels[i];
      out << int(detail::to_8bit(p.r)) << ' ' << int(detail::to_8bit(p.g)) << ' ' << int(detail::to_8bit(p.b))
          << ((i + 1) % img.width == 0 ? '\n' : ' ');
    }
  }
}

inline void write_ppm(const std::filesystem::path& path, const RasterImage& img, bool binary = true) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write image " + path.string());
  write_ppm(out, img, binary);
  if (!out) throw io_error("write failed for " + path.string());
}

}  // namespace blobtag
