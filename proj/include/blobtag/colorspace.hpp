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

// sRGB -> linear RGB -> XYZ -> CIE Luv, one pixel at a time.
//
// Channel values are unit-interval doubles. The reference white is the XYZ
// image of linear (1,1,1) under the conversion matrix, so white lands on
// L=100, u=v=0 without any external illuminant constant.

#include <array>
#include <cmath>
#include <string>

#include "blobtag/errors.hpp"

namespace blobtag {

struct RgbPixel {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  friend bool operator==(const RgbPixel&, const RgbPixel&) = default;
};

struct LinearRgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
};

struct XyzColor {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct LuvColor {
  double l = 0.0;
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const LuvColor&, const LuvColor&) = default;
};

// Row-vector convention: [X Y Z] = [r g b] * kRgbToXyz.
inline constexpr std::array<std::array<double, 3>, 3> kRgbToXyz{{
    {0.412424, 0.212656, 0.0193324},
    {0.357579, 0.715158, 0.1191930},
    {0.180464, 0.0721856, 0.950444},
}};

enum class CieConstants {
  intent,  // eps = 216/24389, k = 24389/27; the two L branches meet exactly
  compat,  // eps = 0.0085, k = 903.3 as commonly printed
};

namespace detail {

inline void check_channel(double c, const char* name) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw domain_error(std::string("channel ") + name + " out of [0,1]: " + std::to_string(c));
  }
}

}  // namespace detail

inline double linearize_channel(double c, const char* name = "c") {
  detail::check_channel(c, name);
  if (c <= 0.04045) return c / 12.92;
  return std::pow((c + 0.055) / 1.055, 2.4);
}

inline LinearRgb linearize(const RgbPixel& p) {
  return {linearize_channel(p.r, "R"), linearize_channel(p.g, "G"), linearize_channel(p.b, "B")};
}

inline XyzColor rgb_to_xyz(const LinearRgb& p) {
  detail::check_channel(p.r, "r");
  detail::check_channel(p.g, "g");
  detail::check_channel(p.b, "b");
  const auto& m = kRgbToXyz;
  return {p.r * m[0][0] + p.g * m[1][0] + p.b * m[2][0],
          p.r * m[0][1] + p.g * m[1][1] + p.b * m[2][1],
          p.r * m[0][2] + p.g * m[1][2] + p.b * m[2][2]};
}

class WhitePoint {
 public:
  // Reference white from linear (1,1,1) with the requested CIE constants.
  explicit WhitePoint(CieConstants constants = CieConstants::intent)
      : WhitePoint(rgb_to_xyz(LinearRgb{1.0, 1.0, 1.0}), constants) {}

  WhitePoint(const XyzColor& white, CieConstants constants) : white_(white), constants_(constants) {
    if (!(white.x > 0.0 && white.y > 0.0 && white.z > 0.0)) {
      throw domain_error("white point tristimulus must be positive");
    }
    const double denom = white.x + 15.0 * white.y + 3.0 * white.z;
    u_prime_ = 4.0 * white.x / denom;
    v_prime_ = 9.0 * white.y / denom;
    if (constants == CieConstants::intent) {
      epsilon_ = 216.0 / 24389.0;
      kappa_ = 24389.0 / 27.0;
    } else {
      epsilon_ = 0.0085;
      kappa_ = 903.3;
    }
  }

  const XyzColor& xyz() const noexcept { return white_; }
  double u_prime() const noexcept { return u_prime_; }
  double v_prime() const noexcept { return v_prime_; }
  double epsilon() const noexcept { return epsilon_; }
  double kappa() const noexcept { return kappa_; }
  CieConstants constants() const noexcept { return constants_; }

 private:
  XyzColor white_;
  CieConstants constants_;
  double u_prime_ = 0.0;
  double v_prime_ = 0.0;
  double epsilon_ = 0.0;
  double kappa_ = 0.0;
};

inline LuvColor xyz_to_luv(const XyzColor& c, const WhitePoint& w) {
  if (!(c.x >= 0.0 && c.y >= 0.0 && c.z >= 0.0)) {
    throw domain_error("negative tristimulus value");
  }
  const double yr = c.y / w.xyz().y;
  const double l = yr > w.epsilon() ? 116.0 * std::cbrt(yr) - 16.0 : w.kappa() * yr;

  // Pure black has no chromaticity; pin it to the white's so u = v = 0.
  const double denom = c.x + 15.0 * c.y + 3.0 * c.z;
  const double up = denom > 0.0 ? 4.0 * c.x / denom : w.u_prime();
  const double vp = denom > 0.0 ? 9.0 * c.y / denom : w.v_prime();
  return {l, 13.0 * l * (up - w.u_prime()), 13.0 * l * (vp - w.v_prime())};
}

inline LuvColor rgb_to_luv(const RgbPixel& p, const WhitePoint& w) {
  return xyz_to_luv(rgb_to_xyz(linearize(p)), w);
}

inline RgbPixel from_8bit(unsigned r, unsigned g, unsigned b) {
  return {r / 255.0, g / 255.0, b / 255.0};
}

}  // namespace blobtag
