/* Copyright 2026 The ASAP-NMS Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef ASAP_NMS_GEOMETRY_HPP_
#define ASAP_NMS_GEOMETRY_HPP_

#include <algorithm>
#include <stdexcept>
#include <string>

namespace asap_nms {

// Axis-aligned box in continuous pixel coordinates. No "+1" convention:
// area is width * height.
struct Box {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  constexpr Box() = default;

  // Throws std::invalid_argument on negative (or NaN) extents.
  constexpr Box(double x1_in, double y1_in, double x2_in, double y2_in)
      : x1(x1_in), y1(y1_in), x2(x2_in), y2(y2_in) {
    if (!(x2 >= x1) || !(y2 >= y1)) {
      throw std::invalid_argument("Box: negative extent (x2 < x1 or y2 < y1)");
    }
  }

  // Box of the given size centered at (cx, cy).
  static constexpr Box FromCenter(double cx, double cy, double width,
                                  double height) {
    return Box(cx - width / 2, cy - height / 2, cx + width / 2,
               cy + height / 2);
  }

  constexpr double width() const { return x2 - x1; }
  constexpr double height() const { return y2 - y1; }
  constexpr double center_x() const { return (x1 + x2) / 2; }
  constexpr double center_y() const { return (y1 + y2) / 2; }

  friend constexpr bool operator==(const Box&, const Box&) = default;
};

constexpr double area(const Box& b) { return (b.x2 - b.x1) * (b.y2 - b.y1); }

constexpr double intersection_area(const Box& a, const Box& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

// Intersection over union. Defined as 0 when the union is empty.
constexpr double iou(const Box& a, const Box& b) {
  const double inter = intersection_area(a, b);
  const double uni = area(a) + area(b) - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

std::string to_string(const Box& b);

}  // namespace asap_nms

#endif  // ASAP_NMS_GEOMETRY_HPP_
