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

#ifndef ASAP_NMS_ANCHOR_LATTICE_HPP_
#define ASAP_NMS_ANCHOR_LATTICE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "asap_nms/geometry.hpp"

namespace asap_nms {

// Reference box T^k placed at every cell of its own stride grid.
struct AnchorTemplate {
  double width = 0.0;
  double height = 0.0;
  int stride = 16;

  friend bool operator==(const AnchorTemplate&, const AnchorTemplate&) =
      default;
};

// Template index plus lattice cell along x (i) and y (j).
struct AnchorId {
  int template_index = 0;
  int i = 0;
  int j = 0;

  friend bool operator==(const AnchorId&, const AnchorId&) = default;
  friend auto operator<=>(const AnchorId&, const AnchorId&) = default;
};

// The translation-invariant anchor grid of one image. Anchor (k, i, j) is
// centered at ((i + 1/2) * s_k, (j + 1/2) * s_k); only the center has to lie
// inside [0, W) x [0, H), boxes may extend past the border.
//
// Immutable after construction.
class AnchorLattice {
 public:
  // Throws std::invalid_argument when a template has non-positive size, a
  // stride is not a positive multiple of base_stride, or the image is empty.
  AnchorLattice(std::vector<AnchorTemplate> templates, int base_stride,
                int image_width, int image_height);
  // Empty lattice: no templates, 1x1 image.
  AnchorLattice() : AnchorLattice({}, 1, 1, 1) {}

  std::span<const AnchorTemplate> templates() const { return templates_; }
  const AnchorTemplate& anchor_template(int k) const;
  int num_templates() const { return static_cast<int>(templates_.size()); }
  int base_stride() const { return base_stride_; }
  int image_width() const { return image_width_; }
  int image_height() const { return image_height_; }

  // True when every template uses the base stride.
  bool uniform_stride() const;

  // Number of cells of template k along x / y.
  int columns(int k) const { return columns_[static_cast<std::size_t>(k)]; }
  int rows(int k) const { return rows_[static_cast<std::size_t>(k)]; }

  bool contains(const AnchorId& id) const {
    return id.template_index >= 0 && id.template_index < num_templates() &&
           id.i >= 0 && id.i < columns(id.template_index) && id.j >= 0 &&
           id.j < rows(id.template_index);
  }

  // Dense index in [0, anchor_count()); templates are laid out contiguously,
  // row-major within a template. Caller guarantees contains(id).
  std::size_t linear_index(const AnchorId& id) const {
    const auto k = static_cast<std::size_t>(id.template_index);
    return offsets_[k] +
           static_cast<std::size_t>(id.j) * static_cast<std::size_t>(columns_[k]) +
           static_cast<std::size_t>(id.i);
  }
  AnchorId from_linear_index(std::size_t index) const;

  std::size_t anchor_count() const { return offsets_.back(); }

  double center_x(const AnchorId& id) const;
  double center_y(const AnchorId& id) const;

  friend bool operator==(const AnchorLattice&, const AnchorLattice&) = default;

 private:
  std::vector<AnchorTemplate> templates_;
  int base_stride_;
  int image_width_;
  int image_height_;
  std::vector<int> columns_;
  std::vector<int> rows_;
  std::vector<std::size_t> offsets_;  // K + 1 prefix sums
};

// Materializes an anchor. Throws std::out_of_range for an invalid id.
Box anchor_box(const AnchorLattice& lattice, const AnchorId& id);

// IoU of template tk centered at the origin and template tl centered at
// (dx, dy). Depends only on the two shapes and the displacement.
double anchor_iou(const AnchorTemplate& tk, const AnchorTemplate& tl, double dx,
                  double dy);

std::size_t anchor_count(const AnchorLattice& lattice);

// The 5 scales x 3 aspect ratios family used by the harness. Scale s maps to
// a square of side 16 * s pixels; aspect ratio r = h / w keeps the area, and
// sides are rounded to even integers so that all lattice coordinates stay
// exactly representable. With strided_largest, the largest scale uses
// stride 2 * base_stride.
struct TemplateFamily {
  std::vector<double> scales = {2, 4, 7, 13, 24};
  std::vector<double> aspect_ratios = {0.5, 1.0, 2.0};
  double scale_unit = 16.0;
  int base_stride = 16;
  bool strided_largest = false;
};

std::vector<AnchorTemplate> make_templates(const TemplateFamily& family);

AnchorLattice make_lattice(const TemplateFamily& family, int image_width,
                           int image_height);

}  // namespace asap_nms

#endif  // ASAP_NMS_ANCHOR_LATTICE_HPP_
