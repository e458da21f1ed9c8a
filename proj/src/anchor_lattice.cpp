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

#include "asap_nms/anchor_lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace asap_nms {
namespace {

// Cells whose center (i + 1/2) * stride lies in [0, extent).
int CellCount(int extent, int stride) {
  return ((2 * extent - 1) / stride + 1) / 2;
}

double RoundToEven(double x) { return 2.0 * std::round(x / 2.0); }

}  // namespace

AnchorLattice::AnchorLattice(std::vector<AnchorTemplate> templates,
                             int base_stride, int image_width,
                             int image_height)
    : templates_(std::move(templates)),
      base_stride_(base_stride),
      image_width_(image_width),
      image_height_(image_height) {
  if (base_stride_ < 1) {
    throw std::invalid_argument("AnchorLattice: base stride must be >= 1");
  }
  if (image_width_ < 1 || image_height_ < 1) {
    throw std::invalid_argument("AnchorLattice: image extent must be >= 1");
  }
  offsets_.reserve(templates_.size() + 1);
  offsets_.push_back(0);
  for (std::size_t k = 0; k < templates_.size(); ++k) {
    const AnchorTemplate& t = templates_[k];
    if (!(t.width > 0.0) || !(t.height > 0.0) || !std::isfinite(t.width) ||
        !std::isfinite(t.height)) {
      throw std::invalid_argument("AnchorLattice: template " +
                                  std::to_string(k) +
                                  " must have positive finite size");
    }
    if (t.stride < 1 || t.stride % base_stride_ != 0) {
      throw std::invalid_argument(
          "AnchorLattice: template " + std::to_string(k) +
          " stride must be a positive multiple of the base stride");
    }
    columns_.push_back(CellCount(image_width_, t.stride));
    rows_.push_back(CellCount(image_height_, t.stride));
    offsets_.push_back(offsets_.back() +
                       static_cast<std::size_t>(columns_.back()) *
                           static_cast<std::size_t>(rows_.back()));
  }
}

const AnchorTemplate& AnchorLattice::anchor_template(int k) const {
  if (k < 0 || k >= num_templates()) {
    throw std::out_of_range("AnchorLattice: template index " +
                            std::to_string(k) + " out of range");
  }
  return templates_[static_cast<std::size_t>(k)];
}

bool AnchorLattice::uniform_stride() const {
  return std::all_of(templates_.begin(), templates_.end(),
                     [&](const AnchorTemplate& t) {
                       return t.stride == base_stride_;
                     });
}

AnchorId AnchorLattice::from_linear_index(std::size_t index) const {
  if (index >= anchor_count()) {
    throw std::out_of_range("AnchorLattice: linear index out of range");
  }
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index);
  const auto k = static_cast<std::size_t>(it - offsets_.begin() - 1);
  const std::size_t local = index - offsets_[k];
  const auto cols = static_cast<std::size_t>(columns_[k]);
  return AnchorId{static_cast<int>(k), static_cast<int>(local % cols),
                  static_cast<int>(local / cols)};
}

double AnchorLattice::center_x(const AnchorId& id) const {
  const int s = templates_[static_cast<std::size_t>(id.template_index)].stride;
  return (id.i + 0.5) * s;
}

double AnchorLattice::center_y(const AnchorId& id) const {
  const int s = templates_[static_cast<std::size_t>(id.template_index)].stride;
  return (id.j + 0.5) * s;
}

Box anchor_box(const AnchorLattice& lattice, const AnchorId& id) {
  if (!lattice.contains(id)) {
    throw std::out_of_range("anchor_box: anchor (" +
                            std::to_string(id.template_index) + ", " +
                            std::to_string(id.i) + ", " + std::to_string(id.j) +
                            ") is not on the lattice");
  }
  const AnchorTemplate& t = lattice.anchor_template(id.template_index);
  return Box::FromCenter(lattice.center_x(id), lattice.center_y(id), t.width,
                         t.height);
}

double anchor_iou(const AnchorTemplate& tk, const AnchorTemplate& tl, double dx,
                  double dy) {
  // Overlap of [-w^k/2, w^k/2] and [dx - w^l/2, dx + w^l/2], written as
  // min((w^k + w^l)/2 - |dx|, min(w^k, w^l)) so that it is exactly symmetric
  // in the sign of dx and in swapping the templates.
  const double iw = std::min((tk.width + tl.width) / 2 - std::abs(dx),
                             std::min(tk.width, tl.width));
  const double ih = std::min((tk.height + tl.height) / 2 - std::abs(dy),
                             std::min(tk.height, tl.height));
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = tk.width * tk.height + tl.width * tl.height - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

std::size_t anchor_count(const AnchorLattice& lattice) {
  return lattice.anchor_count();
}

std::vector<AnchorTemplate> make_templates(const TemplateFamily& family) {
  if (family.scales.empty() || family.aspect_ratios.empty()) {
    throw std::invalid_argument("make_templates: empty scale or ratio list");
  }
  const double largest =
      *std::max_element(family.scales.begin(), family.scales.end());
  std::vector<AnchorTemplate> out;
  out.reserve(family.scales.size() * family.aspect_ratios.size());
  for (double scale : family.scales) {
    if (!(scale > 0.0)) {
      throw std::invalid_argument("make_templates: scales must be positive");
    }
    const double side = scale * family.scale_unit;
    const int stride = (family.strided_largest && scale == largest)
                           ? 2 * family.base_stride
                           : family.base_stride;
    for (double ratio : family.aspect_ratios) {
      if (!(ratio > 0.0)) {
        throw std::invalid_argument(
            "make_templates: aspect ratios must be positive");
      }
      const double w = std::max(2.0, RoundToEven(side / std::sqrt(ratio)));
      const double h = std::max(2.0, RoundToEven(side * std::sqrt(ratio)));
      out.push_back(AnchorTemplate{w, h, stride});
    }
  }
  return out;
}

AnchorLattice make_lattice(const TemplateFamily& family, int image_width,
                           int image_height) {
  return AnchorLattice(make_templates(family), family.base_stride, image_width,
                       image_height);
}

}  // namespace asap_nms
