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

#include <cmath>
#include <stdexcept>

#include "asap_nms/harness/rng.hpp"
#include "doctest.h"

namespace asap_nms {
namespace {

AnchorLattice Single(double w, double h, int stride, int width, int height) {
  return AnchorLattice({AnchorTemplate{w, h, stride}}, stride, width, height);
}

TEST_CASE("anchor_box places anchors at cell centers") {
  const AnchorLattice small = Single(16, 16, 16, 64, 64);
  CHECK(anchor_box(small, {0, 0, 0}) == Box(0, 0, 16, 16));
  CHECK(anchor_box(small, {0, 2, 3}) == Box(32, 48, 48, 64));
  const AnchorLattice big = Single(32, 32, 16, 64, 64);
  CHECK(anchor_box(big, {0, 1, 0}) == Box(8, -8, 40, 24));
}

TEST_CASE("anchor_box rejects ids off the lattice") {
  const AnchorLattice lattice = Single(16, 16, 16, 64, 64);
  CHECK_THROWS_AS(anchor_box(lattice, {1, 0, 0}), std::out_of_range);
  CHECK_THROWS_AS(anchor_box(lattice, {0, 4, 0}), std::out_of_range);
  CHECK_THROWS_AS(anchor_box(lattice, {0, 0, -1}), std::out_of_range);
}

TEST_CASE("anchor_count") {
  TemplateFamily family;
  const AnchorLattice reference = make_lattice(family, 1024, 1024);
  CHECK(reference.num_templates() == 15);
  CHECK(anchor_count(reference) == 61440);
  CHECK(anchor_count(Single(16, 16, 16, 16, 16)) == 1);
  CHECK(anchor_count(Single(8, 8, 32, 64, 32)) == 2);
}

TEST_CASE("uniform lattices hold K * W/S * H/S anchors") {
  TemplateFamily family;
  for (int w : {160, 320, 800, 1280}) {
    for (int h : {160, 480, 800}) {
      const AnchorLattice lattice = make_lattice(family, w, h);
      CHECK(lattice.anchor_count() ==
            static_cast<std::size_t>(15 * (w / 16) * (h / 16)));
    }
  }
}

TEST_CASE("anchor centers stay inside the image") {
  // 1000 is not a multiple of 16: the last full-center cell is 61.
  const AnchorLattice lattice = Single(16, 16, 16, 1000, 40);
  CHECK(lattice.columns(0) == 62);
  CHECK(lattice.rows(0) == 2);
  CHECK(lattice.center_x({0, 61, 0}) < 1000.0);
}

TEST_CASE("lattice validation") {
  CHECK_THROWS_AS(AnchorLattice({AnchorTemplate{0, 16, 16}}, 16, 64, 64),
                  std::invalid_argument);
  CHECK_THROWS_AS(AnchorLattice({AnchorTemplate{16, 16, 24}}, 16, 64, 64),
                  std::invalid_argument);
  CHECK_THROWS_AS(AnchorLattice({AnchorTemplate{16, 16, 16}}, 0, 64, 64),
                  std::invalid_argument);
  CHECK_THROWS_AS(AnchorLattice({AnchorTemplate{16, 16, 16}}, 16, 0, 64),
                  std::invalid_argument);
}

TEST_CASE("linear index round trip") {
  TemplateFamily family;
  family.strided_largest = true;
  const AnchorLattice lattice = make_lattice(family, 320, 160);
  for (std::size_t n = 0; n < lattice.anchor_count(); ++n) {
    const AnchorId id = lattice.from_linear_index(n);
    REQUIRE(lattice.contains(id));
    CHECK(lattice.linear_index(id) == n);
  }
}

TEST_CASE("default template family") {
  TemplateFamily family;
  const auto templates = make_templates(family);
  REQUIRE(templates.size() == 15);
  for (const AnchorTemplate& t : templates) {
    CHECK(std::fmod(t.width, 2.0) == 0.0);
    CHECK(std::fmod(t.height, 2.0) == 0.0);
    CHECK(t.stride == 16);
  }
  // Square template of the largest scale is 384 x 384.
  CHECK(templates[13] == AnchorTemplate{384, 384, 16});

  family.strided_largest = true;
  const auto strided = make_templates(family);
  for (std::size_t k = 0; k < strided.size(); ++k) {
    CHECK(strided[k].stride == (k >= 12 ? 32 : 16));
  }
}

TEST_CASE("anchor_iou examples") {
  const AnchorTemplate t16{16, 16, 16};
  const AnchorTemplate t32{32, 32, 16};
  CHECK(anchor_iou(t16, t16, 0, 0) == 1.0);
  CHECK(anchor_iou(t32, t32, 16, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(anchor_iou(t32, t32, 16, 16) ==
        doctest::Approx(256.0 / 1792.0).epsilon(1e-15));
}

TEST_CASE("anchor_iou properties") {
  harness::Rng rng(11);
  for (int n = 0; n < 20000; ++n) {
    const AnchorTemplate tk{rng.uniform(1, 400), rng.uniform(1, 400), 16};
    const AnchorTemplate tl{rng.uniform(1, 400), rng.uniform(1, 400), 16};
    const double dx = rng.uniform(-400, 400);
    const double dy = rng.uniform(-400, 400);
    const double v = anchor_iou(tk, tl, dx, dy);
    CHECK(v == anchor_iou(tk, tl, -dx, dy));
    CHECK(v == anchor_iou(tk, tl, dx, -dy));
    CHECK(v == anchor_iou(tk, tl, -dx, -dy));
    CHECK(v == anchor_iou(tl, tk, dx, dy));
    CHECK(anchor_iou(tk, tl, dx * 1.5, dy) <= v);
    if (std::abs(dx) >= (tk.width + tl.width) / 2 ||
        std::abs(dy) >= (tk.height + tl.height) / 2) {
      CHECK(v == 0.0);
    }
  }
}

TEST_CASE("anchor_iou equals iou of materialized anchors") {
  harness::Rng rng(5);
  TemplateFamily family;
  family.strided_largest = true;
  const AnchorLattice lattice = make_lattice(family, 640, 480);
  for (int n = 0; n < 20000; ++n) {
    const AnchorId a = lattice.from_linear_index(
        static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(lattice.anchor_count()) - 1)));
    const AnchorId b = lattice.from_linear_index(
        static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(lattice.anchor_count()) - 1)));
    const double direct = iou(anchor_box(lattice, a), anchor_box(lattice, b));
    const double closed = anchor_iou(lattice.anchor_template(a.template_index),
                                     lattice.anchor_template(b.template_index),
                                     lattice.center_x(b) - lattice.center_x(a),
                                     lattice.center_y(b) - lattice.center_y(a));
    CHECK(direct == closed);
  }
}

}  // namespace
}  // namespace asap_nms
