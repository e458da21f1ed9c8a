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

#include "asap_nms/neighbor_table.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "support/oracles.hpp"

namespace asap_nms {
namespace {

AnchorLattice Square32(int cells) {
  return AnchorLattice({AnchorTemplate{32, 32, 16}}, 16, 16 * cells, 16 * cells);
}

std::set<std::pair<double, double>> Displacements(const NeighborTable& t, int k,
                                                  int l) {
  std::set<std::pair<double, double>> out;
  for (const NeighborOffset& o : t.offsets(k, l, 0, 0)) out.insert({o.dx, o.dy});
  return out;
}

TEST_CASE("displacement bound") {
  const AnchorTemplate t{32, 32, 16};
  const DisplacementBound b = displacement_bound(t, t, 0.2);
  CHECK(b.dx == 32.0);
  CHECK(b.dy == 32.0);
  CHECK_THROWS_AS(displacement_bound(t, t, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(displacement_bound(t, t, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(displacement_bound(t, t, 1.5), std::invalid_argument);
}

TEST_CASE("single 32x32 template tables") {
  const AnchorLattice lattice = Square32(20);
  const NeighborTable t02 = build_table(lattice, 0.2);
  CHECK(Displacements(t02, 0, 0) ==
        std::set<std::pair<double, double>>{{-16, 0}, {16, 0}, {0, -16}, {0, 16}});
  const NeighborTable t01 = build_table(lattice, 0.1);
  CHECK(t01.offsets(0, 0, 0, 0).size() == 8);
  const auto stats = table_stats(t02);
  REQUIRE(stats.size() == 1);
  CHECK(stats[0].max == 4);
  CHECK(stats[0].min == 4);
}

TEST_CASE("gamma 1 keeps only identical shapes") {
  const AnchorLattice lattice({AnchorTemplate{32, 32, 16}, AnchorTemplate{64, 16, 16}},
                              16, 160, 160);
  const NeighborTable t = build_table(lattice, 1.0);
  CHECK(t.size() == 0);
}

TEST_CASE("neighbors_of clips at the image border") {
  const AnchorLattice lattice = Square32(20);
  const NeighborTable t = build_table(lattice, 0.2);
  const auto corner = neighbors_of(t, lattice, {0, 0, 0});
  CHECK(std::set<AnchorId>(corner.begin(), corner.end()) ==
        std::set<AnchorId>{{0, 1, 0}, {0, 0, 1}});
  CHECK(neighbors_of(t, lattice, {0, 5, 7}).size() == 4);
  CHECK_THROWS_AS(neighbors_of(t, lattice, {0, 20, 0}), std::out_of_range);

  const NeighborTable none = build_table(lattice, 1.0);
  CHECK(neighbors_of(none, lattice, {0, 5, 5}).empty());
}

TEST_CASE("neighbors_of rejects foreign and compare-all tables") {
  const AnchorLattice lattice = Square32(20);
  const AnchorLattice other({AnchorTemplate{16, 16, 16}}, 16, 320, 320);
  const NeighborTable t = build_table(other, 0.2);
  CHECK_THROWS_AS(neighbors_of(t, lattice, {0, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(neighbors_of(NeighborTable::CompareAll(lattice), lattice, {0, 0, 0}),
                  std::invalid_argument);
}

TEST_CASE("empty and compare-all tables report zero stats") {
  const AnchorLattice lattice = Square32(4);
  for (const auto& s : table_stats(build_table(lattice, 1.0))) {
    CHECK(s.min == 0);
    CHECK(s.max == 0);
    CHECK(s.mean == 0.0);
  }
  CHECK(table_stats(NeighborTable::CompareAll(lattice)).size() == 1);
}

TEST_CASE("stored entries respect self-exclusion and the support bound") {
  TemplateFamily family;
  family.strided_largest = true;
  const AnchorLattice lattice = make_lattice(family, 320, 320);
  const NeighborTable t = build_table(lattice, 0.1);
  for (int k = 0; k < t.num_templates(); ++k) {
    const AnchorTemplate& tk = lattice.anchor_template(k);
    for (int l = 0; l < t.num_templates(); ++l) {
      const AnchorTemplate& tl = lattice.anchor_template(l);
      const int m = t.period(k, l);
      for (int py = 0; py < m; ++py) {
        for (int px = 0; px < m; ++px) {
          for (const NeighborOffset& o : t.offsets(k, l, px, py)) {
            CHECK(std::abs(o.dx) < (tk.width + tl.width) / 2);
            CHECK(std::abs(o.dy) < (tk.height + tl.height) / 2);
            CHECK(o.anchor_iou >= 0.1);
            if (k == l) CHECK_FALSE((o.dx == 0.0 && o.dy == 0.0));
          }
        }
      }
    }
  }
}

TEST_CASE("neighbors_of matches brute force on mixed-stride lattices") {
  TemplateFamily family;
  family.scales = {2, 4, 7};
  family.strided_largest = true;
  const AnchorLattice lattice = make_lattice(family, 16 * 12, 16 * 10);
  for (double gamma : {0.1, 0.3, 0.5, 0.7}) {
    const NeighborTable t = build_table(lattice, gamma);
    for (std::size_t n = 0; n < lattice.anchor_count(); n += 3) {
      const AnchorId id = lattice.from_linear_index(n);
      const auto fast = neighbors_of(t, lattice, id);
      const std::set<AnchorId> got(fast.begin(), fast.end());
      CHECK(got.size() == fast.size());
      CHECK(got == testing::brute_force_neighbors(lattice, id, gamma));
    }
  }
}

TEST_CASE("tables are monotone in gamma and independent of resolution") {
  TemplateFamily family;
  const AnchorLattice small = make_lattice(family, 320, 160);
  const AnchorLattice large = make_lattice(family, 1280, 800);
  double previous_mean = 1e300;
  std::size_t previous_size = static_cast<std::size_t>(-1);
  for (double gamma : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8}) {
    const NeighborTable a = build_table(small, gamma);
    const NeighborTable b = build_table(large, gamma);
    CHECK(a == b);
    CHECK(a.size() <= previous_size);
    double mean = 0.0;
    for (const auto& s : table_stats(a)) mean += s.mean;
    CHECK(mean <= previous_mean);
    previous_mean = mean;
    previous_size = a.size();

    if (gamma < 0.8) {
      const NeighborTable tighter = build_table(small, gamma + 0.1);
      for (int k = 0; k < a.num_templates(); ++k) {
        for (int l = 0; l < a.num_templates(); ++l) {
          const auto loose = Displacements(a, k, l);
          for (const auto& d : Displacements(tighter, k, l)) {
            CHECK(loose.count(d) == 1);
          }
        }
      }
    }
  }
}

TEST_CASE("strided placement shrinks the largest templates' lists") {
  TemplateFamily dense;
  TemplateFamily strided;
  strided.strided_largest = true;
  const AnchorLattice r = make_lattice(dense, 640, 640);
  const AnchorLattice s = make_lattice(strided, 640, 640);
  for (double gamma : {0.1, 0.2, 0.3, 0.4, 0.5}) {
    const auto rs = table_stats(build_table(r, gamma));
    const auto ss = table_stats(build_table(s, gamma));
    for (std::size_t k = 12; k < 15; ++k) {
      CHECK(ss[k].max <= rs[k].max);
      CHECK(ss[k].mean < rs[k].mean);
    }
  }
}

TEST_CASE("table cache round trip and invalidation") {
  TemplateFamily family;
  family.strided_largest = true;
  const AnchorLattice lattice = make_lattice(family, 320, 320);
  const auto path = std::filesystem::temp_directory_path() / "asap_nms_table_test.bin";
  std::filesystem::remove(path);

  CHECK_FALSE(read_table_cache(path, lattice, 0.3).has_value());
  const NeighborTable built = load_or_build_table(lattice, 0.3, path);
  REQUIRE(std::filesystem::exists(path));
  const auto cached = read_table_cache(path, lattice, 0.3);
  REQUIRE(cached.has_value());
  CHECK(*cached == built);

  // Different gamma or templates: cache is ignored, then rewritten.
  CHECK_FALSE(read_table_cache(path, lattice, 0.4).has_value());
  const AnchorLattice dense = make_lattice(TemplateFamily{}, 320, 320);
  CHECK_FALSE(read_table_cache(path, dense, 0.3).has_value());
  const NeighborTable rebuilt = load_or_build_table(dense, 0.3, path);
  CHECK(*read_table_cache(path, dense, 0.3) == rebuilt);

  // Corrupt file.
  {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    std::fputs("garbage!", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_table_cache(path, dense, 0.3), std::runtime_error);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace asap_nms
