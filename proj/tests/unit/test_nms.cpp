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

#include "asap_nms/nms.hpp"

#include <algorithm>
#include <stdexcept>

#include "asap_nms/harness/scene.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

namespace asap_nms {
namespace {

Proposal P(Box b, double s, AnchorId a = {}) { return Proposal{b, s, a}; }

harness::SceneConfig SmallScene(std::uint64_t seed) {
  harness::SceneConfig c;
  c.image_width = 320;
  c.image_height = 256;
  c.min_object_size = 24;
  c.max_object_size = 200;
  c.seed = seed;
  return c;
}

NmsConfig SmallConfig() {
  NmsConfig c;
  c.max_keep = 100;
  c.pre_nms_top_n = 2000;
  return c;
}

TEST_CASE("top_n_prefilter orders by score with index tie-break") {
  const std::vector<Proposal> ps = {P({0, 0, 1, 1}, 0.1), P({0, 0, 1, 1}, 0.9),
                                    P({0, 0, 1, 1}, 0.5)};
  CHECK(top_n_prefilter(ps, 2) == std::vector<int>{1, 2});
  CHECK(top_n_prefilter(ps, 10) == std::vector<int>{1, 2, 0});
  const std::vector<Proposal> ties = {P({0, 0, 1, 1}, 0.5), P({0, 0, 1, 1}, 0.5)};
  CHECK(top_n_prefilter(ties, 1) == std::vector<int>{0});
  CHECK_THROWS_AS(top_n_prefilter(ps, 0), std::invalid_argument);
}

TEST_CASE("top_n_prefilter keeps 12000 of the reference lattice") {
  const AnchorLattice lattice = make_lattice(TemplateFamily{}, 1024, 1024);
  harness::SceneConfig c;
  c.image_width = c.image_height = 1024;
  const harness::ImageRecord r = harness::generate_scene(c, lattice);
  REQUIRE(r.proposals.size() == 61440);
  const auto top = top_n_prefilter(r.proposals, 12000);
  CHECK(top.size() == 12000);
  for (std::size_t n = 1; n < top.size(); ++n) {
    const double a = r.proposals[static_cast<std::size_t>(top[n - 1])].score;
    const double b = r.proposals[static_cast<std::size_t>(top[n])].score;
    CHECK((a > b || (a == b && top[n - 1] < top[n])));
  }
}

TEST_CASE("greedy_nms hand-traced cascade") {
  const std::vector<Proposal> ps = {P({0, 0, 10, 10}, 0.9), P({0, 0, 10, 11}, 0.8),
                                    P({50, 50, 60, 60}, 0.7)};
  const NmsResult r = greedy_nms(ps, NmsConfig{});
  CHECK(r.kept == std::vector<int>{0, 2});
  CHECK(r.stats.suppressed == 1);
  CHECK(r.stats.kept == 2);
  CHECK(r.stats.iou_evaluations == 2);
}

TEST_CASE("greedy_nms trivial inputs") {
  const std::vector<Proposal> one = {P({0, 0, 10, 10}, 0.5)};
  const NmsResult r = greedy_nms(one, NmsConfig{});
  CHECK(r.kept == std::vector<int>{0});
  CHECK(r.stats.iou_evaluations == 0);

  std::vector<Proposal> disjoint;
  for (int i = 0; i < 20; ++i) disjoint.push_back(P({20.0 * i, 0, 20.0 * i + 10, 10}, 1.0 - i * 0.01));
  CHECK(greedy_nms(disjoint, NmsConfig{}).kept.size() == 20);

  NmsConfig capped;
  capped.max_keep = 5;
  capped.pre_nms_top_n = 5;
  CHECK(greedy_nms(disjoint, capped).kept == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("suppression is strict") {
  // IoU exactly 0.5.
  const std::vector<Proposal> ps = {P({0, 0, 3, 1}, 0.9), P({1, 0, 4, 1}, 0.8)};
  CHECK(iou(ps[0].box, ps[1].box) == 0.5);
  NmsConfig c;
  c.nms_threshold = 0.5;
  CHECK(greedy_nms(ps, c).kept.size() == 2);
}

TEST_CASE("config validation") {
  NmsConfig c;
  c.nms_threshold = 1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = NmsConfig{};
  c.max_keep = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = NmsConfig{};
  c.pre_nms_top_n = 10;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("asap_nms input validation") {
  const AnchorLattice lattice({AnchorTemplate{32, 32, 16}}, 16, 64, 64);
  const NeighborTable table = build_table(lattice, 0.3);
  const std::vector<Proposal> dup = {P({0, 0, 10, 10}, 0.9, {0, 1, 1}),
                                     P({30, 30, 40, 40}, 0.8, {0, 1, 1})};
  CHECK_THROWS_AS(asap_nms(dup, table, lattice, NmsConfig{}), std::invalid_argument);
  const std::vector<Proposal> off = {P({0, 0, 10, 10}, 0.9, {0, 9, 0})};
  CHECK_THROWS_AS(asap_nms(off, table, lattice, NmsConfig{}), std::invalid_argument);
  const AnchorLattice other({AnchorTemplate{16, 16, 16}}, 16, 64, 64);
  const std::vector<Proposal> one = {P({0, 0, 10, 10}, 0.9, {0, 0, 0})};
  CHECK_THROWS_AS(asap_nms(one, table, other, NmsConfig{}), std::invalid_argument);

  for (double gamma : {0.1, 0.5, 0.9}) {
    const NmsResult r = asap_nms(one, build_table(lattice, gamma), lattice, NmsConfig{});
    CHECK(r.kept == std::vector<int>{0});
    CHECK(r.stats.iou_evaluations == 0);
  }
}

TEST_CASE("compare-all ASAP equals greedy on random scenes") {
  const NmsConfig config = SmallConfig();
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const harness::SceneConfig sc = SmallScene(seed);
    const AnchorLattice lattice = harness::scene_lattice(sc);
    const harness::ImageRecord r = harness::generate_scene(sc, lattice);
    const auto sorted = gather(r.proposals, top_n_prefilter(r.proposals, config.pre_nms_top_n));
    const NmsResult g = greedy_nms(sorted, config);
    const NmsResult a = asap_nms(sorted, NeighborTable::CompareAll(lattice), lattice, config);
    CHECK(a.kept == g.kept);
    CHECK(a.stats.iou_evaluations == g.stats.iou_evaluations);
    CHECK(a.stats.suppressed == g.stats.suppressed);
  }
}

TEST_CASE("ASAP evaluates fewer pairs, monotonically in gamma") {
  const NmsConfig config = SmallConfig();
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const harness::SceneConfig sc = SmallScene(seed);
    const AnchorLattice lattice = harness::scene_lattice(sc);
    const harness::ImageRecord r = harness::generate_scene(sc, lattice);
    const auto sorted = gather(r.proposals, top_n_prefilter(r.proposals, config.pre_nms_top_n));
    const NmsResult g = greedy_nms(sorted, config);
    std::uint64_t previous = g.stats.iou_evaluations;
    for (double gamma : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8}) {
      const NmsResult a = asap_nms(sorted, build_table(lattice, gamma), lattice, config);
      CHECK(a.stats.iou_evaluations <= previous);
      CHECK(a.stats.iou_evaluations < g.stats.iou_evaluations);
      CHECK(a.stats.kept <= static_cast<std::uint64_t>(config.max_keep));
      CHECK(a.stats.kept + a.stats.suppressed <= sorted.size());
      previous = a.stats.iou_evaluations;
    }
  }
}

TEST_CASE("divergence from greedy traces back to pruned anchor pairs") {
  NmsConfig config = SmallConfig();
  config.max_keep = 2000;  // no truncation: every proposal gets decided
  std::size_t divergent = 0;
  for (std::uint64_t seed = 200; seed < 230; ++seed) {
    harness::SceneConfig sc = SmallScene(seed);
    sc.regression_gain = 0.9;  // provoke disagreements
    const AnchorLattice lattice = harness::scene_lattice(sc);
    const harness::ImageRecord r = harness::generate_scene(sc, lattice);
    const auto sorted = gather(r.proposals, top_n_prefilter(r.proposals, config.pre_nms_top_n));
    const double gamma = 0.4;
    const NmsResult a = asap_nms(sorted, build_table(lattice, gamma), lattice, config);
    const testing::GreedyReplay g =
        testing::replay_greedy(sorted, config.nms_threshold, static_cast<std::size_t>(config.max_keep));
    std::vector<char> asap_kept(sorted.size(), 0);
    for (int k : a.kept) asap_kept[static_cast<std::size_t>(k)] = 1;

    // The earliest disagreement is always a pair ASAP did not compare.
    bool first = true;
    for (std::size_t n = 0; n < sorted.size(); ++n) {
      const int s = g.suppressor[n];
      const bool greedy_kept = std::find(g.kept.begin(), g.kept.end(), static_cast<int>(n)) != g.kept.end();
      if (static_cast<bool>(asap_kept[n]) == greedy_kept) continue;
      ++divergent;
      if (first) {
        REQUIRE(asap_kept[n]);
        REQUIRE(s >= 0);
        const auto& sup = sorted[static_cast<std::size_t>(s)];
        CHECK(iou(anchor_box(lattice, sup.anchor), anchor_box(lattice, sorted[n].anchor)) < gamma);
        first = false;
      }
      // Any later ASAP-kept proposal that greedy suppressed either had a
      // pruned anchor pair with its suppressor, or that suppressor was itself
      // removed by ASAP.
      if (asap_kept[n] && s >= 0 && asap_kept[static_cast<std::size_t>(s)]) {
        const auto& sup = sorted[static_cast<std::size_t>(s)];
        CHECK(iou(anchor_box(lattice, sup.anchor), anchor_box(lattice, sorted[n].anchor)) < gamma);
      }
    }
  }
  CHECK(divergent > 0);
}

TEST_CASE("run_stage1 maps kept positions back to input indices") {
  const harness::SceneConfig sc = SmallScene(3);
  const AnchorLattice lattice = harness::scene_lattice(sc);
  const harness::ImageRecord r = harness::generate_scene(sc, lattice);
  const NmsConfig config = SmallConfig();
  const NmsResult g = run_stage1(r.proposals, config, nullptr, nullptr);
  const auto order = top_n_prefilter(r.proposals, config.pre_nms_top_n);
  const NmsResult direct = greedy_nms(gather(r.proposals, order), config);
  REQUIRE(g.kept.size() == direct.kept.size());
  for (std::size_t n = 0; n < g.kept.size(); ++n) {
    CHECK(g.kept[n] == order[static_cast<std::size_t>(direct.kept[n])]);
  }
  const NeighborTable t = build_table(lattice, 0.3);
  CHECK_THROWS_AS(run_stage1(r.proposals, config, &t, nullptr), std::invalid_argument);
  const NmsResult again = run_stage1(r.proposals, config, &t, &lattice);
  CHECK(again.kept == run_stage1(r.proposals, config, &t, &lattice).kept);
}

}  // namespace
}  // namespace asap_nms
