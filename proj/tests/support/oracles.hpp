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

// Independent reference implementations used only by tests. None of these
// call into the code paths they check beyond geometry::iou on materialized
// boxes.

#ifndef ASAP_NMS_TESTS_SUPPORT_ORACLES_HPP_
#define ASAP_NMS_TESTS_SUPPORT_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "asap_nms/anchor_lattice.hpp"
#include "asap_nms/geometry.hpp"
#include "asap_nms/harness/analysis.hpp"
#include "asap_nms/harness/rng.hpp"
#include "asap_nms/harness/scene.hpp"
#include "asap_nms/nms.hpp"
#include "asap_nms/second_stage.hpp"

namespace asap_nms::testing {

// IoU by counting unit pixels; integer-coordinate boxes only.
inline double raster_iou(const Box& a, const Box& b, int extent = 64) {
  long inter = 0, uni = 0;
  for (int y = 0; y < extent; ++y) {
    for (int x = 0; x < extent; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      const bool in_a = px > a.x1 && px < a.x2 && py > a.y1 && py < a.y2;
      const bool in_b = px > b.x1 && px < b.x2 && py > b.y1 && py < b.y2;
      inter += (in_a && in_b) ? 1 : 0;
      uni += (in_a || in_b) ? 1 : 0;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// Every other anchor on the lattice whose materialized box has IoU >= gamma.
inline std::set<AnchorId> brute_force_neighbors(const AnchorLattice& lattice,
                                                const AnchorId& id,
                                                double gamma) {
  std::set<AnchorId> out;
  const Box self = anchor_box(lattice, id);
  for (int k = 0; k < lattice.num_templates(); ++k) {
    for (int j = 0; j < lattice.rows(k); ++j) {
      for (int i = 0; i < lattice.columns(k); ++i) {
        const AnchorId other{k, i, j};
        if (other == id) continue;
        if (iou(self, anchor_box(lattice, other)) >= gamma) out.insert(other);
      }
    }
  }
  return out;
}

// Textbook greedy NMS over an index list, recording for each suppressed
// position which kept position suppressed it first. No early exit.
struct GreedyReplay {
  std::vector<int> kept;
  std::vector<int> suppressor;  // -1 when kept or never reached
};

inline GreedyReplay replay_greedy(const std::vector<Proposal>& sorted,
                                  double threshold, std::size_t max_keep) {
  GreedyReplay out;
  out.suppressor.assign(sorted.size(), -1);
  std::vector<bool> removed(sorted.size(), false);
  for (std::size_t i = 0; i < sorted.size() && out.kept.size() < max_keep;
       ++i) {
    if (removed[i]) continue;
    out.kept.push_back(static_cast<int>(i));
    if (out.kept.size() == max_keep) break;
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      if (!removed[j] && iou(sorted[i].box, sorted[j].box) > threshold) {
        removed[j] = true;
        out.suppressor[j] = static_cast<int>(i);
      }
    }
  }
  return out;
}

// Nested loop over every unordered pair with materialized anchor boxes.
inline harness::FlipHistogram naive_flip_histogram(
    const std::vector<harness::ImageRecord>& records,
    const AnchorLattice& lattice, const std::vector<double>& edges,
    double threshold, int top_n) {
  harness::FlipHistogram h;
  h.edges = edges;
  h.pairs.assign(edges.size() - 1, 0);
  h.flips.assign(edges.size() - 1, 0);
  h.proposal_iou_threshold = threshold;
  for (const harness::ImageRecord& r : records) {
    std::vector<std::size_t> order(r.proposals.size());
    for (std::size_t n = 0; n < order.size(); ++n) order[n] = n;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return r.proposals[a].score > r.proposals[b].score;
    });
    order.resize(std::min(order.size(), static_cast<std::size_t>(top_n)));
    for (std::size_t a = 0; a < order.size(); ++a) {
      const Proposal& pa = r.proposals[order[a]];
      const Box aa = anchor_box(lattice, pa.anchor);
      for (std::size_t b = a + 1; b < order.size(); ++b) {
        const Proposal& pb = r.proposals[order[b]];
        const double anchor_overlap = iou(aa, anchor_box(lattice, pb.anchor));
        std::size_t bin = edges.size();
        for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
          const bool last = e + 2 == edges.size();
          if (anchor_overlap >= edges[e] &&
              (anchor_overlap < edges[e + 1] ||
               (last && anchor_overlap == edges[e + 1]))) {
            bin = e;
            break;
          }
        }
        if (bin >= edges.size() - 1) continue;
        ++h.pairs[bin];
        if (iou(pa.box, pb.box) >= threshold) ++h.flips[bin];
      }
    }
  }
  return h;
}

// Random detections clustered around a few centers so that overlaps occur.
inline std::vector<Detection> random_detections(harness::Rng& rng, int n,
                                                int num_classes) {
  std::vector<Detection> out;
  out.reserve(static_cast<std::size_t>(n));
  const int clusters = std::max(1, n / 8);
  std::vector<Box> centers;
  for (int c = 0; c < clusters; ++c) {
    const double w = rng.uniform(10, 200), h = rng.uniform(10, 200);
    centers.push_back(Box::FromCenter(rng.uniform(0, 1000), rng.uniform(0, 800), w, h));
  }
  for (int i = 0; i < n; ++i) {
    const Box& c = centers[static_cast<std::size_t>(rng.uniform_int(0, clusters - 1))];
    const double w = c.width() * std::exp(rng.normal(0, 0.15));
    const double h = c.height() * std::exp(rng.normal(0, 0.15));
    const Box b = Box::FromCenter(c.center_x() + rng.normal(0, 0.1 * c.width()),
                                  c.center_y() + rng.normal(0, 0.1 * c.height()), w, h);
    // Quantized scores produce ties.
    const double score = std::round(rng.uniform() * 50.0) / 50.0;
    out.push_back(Detection{b, score,
                            static_cast<int>(rng.uniform_int(0, num_classes - 1))});
  }
  return out;
}

}  // namespace asap_nms::testing

#endif  // ASAP_NMS_TESTS_SUPPORT_ORACLES_HPP_
