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

#include "asap_nms/harness/analysis.hpp"

#include <algorithm>
#include <iterator>
#include <stdexcept>

#include "asap_nms/harness/parallel.hpp"
#include "asap_nms/nms.hpp"

namespace asap_nms::harness {
namespace {

struct SweepItem {
  Box extent;  // bounding box of anchor and proposal
  Box proposal;
  AnchorId anchor;
  double cx = 0.0;
  double cy = 0.0;
};

FlipHistogram AnalyzeRecord(const ImageRecord& record,
                            const AnchorLattice& lattice,
                            const FlipHistogram& empty, int top_n) {
  FlipHistogram h = empty;
  const std::vector<int> order = top_n_prefilter(record.proposals, top_n);
  std::vector<SweepItem> items;
  items.reserve(order.size());
  for (int idx : order) {
    const Proposal& p = record.proposals[static_cast<std::size_t>(idx)];
    const Box a = anchor_box(lattice, p.anchor);
    items.push_back(SweepItem{
        Box(std::min(a.x1, p.box.x1), std::min(a.y1, p.box.y1),
            std::max(a.x2, p.box.x2), std::max(a.y2, p.box.y2)),
        p.box, p.anchor, lattice.center_x(p.anchor),
        lattice.center_y(p.anchor)});
  }
  std::sort(items.begin(), items.end(),
            [](const SweepItem& a, const SweepItem& b) {
              return a.extent.x1 < b.extent.x1;
            });

  const auto n = static_cast<std::uint64_t>(items.size());
  const std::uint64_t total = n * (n - (n > 0 ? 1 : 0)) / 2;
  std::uint64_t examined = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const SweepItem& a = items[i];
    const AnchorTemplate& ta = lattice.anchor_template(a.anchor.template_index);
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      const SweepItem& b = items[j];
      if (!(b.extent.x1 < a.extent.x2)) break;
      if (!(b.extent.y1 < a.extent.y2) || !(a.extent.y1 < b.extent.y2)) {
        continue;
      }
      ++examined;
      const AnchorTemplate& tb =
          lattice.anchor_template(b.anchor.template_index);
      const double anchor_overlap = anchor_iou(ta, tb, b.cx - a.cx, b.cy - a.cy);
      const std::size_t bin = h.bin_of(anchor_overlap);
      if (bin >= h.bins()) continue;
      ++h.pairs[bin];
      if (iou(a.proposal, b.proposal) >= h.proposal_iou_threshold) {
        ++h.flips[bin];
      }
    }
  }
  const std::size_t zero_bin = h.bin_of(0.0);
  if (zero_bin < h.bins()) h.pairs[zero_bin] += total - examined;
  return h;
}

}  // namespace

std::size_t FlipHistogram::bin_of(double v) const {
  const std::size_t n = bins();
  if (n == 0 || v < edges.front() || v > edges.back()) return n;
  if (v == edges.back()) return n - 1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), v);
  return static_cast<std::size_t>(it - edges.begin()) - 1;
}

void FlipHistogram::merge(const FlipHistogram& other) {
  if (other.edges != edges) {
    throw std::invalid_argument("FlipHistogram::merge: bin edges differ");
  }
  for (std::size_t b = 0; b < bins(); ++b) {
    pairs[b] += other.pairs[b];
    flips[b] += other.flips[b];
  }
}

std::vector<double> default_flip_edges() {
  std::vector<double> edges;
  for (int i = 0; i <= 10; ++i) edges.push_back(i / 10.0);
  return edges;
}

FlipHistogram make_flip_histogram(std::vector<double> edges,
                                  double proposal_iou_threshold) {
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw std::invalid_argument(
        "flip histogram: need at least two strictly ascending edges");
  }
  FlipHistogram h;
  h.edges = std::move(edges);
  h.pairs.assign(h.edges.size() - 1, 0);
  h.flips.assign(h.edges.size() - 1, 0);
  h.proposal_iou_threshold = proposal_iou_threshold;
  return h;
}

FlipHistogram flip_probability_analysis(std::span<const ImageRecord> records,
                                        const AnchorLattice& lattice,
                                        std::vector<double> edges,
                                        double proposal_iou_threshold,
                                        int top_n, int threads) {
  const FlipHistogram empty =
      make_flip_histogram(std::move(edges), proposal_iou_threshold);
  std::vector<FlipHistogram> per_image(records.size());
  parallel_for(records.size(), threads, [&](std::size_t n) {
    per_image[n] = AnalyzeRecord(records[n], lattice, empty, top_n);
  });
  FlipHistogram total = empty;
  for (const FlipHistogram& h : per_image) total.merge(h);
  return total;
}

Recall evaluate_recall(std::span<const Box> kept,
                       std::span<const Box> ground_truth, double iou_floor) {
  if (ground_truth.empty()) return Recall{1.0, true};
  std::size_t matched = 0;
  for (const Box& gt : ground_truth) {
    const bool hit = std::any_of(kept.begin(), kept.end(), [&](const Box& k) {
      return iou(gt, k) >= iou_floor;
    });
    if (hit) ++matched;
  }
  return Recall{static_cast<double>(matched) /
                    static_cast<double>(ground_truth.size()),
                false};
}

double agreement(std::span<const int> a, std::span<const int> b) {
  std::vector<int> sa(a.begin(), a.end());
  std::vector<int> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  sa.erase(std::unique(sa.begin(), sa.end()), sa.end());
  std::sort(sb.begin(), sb.end());
  sb.erase(std::unique(sb.begin(), sb.end()), sb.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::vector<int> common;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                        std::back_inserter(common));
  const std::size_t uni = sa.size() + sb.size() - common.size();
  return static_cast<double>(common.size()) / static_cast<double>(uni);
}

}  // namespace asap_nms::harness
