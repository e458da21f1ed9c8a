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

#ifndef ASAP_NMS_HARNESS_ANALYSIS_HPP_
#define ASAP_NMS_HARNESS_ANALYSIS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "asap_nms/anchor_lattice.hpp"
#include "asap_nms/geometry.hpp"
#include "asap_nms/harness/scene.hpp"

namespace asap_nms::harness {

// Proposal pairs binned by the IoU of their anchors, with the number of pairs
// whose proposal IoU reached the threshold.
struct FlipHistogram {
  std::vector<double> edges;  // bins + 1 ascending values; last bin is closed
  std::vector<std::uint64_t> pairs;
  std::vector<std::uint64_t> flips;
  double proposal_iou_threshold = 0.7;

  std::size_t bins() const { return pairs.size(); }
  double fraction(std::size_t bin) const {
    return pairs[bin] == 0 ? 0.0
                           : static_cast<double>(flips[bin]) /
                                 static_cast<double>(pairs[bin]);
  }
  // Index of the bin containing v, or bins() when v is outside the edges.
  std::size_t bin_of(double v) const;

  void merge(const FlipHistogram& other);

  friend bool operator==(const FlipHistogram&, const FlipHistogram&) = default;
};

// [0, 0.1), [0.1, 0.2), ..., [0.9, 1.0].
std::vector<double> default_flip_edges();

FlipHistogram make_flip_histogram(std::vector<double> edges,
                                  double proposal_iou_threshold);

// Counts every unordered pair among the top_n proposals of each record.
// A sweep over x skips pairs whose anchors and proposals are both disjoint;
// those land in the bin of anchor IoU 0 without a flip.
FlipHistogram flip_probability_analysis(std::span<const ImageRecord> records,
                                        const AnchorLattice& lattice,
                                        std::vector<double> edges,
                                        double proposal_iou_threshold = 0.7,
                                        int top_n = 12000, int threads = 1);

struct Recall {
  double value = 1.0;
  bool vacuous = false;  // no ground truth: value is 1 by definition
};

// Fraction of ground-truth boxes with at least one kept box at IoU >= floor.
Recall evaluate_recall(std::span<const Box> kept,
                       std::span<const Box> ground_truth,
                       double iou_floor = 0.5);

// Jaccard index of two index sets; 1 for two empty sets.
double agreement(std::span<const int> a, std::span<const int> b);

}  // namespace asap_nms::harness

#endif  // ASAP_NMS_HARNESS_ANALYSIS_HPP_
