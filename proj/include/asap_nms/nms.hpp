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

#ifndef ASAP_NMS_NMS_HPP_
#define ASAP_NMS_NMS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "asap_nms/anchor_lattice.hpp"
#include "asap_nms/geometry.hpp"
#include "asap_nms/neighbor_table.hpp"

namespace asap_nms {

// A stage-1 proposal: regressed anchor box with objectness score and the id
// of the anchor it came from.
struct Proposal {
  Box box;
  double score = 0.0;
  AnchorId anchor;

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

struct NmsConfig {
  // Suppress when IoU > nms_threshold (strict).
  double nms_threshold = 0.7;
  int max_keep = 300;
  int pre_nms_top_n = 12000;

  // Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct NmsStats {
  std::uint64_t iou_evaluations = 0;
  std::uint64_t kept = 0;
  std::uint64_t suppressed = 0;
  // ASAP only: neighbor anchors that carried a proposal.
  std::uint64_t lookup_hits = 0;

  friend bool operator==(const NmsStats&, const NmsStats&) = default;
};

struct NmsResult {
  // Positions in the (sorted) input, in keep order.
  std::vector<int> kept;
  NmsStats stats;
};

// Indices of the n highest-scoring proposals, score descending, ties by
// ascending index. Throws std::invalid_argument when n < 1.
std::vector<int> top_n_prefilter(std::span<const Proposal> proposals, int n);

// Gathers proposals[indices[0]], proposals[indices[1]], ...
std::vector<Proposal> gather(std::span<const Proposal> proposals,
                             std::span<const int> indices);

// Sequential Greedy-NMS. Input must already be sorted by score (descending).
NmsResult greedy_nms(std::span<const Proposal> sorted, const NmsConfig& config);

// Greedy-NMS where the kept proposal is only compared against proposals whose
// anchors are neighbors in `table`. With a compare-all table every alive
// proposal is a candidate, which reproduces greedy_nms exactly.
//
// Throws std::invalid_argument when the table does not match the lattice, an
// anchor id is off the lattice, or two proposals share an anchor.
NmsResult asap_nms(std::span<const Proposal> sorted, const NeighborTable& table,
                   const AnchorLattice& lattice, const NmsConfig& config);

// Pre-filter + NMS on an unsorted proposal set. kept holds indices into
// `proposals`. A null table selects greedy_nms.
NmsResult run_stage1(std::span<const Proposal> proposals,
                     const NmsConfig& config, const NeighborTable* table,
                     const AnchorLattice* lattice);

}  // namespace asap_nms

#endif  // ASAP_NMS_NMS_HPP_
