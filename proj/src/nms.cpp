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
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace asap_nms {

void NmsConfig::validate() const {
  if (!(nms_threshold > 0.0) || !(nms_threshold < 1.0)) {
    throw std::invalid_argument("NmsConfig: nms threshold must be in (0, 1)");
  }
  if (max_keep < 1) {
    throw std::invalid_argument("NmsConfig: max_keep must be >= 1");
  }
  if (pre_nms_top_n < max_keep) {
    throw std::invalid_argument("NmsConfig: pre_nms_top_n must be >= max_keep");
  }
}

std::vector<int> top_n_prefilter(std::span<const Proposal> proposals, int n) {
  if (n < 1) throw std::invalid_argument("top_n_prefilter: n must be >= 1");
  std::vector<int> order(proposals.size());
  std::iota(order.begin(), order.end(), 0);
  const auto by_score = [&](int a, int b) {
    const double sa = proposals[static_cast<std::size_t>(a)].score;
    const double sb = proposals[static_cast<std::size_t>(b)].score;
    return sa > sb || (sa == sb && a < b);
  };
  const auto count = std::min(order.size(), static_cast<std::size_t>(n));
  if (count < order.size()) {
    std::nth_element(order.begin(),
                     order.begin() + static_cast<std::ptrdiff_t>(count),
                     order.end(), by_score);
    order.resize(count);
  }
  std::sort(order.begin(), order.end(), by_score);
  return order;
}

std::vector<Proposal> gather(std::span<const Proposal> proposals,
                             std::span<const int> indices) {
  std::vector<Proposal> out;
  out.reserve(indices.size());
  for (int i : indices) out.push_back(proposals[static_cast<std::size_t>(i)]);
  return out;
}

NmsResult greedy_nms(std::span<const Proposal> sorted, const NmsConfig& config) {
  config.validate();
  NmsResult result;
  const std::size_t n = sorted.size();
  std::vector<char> alive(n, 1);
  const auto max_keep = static_cast<std::size_t>(config.max_keep);

  for (std::size_t i = 0; i < n; ++i) {
    if (!alive[i]) continue;
    result.kept.push_back(static_cast<int>(i));
    if (result.kept.size() >= max_keep) break;
    const Box& top = sorted[i].box;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!alive[j]) continue;
      ++result.stats.iou_evaluations;
      if (iou(top, sorted[j].box) > config.nms_threshold) {
        alive[j] = 0;
        ++result.stats.suppressed;
      }
    }
  }
  result.stats.kept = result.kept.size();
  return result;
}

NmsResult asap_nms(std::span<const Proposal> sorted, const NeighborTable& table,
                   const AnchorLattice& lattice, const NmsConfig& config) {
  config.validate();
  if (!table.compatible_with(lattice)) {
    throw std::invalid_argument(
        "asap_nms: neighbor table was built for a different lattice");
  }
  const std::size_t n = sorted.size();

  // anchor -> position in `sorted`, -1 when the anchor has no proposal.
  std::vector<int> slot(lattice.anchor_count(), -1);
  for (std::size_t p = 0; p < n; ++p) {
    const AnchorId& a = sorted[p].anchor;
    if (!lattice.contains(a)) {
      throw std::invalid_argument("asap_nms: proposal " + std::to_string(p) +
                                  " has an anchor id off the lattice");
    }
    int& s = slot[lattice.linear_index(a)];
    if (s >= 0) {
      throw std::invalid_argument("asap_nms: proposals " + std::to_string(s) +
                                  " and " + std::to_string(p) +
                                  " share an anchor id");
    }
    s = static_cast<int>(p);
  }

  std::vector<std::size_t> occupied;
  if (table.compare_all()) {
    occupied.reserve(n);
    for (const Proposal& p : sorted) {
      occupied.push_back(lattice.linear_index(p.anchor));
    }
    std::sort(occupied.begin(), occupied.end());
  }

  NmsResult result;
  std::vector<char> alive(n, 1);
  const auto max_keep = static_cast<std::size_t>(config.max_keep);
  const double threshold = config.nms_threshold;

  for (std::size_t i = 0; i < n; ++i) {
    if (!alive[i]) continue;
    result.kept.push_back(static_cast<int>(i));
    if (result.kept.size() >= max_keep) break;
    const Box& top = sorted[i].box;
    const auto candidate = [&](std::size_t anchor_index) {
      const int s = slot[anchor_index];
      if (s < 0) return;
      ++result.stats.lookup_hits;
      const auto j = static_cast<std::size_t>(s);
      if (j <= i || !alive[j]) return;
      ++result.stats.iou_evaluations;
      if (iou(top, sorted[j].box) > threshold) {
        alive[j] = 0;
        ++result.stats.suppressed;
      }
    };
    if (table.compare_all()) {
      for (std::size_t a : occupied) candidate(a);
    } else {
      for_each_neighbor(table, lattice, sorted[i].anchor,
                        [&](const AnchorId& nb) {
                          candidate(lattice.linear_index(nb));
                        });
    }
  }
  result.stats.kept = result.kept.size();
  return result;
}

NmsResult run_stage1(std::span<const Proposal> proposals,
                     const NmsConfig& config, const NeighborTable* table,
                     const AnchorLattice* lattice) {
  const std::vector<int> order =
      top_n_prefilter(proposals, config.pre_nms_top_n);
  const std::vector<Proposal> sorted = gather(proposals, order);
  NmsResult result;
  if (table == nullptr) {
    result = greedy_nms(sorted, config);
  } else {
    if (lattice == nullptr) {
      throw std::invalid_argument("run_stage1: ASAP-NMS needs a lattice");
    }
    result = asap_nms(sorted, *table, *lattice, config);
  }
  for (int& k : result.kept) k = order[static_cast<std::size_t>(k)];
  return result;
}

}  // namespace asap_nms
