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

#include "asap_nms/second_stage.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace asap_nms {
namespace {

// Detection indices per class, each sorted by score descending, ties by
// ascending index.
std::vector<std::vector<int>> GroupByClass(
    std::span<const Detection> detections, int num_classes) {
  if (num_classes < 1) {
    throw std::invalid_argument("second stage: num_classes must be >= 1");
  }
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const Detection& d = detections[i];
    if (d.class_id < 0 || d.class_id >= num_classes) {
      throw std::invalid_argument("second stage: detection " +
                                  std::to_string(i) + " has class id " +
                                  std::to_string(d.class_id) +
                                  " outside [0, num_classes)");
    }
    if (!std::isfinite(d.score)) {
      throw std::invalid_argument("second stage: detection " +
                                  std::to_string(i) + " has a non-finite score");
    }
    groups[static_cast<std::size_t>(d.class_id)].push_back(static_cast<int>(i));
  }
  for (auto& g : groups) {
    std::sort(g.begin(), g.end(), [&](int a, int b) {
      const double sa = detections[static_cast<std::size_t>(a)].score;
      const double sb = detections[static_cast<std::size_t>(b)].score;
      return sa > sb || (sa == sb && a < b);
    });
  }
  return groups;
}

void CheckAdjacency(const DetectionAdjacency& adjacency, std::size_t n,
                    double threshold, const char* what) {
  if (adjacency.size() != n) {
    throw std::invalid_argument(std::string(what) +
                                ": adjacency built for a different input");
  }
  if (adjacency.theta > threshold) {
    throw std::invalid_argument(
        std::string(what) +
        ": adjacency theta exceeds the suppression threshold");
  }
}

}  // namespace

double DetectionAdjacency::mean_size() const {
  if (lists.empty()) return 0.0;
  std::size_t total = 0;
  for (const auto& l : lists) total += l.size();
  return static_cast<double>(total) / static_cast<double>(lists.size());
}

std::size_t DetectionAdjacency::max_size() const {
  std::size_t m = 0;
  for (const auto& l : lists) m = std::max(m, l.size());
  return m;
}

DetectionAdjacency build_detection_adjacency(
    std::span<const Detection> detections, double theta) {
  if (!(theta >= 0.0) || !(theta < 1.0)) {
    throw std::invalid_argument(
        "build_detection_adjacency: theta must be in [0, 1)");
  }
  const std::size_t n = detections.size();
  DetectionAdjacency adj;
  adj.theta = theta;
  adj.lists.resize(n);
  adj.overlaps.resize(n);
  // Row i gets its entries in ascending j: lower indices arrive from earlier
  // rows, higher ones from the row's own pass.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      ++adj.iou_evaluations;
      const double ov = iou(detections[i].box, detections[j].box);
      if (ov >= theta) {
        adj.lists[i].push_back(static_cast<int>(j));
        adj.overlaps[i].push_back(ov);
        adj.lists[j].push_back(static_cast<int>(i));
        adj.overlaps[j].push_back(ov);
      }
    }
  }
  return adj;
}

ClassKeep per_class_greedy_nms(std::span<const Detection> detections,
                               double nms_threshold, int num_classes) {
  ClassKeep out;
  const auto groups = GroupByClass(detections, num_classes);
  out.kept.resize(groups.size());
  for (std::size_t c = 0; c < groups.size(); ++c) {
    const auto& order = groups[c];
    std::vector<char> alive(order.size(), 1);
    for (std::size_t a = 0; a < order.size(); ++a) {
      if (!alive[a]) continue;
      out.kept[c].push_back(order[a]);
      const Box& top = detections[static_cast<std::size_t>(order[a])].box;
      for (std::size_t b = a + 1; b < order.size(); ++b) {
        if (!alive[b]) continue;
        ++out.suppression_checks;
        if (iou(top, detections[static_cast<std::size_t>(order[b])].box) >
            nms_threshold) {
          alive[b] = 0;
        }
      }
    }
  }
  return out;
}

ClassKeep templated_greedy_nms(std::span<const Detection> detections,
                               const DetectionAdjacency& adjacency,
                               double nms_threshold, int num_classes) {
  CheckAdjacency(adjacency, detections.size(), nms_threshold,
                 "templated_greedy_nms");
  ClassKeep out;
  const auto groups = GroupByClass(detections, num_classes);
  out.kept.resize(groups.size());
  std::vector<int> rank(detections.size(), 0);
  std::vector<char> alive(detections.size(), 1);
  for (std::size_t c = 0; c < groups.size(); ++c) {
    const auto& order = groups[c];
    for (std::size_t a = 0; a < order.size(); ++a) {
      rank[static_cast<std::size_t>(order[a])] = static_cast<int>(a);
    }
    for (int i : order) {
      const auto ui = static_cast<std::size_t>(i);
      if (!alive[ui]) continue;
      out.kept[c].push_back(i);
      const auto& list = adjacency.lists[ui];
      const auto& ovs = adjacency.overlaps[ui];
      for (std::size_t n = 0; n < list.size(); ++n) {
        const auto j = static_cast<std::size_t>(list[n]);
        if (detections[j].class_id != static_cast<int>(c) || !alive[j] ||
            rank[j] <= rank[ui]) {
          continue;
        }
        ++out.suppression_checks;
        if (ovs[n] > nms_threshold) alive[j] = 0;
      }
    }
  }
  return out;
}

void SoftNmsParams::validate() const {
  if (!(overlap_threshold >= 0.0) || !(overlap_threshold < 1.0)) {
    throw std::invalid_argument("soft_nms: overlap threshold must be in [0, 1)");
  }
  if (!(score_floor >= 0.0)) {
    throw std::invalid_argument("soft_nms: score floor must be >= 0");
  }
}

SoftNmsResult soft_nms(std::span<const Detection> detections,
                       const SoftNmsParams& params, int num_classes) {
  params.validate();
  SoftNmsResult out;
  const auto groups = GroupByClass(detections, num_classes);
  out.scores.reserve(detections.size());
  for (const Detection& d : detections) out.scores.push_back(d.score);
  out.selected.resize(groups.size());

  for (std::size_t c = 0; c < groups.size(); ++c) {
    std::vector<int> remaining;
    for (int i : groups[c]) {
      if (out.scores[static_cast<std::size_t>(i)] >= params.score_floor) {
        remaining.push_back(i);
      }
    }
    while (!remaining.empty()) {
      std::size_t best = 0;
      for (std::size_t r = 1; r < remaining.size(); ++r) {
        const double s = out.scores[static_cast<std::size_t>(remaining[r])];
        const double sb = out.scores[static_cast<std::size_t>(remaining[best])];
        if (s > sb || (s == sb && remaining[r] < remaining[best])) best = r;
      }
      const int m = remaining[best];
      out.selected[c].push_back(m);
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
      const Box& top = detections[static_cast<std::size_t>(m)].box;

      std::vector<int> next;
      next.reserve(remaining.size());
      for (int j : remaining) {
        const auto uj = static_cast<std::size_t>(j);
        ++out.suppression_checks;
        const double ov = iou(top, detections[uj].box);
        if (ov > params.overlap_threshold) {
          out.scores[uj] *= (1.0 - ov);
          if (out.scores[uj] < params.score_floor) continue;
        }
        next.push_back(j);
      }
      remaining.swap(next);
    }
  }
  return out;
}

SoftNmsResult templated_soft_nms(std::span<const Detection> detections,
                                 const DetectionAdjacency& adjacency,
                                 const SoftNmsParams& params, int num_classes) {
  params.validate();
  CheckAdjacency(adjacency, detections.size(), params.overlap_threshold,
                 "templated_soft_nms");
  SoftNmsResult out;
  const auto groups = GroupByClass(detections, num_classes);
  out.scores.reserve(detections.size());
  for (const Detection& d : detections) out.scores.push_back(d.score);
  out.selected.resize(groups.size());

  // Ordered by current score descending, then index ascending.
  struct Entry {
    double score;
    int index;
    bool operator<(const Entry& o) const {
      return score > o.score || (score == o.score && index < o.index);
    }
  };
  std::vector<char> pending(detections.size(), 0);

  for (std::size_t c = 0; c < groups.size(); ++c) {
    std::set<Entry> queue;
    for (int i : groups[c]) {
      const auto ui = static_cast<std::size_t>(i);
      if (out.scores[ui] >= params.score_floor) {
        queue.insert(Entry{out.scores[ui], i});
        pending[ui] = 1;
      }
    }
    while (!queue.empty()) {
      const int m = queue.begin()->index;
      queue.erase(queue.begin());
      pending[static_cast<std::size_t>(m)] = 0;
      out.selected[c].push_back(m);

      const auto& list = adjacency.lists[static_cast<std::size_t>(m)];
      const auto& ovs = adjacency.overlaps[static_cast<std::size_t>(m)];
      for (std::size_t n = 0; n < list.size(); ++n) {
        const auto j = static_cast<std::size_t>(list[n]);
        if (!pending[j] || detections[j].class_id != static_cast<int>(c)) {
          continue;
        }
        ++out.suppression_checks;
        const double ov = ovs[n];
        if (ov <= params.overlap_threshold) continue;
        queue.erase(Entry{out.scores[j], list[n]});
        out.scores[j] *= (1.0 - ov);
        if (out.scores[j] < params.score_floor) {
          pending[j] = 0;
        } else {
          queue.insert(Entry{out.scores[j], list[n]});
        }
      }
    }
  }
  return out;
}

}  // namespace asap_nms
