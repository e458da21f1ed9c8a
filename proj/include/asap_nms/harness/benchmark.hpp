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

#ifndef ASAP_NMS_HARNESS_BENCHMARK_HPP_
#define ASAP_NMS_HARNESS_BENCHMARK_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asap_nms/harness/scene.hpp"
#include "asap_nms/nms.hpp"
#include "asap_nms/second_stage.hpp"
#include "json.hpp"

namespace asap_nms::harness {

enum class VariantKind {
  kGreedy,
  kAsap,
  kAsapStrided,        // ASAP on a lattice with per-template strides
  kSecondStage,        // templated per-class Greedy-NMS
  kSecondStageSoft,    // templated linear Soft-NMS
};

struct Variant {
  VariantKind kind = VariantKind::kGreedy;
  double parameter = 0.0;  // gamma for ASAP, theta for second stage

  std::string name() const;
  friend bool operator==(const Variant&, const Variant&) = default;
};

// "greedy", "asap:<gamma>", "asap_strided:<gamma>", "second_stage:<theta>",
// "second_stage_soft:<theta>". Throws std::invalid_argument otherwise.
Variant parse_variant(const std::string& text);
std::vector<Variant> parse_variants(const std::string& comma_separated);

struct RunOptions {
  NmsConfig nms;
  double stage2_threshold = 0.5;
  SoftNmsParams soft;
  double recall_iou = 0.5;
  int threads = 1;
  std::optional<std::filesystem::path> table_cache;
  bool per_image = false;  // include kept indices per image in the report
};

struct ImageOutcome {
  std::uint64_t image_id = 0;
  std::vector<int> kept;
  NmsStats stats;
  double recall = 1.0;
  bool recall_vacuous = false;
  double agreement = 1.0;  // Jaccard vs greedy
  // Second stage only.
  std::uint64_t adjacency_evaluations = 0;
  std::uint64_t suppression_checks = 0;
  std::uint64_t baseline_checks = 0;
  double mean_adjacency = 0.0;
  std::size_t max_adjacency = 0;
  bool matches_baseline = true;
};

struct VariantSummary {
  Variant variant;
  std::size_t table_entries = 0;
  std::size_t images = 0;
  NmsStats totals;
  double mean_recall = 0.0;
  double mean_agreement = 1.0;
  std::size_t vacuous_recall_images = 0;
  std::uint64_t adjacency_evaluations = 0;
  std::uint64_t suppression_checks = 0;
  std::uint64_t baseline_checks = 0;
  std::size_t baseline_mismatches = 0;
  std::vector<ImageOutcome> outcomes;  // indexed like dataset.records
};

struct TimingSummary {
  std::string name;
  std::int64_t median_ns = 0;
  std::int64_t p95_ns = 0;
  std::size_t samples = 0;
};

struct RunReport {
  RunOptions options;
  std::size_t images = 0;
  std::size_t anchor_count = 0;
  bool uniform_stride = true;
  std::vector<VariantSummary> variants;  // greedy reference first

  // Present only for timed runs.
  int warmup = 0;
  int iterations = 0;
  std::vector<TimingSummary> timings;

  const VariantSummary* find(const std::string& name) const;
};

// Runs every variant once per image (images in parallel). Greedy is always
// included as the reference for agreement and recall deltas.
RunReport run_variants(const Dataset& dataset, std::span<const Variant> variants,
                       const RunOptions& options);

// run_variants plus wall-clock timing: `warmup` untimed then `iterations`
// timed passes over the dataset, single-threaded, steady clock. A stage-1
// sample covers pre-filter, sort and NMS for one image.
RunReport run_benchmark(const Dataset& dataset,
                        std::span<const Variant> variants,
                        const RunOptions& options, int warmup, int iterations);

// Report serialization. Timing data lives under "timing" (JSON) or in the
// trailing columns (CSV); everything else is deterministic.
nlohmann::json report_to_json(const RunReport& report);
std::string report_to_csv(const RunReport& report);

// Host description attached to timed reports.
nlohmann::json machine_info();

}  // namespace asap_nms::harness

#endif  // ASAP_NMS_HARNESS_BENCHMARK_HPP_
