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

#include "asap_nms/harness/benchmark.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "asap_nms/harness/analysis.hpp"
#include "asap_nms/harness/parallel.hpp"
#include "asap_nms/neighbor_table.hpp"

namespace asap_nms::harness {
namespace {

using nlohmann::json;

std::string ShortestDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

const char* KindName(VariantKind kind) {
  switch (kind) {
    case VariantKind::kGreedy: return "greedy";
    case VariantKind::kAsap: return "asap";
    case VariantKind::kAsapStrided: return "asap_strided";
    case VariantKind::kSecondStage: return "second_stage";
    case VariantKind::kSecondStageSoft: return "second_stage_soft";
  }
  return "unknown";
}

bool IsStage1(VariantKind kind) {
  return kind == VariantKind::kGreedy || kind == VariantKind::kAsap ||
         kind == VariantKind::kAsapStrided;
}

std::vector<Box> ProposalBoxes(const ImageRecord& r, std::span<const int> idx) {
  std::vector<Box> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(r.proposals[static_cast<std::size_t>(i)].box);
  return out;
}

std::vector<Box> DetectionBoxes(const ImageRecord& r, std::span<const int> idx) {
  std::vector<Box> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(r.detections[static_cast<std::size_t>(i)].box);
  return out;
}

std::vector<int> Flatten(const std::vector<std::vector<int>>& per_class) {
  std::vector<int> out;
  for (const auto& v : per_class) out.insert(out.end(), v.begin(), v.end());
  return out;
}

// Per-variant work, bound to its neighbor table when it has one.
class Runner {
 public:
  Runner(const Dataset& dataset, const Variant& variant,
         const RunOptions& options)
      : dataset_(dataset), variant_(variant), options_(options) {
    options_.nms.validate();
    if (variant.kind == VariantKind::kAsap ||
        variant.kind == VariantKind::kAsapStrided) {
      if (variant.kind == VariantKind::kAsapStrided &&
          dataset.lattice.uniform_stride()) {
        throw std::invalid_argument(
            variant.name() +
            ": dataset lattice has uniform strides; generate it with "
            "--strided");
      }
      if (variant.parameter == 0.0) {
        table_ = std::make_unique<NeighborTable>(
            NeighborTable::CompareAll(dataset.lattice));
      } else {
        std::optional<std::filesystem::path> cache = options.table_cache;
        table_ = std::make_unique<NeighborTable>(
            load_or_build_table(dataset.lattice, variant.parameter, cache));
      }
    }
    if (variant.kind == VariantKind::kSecondStage &&
        variant.parameter > options.stage2_threshold) {
      throw std::invalid_argument(variant.name() +
                                  ": theta exceeds the stage-2 threshold");
    }
    if (variant.kind == VariantKind::kSecondStageSoft &&
        variant.parameter > options.soft.overlap_threshold) {
      throw std::invalid_argument(
          variant.name() + ": theta exceeds the Soft-NMS overlap threshold");
    }
  }

  std::size_t table_entries() const { return table_ ? table_->size() : 0; }

  // Untimed evaluation of one image.
  ImageOutcome evaluate(const ImageRecord& r) const {
    ImageOutcome out;
    out.image_id = r.image_id;
    if (IsStage1(variant_.kind)) {
      const NmsResult res = stage1(r);
      out.kept = res.kept;
      out.stats = res.stats;
      const Recall rec = evaluate_recall(ProposalBoxes(r, out.kept),
                                         r.ground_truth, options_.recall_iou);
      out.recall = rec.value;
      out.recall_vacuous = rec.vacuous;
      return out;
    }
    const int classes = std::max(1, dataset_.num_classes);
    const DetectionAdjacency adj =
        build_detection_adjacency(r.detections, variant_.parameter);
    out.adjacency_evaluations = adj.iou_evaluations;
    out.mean_adjacency = adj.mean_size();
    out.max_adjacency = adj.max_size();
    if (variant_.kind == VariantKind::kSecondStage) {
      const ClassKeep fast = templated_greedy_nms(
          r.detections, adj, options_.stage2_threshold, classes);
      const ClassKeep base =
          per_class_greedy_nms(r.detections, options_.stage2_threshold, classes);
      out.kept = Flatten(fast.kept);
      out.suppression_checks = fast.suppression_checks;
      out.baseline_checks = base.suppression_checks;
      out.matches_baseline = fast.kept == base.kept;
      out.agreement = agreement(out.kept, Flatten(base.kept));
    } else {
      const SoftNmsResult fast =
          templated_soft_nms(r.detections, adj, options_.soft, classes);
      const SoftNmsResult base = soft_nms(r.detections, options_.soft, classes);
      out.kept = Flatten(fast.selected);
      out.suppression_checks = fast.suppression_checks;
      out.baseline_checks = base.suppression_checks;
      out.matches_baseline =
          fast.scores == base.scores && fast.selected == base.selected;
      out.agreement = agreement(out.kept, Flatten(base.selected));
    }
    out.stats.kept = out.kept.size();
    const Recall rec = evaluate_recall(DetectionBoxes(r, out.kept),
                                       r.ground_truth, options_.recall_iou);
    out.recall = rec.value;
    out.recall_vacuous = rec.vacuous;
    return out;
  }

  // The timed unit of work for one image.
  std::size_t timed(const ImageRecord& r) const {
    if (IsStage1(variant_.kind)) return stage1(r).kept.size();
    const int classes = std::max(1, dataset_.num_classes);
    const DetectionAdjacency adj =
        build_detection_adjacency(r.detections, variant_.parameter);
    if (variant_.kind == VariantKind::kSecondStage) {
      return templated_greedy_nms(r.detections, adj, options_.stage2_threshold,
                                  classes)
          .kept.size();
    }
    return templated_soft_nms(r.detections, adj, options_.soft, classes)
        .scores.size();
  }

 private:
  NmsResult stage1(const ImageRecord& r) const {
    return run_stage1(r.proposals, options_.nms, table_.get(),
                      table_ ? &dataset_.lattice : nullptr);
  }

  const Dataset& dataset_;
  Variant variant_;
  RunOptions options_;
  std::unique_ptr<NeighborTable> table_;
};

VariantSummary Summarize(const Variant& v, std::size_t table_entries,
                         std::vector<ImageOutcome> outcomes,
                         const std::vector<ImageOutcome>* greedy) {
  VariantSummary s;
  s.variant = v;
  s.table_entries = table_entries;
  s.images = outcomes.size();
  double recall_sum = 0.0;
  std::size_t recall_count = 0;
  double agreement_sum = 0.0;
  for (std::size_t n = 0; n < outcomes.size(); ++n) {
    ImageOutcome& o = outcomes[n];
    if (greedy != nullptr) o.agreement = agreement(o.kept, (*greedy)[n].kept);
    s.totals.iou_evaluations += o.stats.iou_evaluations;
    s.totals.kept += o.stats.kept;
    s.totals.suppressed += o.stats.suppressed;
    s.totals.lookup_hits += o.stats.lookup_hits;
    s.adjacency_evaluations += o.adjacency_evaluations;
    s.suppression_checks += o.suppression_checks;
    s.baseline_checks += o.baseline_checks;
    if (!o.matches_baseline) ++s.baseline_mismatches;
    if (o.recall_vacuous) {
      ++s.vacuous_recall_images;
    } else {
      recall_sum += o.recall;
      ++recall_count;
    }
    agreement_sum += o.agreement;
  }
  s.mean_recall =
      recall_count == 0 ? 1.0 : recall_sum / static_cast<double>(recall_count);
  s.mean_agreement = outcomes.empty()
                         ? 1.0
                         : agreement_sum / static_cast<double>(outcomes.size());
  s.outcomes = std::move(outcomes);
  return s;
}

TimingSummary SummarizeTiming(const std::string& name,
                              std::vector<std::int64_t> samples) {
  TimingSummary t;
  t.name = name;
  t.samples = samples.size();
  if (samples.empty()) return t;
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  t.median_ns = n % 2 == 1 ? samples[n / 2]
                           : (samples[n / 2 - 1] + samples[n / 2]) / 2;
  const auto p95 = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  t.p95_ns = samples[std::max<std::size_t>(p95, 1) - 1];
  return t;
}

json StatsJson(const NmsStats& s) {
  return {{"iou_evaluations", s.iou_evaluations},
          {"kept", s.kept},
          {"suppressed", s.suppressed},
          {"lookup_hits", s.lookup_hits}};
}

}  // namespace

std::string Variant::name() const {
  if (kind == VariantKind::kGreedy) return "greedy";
  return std::string(KindName(kind)) + ":" + ShortestDouble(parameter);
}

Variant parse_variant(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  static const std::map<std::string, VariantKind> kKinds = {
      {"greedy", VariantKind::kGreedy},
      {"asap", VariantKind::kAsap},
      {"asap_strided", VariantKind::kAsapStrided},
      {"second_stage", VariantKind::kSecondStage},
      {"second_stage_soft", VariantKind::kSecondStageSoft},
  };
  const auto it = kKinds.find(head);
  if (it == kKinds.end()) {
    throw std::invalid_argument("unknown variant '" + text + "'");
  }
  Variant v{it->second, 0.0};
  if (v.kind == VariantKind::kGreedy) {
    if (colon != std::string::npos) {
      throw std::invalid_argument("variant 'greedy' takes no parameter");
    }
    return v;
  }
  if (colon == std::string::npos) {
    throw std::invalid_argument("variant '" + text +
                                "' needs a parameter, e.g. " + head + ":0.4");
  }
  const std::string arg = text.substr(colon + 1);
  const auto res =
      std::from_chars(arg.data(), arg.data() + arg.size(), v.parameter);
  if (res.ec != std::errc() || res.ptr != arg.data() + arg.size() ||
      !(v.parameter >= 0.0) || !(v.parameter <= 1.0)) {
    throw std::invalid_argument("variant '" + text +
                                "': parameter must be a number in [0, 1]");
  }
  return v;
}

std::vector<Variant> parse_variants(const std::string& comma_separated) {
  std::vector<Variant> out;
  std::stringstream ss(comma_separated);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_variant(item));
  }
  return out;
}

const VariantSummary* RunReport::find(const std::string& name) const {
  for (const VariantSummary& v : variants) {
    if (v.variant.name() == name) return &v;
  }
  return nullptr;
}

RunReport run_variants(const Dataset& dataset,
                       std::span<const Variant> variants,
                       const RunOptions& options) {
  RunReport report;
  report.options = options;
  report.images = dataset.records.size();
  report.anchor_count = dataset.lattice.anchor_count();
  report.uniform_stride = dataset.lattice.uniform_stride();

  std::vector<Variant> all = {Variant{VariantKind::kGreedy, 0.0}};
  for (const Variant& v : variants) {
    if (std::find(all.begin(), all.end(), v) == all.end()) all.push_back(v);
  }

  report.variants.reserve(all.size());
  const std::vector<ImageOutcome>* greedy = nullptr;
  for (const Variant& v : all) {
    const Runner runner(dataset, v, options);
    std::vector<ImageOutcome> outcomes(dataset.records.size());
    parallel_for(outcomes.size(), options.threads, [&](std::size_t n) {
      outcomes[n] = runner.evaluate(dataset.records[n]);
    });
    const bool stage1 = IsStage1(v.kind);
    report.variants.push_back(Summarize(v, runner.table_entries(),
                                        std::move(outcomes),
                                        stage1 ? greedy : nullptr));
    if (v.kind == VariantKind::kGreedy) {
      greedy = &report.variants.front().outcomes;
    }
  }
  return report;
}

RunReport run_benchmark(const Dataset& dataset,
                        std::span<const Variant> variants,
                        const RunOptions& options, int warmup, int iterations) {
  if (warmup < 0 || iterations < 1) {
    throw std::invalid_argument(
        "run_benchmark: need warmup >= 0 and iterations >= 1");
  }
  RunReport report = run_variants(dataset, variants, options);
  report.warmup = warmup;
  report.iterations = iterations;
  for (const VariantSummary& summary : report.variants) {
    const Runner runner(dataset, summary.variant, options);
    std::size_t sink = 0;
    for (int w = 0; w < warmup; ++w) {
      for (const ImageRecord& r : dataset.records) sink += runner.timed(r);
    }
    std::vector<std::int64_t> samples;
    samples.reserve(static_cast<std::size_t>(iterations) *
                    dataset.records.size());
    for (int it = 0; it < iterations; ++it) {
      for (const ImageRecord& r : dataset.records) {
        const auto start = std::chrono::steady_clock::now();
        sink += runner.timed(r);
        const auto stop = std::chrono::steady_clock::now();
        samples.push_back(
            std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start)
                .count());
      }
    }
    // Keeps the timed calls observable.
    if (sink == static_cast<std::size_t>(-1)) report.warmup = -1;
    report.timings.push_back(
        SummarizeTiming(summary.variant.name(), std::move(samples)));
  }
  return report;
}

json machine_info() {
  json m = {{"hardware_concurrency", std::thread::hardware_concurrency()},
            {"clock", "std::chrono::steady_clock"}};
#if defined(__clang__)
  m["compiler"] = "clang " __clang_version__;
#elif defined(__GNUC__)
  m["compiler"] = "gcc " __VERSION__;
#endif
#ifdef NDEBUG
  m["build"] = "release";
#else
  m["build"] = "debug";
#endif
  return m;
}

json report_to_json(const RunReport& report) {
  const RunOptions& o = report.options;
  json out = {
      {"schema", "asap-nms-report"},
      {"version", 1},
      {"config",
       {{"nms_threshold", o.nms.nms_threshold},
        {"max_keep", o.nms.max_keep},
        {"pre_nms_top_n", o.nms.pre_nms_top_n},
        {"stage2_threshold", o.stage2_threshold},
        {"soft_overlap_threshold", o.soft.overlap_threshold},
        {"soft_score_floor", o.soft.score_floor},
        {"recall_iou", o.recall_iou}}},
      {"dataset",
       {{"images", report.images},
        {"anchor_count", report.anchor_count},
        {"uniform_stride", report.uniform_stride}}},
  };
  const VariantSummary* greedy = report.find("greedy");
  json variants = json::array();
  for (const VariantSummary& s : report.variants) {
    json v = {{"name", s.variant.name()},
              {"kind", KindName(s.variant.kind)},
              {"parameter", s.variant.parameter},
              {"images", s.images},
              {"totals", StatsJson(s.totals)},
              {"mean_recall", s.mean_recall},
              {"vacuous_recall_images", s.vacuous_recall_images},
              {"mean_agreement", s.mean_agreement}};
    if (IsStage1(s.variant.kind)) {
      v["table_entries"] = s.table_entries;
      if (greedy != nullptr) {
        v["recall_delta_vs_greedy"] = s.mean_recall - greedy->mean_recall;
        v["evaluation_ratio_vs_greedy"] =
            s.totals.iou_evaluations == 0
                ? json(nullptr)
                : json(static_cast<double>(greedy->totals.iou_evaluations) /
                       static_cast<double>(s.totals.iou_evaluations));
      }
    } else {
      v["adjacency_evaluations"] = s.adjacency_evaluations;
      v["suppression_checks"] = s.suppression_checks;
      v["baseline_checks"] = s.baseline_checks;
      v["baseline_mismatches"] = s.baseline_mismatches;
    }
    if (o.per_image) {
      json images = json::array();
      for (const ImageOutcome& im : s.outcomes) {
        json row = {{"image_id", im.image_id},
                    {"kept", im.kept},
                    {"stats", StatsJson(im.stats)},
                    {"recall", im.recall},
                    {"recall_vacuous", im.recall_vacuous},
                    {"agreement", im.agreement}};
        if (!IsStage1(s.variant.kind)) {
          row["suppression_checks"] = im.suppression_checks;
          row["mean_adjacency"] = im.mean_adjacency;
          row["max_adjacency"] = im.max_adjacency;
          row["matches_baseline"] = im.matches_baseline;
        }
        images.push_back(std::move(row));
      }
      v["per_image"] = std::move(images);
    }
    variants.push_back(std::move(v));
  }
  out["variants"] = std::move(variants);

  if (!report.timings.empty()) {
    json timings = json::array();
    for (const TimingSummary& t : report.timings) {
      timings.push_back({{"name", t.name},
                         {"median_ns", t.median_ns},
                         {"p95_ns", t.p95_ns},
                         {"samples", t.samples}});
    }
    json timing = {{"protocol",
                    {{"warmup", report.warmup},
                     {"iterations", report.iterations},
                     {"unit", "ns per image"},
                     {"statistic", "median and p95 over iterations x images"}}},
                   {"machine", machine_info()},
                   {"variants", std::move(timings)}};
    const TimingSummary* base = nullptr;
    for (const TimingSummary& t : report.timings) {
      if (t.name == "greedy") base = &t;
    }
    if (base != nullptr) {
      json ratios = json::object();
      for (const TimingSummary& t : report.timings) {
        if (t.median_ns > 0) {
          ratios[t.name] = static_cast<double>(base->median_ns) /
                           static_cast<double>(t.median_ns);
        }
      }
      timing["median_speedup_vs_greedy"] = std::move(ratios);
    }
    out["timing"] = std::move(timing);
  }
  return out;
}

std::string report_to_csv(const RunReport& report) {
  std::ostringstream os;
  os << "variant,kind,parameter,images,iou_evaluations,kept,suppressed,"
        "lookup_hits,mean_recall,recall_delta_vs_greedy,mean_agreement,"
        "evaluation_ratio_vs_greedy,suppression_checks,baseline_mismatches";
  const bool timed = !report.timings.empty();
  if (timed) os << ",median_ns,p95_ns,samples";
  os << '\n';
  const VariantSummary* greedy = report.find("greedy");
  for (std::size_t n = 0; n < report.variants.size(); ++n) {
    const VariantSummary& s = report.variants[n];
    const bool stage1 = IsStage1(s.variant.kind);
    os << s.variant.name() << ',' << KindName(s.variant.kind) << ','
       << ShortestDouble(s.variant.parameter) << ',' << s.images << ','
       << s.totals.iou_evaluations << ',' << s.totals.kept << ','
       << s.totals.suppressed << ',' << s.totals.lookup_hits << ','
       << ShortestDouble(s.mean_recall) << ',';
    if (stage1 && greedy != nullptr) {
      os << ShortestDouble(s.mean_recall - greedy->mean_recall);
    }
    os << ',' << ShortestDouble(s.mean_agreement) << ',';
    if (stage1 && greedy != nullptr && s.totals.iou_evaluations > 0) {
      os << ShortestDouble(static_cast<double>(greedy->totals.iou_evaluations) /
                           static_cast<double>(s.totals.iou_evaluations));
    }
    os << ',' << s.suppression_checks << ',' << s.baseline_mismatches;
    if (timed) {
      const TimingSummary& t = report.timings[n];
      os << ',' << t.median_ns << ',' << t.p95_ns << ',' << t.samples;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace asap_nms::harness
