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

// asap-nms: dataset generation, neighbor tables, NMS runs, analyses, and
// timed benchmarks. Exit codes: 0 success, 1 validation failure, 2 internal
// error.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "asap_nms/anchor_lattice.hpp"
#include "asap_nms/harness/analysis.hpp"
#include "asap_nms/harness/benchmark.hpp"
#include "asap_nms/harness/dataset.hpp"
#include "asap_nms/harness/scene.hpp"
#include "asap_nms/neighbor_table.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;
namespace an = asap_nms;
namespace h = asap_nms::harness;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitInternal = 2;

constexpr int kMinWarmup = 5;
constexpr int kMinIterations = 50;

// Bad flags or input data; maps to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string format = "json";
  std::string out;  // empty or "-" means stdout
  int threads = 1;
};

struct SceneFlags {
  h::SceneConfig scene;
  int images = 10;
  std::string dataset;  // when set, read instead of generating
};

struct NmsFlags {
  an::NmsConfig nms;
  std::vector<double> gammas = {0.4};
  std::string variants;
  double stage2_threshold = 0.5;
  double soft_threshold = 0.3;
  double recall_iou = 0.5;
  std::string table_cache;
  bool per_image = false;
};

void AddCommon(CLI::App* app, CommonFlags& f) {
  app->add_option("--format", f.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app->add_option("--out", f.out, "Report path (default: stdout)");
  app->add_option("--threads", f.threads,
                  "Worker threads for dataset-level parallelism (0: all cores)")
      ->check(CLI::Range(0, 1024))
      ->capture_default_str();
}

// Scene generation flags. With allow_dataset, --dataset reads a JSONL file
// instead and the generation flags are rejected.
void AddScene(CLI::App* app, SceneFlags& f, bool allow_dataset) {
  auto& s = f.scene;
  std::vector<CLI::Option*> gen;
  gen.push_back(app->add_option("--images", f.images, "Images to generate")
                    ->check(CLI::NonNegativeNumber)
                    ->capture_default_str());
  gen.push_back(app->add_option("--seed", s.seed, "Base random seed")
                    ->capture_default_str());
  gen.push_back(app->add_flag("--strided", s.family.strided_largest,
                              "Give the largest anchor scale twice the stride"));
  gen.push_back(app->add_option("--width", s.image_width, "Image width")
                    ->capture_default_str());
  gen.push_back(app->add_option("--height", s.image_height, "Image height")
                    ->capture_default_str());
  gen.push_back(app->add_option("--min-objects", s.min_objects,
                                "Minimum objects per image")
                    ->capture_default_str());
  gen.push_back(app->add_option("--max-objects", s.max_objects,
                                "Maximum objects per image")
                    ->capture_default_str());
  gen.push_back(app->add_option("--regression-gain", s.regression_gain,
                                "Fraction of the anchor-to-object offset "
                                "recovered by matched proposals")
                    ->capture_default_str());
  gen.push_back(app->add_option("--sigma-center", s.sigma_center,
                                "Center noise, in anchor sizes")
                    ->capture_default_str());
  gen.push_back(app->add_option("--sigma-logsize", s.sigma_logsize,
                                "Log-size noise")
                    ->capture_default_str());
  gen.push_back(app->add_option("--sigma-score", s.sigma_score, "Score noise")
                    ->capture_default_str());
  gen.push_back(app->add_option("--classes", s.num_classes,
                                "Classes for second-stage detections "
                                "(0: none)")
                    ->capture_default_str());
  if (allow_dataset) {
    auto* d = app->add_option("--dataset", f.dataset,
                              "JSONL dataset to read instead of generating");
    for (auto* o : gen) d->excludes(o);
  }
}

void AddNms(CLI::App* app, NmsFlags& f, bool variants) {
  app->add_option("--nms-threshold", f.nms.nms_threshold,
                  "Suppression IoU threshold t (strict >)")
      ->capture_default_str();
  app->add_option("--max-keep", f.nms.max_keep, "Proposals kept per image")
      ->capture_default_str();
  app->add_option("--pre-nms-top-n", f.nms.pre_nms_top_n,
                  "Top-scoring proposals entering NMS")
      ->capture_default_str();
  if (!variants) return;
  app->add_option("--gamma", f.gammas,
                  "Anchor-IoU neighbor thresholds; 0 compares all pairs")
      ->delimiter(',')
      ->capture_default_str();
  app->add_option("--variants", f.variants,
                  "Comma-separated variants, e.g. "
                  "greedy,asap:0.4,asap_strided:0.3,second_stage:0.5 "
                  "(overrides --gamma)");
  app->add_option("--stage2-threshold", f.stage2_threshold,
                  "Per-class Greedy-NMS threshold for second-stage variants")
      ->capture_default_str();
  app->add_option("--soft-threshold", f.soft_threshold,
                  "Linear Soft-NMS overlap threshold")
      ->capture_default_str();
  app->add_option("--recall-iou", f.recall_iou, "IoU floor for recall")
      ->capture_default_str();
  app->add_option("--table-cache", f.table_cache,
                  "Neighbor-table cache file (read when it matches, "
                  "rewritten otherwise)");
  app->add_flag("--per-image", f.per_image,
                "Include per-image kept indices in JSON reports");
}

void Emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream os(out, std::ios::binary);
  if (!os) throw ValidationError("cannot open " + out + " for writing");
  os << text;
  if (!os) throw ValidationError("write failed for " + out);
}

// Shortest round-trip decimal form, as in the library's CSV reports.
std::string Num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string Dump(const json& j) { return j.dump(2) + "\n"; }

h::Dataset LoadOrGenerate(const SceneFlags& f, int threads) {
  if (!f.dataset.empty()) {
    if (!std::filesystem::exists(f.dataset)) {
      throw ValidationError("dataset not found: " + f.dataset);
    }
    return h::read_dataset(std::filesystem::path(f.dataset));
  }
  return h::generate_dataset(f.scene, f.images, threads);
}

std::vector<h::Variant> SelectVariants(const NmsFlags& f,
                                       const an::AnchorLattice& lattice) {
  if (!f.variants.empty()) return h::parse_variants(f.variants);
  std::vector<h::Variant> out;
  const auto kind = lattice.uniform_stride() ? h::VariantKind::kAsap
                                             : h::VariantKind::kAsapStrided;
  for (double g : f.gammas) {
    if (!(g >= 0.0 && g <= 1.0)) {
      throw ValidationError("--gamma values must be in [0, 1]");
    }
    out.push_back(h::Variant{kind, g});
  }
  return out;
}

h::RunOptions MakeRunOptions(const NmsFlags& f, int threads) {
  h::RunOptions o;
  o.nms = f.nms;
  o.nms.validate();
  o.stage2_threshold = f.stage2_threshold;
  o.soft.overlap_threshold = f.soft_threshold;
  o.soft.validate();
  o.recall_iou = f.recall_iou;
  o.threads = threads;
  if (!f.table_cache.empty()) o.table_cache = f.table_cache;
  o.per_image = f.per_image;
  return o;
}

std::string HexKey(std::uint64_t key) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << key;
  return os.str();
}

json LatticeJson(const an::AnchorLattice& lattice) {
  json templates = json::array();
  for (int k = 0; k < lattice.num_templates(); ++k) {
    const auto& t = lattice.anchor_template(k);
    templates.push_back({{"index", k},
                         {"width", t.width},
                         {"height", t.height},
                         {"stride", t.stride},
                         {"columns", lattice.columns(k)},
                         {"rows", lattice.rows(k)}});
  }
  return {{"image_width", lattice.image_width()},
          {"image_height", lattice.image_height()},
          {"base_stride", lattice.base_stride()},
          {"anchor_count", lattice.anchor_count()},
          {"uniform_stride", lattice.uniform_stride()},
          {"templates", std::move(templates)}};
}

// Area scale of a template in base-stride units, the grouping used when
// neighbor counts are reported per anchor scale.
long ScaleOf(const an::AnchorTemplate& t, int base_stride) {
  return std::lround(std::sqrt(t.width * t.height) / base_stride);
}

// ---------------------------------------------------------------- gen

int RunGen(const SceneFlags& sf, const CommonFlags& cf,
           const std::string& dataset_out) {
  const h::Dataset d = h::generate_dataset(sf.scene, sf.images, cf.threads);
  h::write_dataset(d, std::filesystem::path(dataset_out));
  std::size_t proposals = 0, objects = 0, detections = 0;
  for (const auto& r : d.records) {
    proposals += r.proposals.size();
    objects += r.ground_truth.size();
    detections += r.detections.size();
  }
  if (cf.format == "csv") {
    std::ostringstream os;
    os << "images,anchor_count,proposals,ground_truth,detections,"
          "num_classes,seed,strided\n"
       << d.records.size() << ',' << d.lattice.anchor_count() << ','
       << proposals << ',' << objects << ',' << detections << ','
       << d.num_classes << ',' << sf.scene.seed << ','
       << (sf.scene.family.strided_largest ? 1 : 0) << '\n';
    Emit(os.str(), cf.out);
  } else {
    const json j = {{"schema", "asap-nms-gen"},
                    {"version", 1},
                    {"dataset", dataset_out},
                    {"images", d.records.size()},
                    {"seed", sf.scene.seed},
                    {"strided", sf.scene.family.strided_largest},
                    {"num_classes", d.num_classes},
                    {"anchor_count", d.lattice.anchor_count()},
                    {"proposals", proposals},
                    {"ground_truth", objects},
                    {"detections", detections}};
    Emit(Dump(j), cf.out);
  }
  return kExitOk;
}

// -------------------------------------------------------------- table

an::NeighborTable TableFor(const an::AnchorLattice& lattice, double gamma,
                           const std::string& cache) {
  if (gamma == 0.0) return an::NeighborTable::CompareAll(lattice);
  if (cache.empty()) return an::NeighborTable::Build(lattice, gamma);
  try {
    return an::load_or_build_table(lattice, gamma, cache);
  } catch (const std::runtime_error& e) {
    throw ValidationError(e.what());
  }
}

int RunTable(const SceneFlags& sf, const CommonFlags& cf,
             const std::vector<double>& gammas, const std::string& cache,
             int pre_nms_top_n) {
  const an::AnchorLattice lattice =
      sf.dataset.empty() ? h::scene_lattice(sf.scene)
                         : LoadOrGenerate(sf, cf.threads).lattice;
  for (double g : gammas) {
    if (!(g > 0.0 && g <= 1.0)) {
      throw ValidationError("table: --gamma values must be in (0, 1]");
    }
  }
  // Scale groups in template order.
  std::vector<long> scales;
  for (const auto& t : lattice.templates()) {
    const long s = ScaleOf(t, lattice.base_stride());
    if (std::find(scales.begin(), scales.end(), s) == scales.end()) {
      scales.push_back(s);
    }
  }

  json rows = json::array();
  std::ostringstream csv;
  csv << "gamma,template,width,height,stride,scale,min,max,mean\n";
  for (double g : gammas) {
    const an::NeighborTable table = TableFor(lattice, g, cache);
    const auto stats = an::table_stats(table);
    json per_template = json::array();
    std::map<long, std::pair<double, int>> by_scale;
    for (int k = 0; k < lattice.num_templates(); ++k) {
      const auto& t = lattice.anchor_template(k);
      const auto& s = stats[static_cast<std::size_t>(k)];
      const long scale = ScaleOf(t, lattice.base_stride());
      per_template.push_back({{"index", k},
                              {"width", t.width},
                              {"height", t.height},
                              {"stride", t.stride},
                              {"scale", scale},
                              {"min", s.min},
                              {"max", s.max},
                              {"mean", s.mean}});
      by_scale[scale].first += s.mean;
      by_scale[scale].second += 1;
      csv << Num(g) << ',' << k << ',' << Num(t.width) << ','
          << Num(t.height) << ',' << t.stride << ',' << scale << ',' << s.min
          << ',' << s.max << ',' << Num(s.mean) << '\n';
    }
    json scale_row = json::object();
    for (long s : scales) {
      const auto& [sum, n] = by_scale[s];
      scale_row[std::to_string(s)] = sum / n;
    }
    rows.push_back({{"gamma", g},
                    {"entries", table.size()},
                    {"key", HexKey(an::table_key(lattice, g))},
                    {"mean_neighbors_by_scale", std::move(scale_row)},
                    {"templates", std::move(per_template)}});
  }

  if (cf.format == "csv") {
    Emit(csv.str(), cf.out);
    return kExitOk;
  }
  json greedy = json::object();
  for (long s : scales) greedy[std::to_string(s)] = pre_nms_top_n;
  const json j = {{"schema", "asap-nms-table"},
                  {"version", 1},
                  {"lattice", LatticeJson(lattice)},
                  {"greedy_comparisons_by_scale", std::move(greedy)},
                  {"tables", std::move(rows)}};
  Emit(Dump(j), cf.out);
  return kExitOk;
}

// -------------------------------------------------------- run / bench

int RunVariants(const SceneFlags& sf, const NmsFlags& nf,
                const CommonFlags& cf, std::optional<std::pair<int, int>>
                                           timing) {
  const h::Dataset d = LoadOrGenerate(sf, cf.threads);
  const auto variants = SelectVariants(nf, d.lattice);
  const h::RunOptions options = MakeRunOptions(nf, cf.threads);
  const h::RunReport report =
      timing ? h::run_benchmark(d, variants, options, timing->first,
                                timing->second)
             : h::run_variants(d, variants, options);
  Emit(cf.format == "csv" ? h::report_to_csv(report)
                          : Dump(h::report_to_json(report)),
       cf.out);
  return kExitOk;
}

// ------------------------------------------------------------ analyze

int RunAnalyze(const SceneFlags& sf, const CommonFlags& cf,
               const an::NmsConfig& nms, double bin_width) {
  if (!(bin_width > 0.0 && bin_width <= 1.0)) {
    throw ValidationError("--bin-width must be in (0, 1]");
  }
  nms.validate();
  const h::Dataset d = LoadOrGenerate(sf, cf.threads);
  std::vector<double> edges;
  const double per_unit = 1.0 / bin_width;
  const auto bins = static_cast<int>(std::ceil(per_unit - 1e-9));
  for (int b = 0; b < bins; ++b) edges.push_back(b / per_unit);
  edges.push_back(1.0);
  const h::FlipHistogram hist = h::flip_probability_analysis(
      d.records, d.lattice, edges, nms.nms_threshold, nms.pre_nms_top_n,
      cf.threads);

  bool monotone = true;
  for (std::size_t b = 1; b < hist.bins(); ++b) {
    if (hist.pairs[b] > 0 && hist.pairs[b - 1] > 0 &&
        hist.fraction(b) < hist.fraction(b - 1)) {
      monotone = false;
    }
  }
  if (cf.format == "csv") {
    std::ostringstream os;
    os << "anchor_iou_lo,anchor_iou_hi,pairs,flips,fraction\n";
    for (std::size_t b = 0; b < hist.bins(); ++b) {
      os << Num(hist.edges[b]) << ',' << Num(hist.edges[b + 1]) << ','
         << hist.pairs[b] << ',' << hist.flips[b] << ','
         << Num(hist.fraction(b)) << '\n';
    }
    Emit(os.str(), cf.out);
    return kExitOk;
  }
  json rows = json::array();
  for (std::size_t b = 0; b < hist.bins(); ++b) {
    rows.push_back({{"anchor_iou_lo", hist.edges[b]},
                    {"anchor_iou_hi", hist.edges[b + 1]},
                    {"pairs", hist.pairs[b]},
                    {"flips", hist.flips[b]},
                    {"fraction", hist.fraction(b)}});
  }
  const json j = {{"schema", "asap-nms-flip"},
                  {"version", 1},
                  {"images", d.records.size()},
                  {"proposal_iou_threshold", hist.proposal_iou_threshold},
                  {"pre_nms_top_n", nms.pre_nms_top_n},
                  {"monotone", monotone},
                  {"bins", std::move(rows)}};
  Emit(Dump(j), cf.out);
  return kExitOk;
}

// ------------------------------------------------------------ compare

struct CompareLimits {
  std::optional<double> min_agreement;
  std::optional<double> max_recall_delta;
};

int RunCompare(const SceneFlags& sf, const NmsFlags& nf, const CommonFlags& cf,
               const CompareLimits& limits) {
  const h::Dataset d = LoadOrGenerate(sf, cf.threads);
  std::vector<h::Variant> variants = SelectVariants(nf, d.lattice);
  const h::RunReport report =
      h::run_variants(d, variants, MakeRunOptions(nf, cf.threads));
  const h::VariantSummary* greedy = report.find("greedy");
  if (greedy == nullptr) throw std::logic_error("report lacks greedy");

  json rows = json::array();
  std::ostringstream csv;
  csv << "variant,images,mean_agreement,min_agreement,identical_images,"
         "mean_recall,greedy_recall,recall_delta,iou_evaluations,"
         "greedy_iou_evaluations\n";
  std::vector<std::string> failures;
  for (const h::VariantSummary& s : report.variants) {
    if (&s == greedy) continue;
    double min_agreement = 1.0;
    std::size_t identical = 0;
    for (const auto& o : s.outcomes) {
      min_agreement = std::min(min_agreement, o.agreement);
      if (o.agreement == 1.0) ++identical;
    }
    const double delta = s.mean_recall - greedy->mean_recall;
    rows.push_back({{"variant", s.variant.name()},
                    {"images", s.images},
                    {"mean_agreement", s.mean_agreement},
                    {"min_agreement", min_agreement},
                    {"identical_images", identical},
                    {"mean_recall", s.mean_recall},
                    {"greedy_recall", greedy->mean_recall},
                    {"recall_delta", delta},
                    {"vacuous_recall_images", s.vacuous_recall_images},
                    {"iou_evaluations", s.totals.iou_evaluations},
                    {"greedy_iou_evaluations",
                     greedy->totals.iou_evaluations}});
    csv << s.variant.name() << ',' << s.images << ','
        << Num(s.mean_agreement) << ',' << Num(min_agreement) << ','
        << identical << ',' << Num(s.mean_recall) << ','
        << Num(greedy->mean_recall) << ',' << Num(delta) << ','
        << s.totals.iou_evaluations << ',' << greedy->totals.iou_evaluations
        << '\n';
    if (limits.min_agreement && s.mean_agreement < *limits.min_agreement) {
      failures.push_back(s.variant.name() + ": mean agreement " +
                         Num(s.mean_agreement) + " below " +
                         Num(*limits.min_agreement));
    }
    if (limits.max_recall_delta &&
        std::abs(delta) > *limits.max_recall_delta) {
      failures.push_back(s.variant.name() + ": recall delta " +
                         Num(delta) + " exceeds " +
                         Num(*limits.max_recall_delta));
    }
  }
  if (cf.format == "csv") {
    Emit(csv.str(), cf.out);
  } else {
    const json j = {{"schema", "asap-nms-compare"},
                    {"version", 1},
                    {"images", report.images},
                    {"max_keep", nf.nms.max_keep},
                    {"recall_iou", nf.recall_iou},
                    {"variants", std::move(rows)}};
    Emit(Dump(j), cf.out);
  }
  for (const auto& f : failures) std::cerr << "asap-nms: " << f << '\n';
  return failures.empty() ? kExitOk : kExitValidation;
}

int Main(int argc, char** argv) {
  CLI::App app{"ASAP-NMS: greedy NMS accelerated by anchor-lattice "
               "neighbor tables"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "asap-nms 0.1.0");

  CommonFlags common;
  SceneFlags scene;
  NmsFlags nms;

  auto* gen = app.add_subcommand("gen", "Synthesize a JSONL dataset");
  std::string dataset_out;
  gen->add_option("--dataset-out,-o", dataset_out, "Dataset path to write")
      ->required();
  AddScene(gen, scene, false);
  AddCommon(gen, common);

  auto* table = app.add_subcommand(
      "table", "Build neighbor tables and print per-template neighbor counts");
  std::vector<double> table_gammas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  std::string table_cache;
  table->add_option("--gamma", table_gammas, "Anchor-IoU thresholds in (0, 1]")
      ->delimiter(',')
      ->capture_default_str();
  table->add_option("--table-cache", table_cache,
                    "Cache file (single --gamma only)");
  table->add_option("--pre-nms-top-n", nms.nms.pre_nms_top_n,
                    "Greedy comparison count shown for reference")
      ->capture_default_str();
  AddScene(table, scene, true);
  AddCommon(table, common);

  auto* run = app.add_subcommand(
      "run", "Run NMS variants against the greedy reference");
  AddScene(run, scene, true);
  AddNms(run, nms, true);
  AddCommon(run, common);

  auto* analyze = app.add_subcommand(
      "analyze", "Flip-probability histogram over anchor-IoU bins");
  double bin_width = 0.1;
  AddScene(analyze, scene, true);
  AddNms(analyze, nms, false);
  analyze->add_option("--bin-width", bin_width, "Anchor-IoU bin width")
      ->capture_default_str();
  AddCommon(analyze, common);

  auto* compare = app.add_subcommand(
      "compare", "Kept-set agreement and recall against greedy");
  CompareLimits limits;
  AddScene(compare, scene, true);
  AddNms(compare, nms, true);
  compare->add_option("--min-agreement", limits.min_agreement,
                      "Exit 1 when a variant's mean agreement is lower");
  compare->add_option("--max-recall-delta", limits.max_recall_delta,
                      "Exit 1 when |recall - greedy recall| is larger");
  AddCommon(compare, common);

  auto* bench = app.add_subcommand(
      "bench", "Timed runs: median and p95 wall clock per image");
  int warmup = kMinWarmup;
  int iterations = kMinIterations;
  AddScene(bench, scene, true);
  AddNms(bench, nms, true);
  bench->add_option("--warmup", warmup, "Untimed passes before measuring")
      ->check(CLI::Range(kMinWarmup, 1000000))
      ->capture_default_str();
  bench->add_option("--iterations", iterations, "Timed passes")
      ->check(CLI::Range(kMinIterations, 1000000))
      ->capture_default_str();
  AddCommon(bench, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (*gen) return RunGen(scene, common, dataset_out);
  if (*table) {
    if (!table_cache.empty() && table_gammas.size() != 1) {
      throw ValidationError("--table-cache needs exactly one --gamma");
    }
    return RunTable(scene, common, table_gammas, table_cache,
                    nms.nms.pre_nms_top_n);
  }
  if (*run) return RunVariants(scene, nms, common, std::nullopt);
  if (*analyze) return RunAnalyze(scene, common, nms.nms, bin_width);
  if (*compare) return RunCompare(scene, nms, common, limits);
  if (*bench) {
    return RunVariants(scene, nms, common, std::pair{warmup, iterations});
  }
  return kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Main(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "asap-nms: " << e.what() << '\n';
    return kExitValidation;
  } catch (const h::DatasetError& e) {
    std::cerr << "asap-nms: dataset: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "asap-nms: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::out_of_range& e) {
    std::cerr << "asap-nms: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "asap-nms: internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (...) {
    std::cerr << "asap-nms: internal error\n";
    return kExitInternal;
  }
}
