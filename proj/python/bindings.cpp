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

// Python bindings for the core algorithms and the synthetic harness.

#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "asap_nms/anchor_lattice.hpp"
#include "asap_nms/geometry.hpp"
#include "asap_nms/harness/analysis.hpp"
#include "asap_nms/harness/benchmark.hpp"
#include "asap_nms/harness/dataset.hpp"
#include "asap_nms/harness/scene.hpp"
#include "asap_nms/neighbor_table.hpp"
#include "asap_nms/nms.hpp"
#include "asap_nms/second_stage.hpp"

namespace py = pybind11;
namespace an = asap_nms;
namespace h = asap_nms::harness;

namespace {

// The C++ API takes spans; Python passes lists.
using Proposals = std::vector<an::Proposal>;
using Detections = std::vector<an::Detection>;
using BoxArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<an::Box> ToBoxes(const BoxArray& boxes) {
  if (boxes.ndim() != 2 || boxes.shape(1) != 4) {
    throw std::invalid_argument("boxes must have shape (N, 4)");
  }
  const auto b = boxes.unchecked<2>();
  std::vector<an::Box> out;
  out.reserve(static_cast<std::size_t>(b.shape(0)));
  for (py::ssize_t n = 0; n < b.shape(0); ++n) {
    out.emplace_back(b(n, 0), b(n, 1), b(n, 2), b(n, 3));
  }
  return out;
}

// Greedy-NMS on plain arrays: returns kept indices into the input.
std::vector<int> NmsArrays(const BoxArray& boxes, const BoxArray& scores,
                           double threshold, int max_keep, int pre_nms_top_n) {
  const std::vector<an::Box> b = ToBoxes(boxes);
  if (scores.ndim() != 1 || scores.shape(0) != static_cast<py::ssize_t>(b.size())) {
    throw std::invalid_argument("scores must have shape (N,)");
  }
  const auto s = scores.unchecked<1>();
  std::vector<an::Proposal> proposals(b.size());
  for (std::size_t n = 0; n < b.size(); ++n) {
    proposals[n].box = b[n];
    proposals[n].score = s(static_cast<py::ssize_t>(n));
  }
  an::NmsConfig config{threshold, max_keep, pre_nms_top_n};
  return an::run_stage1(proposals, config, nullptr, nullptr).kept;
}

py::array_t<double> ProposalBoxes(const h::ImageRecord& r) {
  py::array_t<double> out({static_cast<py::ssize_t>(r.proposals.size()),
                           static_cast<py::ssize_t>(4)});
  auto o = out.mutable_unchecked<2>();
  for (std::size_t n = 0; n < r.proposals.size(); ++n) {
    const an::Box& b = r.proposals[n].box;
    const auto i = static_cast<py::ssize_t>(n);
    o(i, 0) = b.x1;
    o(i, 1) = b.y1;
    o(i, 2) = b.x2;
    o(i, 3) = b.y2;
  }
  return out;
}

py::array_t<double> ProposalScores(const h::ImageRecord& r) {
  py::array_t<double> out(static_cast<py::ssize_t>(r.proposals.size()));
  auto o = out.mutable_unchecked<1>();
  for (std::size_t n = 0; n < r.proposals.size(); ++n) {
    o(static_cast<py::ssize_t>(n)) = r.proposals[n].score;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "ASAP-NMS: greedy NMS accelerated by anchor-lattice neighbor tables";

  // Geometry.
  py::class_<an::Box>(m, "Box")
      .def(py::init<double, double, double, double>(), py::arg("x1"),
           py::arg("y1"), py::arg("x2"), py::arg("y2"))
      .def_static("from_center", &an::Box::FromCenter, py::arg("cx"),
                  py::arg("cy"), py::arg("w"), py::arg("h"))
      .def_readonly("x1", &an::Box::x1)
      .def_readonly("y1", &an::Box::y1)
      .def_readonly("x2", &an::Box::x2)
      .def_readonly("y2", &an::Box::y2)
      .def_property_readonly("width", &an::Box::width)
      .def_property_readonly("height", &an::Box::height)
      .def(py::self == py::self)
      .def("__repr__", [](const an::Box& b) { return an::to_string(b); });
  m.def("area", &an::area);
  m.def("intersection_area", &an::intersection_area);
  m.def("iou", &an::iou, py::arg("a"), py::arg("b"));

  // Anchors.
  py::class_<an::AnchorTemplate>(m, "AnchorTemplate")
      .def(py::init([](double w, double h, int s) {
             return an::AnchorTemplate{w, h, s};
           }),
           py::arg("width"), py::arg("height"), py::arg("stride"))
      .def_readonly("width", &an::AnchorTemplate::width)
      .def_readonly("height", &an::AnchorTemplate::height)
      .def_readonly("stride", &an::AnchorTemplate::stride)
      .def(py::self == py::self);
  py::class_<an::AnchorId>(m, "AnchorId")
      .def(py::init([](int k, int i, int j) { return an::AnchorId{k, i, j}; }),
           py::arg("template_index"), py::arg("i"), py::arg("j"))
      .def_readonly("template_index", &an::AnchorId::template_index)
      .def_readonly("i", &an::AnchorId::i)
      .def_readonly("j", &an::AnchorId::j)
      .def(py::self == py::self)
      .def(py::self < py::self)
      .def("__hash__",
           [](const an::AnchorId& a) {
             return py::hash(py::make_tuple(a.template_index, a.i, a.j));
           })
      .def("__repr__", [](const an::AnchorId& a) {
        return "AnchorId(" + std::to_string(a.template_index) + ", " +
               std::to_string(a.i) + ", " + std::to_string(a.j) + ")";
      });
  py::class_<an::TemplateFamily>(m, "TemplateFamily")
      .def(py::init<>())
      .def_readwrite("scales", &an::TemplateFamily::scales)
      .def_readwrite("aspect_ratios", &an::TemplateFamily::aspect_ratios)
      .def_readwrite("scale_unit", &an::TemplateFamily::scale_unit)
      .def_readwrite("base_stride", &an::TemplateFamily::base_stride)
      .def_readwrite("strided_largest", &an::TemplateFamily::strided_largest);
  py::class_<an::AnchorLattice>(m, "AnchorLattice")
      .def(py::init<std::vector<an::AnchorTemplate>, int, int, int>(),
           py::arg("templates"), py::arg("base_stride"),
           py::arg("image_width"), py::arg("image_height"))
      .def_property_readonly("templates",
                             [](const an::AnchorLattice& l) {
                               return std::vector<an::AnchorTemplate>(
                                   l.templates().begin(), l.templates().end());
                             })
      .def_property_readonly("num_templates", &an::AnchorLattice::num_templates)
      .def_property_readonly("image_width", &an::AnchorLattice::image_width)
      .def_property_readonly("image_height", &an::AnchorLattice::image_height)
      .def_property_readonly("uniform_stride",
                             &an::AnchorLattice::uniform_stride)
      .def("columns", &an::AnchorLattice::columns)
      .def("rows", &an::AnchorLattice::rows)
      .def("contains", &an::AnchorLattice::contains)
      .def("anchor_count", &an::AnchorLattice::anchor_count)
      .def(py::self == py::self);
  m.def("make_templates", &an::make_templates, py::arg("family"));
  m.def("make_lattice", &an::make_lattice, py::arg("family"),
        py::arg("image_width"), py::arg("image_height"));
  m.def("anchor_box", &an::anchor_box, py::arg("lattice"), py::arg("id"));
  m.def("anchor_iou", &an::anchor_iou, py::arg("tk"), py::arg("tl"),
        py::arg("dx"), py::arg("dy"));

  // Neighbor tables.
  py::class_<an::TemplateNeighborStats>(m, "TemplateNeighborStats")
      .def_readonly("min", &an::TemplateNeighborStats::min)
      .def_readonly("max", &an::TemplateNeighborStats::max)
      .def_readonly("mean", &an::TemplateNeighborStats::mean);
  py::class_<an::NeighborTable>(m, "NeighborTable")
      .def_static("build", &an::NeighborTable::Build, py::arg("lattice"),
                  py::arg("gamma"))
      .def_static("compare_all", &an::NeighborTable::CompareAll,
                  py::arg("lattice"))
      .def_property_readonly("gamma", &an::NeighborTable::gamma)
      .def_property_readonly("is_compare_all", &an::NeighborTable::compare_all)
      .def("period", &an::NeighborTable::period)
      .def("__len__", &an::NeighborTable::size)
      .def(py::self == py::self);
  m.def("neighbors_of", &an::neighbors_of, py::arg("table"),
        py::arg("lattice"), py::arg("id"));
  m.def("table_stats", &an::table_stats, py::arg("table"));
  m.def("load_or_build_table", &an::load_or_build_table, py::arg("lattice"),
        py::arg("gamma"), py::arg("cache_path") = std::nullopt);

  // Stage 1.
  py::class_<an::Proposal>(m, "Proposal")
      .def(py::init([](const an::Box& b, double s, const an::AnchorId& a) {
             return an::Proposal{b, s, a};
           }),
           py::arg("box"), py::arg("score"), py::arg("anchor"))
      .def_readonly("box", &an::Proposal::box)
      .def_readonly("score", &an::Proposal::score)
      .def_readonly("anchor", &an::Proposal::anchor);
  py::class_<an::NmsConfig>(m, "NmsConfig")
      .def(py::init([](double t, int keep, int top) {
             an::NmsConfig c{t, keep, top};
             c.validate();
             return c;
           }),
           py::arg("nms_threshold") = 0.7, py::arg("max_keep") = 300,
           py::arg("pre_nms_top_n") = 12000)
      .def_readonly("nms_threshold", &an::NmsConfig::nms_threshold)
      .def_readonly("max_keep", &an::NmsConfig::max_keep)
      .def_readonly("pre_nms_top_n", &an::NmsConfig::pre_nms_top_n);
  py::class_<an::NmsStats>(m, "NmsStats")
      .def_readonly("iou_evaluations", &an::NmsStats::iou_evaluations)
      .def_readonly("kept", &an::NmsStats::kept)
      .def_readonly("suppressed", &an::NmsStats::suppressed)
      .def_readonly("lookup_hits", &an::NmsStats::lookup_hits);
  py::class_<an::NmsResult>(m, "NmsResult")
      .def_readonly("kept", &an::NmsResult::kept)
      .def_readonly("stats", &an::NmsResult::stats);
  m.def(
      "top_n_prefilter",
      [](const Proposals& p, int n) { return an::top_n_prefilter(p, n); },
      py::arg("proposals"), py::arg("n"));
  m.def(
      "greedy_nms",
      [](const Proposals& sorted, const an::NmsConfig& config) {
        return an::greedy_nms(sorted, config);
      },
      py::arg("sorted"), py::arg("config"));
  m.def(
      "asap_nms",
      [](const Proposals& sorted, const an::NeighborTable& table,
         const an::AnchorLattice& lattice, const an::NmsConfig& config) {
        return an::asap_nms(sorted, table, lattice, config);
      },
      py::arg("sorted"), py::arg("table"), py::arg("lattice"),
      py::arg("config"));
  m.def(
      "run_stage1",
      [](const std::vector<an::Proposal>& proposals,
         const an::NmsConfig& config, const an::NeighborTable* table,
         const an::AnchorLattice* lattice) {
        return an::run_stage1(proposals, config, table, lattice);
      },
      py::arg("proposals"), py::arg("config"), py::arg("table") = nullptr,
      py::arg("lattice") = nullptr);
  m.def("nms", &NmsArrays, py::arg("boxes"), py::arg("scores"),
        py::arg("threshold") = 0.7, py::arg("max_keep") = 300,
        py::arg("pre_nms_top_n") = 12000,
        "Greedy-NMS on an (N, 4) box array; returns kept input indices.");

  // Stage 2.
  py::class_<an::Detection>(m, "Detection")
      .def(py::init([](const an::Box& b, double s, int c) {
             return an::Detection{b, s, c};
           }),
           py::arg("box"), py::arg("score"), py::arg("class_id"))
      .def_readonly("box", &an::Detection::box)
      .def_readonly("score", &an::Detection::score)
      .def_readonly("class_id", &an::Detection::class_id);
  py::class_<an::DetectionAdjacency>(m, "DetectionAdjacency")
      .def_readonly("theta", &an::DetectionAdjacency::theta)
      .def_readonly("lists", &an::DetectionAdjacency::lists)
      .def_readonly("iou_evaluations",
                    &an::DetectionAdjacency::iou_evaluations)
      .def("mean_size", &an::DetectionAdjacency::mean_size)
      .def("max_size", &an::DetectionAdjacency::max_size);
  py::class_<an::ClassKeep>(m, "ClassKeep")
      .def_readonly("kept", &an::ClassKeep::kept)
      .def_readonly("suppression_checks", &an::ClassKeep::suppression_checks);
  py::class_<an::SoftNmsParams>(m, "SoftNmsParams")
      .def(py::init([](double t, double floor) {
             an::SoftNmsParams p{t, floor};
             p.validate();
             return p;
           }),
           py::arg("overlap_threshold") = 0.3, py::arg("score_floor") = 1e-3)
      .def_readonly("overlap_threshold", &an::SoftNmsParams::overlap_threshold)
      .def_readonly("score_floor", &an::SoftNmsParams::score_floor);
  py::class_<an::SoftNmsResult>(m, "SoftNmsResult")
      .def_readonly("scores", &an::SoftNmsResult::scores)
      .def_readonly("selected", &an::SoftNmsResult::selected)
      .def_readonly("suppression_checks",
                    &an::SoftNmsResult::suppression_checks);
  m.def(
      "build_detection_adjacency",
      [](const Detections& d, double theta) {
        return an::build_detection_adjacency(d, theta);
      },
      py::arg("detections"), py::arg("theta"));
  m.def(
      "per_class_greedy_nms",
      [](const Detections& d, double t, int classes) {
        return an::per_class_greedy_nms(d, t, classes);
      },
      py::arg("detections"), py::arg("nms_threshold"), py::arg("num_classes"));
  m.def(
      "templated_greedy_nms",
      [](const Detections& d, const an::DetectionAdjacency& adj, double t,
         int classes) { return an::templated_greedy_nms(d, adj, t, classes); },
      py::arg("detections"), py::arg("adjacency"), py::arg("nms_threshold"),
      py::arg("num_classes"));
  m.def(
      "soft_nms",
      [](const Detections& d, const an::SoftNmsParams& p, int classes) {
        return an::soft_nms(d, p, classes);
      },
      py::arg("detections"), py::arg("params"), py::arg("num_classes"));
  m.def(
      "templated_soft_nms",
      [](const Detections& d, const an::DetectionAdjacency& adj,
         const an::SoftNmsParams& p, int classes) {
        return an::templated_soft_nms(d, adj, p, classes);
      },
      py::arg("detections"), py::arg("adjacency"), py::arg("params"),
      py::arg("num_classes"));

  // Harness.
  py::class_<h::SceneConfig>(m, "SceneConfig")
      .def(py::init<>())
      .def_readwrite("image_width", &h::SceneConfig::image_width)
      .def_readwrite("image_height", &h::SceneConfig::image_height)
      .def_readwrite("family", &h::SceneConfig::family)
      .def_readwrite("min_objects", &h::SceneConfig::min_objects)
      .def_readwrite("max_objects", &h::SceneConfig::max_objects)
      .def_readwrite("min_object_size", &h::SceneConfig::min_object_size)
      .def_readwrite("max_object_size", &h::SceneConfig::max_object_size)
      .def_readwrite("max_aspect", &h::SceneConfig::max_aspect)
      .def_readwrite("match_floor", &h::SceneConfig::match_floor)
      .def_readwrite("regression_gain", &h::SceneConfig::regression_gain)
      .def_readwrite("sigma_center", &h::SceneConfig::sigma_center)
      .def_readwrite("sigma_logsize", &h::SceneConfig::sigma_logsize)
      .def_readwrite("sigma_score", &h::SceneConfig::sigma_score)
      .def_readwrite("background_score", &h::SceneConfig::background_score)
      .def_readwrite("num_classes", &h::SceneConfig::num_classes)
      .def_readwrite("detections_per_object",
                     &h::SceneConfig::detections_per_object)
      .def_readwrite("clutter_detections", &h::SceneConfig::clutter_detections)
      .def_readwrite("seed", &h::SceneConfig::seed)
      .def("validate", &h::SceneConfig::validate);
  py::class_<h::ImageRecord>(m, "ImageRecord")
      .def_readonly("image_id", &h::ImageRecord::image_id)
      .def_readonly("proposals", &h::ImageRecord::proposals)
      .def_readonly("ground_truth", &h::ImageRecord::ground_truth)
      .def_readonly("detections", &h::ImageRecord::detections)
      .def("proposal_boxes", &ProposalBoxes,
           "Proposal boxes as an (N, 4) float64 array.")
      .def("proposal_scores", &ProposalScores,
           "Proposal scores as an (N,) float64 array.");
  py::class_<h::Dataset>(m, "Dataset")
      .def_readonly("lattice", &h::Dataset::lattice)
      .def_readonly("num_classes", &h::Dataset::num_classes)
      .def_readonly("records", &h::Dataset::records)
      .def("__len__", [](const h::Dataset& d) { return d.records.size(); })
      .def(py::self == py::self);
  m.def("scene_lattice", &h::scene_lattice, py::arg("config"));
  m.def("generate_scene",
        py::overload_cast<const h::SceneConfig&>(&h::generate_scene),
        py::arg("config"));
  m.def("generate_dataset", &h::generate_dataset, py::arg("config"),
        py::arg("num_images"), py::arg("threads") = 1,
        py::call_guard<py::gil_scoped_release>());
  m.def("write_dataset",
        py::overload_cast<const h::Dataset&, const std::filesystem::path&>(
            &h::write_dataset),
        py::arg("dataset"), py::arg("path"));
  m.def("read_dataset",
        py::overload_cast<const std::filesystem::path&>(&h::read_dataset),
        py::arg("path"));

  py::class_<h::FlipHistogram>(m, "FlipHistogram")
      .def_readonly("edges", &h::FlipHistogram::edges)
      .def_readonly("pairs", &h::FlipHistogram::pairs)
      .def_readonly("flips", &h::FlipHistogram::flips)
      .def_readonly("proposal_iou_threshold",
                    &h::FlipHistogram::proposal_iou_threshold)
      .def("fraction", &h::FlipHistogram::fraction)
      .def("__len__", &h::FlipHistogram::bins)
      .def(py::self == py::self);
  m.def("default_flip_edges", &h::default_flip_edges);
  m.def(
      "flip_probability_analysis",
      [](const std::vector<h::ImageRecord>& records,
         const an::AnchorLattice& lattice, std::vector<double> edges,
         double threshold, int top_n, int threads) {
        return h::flip_probability_analysis(records, lattice, std::move(edges),
                                            threshold, top_n, threads);
      },
      py::arg("records"), py::arg("lattice"),
      py::arg("edges") = h::default_flip_edges(),
      py::arg("proposal_iou_threshold") = 0.7, py::arg("top_n") = 12000,
      py::arg("threads") = 1);
  m.def(
      "evaluate_recall",
      [](const std::vector<an::Box>& kept, const std::vector<an::Box>& gt,
         double floor) {
        const h::Recall r = h::evaluate_recall(kept, gt, floor);
        return py::make_tuple(r.value, r.vacuous);
      },
      py::arg("kept"), py::arg("ground_truth"), py::arg("iou_floor") = 0.5,
      "Returns (recall, vacuous).");
  m.def(
      "agreement",
      [](const std::vector<int>& a, const std::vector<int>& b) {
        return h::agreement(a, b);
      },
      py::arg("a"), py::arg("b"));

  // Runs variants and returns the JSON report as a string.
  m.def(
      "run_variants_json",
      [](const h::Dataset& dataset, const std::string& variants,
         const an::NmsConfig& nms, int threads, bool per_image) {
        h::RunOptions options;
        options.nms = nms;
        options.threads = threads;
        options.per_image = per_image;
        const auto v = h::parse_variants(variants);
        h::RunReport report;
        {
          py::gil_scoped_release release;
          report = h::run_variants(dataset, v, options);
        }
        return h::report_to_json(report).dump();
      },
      py::arg("dataset"), py::arg("variants"),
      py::arg("nms") = an::NmsConfig{}, py::arg("threads") = 1,
      py::arg("per_image") = false);

  py::register_exception<h::DatasetError>(m, "DatasetError", PyExc_ValueError);
}
