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

#include "asap_nms/harness/dataset.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string>

#include "json.hpp"

namespace asap_nms::harness {
namespace {

using nlohmann::json;

json BoxToJson(const Box& b) { return json::array({b.x1, b.y1, b.x2, b.y2}); }

json LatticeToJson(const AnchorLattice& lattice) {
  json templates = json::array();
  for (const AnchorTemplate& t : lattice.templates()) {
    templates.push_back(
        {{"width", t.width}, {"height", t.height}, {"stride", t.stride}});
  }
  return {{"image_width", lattice.image_width()},
          {"image_height", lattice.image_height()},
          {"base_stride", lattice.base_stride()},
          {"templates", std::move(templates)}};
}

json RecordToJson(const ImageRecord& r) {
  json proposals = json::array();
  for (const Proposal& p : r.proposals) {
    proposals.push_back(
        {{"box", BoxToJson(p.box)},
         {"score", p.score},
         {"anchor", json::array({p.anchor.template_index, p.anchor.i,
                                 p.anchor.j})}});
  }
  json gt = json::array();
  for (const Box& b : r.ground_truth) gt.push_back(BoxToJson(b));
  json out = {{"image_id", r.image_id},
              {"proposals", std::move(proposals)},
              {"ground_truth", std::move(gt)}};
  if (!r.detections.empty()) {
    json dets = json::array();
    for (const Detection& d : r.detections) {
      dets.push_back({{"box", BoxToJson(d.box)},
                      {"score", d.score},
                      {"class_id", d.class_id}});
    }
    out["detections"] = std::move(dets);
  }
  return out;
}

// Field access with position-aware errors.
class Parser {
 public:
  explicit Parser(std::size_t line) : line_(line) {}

  [[noreturn]] void fail(const std::string& where,
                         const std::string& what) const {
    throw DatasetError(line_, where + ": " + what);
  }

  const json& field(const json& obj, const char* key,
                    const std::string& where) const {
    if (!obj.is_object()) fail(where, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(where, std::string("missing field '") + key + "'");
    return *it;
  }

  double number(const json& v, const std::string& where) const {
    if (!v.is_number()) fail(where, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(where, "expected a finite number");
    return d;
  }

  std::int64_t integer(const json& v, const std::string& where) const {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    return v.get<std::int64_t>();
  }

  Box box(const json& v, const std::string& where) const {
    if (!v.is_array() || v.size() != 4) {
      fail(where, "expected [x1, y1, x2, y2]");
    }
    const double x1 = number(v[0], where), y1 = number(v[1], where);
    const double x2 = number(v[2], where), y2 = number(v[3], where);
    if (x2 < x1 || y2 < y1) fail(where, "box has negative extent");
    return Box(x1, y1, x2, y2);
  }

  int int32(const json& v, const std::string& where) const {
    const auto i = integer(v, where);
    if (i < INT32_MIN || i > INT32_MAX) fail(where, "integer out of range");
    return static_cast<int>(i);
  }

 private:
  std::size_t line_;
};

AnchorLattice LatticeFromJson(const json& j, const Parser& p) {
  const std::string w = "lattice";
  std::vector<AnchorTemplate> templates;
  const json& ts = p.field(j, "templates", w);
  if (!ts.is_array()) p.fail(w + ".templates", "expected an array");
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const std::string where = w + ".templates[" + std::to_string(k) + "]";
    templates.push_back(
        AnchorTemplate{p.number(p.field(ts[k], "width", where), where),
                       p.number(p.field(ts[k], "height", where), where),
                       p.int32(p.field(ts[k], "stride", where), where)});
  }
  try {
    return AnchorLattice(std::move(templates),
                         p.int32(p.field(j, "base_stride", w), w),
                         p.int32(p.field(j, "image_width", w), w),
                         p.int32(p.field(j, "image_height", w), w));
  } catch (const std::invalid_argument& e) {
    p.fail(w, e.what());
  }
}

ImageRecord RecordFromJson(const json& j, const AnchorLattice& lattice,
                           int num_classes, const Parser& p) {
  ImageRecord r;
  const json& id = p.field(j, "image_id", "record");
  if (!id.is_number_unsigned() && !(id.is_number_integer() &&
                                    id.get<std::int64_t>() >= 0)) {
    p.fail("image_id", "expected a non-negative integer");
  }
  r.image_id = id.get<std::uint64_t>();

  const json& props = p.field(j, "proposals", "record");
  if (!props.is_array()) p.fail("proposals", "expected an array");
  r.proposals.reserve(props.size());
  std::vector<char> seen(lattice.anchor_count(), 0);
  for (std::size_t n = 0; n < props.size(); ++n) {
    const std::string where = "proposals[" + std::to_string(n) + "]";
    const json& pj = props[n];
    Proposal prop;
    prop.box = p.box(p.field(pj, "box", where), where + ".box");
    prop.score = p.number(p.field(pj, "score", where), where + ".score");
    const json& a = p.field(pj, "anchor", where);
    if (!a.is_array() || a.size() != 3) {
      p.fail(where + ".anchor", "expected [template, i, j]");
    }
    prop.anchor = AnchorId{p.int32(a[0], where + ".anchor"),
                           p.int32(a[1], where + ".anchor"),
                           p.int32(a[2], where + ".anchor")};
    if (!lattice.contains(prop.anchor)) {
      p.fail(where + ".anchor", "anchor id is not on the lattice");
    }
    char& s = seen[lattice.linear_index(prop.anchor)];
    if (s) p.fail(where + ".anchor", "duplicate anchor id within the image");
    s = 1;
    r.proposals.push_back(prop);
  }

  const json& gt = p.field(j, "ground_truth", "record");
  if (!gt.is_array()) p.fail("ground_truth", "expected an array");
  for (std::size_t n = 0; n < gt.size(); ++n) {
    r.ground_truth.push_back(
        p.box(gt[n], "ground_truth[" + std::to_string(n) + "]"));
  }

  if (const auto it = j.find("detections"); it != j.end()) {
    if (!it->is_array()) p.fail("detections", "expected an array");
    for (std::size_t n = 0; n < it->size(); ++n) {
      const std::string where = "detections[" + std::to_string(n) + "]";
      const json& dj = (*it)[n];
      Detection d;
      d.box = p.box(p.field(dj, "box", where), where + ".box");
      d.score = p.number(p.field(dj, "score", where), where + ".score");
      d.class_id = p.int32(p.field(dj, "class_id", where), where + ".class_id");
      if (d.class_id < 0 || d.class_id >= num_classes) {
        p.fail(where + ".class_id", "class id outside [0, num_classes)");
      }
      r.detections.push_back(d);
    }
  }
  return r;
}

}  // namespace

void write_dataset(const Dataset& dataset, std::ostream& os) {
  const json header = {{"schema", kDatasetSchema},
                       {"version", kDatasetVersion},
                       {"num_classes", dataset.num_classes},
                       {"lattice", LatticeToJson(dataset.lattice)}};
  os << header.dump() << '\n';
  for (const ImageRecord& r : dataset.records) {
    os << RecordToJson(r).dump() << '\n';
  }
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DatasetError(0, "cannot open " + path.string() + " for writing");
  write_dataset(dataset, os);
  if (!os) throw DatasetError(0, "write failed for " + path.string());
}

Dataset read_dataset(std::istream& is) {
  Dataset dataset;
  std::string text;
  std::size_t line = 0;
  bool have_header = false;
  std::set<std::uint64_t> ids;
  while (std::getline(is, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Parser p(line);
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw DatasetError(line, std::string("malformed JSON: ") + e.what());
    }
    if (!have_header) {
      const json& schema = p.field(j, "schema", "header");
      if (!schema.is_string() || schema.get<std::string>() != kDatasetSchema) {
        p.fail("header.schema", "expected \"" + std::string(kDatasetSchema) + "\"");
      }
      const auto version = p.integer(p.field(j, "version", "header"), "header.version");
      if (version != kDatasetVersion) {
        p.fail("header.version",
               "unsupported schema version " + std::to_string(version) +
                   " (expected " + std::to_string(kDatasetVersion) + ")");
      }
      dataset.lattice = LatticeFromJson(p.field(j, "lattice", "header"), p);
      dataset.num_classes =
          p.int32(p.field(j, "num_classes", "header"), "header.num_classes");
      if (dataset.num_classes < 0) p.fail("header.num_classes", "must be >= 0");
      have_header = true;
      continue;
    }
    ImageRecord r = RecordFromJson(j, dataset.lattice, dataset.num_classes, p);
    if (!ids.insert(r.image_id).second) {
      p.fail("image_id", "duplicate image id " + std::to_string(r.image_id));
    }
    dataset.records.push_back(std::move(r));
  }
  return dataset;
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DatasetError(0, "cannot open " + path.string());
  return read_dataset(is);
}

}  // namespace asap_nms::harness
