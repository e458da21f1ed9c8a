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

#ifndef ASAP_NMS_HARNESS_DATASET_HPP_
#define ASAP_NMS_HARNESS_DATASET_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "asap_nms/harness/scene.hpp"

namespace asap_nms::harness {

inline constexpr const char* kDatasetSchema = "asap-nms-dataset";
inline constexpr int kDatasetVersion = 1;

// Malformed or inconsistent dataset input. line() is 1-based, 0 when the
// error is not tied to a line.
class DatasetError : public std::runtime_error {
 public:
  DatasetError(std::size_t line, const std::string& message)
      : std::runtime_error(line == 0 ? message
                                     : "line " + std::to_string(line) + ": " +
                                           message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// JSON Lines. The first line is a header carrying the schema name, version,
// lattice, and class count; every following line is one ImageRecord:
//
//   {"schema":"asap-nms-dataset","version":1,"num_classes":0,
//    "lattice":{"image_width":1280,"image_height":800,"base_stride":16,
//               "templates":[{"width":46,"height":22,"stride":16},...]}}
//   {"image_id":0,
//    "proposals":[{"box":[x1,y1,x2,y2],"score":s,"anchor":[k,i,j]},...],
//    "ground_truth":[[x1,y1,x2,y2],...],
//    "detections":[{"box":[x1,y1,x2,y2],"score":s,"class_id":c},...]}
//
// Doubles are written in shortest round-trip form, so write/read is lossless.
// An empty file reads as an empty dataset.
void write_dataset(const Dataset& dataset, std::ostream& os);
void write_dataset(const Dataset& dataset, const std::filesystem::path& path);

Dataset read_dataset(std::istream& is);
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace asap_nms::harness

#endif  // ASAP_NMS_HARNESS_DATASET_HPP_
