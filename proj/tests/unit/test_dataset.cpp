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

#include <sstream>
#include <string>

#include "doctest.h"

namespace asap_nms::harness {
namespace {

Dataset Tiny() {
  SceneConfig c;
  c.image_width = 96;
  c.image_height = 64;
  c.family.scales = {2, 4};
  c.family.strided_largest = true;
  c.num_classes = 3;
  c.seed = 42;
  return generate_dataset(c, 2);
}

std::string Header() {
  std::ostringstream os;
  Dataset d = Tiny();
  d.records.clear();
  write_dataset(d, os);
  return os.str();
}

std::size_t ErrorLine(const std::string& text) {
  std::istringstream is(text);
  try {
    read_dataset(is);
  } catch (const DatasetError& e) {
    return e.line();
  }
  return 0;
}

TEST_CASE("write then read is lossless") {
  const Dataset d = Tiny();
  std::ostringstream os;
  write_dataset(d, os);
  std::istringstream is(os.str());
  const Dataset back = read_dataset(is);
  CHECK(back == d);  // exact doubles
  std::ostringstream again;
  write_dataset(back, again);
  CHECK(again.str() == os.str());
}

TEST_CASE("empty input is an empty dataset") {
  std::istringstream is("");
  const Dataset d = read_dataset(is);
  CHECK(d.records.empty());
}

TEST_CASE("validation errors carry the line number") {
  const std::string header = Header();
  const std::string good =
      R"({"image_id":0,"proposals":[{"box":[0,0,10,10],"score":0.5,"anchor":[0,1,1]}],"ground_truth":[]})";
  {
    std::istringstream is(header + good + "\n");
    CHECK(read_dataset(is).records.size() == 1);
  }
  const std::string missing_anchor =
      R"({"image_id":0,"proposals":[{"box":[0,0,10,10],"score":0.5}],"ground_truth":[]})";
  CHECK(ErrorLine(header + missing_anchor + "\n") == 2);
  try {
    std::istringstream is(header + good + "\n" + missing_anchor + "\n");
    read_dataset(is);
    FAIL("expected DatasetError");
  } catch (const DatasetError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("proposals[0]") != std::string::npos);
    CHECK(std::string(e.what()).find("anchor") != std::string::npos);
  }

  const std::string duplicate =
      R"({"image_id":0,"proposals":[{"box":[0,0,10,10],"score":0.5,"anchor":[0,1,1]},{"box":[0,0,10,10],"score":0.4,"anchor":[0,1,1]}],"ground_truth":[]})";
  CHECK(ErrorLine(header + duplicate + "\n") == 2);

  const std::string off_lattice =
      R"({"image_id":0,"proposals":[{"box":[0,0,10,10],"score":0.5,"anchor":[0,99,1]}],"ground_truth":[]})";
  CHECK(ErrorLine(header + off_lattice + "\n") == 2);

  const std::string bad_box =
      R"({"image_id":0,"proposals":[{"box":[10,0,0,10],"score":0.5,"anchor":[0,1,1]}],"ground_truth":[]})";
  CHECK(ErrorLine(header + bad_box + "\n") == 2);

  const std::string bad_class =
      R"({"image_id":0,"proposals":[],"ground_truth":[],"detections":[{"box":[0,0,1,1],"score":0.5,"class_id":7}]})";
  CHECK(ErrorLine(header + bad_class + "\n") == 2);

  CHECK(ErrorLine(header + "{not json\n") == 2);
  CHECK(ErrorLine(header + good + "\n" + good + "\n") == 3);  // duplicate image id
}

TEST_CASE("schema version mismatch is rejected") {
  std::string header = Header();
  const auto pos = header.find("\"version\":1");
  REQUIRE(pos != std::string::npos);
  header.replace(pos, 11, "\"version\":2");
  CHECK(ErrorLine(header) == 1);
  CHECK(ErrorLine(R"({"schema":"something-else","version":1})" "\n") == 1);
}

}  // namespace
}  // namespace asap_nms::harness
