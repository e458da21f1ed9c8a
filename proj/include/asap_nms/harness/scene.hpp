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

#ifndef ASAP_NMS_HARNESS_SCENE_HPP_
#define ASAP_NMS_HARNESS_SCENE_HPP_

#include <cstdint>
#include <vector>

#include "asap_nms/anchor_lattice.hpp"
#include "asap_nms/nms.hpp"
#include "asap_nms/second_stage.hpp"

namespace asap_nms::harness {

// One image: proposals (exactly one per anchor), ground truth, and optional
// stage-2 detections.
struct ImageRecord {
  std::uint64_t image_id = 0;
  std::vector<Proposal> proposals;
  std::vector<Box> ground_truth;
  std::vector<Detection> detections;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

// A set of images sharing one anchor lattice.
struct Dataset {
  AnchorLattice lattice;
  int num_classes = 0;
  std::vector<ImageRecord> records;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Synthetic RPN output model. Every anchor emits one proposal. Anchors whose
// best ground-truth IoU reaches match_floor are regressed toward that object
// by regression_gain (in center and log-size) plus Gaussian noise of
// sigma_center * anchor size and sigma_logsize, and are scored
// IoU + N(0, sigma_score). Other anchors only get the noise and a
// background score around background_score. Scores are clamped to [0, 1].
struct SceneConfig {
  int image_width = 1280;
  int image_height = 800;
  TemplateFamily family;

  int min_objects = 3;
  int max_objects = 15;
  double min_object_size = 32.0;   // sqrt(area), pixels
  double max_object_size = 512.0;
  double max_aspect = 2.0;         // h / w drawn log-uniform in [1/a, a]

  double match_floor = 0.3;
  double regression_gain = 0.1;
  double sigma_center = 0.1;
  double sigma_logsize = 0.1;
  double sigma_score = 0.05;
  double background_score = 0.05;

  // Stage-2 detections; none when num_classes == 0.
  int num_classes = 0;
  int detections_per_object = 8;
  int clutter_detections = 50;

  std::uint64_t seed = 0;

  // Throws std::invalid_argument for unusable parameters.
  void validate() const;
};

AnchorLattice scene_lattice(const SceneConfig& config);

// Deterministic in (config, config.seed).
ImageRecord generate_scene(const SceneConfig& config,
                           const AnchorLattice& lattice);
ImageRecord generate_scene(const SceneConfig& config);

// Image n is generated with seed mix_seed(config.seed + n) and image id n.
Dataset generate_dataset(const SceneConfig& config, int num_images,
                         int threads = 1);

}  // namespace asap_nms::harness

#endif  // ASAP_NMS_HARNESS_SCENE_HPP_
