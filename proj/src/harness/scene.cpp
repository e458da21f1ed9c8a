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

#include "asap_nms/harness/scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "asap_nms/harness/parallel.hpp"
#include "asap_nms/harness/rng.hpp"

namespace asap_nms::harness {
namespace {

void Require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(std::string("SceneConfig: ") + message);
}

std::vector<Box> SampleObjects(const SceneConfig& c, Rng& rng) {
  const auto count = rng.uniform_int(c.min_objects, c.max_objects);
  std::vector<Box> objects;
  objects.reserve(static_cast<std::size_t>(count));
  const double log_aspect = std::log(c.max_aspect);
  for (std::int64_t n = 0; n < count; ++n) {
    const double size = std::exp(
        rng.uniform(std::log(c.min_object_size), std::log(c.max_object_size)));
    const double aspect = std::exp(rng.uniform(-log_aspect, log_aspect));
    const double w = std::min(size / std::sqrt(aspect),
                              static_cast<double>(c.image_width));
    const double h = std::min(size * std::sqrt(aspect),
                              static_cast<double>(c.image_height));
    const double cx = rng.uniform(w / 2, c.image_width - w / 2);
    const double cy = rng.uniform(h / 2, c.image_height - h / 2);
    objects.push_back(Box::FromCenter(cx, cy, w, h));
  }
  return objects;
}

std::vector<Detection> SampleDetections(const SceneConfig& c,
                                        const std::vector<Box>& objects,
                                        Rng& rng) {
  std::vector<Detection> out;
  if (c.num_classes == 0) return out;
  for (const Box& gt : objects) {
    const int cls = static_cast<int>(rng.uniform_int(0, c.num_classes - 1));
    for (int n = 0; n < c.detections_per_object; ++n) {
      const double cx = gt.center_x() + rng.normal(0.0, 0.1 * gt.width());
      const double cy = gt.center_y() + rng.normal(0.0, 0.1 * gt.height());
      const double w = gt.width() * std::exp(rng.normal(0.0, 0.1));
      const double h = gt.height() * std::exp(rng.normal(0.0, 0.1));
      const double score = rng.uniform(0.3, 1.0);
      // Confusable classes: a quarter of the duplicates get a random label.
      const int label = rng.uniform() < 0.25
                            ? static_cast<int>(
                                  rng.uniform_int(0, c.num_classes - 1))
                            : cls;
      out.push_back(Detection{Box::FromCenter(cx, cy, w, h), score, label});
    }
  }
  for (int n = 0; n < c.clutter_detections; ++n) {
    const double size = std::exp(
        rng.uniform(std::log(c.min_object_size), std::log(c.max_object_size)));
    const double cx = rng.uniform(0.0, c.image_width);
    const double cy = rng.uniform(0.0, c.image_height);
    const double score = rng.uniform(0.0, 0.3);
    const int label = static_cast<int>(rng.uniform_int(0, c.num_classes - 1));
    out.push_back(Detection{Box::FromCenter(cx, cy, size, size), score, label});
  }
  return out;
}

}  // namespace

void SceneConfig::validate() const {
  Require(image_width >= 1 && image_height >= 1, "image extent must be >= 1");
  Require(min_objects >= 0 && max_objects >= min_objects,
          "object count range must satisfy 0 <= min <= max");
  Require(min_object_size > 0.0 && max_object_size >= min_object_size,
          "object size range must satisfy 0 < min <= max");
  Require(max_aspect >= 1.0, "max aspect must be >= 1");
  Require(match_floor > 0.0 && match_floor <= 1.0,
          "match floor must be in (0, 1]");
  Require(regression_gain >= 0.0 && regression_gain <= 1.0,
          "regression gain must be in [0, 1]");
  Require(sigma_center >= 0.0 && sigma_logsize >= 0.0 && sigma_score >= 0.0,
          "noise sigmas must be >= 0");
  Require(background_score >= 0.0 && background_score <= 1.0,
          "background score must be in [0, 1]");
  Require(num_classes >= 0, "num_classes must be >= 0");
  Require(detections_per_object >= 0 && clutter_detections >= 0,
          "detection counts must be >= 0");
}

AnchorLattice scene_lattice(const SceneConfig& config) {
  return make_lattice(config.family, config.image_width, config.image_height);
}

ImageRecord generate_scene(const SceneConfig& config,
                           const AnchorLattice& lattice) {
  config.validate();
  Rng object_rng(mix_seed(config.seed));
  Rng noise_rng(mix_seed(config.seed ^ 0x6A09E667F3BCC908ULL));
  Rng detection_rng(mix_seed(config.seed ^ 0xBB67AE8584CAA73BULL));

  ImageRecord record;
  record.image_id = config.seed;
  record.ground_truth = SampleObjects(config, object_rng);
  const auto& objects = record.ground_truth;

  record.proposals.reserve(lattice.anchor_count());
  for (std::size_t a = 0; a < lattice.anchor_count(); ++a) {
    const AnchorId id = lattice.from_linear_index(a);
    const Box anchor = anchor_box(lattice, id);
    const double acx = lattice.center_x(id);
    const double acy = lattice.center_y(id);

    double best = 0.0;
    const Box* target = nullptr;
    for (const Box& gt : objects) {
      const double ov = iou(anchor, gt);
      if (ov > best) {
        best = ov;
        target = &gt;
      }
    }
    const bool matched = target != nullptr && best >= config.match_floor;

    const double aw = lattice.anchor_template(id.template_index).width;
    const double ah = lattice.anchor_template(id.template_index).height;
    double shift_x = 0.0, shift_y = 0.0, log_w = 0.0, log_h = 0.0;
    if (matched) {
      shift_x = config.regression_gain * (target->center_x() - acx);
      shift_y = config.regression_gain * (target->center_y() - acy);
      log_w = config.regression_gain * (std::log(target->width()) - std::log(aw));
      log_h = config.regression_gain * (std::log(target->height()) - std::log(ah));
    }
    // Always draw the same five variates per anchor.
    shift_x += noise_rng.normal(0.0, config.sigma_center * aw);
    shift_y += noise_rng.normal(0.0, config.sigma_center * ah);
    log_w += noise_rng.normal(0.0, config.sigma_logsize);
    log_h += noise_rng.normal(0.0, config.sigma_logsize);
    const double score_noise = noise_rng.normal(0.0, config.sigma_score);

    const double base = matched ? best : config.background_score;
    Proposal p;
    p.box = Box::FromCenter(acx + shift_x, acy + shift_y, aw * std::exp(log_w),
                            ah * std::exp(log_h));
    p.score = std::clamp(base + score_noise, 0.0, 1.0);
    p.anchor = id;
    record.proposals.push_back(p);
  }

  record.detections = SampleDetections(config, objects, detection_rng);
  return record;
}

ImageRecord generate_scene(const SceneConfig& config) {
  return generate_scene(config, scene_lattice(config));
}

Dataset generate_dataset(const SceneConfig& config, int num_images,
                         int threads) {
  config.validate();
  if (num_images < 0) {
    throw std::invalid_argument("generate_dataset: negative image count");
  }
  Dataset dataset{scene_lattice(config), config.num_classes, {}};
  dataset.records.resize(static_cast<std::size_t>(num_images));
  parallel_for(dataset.records.size(), threads, [&](std::size_t n) {
    SceneConfig c = config;
    c.seed = mix_seed(config.seed + n);
    ImageRecord r = generate_scene(c, dataset.lattice);
    r.image_id = n;
    dataset.records[n] = std::move(r);
  });
  return dataset;
}

}  // namespace asap_nms::harness
