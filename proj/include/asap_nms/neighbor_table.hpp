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

#ifndef ASAP_NMS_NEIGHBOR_TABLE_HPP_
#define ASAP_NMS_NEIGHBOR_TABLE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "asap_nms/anchor_lattice.hpp"

namespace asap_nms {

// Sound box on the displacement between two anchor centers: outside it the
// anchor IoU is below gamma.
struct DisplacementBound {
  double dx = 0.0;
  double dy = 0.0;
};

// Support bound ((w^k + w^l) / 2, (h^k + h^l) / 2). Exact IoU is evaluated
// inside it, so tightness only affects build time.
// Throws std::invalid_argument unless 0 < gamma <= 1.
DisplacementBound displacement_bound(const AnchorTemplate& tk,
                                     const AnchorTemplate& tl, double gamma);

// One neighbor of a template-k anchor among template-l anchors: lattice cell
// offset relative to the base cell of the phase class, and the resulting
// center displacement in pixels.
struct NeighborOffset {
  int di = 0;
  int dj = 0;
  double dx = 0.0;
  double dy = 0.0;
  double anchor_iou = 0.0;

  friend bool operator==(const NeighborOffset&, const NeighborOffset&) = default;
};

// Precomputed anchor neighborhood table for a fixed gamma.
//
// For a template-k anchor at cell (i, j) and target template l, let
// m = s_l / gcd(s_k, s_l). The candidates are template-l cells
// (floor(i * s_k / s_l) + di, floor(j * s_k / s_l) + dj) for every stored
// offset of phase class (i mod m, j mod m). With uniform strides m = 1.
//
// The table depends only on templates and strides, never on the image size.
// A table in compare-all mode (gamma = 0) stores nothing; callers compare
// against every candidate instead.
class NeighborTable {
 public:
  // Throws std::invalid_argument unless 0 < gamma <= 1.
  static NeighborTable Build(const AnchorLattice& lattice, double gamma);
  static NeighborTable CompareAll(const AnchorLattice& lattice);

  double gamma() const { return gamma_; }
  bool compare_all() const { return compare_all_; }
  int num_templates() const { return static_cast<int>(templates_.size()); }
  int base_stride() const { return base_stride_; }
  std::span<const AnchorTemplate> templates() const { return templates_; }

  // Same templates, strides, and base stride.
  bool compatible_with(const AnchorLattice& lattice) const;

  int period(int k, int l) const { return pair(k, l).period; }

  std::span<const NeighborOffset> offsets(int k, int l, int phase_x,
                                          int phase_y) const {
    const PairEntry& e = pair(k, l);
    return e.phases[static_cast<std::size_t>(phase_y * e.period + phase_x)];
  }

  // Total stored offsets over all pairs and phase classes.
  std::size_t size() const;

  friend bool operator==(const NeighborTable&, const NeighborTable&) = default;

 private:
  struct PairEntry {
    int period = 1;
    std::vector<std::vector<NeighborOffset>> phases;
    friend bool operator==(const PairEntry&, const PairEntry&) = default;
  };

  NeighborTable() = default;

  const PairEntry& pair(int k, int l) const {
    return entries_[static_cast<std::size_t>(k) * templates_.size() +
                    static_cast<std::size_t>(l)];
  }

  double gamma_ = 0.0;
  bool compare_all_ = false;
  int base_stride_ = 1;
  std::vector<AnchorTemplate> templates_;
  std::vector<PairEntry> entries_;  // K * K, row-major in (k, l)

  friend std::optional<NeighborTable> read_table_cache(
      const std::filesystem::path&, const AnchorLattice&, double);
};

inline NeighborTable build_table(const AnchorLattice& lattice, double gamma) {
  return NeighborTable::Build(lattice, gamma);
}

// Visits every in-image anchor whose anchor IoU with `id` is >= gamma
// (excluding `id` itself). Offsets landing outside the lattice are skipped.
// Not valid for compare-all tables.
template <typename Visitor>
void for_each_neighbor(const NeighborTable& table, const AnchorLattice& lattice,
                       const AnchorId& id, Visitor&& visit) {
  const int k = id.template_index;
  const int sk = lattice.anchor_template(k).stride;
  for (int l = 0; l < table.num_templates(); ++l) {
    const int sl = lattice.anchor_template(l).stride;
    const int m = table.period(k, l);
    const int base_i = (id.i * sk) / sl;
    const int base_j = (id.j * sk) / sl;
    const int cols = lattice.columns(l);
    const int rows = lattice.rows(l);
    for (const NeighborOffset& off : table.offsets(k, l, id.i % m, id.j % m)) {
      const int ni = base_i + off.di;
      const int nj = base_j + off.dj;
      if (ni < 0 || nj < 0 || ni >= cols || nj >= rows) continue;
      visit(AnchorId{l, ni, nj});
    }
  }
}

// Throws std::out_of_range for an invalid id, std::invalid_argument when the
// table was built for a different lattice or is in compare-all mode.
std::vector<AnchorId> neighbors_of(const NeighborTable& table,
                                   const AnchorLattice& lattice,
                                   const AnchorId& id);

// Per-anchor neighbor counts for one template, over its phase classes,
// ignoring image borders.
struct TemplateNeighborStats {
  std::size_t min = 0;
  std::size_t max = 0;
  double mean = 0.0;
};

std::vector<TemplateNeighborStats> table_stats(const NeighborTable& table);

// Binary cache keyed by (templates, strides, gamma). Host byte order.
void write_table_cache(const NeighborTable& table,
                       const std::filesystem::path& path);

// nullopt when the file is missing or was built for another configuration.
// Throws std::runtime_error on a truncated or corrupt file.
std::optional<NeighborTable> read_table_cache(const std::filesystem::path& path,
                                              const AnchorLattice& lattice,
                                              double gamma);

// Reads the cache when it matches, otherwise builds and (re)writes it.
NeighborTable load_or_build_table(const AnchorLattice& lattice, double gamma,
                                  const std::optional<std::filesystem::path>&
                                      cache_path = std::nullopt);

std::uint64_t table_key(const AnchorLattice& lattice, double gamma);

}  // namespace asap_nms

#endif  // ASAP_NMS_NEIGHBOR_TABLE_HPP_
