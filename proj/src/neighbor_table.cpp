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

#include "asap_nms/neighbor_table.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

namespace asap_nms {
namespace {

constexpr char kCacheMagic[8] = {'A', 'S', 'A', 'P', 'N', 'T', 'B', 'L'};
constexpr std::uint32_t kCacheVersion = 1;

void CheckGamma(double gamma) {
  if (!(gamma > 0.0) || !(gamma <= 1.0)) {
    throw std::invalid_argument(
        "neighbor table: gamma must be in (0, 1], got " +
        std::to_string(gamma));
  }
}

class Fnv1a {
 public:
  void add(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash_ ^= p[i];
      hash_ *= 1099511628211ULL;
    }
  }
  template <typename T>
  void add(T value) {
    add(&value, sizeof(value));
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 14695981039346656037ULL;
};

class Writer {
 public:
  explicit Writer(std::ofstream& os) : os_(os) {}
  template <typename T>
  void put(T value) {
    os_.write(reinterpret_cast<const char*>(&value), sizeof(value));
  }

 private:
  std::ofstream& os_;
};

class Reader {
 public:
  explicit Reader(std::ifstream& is) : is_(is) {}
  template <typename T>
  T get() {
    T value{};
    is_.read(reinterpret_cast<char*>(&value), sizeof(value));
    if (!is_) throw std::runtime_error("neighbor table cache: truncated file");
    return value;
  }

 private:
  std::ifstream& is_;
};

}  // namespace

DisplacementBound displacement_bound(const AnchorTemplate& tk,
                                     const AnchorTemplate& tl, double gamma) {
  CheckGamma(gamma);
  return DisplacementBound{(tk.width + tl.width) / 2,
                           (tk.height + tl.height) / 2};
}

NeighborTable NeighborTable::Build(const AnchorLattice& lattice,
                                   double gamma) {
  CheckGamma(gamma);
  NeighborTable table;
  table.gamma_ = gamma;
  table.base_stride_ = lattice.base_stride();
  table.templates_.assign(lattice.templates().begin(),
                          lattice.templates().end());
  const int num = lattice.num_templates();
  table.entries_.resize(static_cast<std::size_t>(num) *
                        static_cast<std::size_t>(num));

  for (int k = 0; k < num; ++k) {
    const AnchorTemplate& tk = lattice.anchor_template(k);
    for (int l = 0; l < num; ++l) {
      const AnchorTemplate& tl = lattice.anchor_template(l);
      const DisplacementBound bound = displacement_bound(tk, tl, gamma);
      PairEntry& entry = table.entries_[static_cast<std::size_t>(k * num + l)];
      entry.period = tl.stride / std::gcd(tk.stride, tl.stride);
      entry.phases.resize(static_cast<std::size_t>(entry.period) *
                          static_cast<std::size_t>(entry.period));
      const double sl = tl.stride;

      for (int py = 0; py < entry.period; ++py) {
        for (int px = 0; px < entry.period; ++px) {
          const double cx = (px + 0.5) * tk.stride;
          const double cy = (py + 0.5) * tk.stride;
          const int base_i = (px * tk.stride) / tl.stride;
          const int base_j = (py * tk.stride) / tl.stride;
          const int di_lo =
              static_cast<int>(std::floor((cx - bound.dx) / sl - 0.5)) -
              base_i - 1;
          const int di_hi =
              static_cast<int>(std::ceil((cx + bound.dx) / sl - 0.5)) -
              base_i + 1;
          const int dj_lo =
              static_cast<int>(std::floor((cy - bound.dy) / sl - 0.5)) -
              base_j - 1;
          const int dj_hi =
              static_cast<int>(std::ceil((cy + bound.dy) / sl - 0.5)) -
              base_j + 1;

          auto& list = entry.phases[static_cast<std::size_t>(
              py * entry.period + px)];
          for (int dj = dj_lo; dj <= dj_hi; ++dj) {
            const double dy = (base_j + dj + 0.5) * sl - cy;
            if (std::abs(dy) > bound.dy) continue;
            for (int di = di_lo; di <= di_hi; ++di) {
              const double dx = (base_i + di + 0.5) * sl - cx;
              if (std::abs(dx) > bound.dx) continue;
              if (k == l && dx == 0.0 && dy == 0.0) continue;
              const double overlap = anchor_iou(tk, tl, dx, dy);
              if (overlap >= gamma) {
                list.push_back(NeighborOffset{di, dj, dx, dy, overlap});
              }
            }
          }
        }
      }
    }
  }
  return table;
}

NeighborTable NeighborTable::CompareAll(const AnchorLattice& lattice) {
  NeighborTable table;
  table.gamma_ = 0.0;
  table.compare_all_ = true;
  table.base_stride_ = lattice.base_stride();
  table.templates_.assign(lattice.templates().begin(),
                          lattice.templates().end());
  return table;
}

bool NeighborTable::compatible_with(const AnchorLattice& lattice) const {
  return base_stride_ == lattice.base_stride() &&
         std::equal(templates_.begin(), templates_.end(),
                    lattice.templates().begin(), lattice.templates().end());
}

std::size_t NeighborTable::size() const {
  std::size_t total = 0;
  for (const PairEntry& e : entries_) {
    for (const auto& phase : e.phases) total += phase.size();
  }
  return total;
}

std::vector<AnchorId> neighbors_of(const NeighborTable& table,
                                   const AnchorLattice& lattice,
                                   const AnchorId& id) {
  if (!lattice.contains(id)) {
    throw std::out_of_range("neighbors_of: anchor id is not on the lattice");
  }
  if (table.compare_all() || !table.compatible_with(lattice)) {
    throw std::invalid_argument(
        "neighbors_of: table is in compare-all mode or was built for another "
        "lattice");
  }
  std::vector<AnchorId> out;
  for_each_neighbor(table, lattice, id,
                    [&](const AnchorId& n) { out.push_back(n); });
  return out;
}

std::vector<TemplateNeighborStats> table_stats(const NeighborTable& table) {
  const int num = table.num_templates();
  std::vector<TemplateNeighborStats> out(static_cast<std::size_t>(num));
  if (table.compare_all()) return out;
  for (int k = 0; k < num; ++k) {
    int period = 1;
    for (int l = 0; l < num; ++l) period = std::lcm(period, table.period(k, l));
    TemplateNeighborStats& st = out[static_cast<std::size_t>(k)];
    st.min = static_cast<std::size_t>(-1);
    double sum = 0.0;
    for (int y = 0; y < period; ++y) {
      for (int x = 0; x < period; ++x) {
        std::size_t count = 0;
        for (int l = 0; l < num; ++l) {
          const int m = table.period(k, l);
          count += table.offsets(k, l, x % m, y % m).size();
        }
        st.min = std::min(st.min, count);
        st.max = std::max(st.max, count);
        sum += static_cast<double>(count);
      }
    }
    st.mean = sum / (static_cast<double>(period) * period);
  }
  return out;
}

std::uint64_t table_key(const AnchorLattice& lattice, double gamma) {
  Fnv1a h;
  h.add(kCacheVersion);
  h.add(static_cast<std::int32_t>(lattice.base_stride()));
  h.add(std::bit_cast<std::uint64_t>(gamma));
  for (const AnchorTemplate& t : lattice.templates()) {
    h.add(std::bit_cast<std::uint64_t>(t.width));
    h.add(std::bit_cast<std::uint64_t>(t.height));
    h.add(static_cast<std::int32_t>(t.stride));
  }
  return h.value();
}

void write_table_cache(const NeighborTable& table,
                       const std::filesystem::path& path) {
  if (table.compare_all()) {
    throw std::invalid_argument("write_table_cache: compare-all table");
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw std::runtime_error("write_table_cache: cannot open " +
                             path.string());
  }
  const AnchorLattice probe(
      std::vector<AnchorTemplate>(table.templates().begin(),
                                  table.templates().end()),
      table.base_stride(), 1, 1);
  Writer w(os);
  os.write(kCacheMagic, sizeof(kCacheMagic));
  w.put(kCacheVersion);
  w.put(table_key(probe, table.gamma()));
  w.put(table.gamma());
  w.put(static_cast<std::int32_t>(table.base_stride()));
  w.put(static_cast<std::uint32_t>(table.num_templates()));
  for (const AnchorTemplate& t : table.templates()) {
    w.put(t.width);
    w.put(t.height);
    w.put(static_cast<std::int32_t>(t.stride));
  }
  for (int k = 0; k < table.num_templates(); ++k) {
    for (int l = 0; l < table.num_templates(); ++l) {
      const int m = table.period(k, l);
      w.put(static_cast<std::int32_t>(m));
      for (int py = 0; py < m; ++py) {
        for (int px = 0; px < m; ++px) {
          const auto list = table.offsets(k, l, px, py);
          w.put(static_cast<std::uint32_t>(list.size()));
          for (const NeighborOffset& o : list) {
            w.put(static_cast<std::int32_t>(o.di));
            w.put(static_cast<std::int32_t>(o.dj));
            w.put(o.dx);
            w.put(o.dy);
            w.put(o.anchor_iou);
          }
        }
      }
    }
  }
  if (!os) {
    throw std::runtime_error("write_table_cache: write failed for " +
                             path.string());
  }
}

std::optional<NeighborTable> read_table_cache(const std::filesystem::path& path,
                                              const AnchorLattice& lattice,
                                              double gamma) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  char magic[sizeof(kCacheMagic)] = {};
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("neighbor table cache: bad magic in " +
                             path.string());
  }
  Reader r(is);
  if (r.get<std::uint32_t>() != kCacheVersion) return std::nullopt;
  if (r.get<std::uint64_t>() != table_key(lattice, gamma)) return std::nullopt;

  NeighborTable table;
  table.gamma_ = r.get<double>();
  table.base_stride_ = r.get<std::int32_t>();
  const auto num = r.get<std::uint32_t>();
  for (std::uint32_t k = 0; k < num; ++k) {
    AnchorTemplate t;
    t.width = r.get<double>();
    t.height = r.get<double>();
    t.stride = r.get<std::int32_t>();
    table.templates_.push_back(t);
  }
  // The key is a hash; confirm the configuration itself.
  if (table.gamma_ != gamma || !table.compatible_with(lattice)) {
    return std::nullopt;
  }
  table.entries_.resize(static_cast<std::size_t>(num) * num);
  for (auto& entry : table.entries_) {
    entry.period = r.get<std::int32_t>();
    if (entry.period < 1 || entry.period > 1024) {
      throw std::runtime_error("neighbor table cache: corrupt period");
    }
    entry.phases.resize(static_cast<std::size_t>(entry.period) *
                        static_cast<std::size_t>(entry.period));
    for (auto& list : entry.phases) {
      const auto count = r.get<std::uint32_t>();
      list.reserve(count);
      for (std::uint32_t n = 0; n < count; ++n) {
        NeighborOffset o;
        o.di = r.get<std::int32_t>();
        o.dj = r.get<std::int32_t>();
        o.dx = r.get<double>();
        o.dy = r.get<double>();
        o.anchor_iou = r.get<double>();
        list.push_back(o);
      }
    }
  }
  return table;
}

NeighborTable load_or_build_table(
    const AnchorLattice& lattice, double gamma,
    const std::optional<std::filesystem::path>& cache_path) {
  if (cache_path) {
    if (auto cached = read_table_cache(*cache_path, lattice, gamma)) {
      return std::move(*cached);
    }
  }
  NeighborTable table = NeighborTable::Build(lattice, gamma);
  if (cache_path) write_table_cache(table, *cache_path);
  return table;
}

}  // namespace asap_nms
