#pragma once

// Dyadic lattice partitions of a periodic box [0,L)^d: cells, refinement,
// point location, and the volume-weighted coarse-graining projection.
//
// Conventions: cells at level l are half-open dyadic boxes (lower faces
// inclusive) with side L/2^l; a field assigns one value per cell, stored
// row-major with axis 0 slowest.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "wicklab/exact.hpp"

namespace wicklab {

struct Domain {
  int dim = 1;
  Rat side = Rat(1);

  bool operator==(const Domain&) const = default;
};

inline void validate_domain(const Domain& d) {
  if (d.dim < 1) throw std::invalid_argument("Domain: dim must be >= 1");
  if (d.side <= 0) throw std::invalid_argument("Domain: side_length must be > 0");
}

struct Cell {
  int level = 0;
  std::vector<std::int64_t> coords;

  bool operator==(const Cell&) const = default;
};

struct Partition {
  Domain domain;
  int level = 0;

  std::int64_t cells_per_axis() const { return std::int64_t(1) << level; }
  std::int64_t cell_count() const {
    std::int64_t n = 1;
    for (int a = 0; a < domain.dim; ++a) n *= cells_per_axis();
    return n;
  }

  bool operator==(const Partition&) const = default;
};

inline Rat cell_volume(const Domain& d, int level) {
  return rat_pow(d.side / rat_pow(Rat(2), level), d.dim);
}

inline Partition make_partition(const Domain& domain, int level) {
  validate_domain(domain);
  if (level < 0) throw std::invalid_argument("make_partition: level must be >= 0");
  if (level * domain.dim > 24)
    throw std::invalid_argument("make_partition: 2^(level*dim) cells exceed the memory budget");
  return Partition{domain, level};
}

inline std::int64_t cell_index(const Partition& p, const Cell& c) {
  if (c.level != p.level || static_cast<int>(c.coords.size()) != p.domain.dim)
    throw std::invalid_argument("cell_index: cell does not belong to partition");
  std::int64_t idx = 0;
  const std::int64_t n = p.cells_per_axis();
  for (int a = 0; a < p.domain.dim; ++a) {
    std::int64_t x = c.coords[static_cast<std::size_t>(a)];
    if (x < 0 || x >= n) throw std::invalid_argument("cell_index: coordinate out of range");
    idx = idx * n + x;
  }
  return idx;
}

inline Cell cell_at(const Partition& p, std::int64_t index) {
  if (index < 0 || index >= p.cell_count())
    throw std::invalid_argument("cell_at: index out of range");
  Cell c{p.level, std::vector<std::int64_t>(static_cast<std::size_t>(p.domain.dim), 0)};
  const std::int64_t n = p.cells_per_axis();
  for (int a = p.domain.dim - 1; a >= 0; --a) {
    c.coords[static_cast<std::size_t>(a)] = index % n;
    index /= n;
  }
  return c;
}

// The level-l ancestor of a finer cell.
inline Cell ancestor(const Cell& c, int level) {
  if (level > c.level) throw std::invalid_argument("ancestor: level must be <= cell level");
  Cell out{level, c.coords};
  for (auto& x : out.coords) x >>= (c.level - level);
  return out;
}

inline bool is_ancestor(const Cell& coarse, const Cell& fine) {
  if (coarse.level > fine.level || coarse.coords.size() != fine.coords.size()) return false;
  return ancestor(fine, coarse.level) == coarse;
}

// All level-l descendants of a cell, in row-major order. l = p.level gives {p}.
inline std::vector<Cell> children(const Domain& domain, const Cell& p, int level) {
  validate_domain(domain);
  if (level < p.level) throw std::invalid_argument("children: target level above cell level");
  const int shift = level - p.level;
  const std::int64_t per_axis = std::int64_t(1) << shift;
  std::int64_t total = 1;
  for (int a = 0; a < domain.dim; ++a) total *= per_axis;
  std::vector<Cell> out;
  out.reserve(static_cast<std::size_t>(total));
  for (std::int64_t k = 0; k < total; ++k) {
    Cell c{level, std::vector<std::int64_t>(p.coords.size())};
    std::int64_t rem = k;
    for (int a = domain.dim - 1; a >= 0; --a) {
      c.coords[static_cast<std::size_t>(a)] =
          (p.coords[static_cast<std::size_t>(a)] << shift) + rem % per_axis;
      rem /= per_axis;
    }
    out.push_back(std::move(c));
  }
  return out;
}

// Locates the unique half-open cell containing a point of [0,L)^d.
inline Cell cell_of(const Domain& domain, const std::vector<Rat>& point, int level) {
  validate_domain(domain);
  if (static_cast<int>(point.size()) != domain.dim)
    throw std::invalid_argument("cell_of: point dimension mismatch");
  const std::int64_t n = std::int64_t(1) << level;
  Cell c{level, std::vector<std::int64_t>(point.size())};
  for (std::size_t a = 0; a < point.size(); ++a) {
    if (point[a] < 0 || point[a] >= domain.side)
      throw std::invalid_argument("cell_of: point outside [0,L)^d");
    // coord = floor(point * 2^level / L); floor is exact in rational arithmetic.
    Rat scaled = point[a] * Rat(n) / domain.side;
    Int q = scaled.get_num() / scaled.get_den();  // truncation == floor for nonneg values
    c.coords[a] = static_cast<std::int64_t>(q.get_si());
  }
  return c;
}

inline Cell cell_of(const Domain& domain, const std::vector<Rat>& point, const Partition& p) {
  return cell_of(domain, point, p.level);
}

// ---------------------------------------------------------------------------
// Fields
// ---------------------------------------------------------------------------

template <class T>
struct Field {
  Partition partition;
  std::vector<T> values;  // one per cell, row-major

  const T& at(const Cell& c) const {
    return values.at(static_cast<std::size_t>(cell_index(partition, c)));
  }
  T& at(const Cell& c) {
    return values.at(static_cast<std::size_t>(cell_index(partition, c)));
  }
};

template <class T>
Field<T> make_field(const Partition& p, T fill = T(0)) {
  return Field<T>{p, std::vector<T>(static_cast<std::size_t>(p.cell_count()), fill)};
}

// Volume-weighted mean, the elementary step of the coarse-graining projection.
// Exposed separately so mixed-volume trees can reuse it.
template <class T>
T volume_weighted_mean(std::span<const T> values, std::span<const Rat> volumes) {
  if (values.size() != volumes.size() || values.empty())
    throw std::invalid_argument("volume_weighted_mean: size mismatch");
  T acc = T(0);
  Rat total(0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc += values[i] * to_scalar<T>(volumes[i]);
    total += volumes[i];
  }
  return acc * to_scalar<T>(Rat(1) / total);
}

// (pi_PQ x)_p = (1/|p|) sum_{q <= p} |q| x_q. On an equal-volume dyadic
// partition this is the plain average over 2^((l'-l)d) children.
template <class T>
Field<T> coarsen_field(const Field<T>& x, int target_level) {
  const Partition& src = x.partition;
  if (target_level > src.level)
    throw std::invalid_argument("coarsen_field: target level must be <= source level");
  Partition dst = make_partition(src.domain, target_level);
  Field<T> out = make_field<T>(dst);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(dst.cell_count()), 0);
  for (std::int64_t i = 0; i < src.cell_count(); ++i) {
    Cell fine = cell_at(src, i);
    std::int64_t j = cell_index(dst, ancestor(fine, target_level));
    out.values[static_cast<std::size_t>(j)] += x.values[static_cast<std::size_t>(i)];
    ++counts[static_cast<std::size_t>(j)];
  }
  for (std::size_t j = 0; j < out.values.size(); ++j)
    out.values[j] = out.values[j] * to_scalar<T>(Rat(1) / Rat(static_cast<long>(counts[j])));
  return out;
}

}  // namespace wicklab
