#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "orthorange/geometry.hpp"

namespace orthorange {

// Locates some cell of one shallow cutting containing a 3D query point.
// Layered-staircase layout: apexes sorted by z descending; a segment tree over
// that order stores per node the Pareto maxima of its apexes in (x, y). A query
// binary-searches z for the eligible prefix, then searches the staircases of
// the prefix's canonical nodes.
class FindAnyIndex {
 public:
  FindAnyIndex() = default;
  explicit FindAnyIndex(std::span<const Point3> apexes);

  // Cell id (the apex's id field) of some cell with apex >= (x, y, z)
  // componentwise, or nullopt. Deterministic; on equal-apex ties the lowest id
  // wins.
  std::optional<PointId> find(Coord x, Coord y, Coord z) const;

  std::size_t cell_count() const { return zs_.size(); }
  std::size_t size_entries() const { return entries_; }
  std::uint64_t comparisons() const { return comparisons_; }

 private:
  struct Entry {
    Coord x, y;
    PointId id;
  };
  std::vector<Coord> zs_;                   // apex z per position, descending
  std::vector<std::vector<Entry>> nodes_;   // staircases, x ascending / y descending
  std::size_t base_ = 1;
  std::size_t entries_ = 0;
  mutable std::uint64_t comparisons_ = 0;
};

}  // namespace orthorange
