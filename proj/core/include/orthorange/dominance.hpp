#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "orthorange/geometry.hpp"

namespace orthorange {

// 3D dominance reporting: all points at or below the query corner in every
// coordinate. Balanced tree over z-order with a priority search tree on
// (x, y) per canonical node; a query touches O(log n) nodes and pays
// O(log n + output) in each.
class Dom3 {
 public:
  Dom3() = default;
  explicit Dom3(std::span<const Point3> pts);

  // Ids with p.x <= x, p.y <= y, p.z <= z, sorted ascending.
  std::vector<PointId> report(Coord x, Coord y, Coord z) const;
  // Appends matching ids in traversal order; no duplicates.
  void report_into(Coord x, Coord y, Coord z, std::vector<PointId>& out) const;
  // True iff some point lies at or below the corner; stops at the first hit.
  bool exists(Coord x, Coord y, Coord z) const;

  std::size_t size() const { return pts_.size(); }
  // Points stored across the z-tree nodes; the base list counts once.
  std::size_t stored_points() const { return stored_points_; }
  std::uint64_t node_visits() const { return node_visits_; }

 private:
  static constexpr std::size_t kBlock = 32;
  static constexpr PointId kEmpty = ~PointId{0};

  struct Slot {
    Coord x = 0, y = 0;
    PointId id = kEmpty;
  };
  struct Pst {  // heap-shaped skeleton over one x-sorted slice
    std::size_t slot_off = 0;  // into slots_: block of 2*pbase
    std::size_t x_off = 0;     // into xs_: block of m
    std::uint32_t m = 0;
    std::uint32_t pbase = 0;   // leaf count, power of two
  };

  void build_pst(std::size_t v, std::size_t plo, std::size_t phi);
  void query_pst(const Pst& t, Coord x, Coord y, std::vector<PointId>& out) const;
  bool exists_pst(const Pst& t, Coord x, Coord y) const;
  void scan_xy(std::size_t lo, std::size_t hi, Coord x, Coord y,
               std::vector<PointId>& out) const;

  std::vector<Point3> pts_;  // sorted by (z, id)
  std::size_t blocks_ = 0;
  std::size_t base_ = 1;     // block-tree leaf count, power of two
  std::size_t stored_points_ = 0;
  std::vector<Pst> psts_;    // per heap node; m == 0 where not built
  std::vector<Slot> slots_;
  std::vector<Coord> xs_;
  mutable std::uint64_t node_visits_ = 0;
};

// 4D dominance reporting: balanced tree over the first coordinate whose
// canonical nodes carry Dom3 structures over the last three coordinates.
// A query decomposes the first-coordinate range into O(log n) nodes and
// unions their disjoint Dom3 answers.
class SlowDom4 {
 public:
  SlowDom4() = default;
  explicit SlowDom4(std::span<const Point4> pts);

  // Ids with c0 <= q1, c1 <= q2, c2 <= q3, c3 <= q4, sorted ascending.
  std::vector<PointId> report(Coord q1, Coord q2, Coord q3, Coord q4) const;
  // Two-sided first coordinate: lo1 <= c0 <= hi1, dominance on the rest.
  std::vector<PointId> report_box(Coord lo1, Coord hi1, Coord q2, Coord q3,
                                  Coord q4) const;
  void report_box_into(Coord lo1, Coord hi1, Coord q2, Coord q3, Coord q4,
                       std::vector<PointId>& out) const;

  std::size_t size() const { return pts_.size(); }
  // Sum of per-node Dom3 input sizes plus the base list; the structural
  // bound is n * (ceil(log2 n) + 1).
  std::size_t stored_points() const { return stored_points_; }
  std::uint64_t node_visits() const { return node_visits_; }

 private:
  static constexpr std::size_t kBlock = 64;

  void scan_rest(std::size_t lo, std::size_t hi, Coord q2, Coord q3, Coord q4,
                 std::vector<PointId>& out) const;

  std::vector<Point4> pts_;  // sorted by (c0, id)
  std::size_t blocks_ = 0;
  std::size_t base_ = 1;
  std::size_t stored_points_ = 0;
  std::vector<Dom3> nodes_;  // per heap node; empty where not built
  mutable std::uint64_t node_visits_ = 0;
};

// First point of the span lying inside the box, if any. Scan-based by
// design: it runs over small per-cutting apex lists during pointer
// construction, where the span order makes the answer deterministic.
std::optional<PointId> one_report(std::span<const Point4> pts, const RankBox& box);

}  // namespace orthorange
