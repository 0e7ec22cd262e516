#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "orthorange/geometry.hpp"

namespace orthorange {

// 4D range counting over rank-space points: a four-level prefix tree (nested
// range trees, interval restriction on the first coordinate by subtraction).
class Count4 {
 public:
  explicit Count4(std::span<const Point4> pts);

  // #points with c0 in [l, r], c1 <= x, c2 <= y, c3 <= z. One logical call.
  std::uint64_t count_restricted(Coord l, Coord r, Coord x, Coord y, Coord z) const;
  // Full 4D box via inclusion-exclusion over the three dominance sides.
  std::uint64_t count_box(const RankBox& box) const;
  // Highest v in [0, cap] such that the restricted count with v substituted on
  // `axis` (1, 2 or 3; fixed bounds fill the other two in order) is <= k.
  // Issues <= floor(log2 cap) + 1 counting calls (cap + 1 possible outcomes).
  Coord select(Coord l, Coord r, int axis, Coord fa, Coord fb, std::uint64_t k,
               Coord cap) const;

  std::uint64_t node_visits() const { return node_visits_; }
  std::uint64_t counting_calls() const { return counting_calls_; }
  std::size_t size() const { return n_; }

 private:
  // Prefix count over all four coordinates (interval handled by caller).
  std::uint64_t prefix4(Coord a, Coord b, Coord c, Coord d) const;
  std::uint32_t build(std::vector<Point4>&& pts, int level);
  std::uint64_t query_node(std::uint32_t id, int level, const Coord* bounds) const;

  struct Node {
    std::uint32_t left = 0, right = 0;  // 0 = none
    std::uint32_t child = 0;            // next-level tree root (internal nodes)
    std::uint32_t off = 0, len = 0;     // slice in pts_ (leaves) or vals_ span
    Coord split = 0;                    // max coord[level] in left subtree
  };
  static constexpr std::uint32_t kLeafCutoff = 16;

  std::size_t n_ = 0;
  std::uint32_t root_ = 0;
  std::vector<Node> nodes_;        // all levels share one arena; 0 unused
  std::vector<Point4> leaf_pts_;   // leaf slices for brute scans
  std::vector<Coord> last_vals_;   // level-3 sorted value slices
  mutable std::uint64_t node_visits_ = 0;
  mutable std::uint64_t counting_calls_ = 0;
};

// Counting / selection services consumed by the sweep constructor. The active
// set is {p : p.z <= plane}; selections on z are static (plane-independent).
class CountingProvider {
 public:
  virtual ~CountingProvider() = default;

  virtual void set_plane(Coord z) = 0;  // must be called with non-increasing z
  virtual std::uint64_t count2(Coord x, Coord y) = 0;
  // Highest v in [0, cap_x] with count2(v, y) <= k (and symmetrically for y).
  virtual Coord select_x(Coord y, std::uint64_t k) = 0;
  virtual Coord select_y(Coord x, std::uint64_t k) = 0;
  // Static z-selection at (x, y); may return cap_z when the answer is at or
  // above the current plane (callers clamp to the plane).
  virtual Coord select_z(Coord x, Coord y, std::uint64_t k) = 0;

  Coord cap_x() const { return cx_; }
  Coord cap_y() const { return cy_; }
  Coord cap_z() const { return cz_; }

  std::uint64_t counting_queries = 0;
  std::uint64_t selection_queries = 0;

 protected:
  Coord cx_ = 0, cy_ = 0, cz_ = 0;
};

// Incremental provider: O(log^2) counting/selection, linear-size lists for
// z-selection by enumeration. Used for bulk hierarchy construction.
std::unique_ptr<CountingProvider> make_fast_provider(std::span<const Point3> pts,
                                                     Coord cap_x, Coord cap_y,
                                                     Coord cap_z);

// Brute-force provider backing the naive constructor and small cross-checks.
std::unique_ptr<CountingProvider> make_brute_provider(std::span<const Point3> pts,
                                                      Coord cap_x, Coord cap_y,
                                                      Coord cap_z);

// Count4-backed provider: every selection runs a binary search of counting
// calls, matching the range-tree construction cost model.
std::unique_ptr<CountingProvider> make_count4_provider(const Count4& index, Coord lo,
                                                       Coord hi, Coord cap_x,
                                                       Coord cap_y, Coord cap_z);

}  // namespace orthorange
