#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "orthorange/config.hpp"
#include "orthorange/cutting.hpp"
#include "orthorange/dominance.hpp"
#include "orthorange/find_any.hpp"
#include "orthorange/geometry.hpp"
#include "orthorange/stats.hpp"

namespace orthorange {

// Fanout-decreasing family of trees over the first-coordinate leaves. All
// trees share one binary-heap substrate over m_padded = 2^e leaves, e a power
// of beta; tree i keeps the binary nodes whose depth is a multiple of step[i].
// Tree 2 is the coarsest, the last tree is binary, and every tree-i node is
// also a tree-(i+1) node.
struct TreeSchedule {
  std::uint32_t m = 0;         // requested leaf count
  std::uint32_t m_padded = 0;  // 2^e
  int e = 0;
  int beta = 0;
  int levels = 0;  // trees run 2..levels
  int delta = 0;   // tree whose cells carry the lambda links
  std::vector<int> step;                // [tree] binary depth per tree edge
  std::vector<std::uint32_t> fanout;    // [tree] = 2^step
  std::vector<int> height;              // [tree] = e / step
  std::vector<std::uint32_t> t_level;   // [tree] level of the range cuttings
  std::vector<std::uint32_t> u_level;   // [tree] level of the nested cuttings
};

TreeSchedule plan_fanouts(std::uint32_t m, int beta, std::size_t n,
                          int nested_c = 20);

enum class RangeKind : std::uint8_t { full, prefix, suffix, bounded };

RangeKind classify(std::uint32_t lo, std::uint32_t hi, std::uint32_t fanout);

// Addresses the union of children lo..hi (1-based) of one tree-`tree` node.
struct RangeKey {
  std::uint8_t tree = 0;
  std::uint32_t node = 0;
  std::uint16_t lo = 0, hi = 0;
  friend bool operator==(const RangeKey&, const RangeKey&) = default;
};

std::uint64_t pack_key(const RangeKey& k);

struct LeafSpan {
  std::uint32_t lo = 0, hi = 0;  // 1-based leaf values, inclusive
};

LeafSpan node_leaf_span(int e, std::uint32_t node);
std::uint32_t tree_child(const TreeSchedule& s, int tree, std::uint32_t node,
                         std::uint32_t child);
bool node_is_internal(const TreeSchedule& s, int tree, std::uint32_t node);
LeafSpan range_leaf_span(const TreeSchedule& s, const RangeKey& k);

// Cover of a tree-i range by tree-(i+1) ranges over the same leaves. Full
// ranges delegate to the identical node; bounded covers have at most
// 2*beta - 1 members, at most one of them bounded; aligned boundaries produce
// at most beta members, all prefixes (or all suffixes).
std::vector<RangeKey> cover_range(const TreeSchedule& s, const RangeKey& k);

// Canonical decomposition of the leaf interval [a, b] into tree-2 ranges.
// Single leaves (a == b) return empty: callers scan the leaf bucket directly.
std::vector<RangeKey> decompose_interval(const TreeSchedule& s, std::uint32_t a,
                                         std::uint32_t b);

struct GammaRef {
  RangeKey key;  // next-tree range holding the target cell
  std::uint32_t cell = 0;
};

struct LambdaRef {
  std::uint32_t node = 0;  // binary node carrying the bottom-layer cutting
  std::uint32_t cell = 0;
};

// Nested cutting of one range-cutting cell. `cutting` keeps the raw build
// (conflict lists elided); `apexes` are the same cells clipped to the owner
// apex, which is what the index answers over; `gamma` holds one target per
// cover member of the owner range, for every nested cell.
struct NestedInfo {
  Cutting cutting;
  std::vector<Point3> apexes;
  FindAnyIndex index;
  std::vector<std::vector<GammaRef>> gamma;
};

struct RangeEntry {
  RangeKey key;
  Cutting cutting;
  FindAnyIndex tree_index;                     // populated on tree 2 only
  std::vector<NestedInfo> nested;              // per cell; absent on the last tree
  std::vector<std::vector<LambdaRef>> lambda;  // per cell; tree delta only
};

// Bottom layer: per binary node (leaves included), one high-level cutting and
// a dominance structure per cell over that cell's conflict points.
struct Log6Node {
  Cutting cutting;
  std::vector<Dom3> cell_dom3;
};

class CuttingStore {
 public:
  TreeSchedule schedule;
  std::vector<std::unordered_map<std::uint64_t, RangeEntry>> trees;  // [tree]
  std::vector<Log6Node> log6;  // [binary node 1..2*m_padded-1]
  BuildStats stats;
  Coord cap1 = 1, cap2 = 1, cap3 = 1;  // axis caps of the projected space

  std::vector<Point4> points;         // instance, sorted by (c[0], id)
  std::vector<std::size_t> leaf_off;  // [leaf] first index at or past the leaf

  const RangeEntry* find(const RangeKey& k) const;
  const RangeEntry& at(const RangeKey& k) const;  // throws std::out_of_range
  std::vector<RangeKey> keys(int tree) const;     // sorted by packed key

  std::span<const Point4> leaf_points(std::uint32_t leaf) const;
  std::span<const Point4> range_points(const RangeKey& k) const;
  std::span<const Point4> span_points(LeafSpan span) const;
};

// Index of the first cell (creation order) whose apex dominates the probe.
std::optional<std::uint32_t> first_containing_cell(const Cutting& cut,
                                                   const Point3& probe);

// Builds every range cutting of every tree, the nested cuttings with their
// gamma links, the bottom layer, and the lambda links of tree delta.
CuttingStore build_all_cuttings(std::span<const Point4> pts,
                                const TreeSchedule& schedule, const Config& cfg);

}  // namespace orthorange
