#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace orthorange {

using Coord = std::uint32_t;
using PointId = std::uint32_t;

inline constexpr int kMaxDim = 8;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// 3D point in rank space. Also used for cell apexes (id = cell index).
struct Point3 {
  Coord x = 0, y = 0, z = 0;
  PointId id = 0;
  friend bool operator==(const Point3&, const Point3&) = default;
};

struct Point4 {
  std::array<Coord, 4> c{};
  PointId id = 0;
  friend bool operator==(const Point4&, const Point4&) = default;
};

// Raw query box over real coordinates; ±inf marks an unbounded side.
struct RawBox {
  int dim = 4;
  std::array<double, kMaxDim> lo{};
  std::array<double, kMaxDim> hi{};
  static RawBox unbounded(int dim);
};

// Rank-space query box. After canonicalization lo in [1, n+1], hi in [0, n];
// empty in a dimension iff lo > hi there.
struct RankBox {
  int dim = 4;
  std::array<Coord, kMaxDim> lo{};
  std::array<Coord, kMaxDim> hi{};
  bool empty() const {
    for (int d = 0; d < dim; ++d)
      if (lo[d] > hi[d]) return true;
    return false;
  }
  friend bool operator==(const RankBox&, const RankBox&) = default;
};

// Point set reduced to rank space: every dimension is a permutation of 1..n.
struct RankedPointSet {
  int dim = 0;
  std::size_t n = 0;
  std::vector<Coord> coords;                    // row-major, n * dim
  std::vector<std::vector<double>> dim_values;  // per dim, sorted raw values

  Coord at(std::size_t i, int d) const { return coords[i * dim + d]; }
  Point3 point3(std::size_t i) const {
    return Point3{at(i, 0), at(i, 1), at(i, 2), static_cast<PointId>(i)};
  }
  Point4 point4(std::size_t i) const {
    Point4 p;
    for (int d = 0; d < 4; ++d) p.c[d] = at(i, d);
    p.id = static_cast<PointId>(i);
    return p;
  }
};

// Ranks by (value, input index); ids are the dense row indices 0..n-1.
RankedPointSet to_rank_space(const std::vector<std::vector<double>>& rows, int dim);

// Snaps real bounds inward onto the rank grid; never changes the reported set.
RankBox canonicalize_query(const RankedPointSet& set, const RawBox& box);

inline Coord reflect_coord(std::size_t n, Coord c) {
  return static_cast<Coord>(n + 1 - c);
}

// Strict dominance: every coordinate of p exceeds the one of q.
inline bool strictly_dominates(const Point3& p, const Point3& q) {
  return p.x > q.x && p.y > q.y && p.z > q.z;
}
inline bool strictly_dominates(const Point4& p, const Point4& q) {
  for (int d = 0; d < 4; ++d)
    if (p.c[d] <= q.c[d]) return false;
  return true;
}

// Closed-cell containment: probes and apexes compare with <= (cross-set rule).
inline bool cell_contains(const Point3& apex, const Point3& q) {
  return q.x <= apex.x && q.y <= apex.y && q.z <= apex.z;
}

inline bool in_box3(const RankBox& b, Coord x, Coord y, Coord z) {
  return b.lo[0] <= x && x <= b.hi[0] && b.lo[1] <= y && y <= b.hi[1] &&
         b.lo[2] <= z && z <= b.hi[2];
}

inline bool in_box(const RankBox& b, const Coord* c) {
  for (int d = 0; d < b.dim; ++d)
    if (c[d] < b.lo[d] || c[d] > b.hi[d]) return false;
  return true;
}

}  // namespace orthorange
