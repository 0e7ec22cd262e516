#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "orthorange/geometry.hpp"

namespace orthorange {

// Linear-scan ground truth. Ids are returned sorted ascending.
std::vector<PointId> oracle_report(const RankedPointSet& set, const RankBox& box);
std::uint64_t oracle_count(const RankedPointSet& set, const RankBox& box);

// 3D helpers over plain point lists (conflict lists, cutting inputs).
std::uint64_t count_dominated(std::span<const Point3> pts, Coord x, Coord y, Coord z);
std::vector<PointId> report_dominated(std::span<const Point3> pts, Coord x, Coord y,
                                      Coord z);

// Highest v in [0, cap] such that the probe with v on `axis` and the fixed
// bounds (a, b) on the other two axes (in x,y,z order) dominates at most k
// points, under the closed cross-set convention.
Coord oracle_select(std::span<const Point3> pts, int axis, Coord a, Coord b,
                    std::uint64_t k, Coord cap);

struct VerifyOptions {
  double c1 = 0.5;
  double c2 = 10.0;
  Coord cap_x = 0, cap_y = 0, cap_z = 0;   // probe grid upper bounds
  std::size_t exhaustive_threshold = 1000; // above: sampled probe columns
  std::size_t sample_columns = 10000;
  std::uint64_t seed = 12345;
  std::size_t max_witnesses = 8;
};

struct VerifyReport {
  bool passed = true;
  std::uint64_t columns_checked = 0;
  std::uint64_t probes_checked = 0;  // implied probe count over z ranges
  std::uint32_t conflict_violations = 0;
  std::uint32_t coverage_violations = 0;
  std::size_t max_conflict = 0;
  std::vector<Point3> witnesses;  // uncovered probes / offending apexes
};

// Checks the three cutting properties: conflict-list size <= c2*t per cell,
// and coverage of every probe dominating <= c1*t points (exhaustively at
// small n, sampled plus apex-adjacent columns above the threshold). Cell
// counts are reported, not judged; callers compare against their own bound.
VerifyReport verify_cutting(std::span<const Point3> pts, std::uint32_t t,
                            std::span<const Point3> apexes, const VerifyOptions& opt);

}  // namespace orthorange
