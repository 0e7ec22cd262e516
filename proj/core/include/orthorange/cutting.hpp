#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "orthorange/config.hpp"
#include "orthorange/counting.hpp"
#include "orthorange/geometry.hpp"
#include "orthorange/stats.hpp"

namespace orthorange {

// One cell of a shallow cutting: the apex is the upper corner (x, y) stamped
// with the plane z at creation; the conflict list holds exactly the points the
// apex dominates (closed on all three coordinates).
struct CuttingCell {
  Point3 apex;
  std::vector<PointId> conflict;
};

struct Cutting {
  std::uint32_t t = 1;  // effective level (inputs below 1 clamp to 1)
  std::size_t n = 0;
  Coord cap_x = 0, cap_y = 0, cap_z = 0;
  std::vector<CuttingCell> cells;  // creation order; apex z non-increasing
  SweepStats stats;
};

// Optional construction trace: one entry per patch (entry 0 = the initial
// staircase), recording the plane and the inner corners created fresh.
struct SweepTrace {
  struct Patch {
    Coord plane = 0;
    std::vector<std::pair<Coord, Coord>> new_inners;
  };
  std::vector<Patch> patches;
};

// Highest z at which (x, y) dominates fewer than k points: the provider's
// static z-selection at count k-1 (unclamped; the sweep clamps to its plane
// when enqueueing).
Coord compute_end_event(CountingProvider& provider, Coord x, Coord y,
                        std::uint32_t k);

Cutting build_cutting_sweep(std::span<const Point3> pts, std::uint32_t t,
                            Coord cap_x, Coord cap_y, Coord cap_z,
                            CountingProvider& provider,
                            bool fill_conflict_lists = true,
                            SweepTrace* trace = nullptr);

// Reference constructor: same staircase patch rules, but every round rescans
// all corners and recomputes every notch from scratch with brute-force
// counting. Exists purely to cross-check the sweep.
Cutting build_cutting_naive(std::span<const Point3> pts, std::uint32_t t,
                            Coord cap_x, Coord cap_y, Coord cap_z,
                            bool fill_conflict_lists = true);

// Dispatch on cfg.constructor; the sweep path uses the fast provider.
Cutting build_cutting_auto(std::span<const Point3> pts, std::uint32_t t,
                           Coord cap_x, Coord cap_y, Coord cap_z,
                           const Config& cfg, bool fill_conflict_lists = true);

void fill_conflicts(Cutting& cut, std::span<const Point3> pts);
std::vector<Point3> apexes_of(const Cutting& cut);

}  // namespace orthorange
