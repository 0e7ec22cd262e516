#pragma once

#include <span>
#include <vector>

#include "orthorange/config.hpp"
#include "orthorange/dominance.hpp"
#include "orthorange/hierarchy.hpp"
#include "orthorange/stats.hpp"

namespace orthorange {

// Answers restricted five-sided queries [a1,b1] x (-inf,b2] x (-inf,b3] x
// (-inf,b4] over an instance whose first coordinates are leaf values in
// [1, m]. Candidate cells come from the tree-2 decomposition of [a1, b1];
// find-any refines them through the nested cuttings; emptiness finishes at
// the bottom-layer dominance structures, reporting at the lambda targets.
// A find-any miss certifies a high dominated count: emptiness concludes
// immediately, reporting falls back to the four-dimensional scan structure.
class RestrictedStructure {
 public:
  RestrictedStructure() = default;
  RestrictedStructure(std::span<const Point4> pts, std::uint32_t m,
                      const Config& cfg);

  bool empty(Coord a1, Coord b1, Coord q2, Coord q3, Coord q4,
             QueryStats* stats = nullptr) const;
  std::vector<PointId> report(Coord a1, Coord b1, Coord q2, Coord q3, Coord q4,
                              QueryStats* stats = nullptr) const;

  const TreeSchedule& schedule() const { return store_.schedule; }
  const CuttingStore& store() const { return store_; }
  const BuildStats& build_stats() const { return stats_; }
  std::size_t size() const { return store_.points.size(); }

 private:
  struct Candidate {
    const RangeEntry* entry;
    std::uint32_t cell;
  };

  bool init_candidates(Coord a1, Coord b1, const Point3& probe,
                       std::vector<Candidate>& out, QueryStats& qs) const;
  bool iterate(std::vector<Candidate>& cur, const Point3& probe, int from_tree,
               int to_tree, QueryStats& qs) const;

  CuttingStore store_;
  SlowDom4 slow_;
  BuildStats stats_;
};

}  // namespace orthorange
