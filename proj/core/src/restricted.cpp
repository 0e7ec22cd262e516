#include "orthorange/restricted.hpp"

#include <algorithm>
#include <cassert>

namespace orthorange {

namespace {

// Probes against stored apexes must stay within the coordinate caps the
// cuttings were built with; clamping preserves every comparison against the
// stored points because all of them lie at or below the caps.
Point3 clamp_probe(const CuttingStore& st, Coord q2, Coord q3, Coord q4) {
  return Point3{std::min(q2, st.cap1), std::min(q3, st.cap2),
                std::min(q4, st.cap3), 0};
}

}  // namespace

RestrictedStructure::RestrictedStructure(std::span<const Point4> pts,
                                         std::uint32_t m, const Config& cfg) {
  const TreeSchedule sched =
      plan_fanouts(m, cfg.beta, pts.size(), cfg.nested_c);
  store_ = build_all_cuttings(pts, sched, cfg);
  slow_ = SlowDom4(std::span<const Point4>(store_.points));
  stats_ = store_.stats;
  stats_.slow4_entries = slow_.stored_points();
}

bool RestrictedStructure::init_candidates(Coord a1, Coord b1,
                                          const Point3& probe,
                                          std::vector<Candidate>& out,
                                          QueryStats& qs) const {
  const auto ranges = decompose_interval(store_.schedule, a1, b1);
  out.clear();
  out.reserve(ranges.size());
  for (const RangeKey& key : ranges) {
    const RangeEntry& entry = store_.at(key);
    ++qs.findany_calls;
    const std::uint64_t before = entry.tree_index.comparisons();
    const auto hit = entry.tree_index.find(probe.x, probe.y, probe.z);
    qs.findany_comparisons += entry.tree_index.comparisons() - before;
    if (!hit) return false;
    out.push_back(Candidate{&entry, *hit});
  }
  qs.cells_touched += out.size();
  qs.candidate_counts.push_back(out.size());
  return true;
}

bool RestrictedStructure::iterate(std::vector<Candidate>& cur,
                                  const Point3& probe, int from_tree,
                                  int to_tree, QueryStats& qs) const {
  std::vector<Candidate> next;
  for (int tree = from_tree; tree < to_tree; ++tree) {
    next.clear();
    for (const Candidate& cand : cur) {
      const NestedInfo& info = cand.entry->nested[cand.cell];
      ++qs.findany_calls;
      const std::uint64_t before = info.index.comparisons();
      const auto hit = info.index.find(probe.x, probe.y, probe.z);
      qs.findany_comparisons += info.index.comparisons() - before;
      if (!hit) return false;
      for (const GammaRef& g : info.gamma[*hit])
        next.push_back(Candidate{&store_.at(g.key), g.cell});
    }
    cur.swap(next);
    ++qs.iterations;
    qs.cells_touched += cur.size();
    qs.candidate_counts.push_back(cur.size());
  }
  return true;
}

bool RestrictedStructure::empty(Coord a1, Coord b1, Coord q2, Coord q3,
                                Coord q4, QueryStats* stats) const {
  QueryStats local;
  QueryStats& qs = stats ? *stats : local;
  const TreeSchedule& s = store_.schedule;
  a1 = std::max<Coord>(a1, 1);
  b1 = std::min<Coord>(b1, s.m_padded);
  if (a1 > b1) return true;
  if (a1 == b1) {
    qs.branch = QueryBranch::scan;
    const auto bucket = store_.leaf_points(a1);
    qs.scanned_points += bucket.size();
    for (const Point4& p : bucket)
      if (p.c[1] <= q2 && p.c[2] <= q3 && p.c[3] <= q4) return false;
    return true;
  }
  const Point3 probe = clamp_probe(store_, q2, q3, q4);
  std::vector<Candidate> cand;
  if (!init_candidates(a1, b1, probe, cand, qs) ||
      !iterate(cand, probe, 2, s.levels, qs)) {
    qs.branch = QueryBranch::early;
    return false;
  }
  qs.branch = QueryBranch::lambda;
  for (const Candidate& c : cand) {
    const RangeKey& k = c.entry->key;
    const std::uint32_t node =
        (k.lo == 1 && k.hi == 2) ? k.node : 2 * k.node + (k.lo - 1);
    const Log6Node& bottom = store_.log6[node];
    std::optional<std::uint32_t> cell;
    for (std::uint32_t i = 0;
         i < static_cast<std::uint32_t>(bottom.cutting.cells.size()); ++i) {
      ++qs.cells_touched;
      if (cell_contains(bottom.cutting.cells[i].apex, probe)) {
        cell = i;
        break;
      }
    }
    // An uncovered probe dominates more points in the node than the coverage
    // level, hence at least one.
    if (!cell) return false;
    const Dom3& d = bottom.cell_dom3[*cell];
    const std::uint64_t before = d.node_visits();
    const bool has = d.exists(q2, q3, q4);
    qs.node_visits += d.node_visits() - before;
    if (has) return false;
  }
  return true;
}

std::vector<PointId> RestrictedStructure::report(Coord a1, Coord b1, Coord q2,
                                                 Coord q3, Coord q4,
                                                 QueryStats* stats) const {
  QueryStats local;
  QueryStats& qs = stats ? *stats : local;
  const TreeSchedule& s = store_.schedule;
  std::vector<PointId> out;
  a1 = std::max<Coord>(a1, 1);
  b1 = std::min<Coord>(b1, s.m_padded);
  if (a1 > b1) return out;
  if (a1 == b1) {
    qs.branch = QueryBranch::scan;
    const auto bucket = store_.leaf_points(a1);
    qs.scanned_points += bucket.size();
    for (const Point4& p : bucket)
      if (p.c[1] <= q2 && p.c[2] <= q3 && p.c[3] <= q4) out.push_back(p.id);
    std::sort(out.begin(), out.end());
    return out;
  }
  const Point3 probe = clamp_probe(store_, q2, q3, q4);
  std::vector<Candidate> cand;
  bool refined = init_candidates(a1, b1, probe, cand, qs);
  if (refined && s.delta > 2) refined = iterate(cand, probe, 2, s.delta, qs);
  if (!refined) {
    qs.branch = QueryBranch::slow;
    const std::uint64_t before = slow_.node_visits();
    out = slow_.report_box(a1, b1, q2, q3, q4);
    qs.node_visits += slow_.node_visits() - before;
    return out;
  }
  qs.branch = QueryBranch::lambda;
  for (const Candidate& c : cand) {
    for (const LambdaRef& l : c.entry->lambda[c.cell]) {
      const Dom3& d = store_.log6[l.node].cell_dom3[l.cell];
      const std::uint64_t before = d.node_visits();
      d.report_into(q2, q3, q4, out);
      qs.node_visits += d.node_visits() - before;
    }
  }
  std::sort(out.begin(), out.end());
  assert(std::adjacent_find(out.begin(), out.end()) == out.end());
  return out;
}

}  // namespace orthorange
