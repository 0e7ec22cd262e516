#include "orthorange/hierarchy.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace orthorange {

TreeSchedule plan_fanouts(std::uint32_t m, int beta, std::size_t n,
                          int nested_c) {
  if (m < 2) throw std::invalid_argument("plan_fanouts: need at least two leaves");
  if (beta < 2)
    throw std::invalid_argument("plan_fanouts: branching parameter below two");
  if (nested_c < 1)
    throw std::invalid_argument("plan_fanouts: nested divisor below one");
  TreeSchedule s;
  s.m = m;
  s.beta = beta;
  int e = beta;
  while ((std::uint64_t{1} << e) < m) e *= beta;
  if (e >= 31) throw std::invalid_argument("plan_fanouts: leaf count too large");
  s.e = e;
  s.m_padded = std::uint32_t{1} << e;

  int levels = 1;
  for (int p = 1; p < e; p *= beta) ++levels;
  s.levels = levels;
  s.step.assign(levels + 1, 0);
  s.fanout.assign(levels + 1, 0);
  s.height.assign(levels + 1, 0);
  s.t_level.assign(levels + 1, 0);
  s.u_level.assign(levels + 1, 0);
  int st = e;
  for (int i = 2; i <= levels; ++i) {
    st /= beta;
    s.step[i] = st;
    s.fanout[i] = std::uint32_t{1} << st;
    s.height[i] = e / st;
    const std::uint64_t prev =
        (i == 2) ? std::uint64_t{s.m_padded} : std::uint64_t{s.fanout[i - 1]};
    s.t_level[i] = static_cast<std::uint32_t>(
        std::min<std::uint64_t>(prev * prev, 0x7fffffffull));
    const std::uint64_t f2 = std::uint64_t{s.fanout[i]} * s.fanout[i];
    s.u_level[i] = static_cast<std::uint32_t>(
        std::max<std::uint64_t>(1, f2 / static_cast<std::uint64_t>(nested_c)));
  }

  const double lg = std::log2(std::max<double>(static_cast<double>(n), 4.0));
  const double llg = std::log2(std::max(lg, 2.0));
  const double raw = std::log(lg / llg) / std::log(static_cast<double>(beta));
  int delta = static_cast<int>(std::lround(raw));
  s.delta = std::clamp(delta, 2, levels);
  return s;
}

RangeKind classify(std::uint32_t lo, std::uint32_t hi, std::uint32_t fanout) {
  assert(1 <= lo && lo <= hi && hi <= fanout);
  if (lo == 1 && hi == fanout) return RangeKind::full;
  if (lo == 1) return RangeKind::prefix;
  if (hi == fanout) return RangeKind::suffix;
  return RangeKind::bounded;
}

std::uint64_t pack_key(const RangeKey& k) {
  return (std::uint64_t{k.tree} << 56) | (std::uint64_t{k.node} << 24) |
         (std::uint64_t{k.lo} << 12) | std::uint64_t{k.hi};
}

LeafSpan node_leaf_span(int e, std::uint32_t node) {
  assert(node >= 1);
  const int d = std::bit_width(node) - 1;
  assert(d <= e);
  const std::uint32_t width = std::uint32_t{1} << (e - d);
  const std::uint32_t lo = (node - (std::uint32_t{1} << d)) * width + 1;
  return LeafSpan{lo, lo + width - 1};
}

std::uint32_t tree_child(const TreeSchedule& s, int tree, std::uint32_t node,
                         std::uint32_t child) {
  assert(1 <= child && child <= s.fanout[tree]);
  return (node << s.step[tree]) + (child - 1);
}

bool node_is_internal(const TreeSchedule& s, int tree, std::uint32_t node) {
  const int d = std::bit_width(node) - 1;
  return d % s.step[tree] == 0 && d + s.step[tree] <= s.e;
}

LeafSpan range_leaf_span(const TreeSchedule& s, const RangeKey& k) {
  const LeafSpan a = node_leaf_span(s.e, tree_child(s, k.tree, k.node, k.lo));
  const LeafSpan b = node_leaf_span(s.e, tree_child(s, k.tree, k.node, k.hi));
  return LeafSpan{a.lo, b.hi};
}

namespace {

// 1-based child of `v` (in tree `tree`) whose leaf span contains `leaf`.
std::uint32_t child_containing(const TreeSchedule& s, int tree, std::uint32_t v,
                               std::uint32_t leaf) {
  const LeafSpan span = node_leaf_span(s.e, v);
  assert(span.lo <= leaf && leaf <= span.hi);
  const int d = std::bit_width(v) - 1;
  const std::uint32_t w = std::uint32_t{1} << (s.e - d - s.step[tree]);
  return (leaf - span.lo) / w + 1;
}

// Covers [A, span(u).hi] where A lies strictly inside u's span; emits proper
// suffixes top-down, ending at the node where A falls on a child boundary.
void suffix_walk(const TreeSchedule& s, int tree, std::uint32_t u,
                 std::uint32_t A, std::vector<RangeKey>& out) {
  const std::uint16_t f = static_cast<std::uint16_t>(s.fanout[tree]);
  const std::uint8_t ti = static_cast<std::uint8_t>(tree);
  while (true) {
    const std::uint32_t cj = child_containing(s, tree, u, A);
    const std::uint32_t cnode = tree_child(s, tree, u, cj);
    if (node_leaf_span(s.e, cnode).lo == A) {
      out.push_back(RangeKey{ti, u, static_cast<std::uint16_t>(cj), f});
      return;
    }
    if (cj < f)
      out.push_back(RangeKey{ti, u, static_cast<std::uint16_t>(cj + 1), f});
    u = cnode;
  }
}

void prefix_walk(const TreeSchedule& s, int tree, std::uint32_t u,
                 std::uint32_t B, std::vector<RangeKey>& out) {
  const std::uint8_t ti = static_cast<std::uint8_t>(tree);
  while (true) {
    const std::uint32_t cj = child_containing(s, tree, u, B);
    const std::uint32_t cnode = tree_child(s, tree, u, cj);
    if (node_leaf_span(s.e, cnode).hi == B) {
      out.push_back(RangeKey{ti, u, 1, static_cast<std::uint16_t>(cj)});
      return;
    }
    if (cj > 1)
      out.push_back(RangeKey{ti, u, 1, static_cast<std::uint16_t>(cj - 1)});
    u = cnode;
  }
}

// Canonical tree-`tree` ranges for the leaf interval [A, B] inside v's span.
void append_canonical(const TreeSchedule& s, int tree, std::uint32_t v,
                      std::uint32_t A, std::uint32_t B,
                      std::vector<RangeKey>& out) {
  const std::uint16_t f = static_cast<std::uint16_t>(s.fanout[tree]);
  const std::uint8_t ti = static_cast<std::uint8_t>(tree);
  const LeafSpan top = node_leaf_span(s.e, v);
  assert(top.lo <= A && A <= B && B <= top.hi);
  if (top.lo == A && top.hi == B) {
    out.push_back(RangeKey{ti, v, 1, f});
    return;
  }
  std::uint32_t u = v;
  std::uint32_t ca = 0, cb = 0;
  while (true) {
    ca = child_containing(s, tree, u, A);
    cb = child_containing(s, tree, u, B);
    if (ca != cb) break;
    const std::uint32_t cnode = tree_child(s, tree, u, ca);
    const LeafSpan cs = node_leaf_span(s.e, cnode);
    if (cs.lo == A && cs.hi == B) {
      out.push_back(RangeKey{ti, u, static_cast<std::uint16_t>(ca),
                             static_cast<std::uint16_t>(ca)});
      return;
    }
    u = cnode;
  }
  // Split node: children whose boundary lines up with A or B join the middle
  // range; the walks only descend into misaligned boundary children.
  const std::uint32_t canode = tree_child(s, tree, u, ca);
  const std::uint32_t cbnode = tree_child(s, tree, u, cb);
  const bool walk_left = node_leaf_span(s.e, canode).lo != A;
  const bool walk_right = node_leaf_span(s.e, cbnode).hi != B;
  const std::uint32_t mid_lo = walk_left ? ca + 1 : ca;
  const std::uint32_t mid_hi = walk_right ? cb - 1 : cb;
  if (walk_left) suffix_walk(s, tree, canode, A, out);
  if (mid_lo <= mid_hi)
    out.push_back(RangeKey{ti, u, static_cast<std::uint16_t>(mid_lo),
                           static_cast<std::uint16_t>(mid_hi)});
  if (walk_right) prefix_walk(s, tree, cbnode, B, out);
}

}  // namespace

std::vector<RangeKey> cover_range(const TreeSchedule& s, const RangeKey& k) {
  if (k.tree + 1 > s.levels)
    throw std::invalid_argument("cover_range: no tree below the last one");
  const LeafSpan span = range_leaf_span(s, k);
  std::vector<RangeKey> out;
  append_canonical(s, k.tree + 1, k.node, span.lo, span.hi, out);
  return out;
}

std::vector<RangeKey> decompose_interval(const TreeSchedule& s, std::uint32_t a,
                                         std::uint32_t b) {
  if (a < 1 || b > s.m_padded || a > b)
    throw std::invalid_argument("decompose_interval: leaf interval out of range");
  std::vector<RangeKey> out;
  if (a == b) return out;  // leaf interior: the caller scans the bucket
  append_canonical(s, 2, 1, a, b, out);
  return out;
}

const RangeEntry* CuttingStore::find(const RangeKey& k) const {
  if (k.tree < 2 || k.tree > schedule.levels) return nullptr;
  const auto& m = trees[k.tree];
  const auto it = m.find(pack_key(k));
  return it == m.end() ? nullptr : &it->second;
}

const RangeEntry& CuttingStore::at(const RangeKey& k) const {
  const RangeEntry* e = find(k);
  if (!e)
    throw std::out_of_range(
        "CuttingStore::at: missing range tree=" + std::to_string(k.tree) +
        " node=" + std::to_string(k.node) + " lo=" + std::to_string(k.lo) +
        " hi=" + std::to_string(k.hi));
  return *e;
}

std::vector<RangeKey> CuttingStore::keys(int tree) const {
  std::vector<RangeKey> out;
  if (tree < 2 || tree > schedule.levels) return out;
  out.reserve(trees[tree].size());
  for (const auto& kv : trees[tree]) out.push_back(kv.second.key);
  std::sort(out.begin(), out.end(), [](const RangeKey& a, const RangeKey& b) {
    return pack_key(a) < pack_key(b);
  });
  return out;
}

std::span<const Point4> CuttingStore::span_points(LeafSpan span) const {
  assert(span.lo >= 1 && span.hi <= schedule.m_padded && span.lo <= span.hi);
  const std::size_t s = leaf_off[span.lo];
  const std::size_t e = leaf_off[span.hi + 1];
  return std::span<const Point4>(points.data() + s, e - s);
}

std::span<const Point4> CuttingStore::leaf_points(std::uint32_t leaf) const {
  return span_points(LeafSpan{leaf, leaf});
}

std::span<const Point4> CuttingStore::range_points(const RangeKey& k) const {
  return span_points(range_leaf_span(schedule, k));
}

std::optional<std::uint32_t> first_containing_cell(const Cutting& cut,
                                                   const Point3& probe) {
  for (std::uint32_t i = 0; i < cut.cells.size(); ++i)
    if (cell_contains(cut.cells[i].apex, probe)) return i;
  return std::nullopt;
}

CuttingStore build_all_cuttings(std::span<const Point4> pts,
                                const TreeSchedule& s, const Config& cfg) {
  CuttingStore st;
  st.schedule = s;
  st.points.assign(pts.begin(), pts.end());
  std::sort(st.points.begin(), st.points.end(),
            [](const Point4& a, const Point4& b) {
              if (a.c[0] != b.c[0]) return a.c[0] < b.c[0];
              return a.id < b.id;
            });
  for (const Point4& p : st.points)
    if (p.c[0] < 1 || p.c[0] > s.m_padded)
      throw std::invalid_argument(
          "build_all_cuttings: first coordinate outside the leaf range");
  const std::size_t n = st.points.size();
  st.stats.points = n;
  st.leaf_off.assign(s.m_padded + 2, 0);
  {
    std::size_t idx = 0;
    for (std::uint32_t j = 1; j <= s.m_padded + 1; ++j) {
      while (idx < n && st.points[idx].c[0] < j) ++idx;
      st.leaf_off[j] = idx;
    }
  }
  for (const Point4& p : st.points) {
    st.cap1 = std::max(st.cap1, p.c[1]);
    st.cap2 = std::max(st.cap2, p.c[2]);
    st.cap3 = std::max(st.cap3, p.c[3]);
  }

  std::vector<Point3> proj;
  auto project = [&](std::span<const Point4> span4) {
    proj.clear();
    proj.reserve(span4.size());
    for (const Point4& p : span4)
      proj.push_back(Point3{p.c[1], p.c[2], p.c[3], p.id});
  };

  // Range cuttings of every tree; tree 2 additionally gets the find-any index
  // the initial candidate step queries.
  st.trees.assign(s.levels + 1, {});
  for (int i = 2; i <= s.levels; ++i) {
    const std::uint16_t f = static_cast<std::uint16_t>(s.fanout[i]);
    for (int d = 0; d + s.step[i] <= s.e; d += s.step[i]) {
      const std::uint32_t row = std::uint32_t{1} << d;
      for (std::uint32_t v = row; v < 2 * row; ++v) {
        for (std::uint16_t l = 1; l <= f; ++l) {
          for (std::uint16_t r = l; r <= f; ++r) {
            const RangeKey key{static_cast<std::uint8_t>(i), v, l, r};
            project(st.range_points(key));
            RangeEntry entry;
            entry.key = key;
            entry.cutting = build_cutting_auto(proj, s.t_level[i], st.cap1,
                                               st.cap2, st.cap3, cfg, false);
            if (i == 2) {
              entry.tree_index = FindAnyIndex(apexes_of(entry.cutting));
              st.stats.flat_entries += entry.tree_index.size_entries();
            }
            st.stats.tree_cells += entry.cutting.cells.size();
            st.stats.construction.merge(entry.cutting.stats);
            st.trees[i].emplace(pack_key(key), std::move(entry));
          }
        }
      }
    }
  }

  // Nested cuttings with their gamma links on every tree but the last. The
  // nested apexes are clipped to the owner apex; the clip never changes the
  // answer for probes inside the owner cell and keeps every apex a valid
  // gamma probe.
  for (int i = 2; i + 1 <= s.levels; ++i) {
    for (auto& kv : st.trees[i]) {
      RangeEntry& entry = kv.second;
      const std::vector<RangeKey> cover = cover_range(s, entry.key);
      project(st.range_points(entry.key));
      entry.nested.resize(entry.cutting.cells.size());
      std::vector<Point3> members;
      for (std::size_t ci = 0; ci < entry.cutting.cells.size(); ++ci) {
        const Point3 owner = entry.cutting.cells[ci].apex;
        members.clear();
        for (const Point3& p : proj)
          if (cell_contains(owner, p)) members.push_back(p);
        NestedInfo info;
        info.cutting = build_cutting_auto(members, s.u_level[i], st.cap1,
                                          st.cap2, st.cap3, cfg, false);
        info.apexes.reserve(info.cutting.cells.size());
        for (const CuttingCell& c : info.cutting.cells)
          info.apexes.push_back(Point3{std::min(c.apex.x, owner.x),
                                       std::min(c.apex.y, owner.y),
                                       std::min(c.apex.z, owner.z), c.apex.id});
        info.index = FindAnyIndex(info.apexes);
        info.gamma.resize(info.apexes.size());
        for (std::size_t nj = 0; nj < info.apexes.size(); ++nj) {
          const Point3& probe = info.apexes[nj];
          auto& targets = info.gamma[nj];
          targets.reserve(cover.size());
          for (const RangeKey& rk : cover) {
            const auto cell = first_containing_cell(st.at(rk).cutting, probe);
            if (!cell)
              throw std::logic_error(
                  "build_all_cuttings: gamma probe not contained in any cell");
            targets.push_back(GammaRef{rk, *cell});
          }
        }
        st.stats.nested_cells += info.apexes.size();
        st.stats.gamma_links += info.apexes.size() * cover.size();
        st.stats.flat_entries += info.index.size_entries();
        st.stats.construction.merge(info.cutting.stats);
        entry.nested[ci] = std::move(info);
      }
    }
  }

  // Bottom layer: one high-level cutting per binary node, leaves included,
  // with a dominance structure per cell over the cell's conflict points.
  const double lgn = std::log2(std::max<double>(static_cast<double>(n), 2.0));
  const double t6raw = static_cast<double>(cfg.log6_c) * std::pow(lgn, 6.0);
  st.log6.assign(2 * std::size_t{s.m_padded}, Log6Node{});
  std::unordered_map<PointId, Point3> by_id;
  std::vector<Point3> members;
  for (std::uint32_t v = 1; v < 2 * s.m_padded; ++v) {
    project(st.span_points(node_leaf_span(s.e, v)));
    const double t6d = std::min(t6raw, static_cast<double>(proj.size()));
    const std::uint32_t t6 = static_cast<std::uint32_t>(std::max(1.0, t6d));
    Log6Node& node = st.log6[v];
    node.cutting =
        build_cutting_auto(proj, t6, st.cap1, st.cap2, st.cap3, cfg, true);
    const bool single_full = node.cutting.cells.size() == 1 &&
                             node.cutting.cells[0].conflict.size() == proj.size();
    if (!single_full) {
      by_id.clear();
      for (const Point3& p : proj) by_id.emplace(p.id, p);
    }
    node.cell_dom3.reserve(node.cutting.cells.size());
    for (const CuttingCell& c : node.cutting.cells) {
      if (single_full) {
        node.cell_dom3.emplace_back(std::span<const Point3>(proj));
      } else {
        members.clear();
        for (PointId pid : c.conflict) members.push_back(by_id.at(pid));
        node.cell_dom3.emplace_back(std::span<const Point3>(members));
      }
      st.stats.dom3_entries += node.cell_dom3.back().stored_points();
    }
    st.stats.tree_cells += node.cutting.cells.size();
    st.stats.construction.merge(node.cutting.stats);
  }

  // Lambda links: iterate the covering of each tree-delta range down to the
  // last (binary) tree, identify each final range with its binary node, and
  // pick per cell the bottom cell containing the cell apex.
  for (auto& kv : st.trees[s.delta]) {
    RangeEntry& entry = kv.second;
    std::vector<RangeKey> cur{entry.key};
    std::vector<RangeKey> nxt;
    for (int j = s.delta; j < s.levels; ++j) {
      nxt.clear();
      for (const RangeKey& rk : cur) {
        const auto cov = cover_range(s, rk);
        nxt.insert(nxt.end(), cov.begin(), cov.end());
      }
      cur.swap(nxt);
    }
    std::vector<std::uint32_t> nodes;
    nodes.reserve(cur.size());
    for (const RangeKey& rk : cur) {
      assert(rk.tree == s.levels && s.fanout[s.levels] == 2);
      if (rk.lo == 1 && rk.hi == 2)
        nodes.push_back(rk.node);
      else
        nodes.push_back(2 * rk.node + (rk.lo - 1));
    }
    entry.lambda.resize(entry.cutting.cells.size());
    for (std::size_t ci = 0; ci < entry.cutting.cells.size(); ++ci) {
      const Point3 apex = entry.cutting.cells[ci].apex;
      auto& links = entry.lambda[ci];
      links.reserve(nodes.size());
      for (std::uint32_t w : nodes) {
        const auto cell = first_containing_cell(st.log6[w].cutting, apex);
        if (!cell)
          throw std::logic_error(
              "build_all_cuttings: lambda apex not contained in any bottom cell");
        links.push_back(LambdaRef{w, *cell});
      }
      st.stats.lambda_links += links.size();
    }
  }

  return st;
}

}  // namespace orthorange
