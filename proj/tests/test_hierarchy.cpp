#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "orthorange/hierarchy.hpp"
#include "orthorange/oracle.hpp"

using namespace orthorange;

namespace {

std::vector<Point4> make_instance(std::uint32_t m, std::size_t n,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Point4> pts(n);
  std::uniform_int_distribution<Coord> leaf(1, m);
  for (std::size_t i = 0; i < n; ++i) pts[i].c[0] = leaf(rng);
  for (int d = 1; d < 4; ++d) {
    std::vector<Coord> perm(n);
    std::iota(perm.begin(), perm.end(), Coord{1});
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < n; ++i) pts[i].c[d] = perm[i];
  }
  for (std::size_t i = 0; i < n; ++i) pts[i].id = static_cast<PointId>(i);
  return pts;
}

bool is_partition(const TreeSchedule& s, const std::vector<RangeKey>& keys,
                  std::uint32_t a, std::uint32_t b) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> spans;
  for (const RangeKey& k : keys) {
    const LeafSpan sp = range_leaf_span(s, k);
    spans.push_back({sp.lo, sp.hi});
  }
  std::sort(spans.begin(), spans.end());
  if (spans.empty() || spans.front().first != a || spans.back().second != b)
    return false;
  for (std::size_t i = 1; i < spans.size(); ++i)
    if (spans[i].first != spans[i - 1].second + 1) return false;
  return true;
}

bool members_valid(const TreeSchedule& s, int tree,
                   const std::vector<RangeKey>& keys) {
  for (const RangeKey& k : keys) {
    if (k.tree != tree) return false;
    if (!node_is_internal(s, tree, k.node)) return false;
    if (k.lo < 1 || k.lo > k.hi || k.hi > s.fanout[tree]) return false;
  }
  return true;
}

const CuttingStore& big_fixture() {
  static const CuttingStore store = [] {
    Config cfg;
    const auto pts = make_instance(512, 2048, 77);
    const TreeSchedule s = plan_fanouts(512, 3, pts.size(), cfg.nested_c);
    return build_all_cuttings(pts, s, cfg);
  }();
  return store;
}

}  // namespace

TEST_CASE("fanout plans follow the padded schedule") {
  {
    const TreeSchedule s = plan_fanouts(512, 3, 2048);
    CHECK(s.e == 9);
    CHECK(s.m_padded == 512);
    CHECK(s.levels == 3);
    CHECK(s.step[2] == 3);
    CHECK(s.step[3] == 1);
    CHECK(s.fanout[2] == 8);
    CHECK(s.fanout[3] == 2);
    CHECK(s.height[2] == 3);
    CHECK(s.height[3] == 9);
    CHECK(s.t_level[2] == 512u * 512u);
    CHECK(s.t_level[3] == 64);
    CHECK(s.u_level[2] == 3);
    CHECK(s.u_level[3] == 1);
    CHECK(s.delta == 2);
  }
  {
    const TreeSchedule s = plan_fanouts(8, 3, 32768);
    CHECK(s.e == 3);
    CHECK(s.m_padded == 8);
    CHECK(s.levels == 2);
    CHECK(s.fanout[2] == 2);
    CHECK(s.height[2] == 3);
    CHECK(s.t_level[2] == 64);
    CHECK(s.delta == 2);
  }
  CHECK(plan_fanouts(300, 3, 1000).m_padded == 512);
  CHECK(plan_fanouts(2, 3, 10).m_padded == 8);
  {
    const TreeSchedule s = plan_fanouts(16, 2, 100000);
    CHECK(s.e == 4);
    CHECK(s.levels == 3);
    CHECK(s.fanout[2] == 4);
    CHECK(s.fanout[3] == 2);
    CHECK(s.t_level[2] == 256);
    CHECK(s.t_level[3] == 16);
    CHECK(s.u_level[2] == 1);
  }
  for (std::size_t n : {0ull, 1ull, 1ull << 40}) {
    const TreeSchedule s = plan_fanouts(512, 3, n);
    CHECK(s.delta >= 2);
    CHECK(s.delta <= s.levels);
  }
  CHECK_THROWS_AS(plan_fanouts(1, 3, 10), std::invalid_argument);
  CHECK_THROWS_AS(plan_fanouts(8, 1, 10), std::invalid_argument);
}

TEST_CASE("binary spans nest and children partition") {
  CHECK(node_leaf_span(3, 1).lo == 1);
  CHECK(node_leaf_span(3, 1).hi == 8);
  CHECK(node_leaf_span(3, 2).hi == 4);
  CHECK(node_leaf_span(3, 3).lo == 5);
  CHECK(node_leaf_span(3, 8).lo == 1);
  CHECK(node_leaf_span(3, 8).hi == 1);
  CHECK(node_leaf_span(3, 15).lo == 8);

  const TreeSchedule s = plan_fanouts(512, 3, 2048);
  CHECK(tree_child(s, 2, 1, 1) == 8);
  CHECK(tree_child(s, 3, 1, 2) == 3);
  for (int tree = 2; tree <= s.levels; ++tree) {
    std::size_t internal = 0;
    for (std::uint32_t v = 1; v < 2 * s.m_padded; ++v) {
      if (!node_is_internal(s, tree, v)) continue;
      ++internal;
      const LeafSpan span = node_leaf_span(s.e, v);
      std::uint32_t expect = span.lo;
      for (std::uint32_t c = 1; c <= s.fanout[tree]; ++c) {
        const LeafSpan cs = node_leaf_span(s.e, tree_child(s, tree, v, c));
        REQUIRE(cs.lo == expect);
        expect = cs.hi + 1;
      }
      REQUIRE(expect == span.hi + 1);
    }
    CHECK(internal == (tree == 2 ? 73u : 511u));
  }
}

TEST_CASE("covers partition and respect the member bounds") {
  const TreeSchedule s = plan_fanouts(512, 3, 2048);
  const std::uint16_t f2 = static_cast<std::uint16_t>(s.fanout[2]);
  const std::uint32_t f3 = s.fanout[3];
  std::size_t checked = 0, bad = 0;
  for (std::uint32_t v = 1; v < 2 * s.m_padded; ++v) {
    if (!node_is_internal(s, 2, v)) continue;
    for (std::uint16_t l = 1; l <= f2; ++l) {
      for (std::uint16_t r = l; r <= f2; ++r) {
        const RangeKey key{2, v, l, r};
        const auto cover = cover_range(s, key);
        const LeafSpan span = range_leaf_span(s, key);
        ++checked;
        bool ok = members_valid(s, 3, cover) &&
                  is_partition(s, cover, span.lo, span.hi) &&
                  cover.size() <= 5;
        std::size_t bounded = 0, prefixish = 0, suffixish = 0;
        for (const RangeKey& c : cover) {
          const RangeKind kind = classify(c.lo, c.hi, f3);
          bounded += kind == RangeKind::bounded ? 1 : 0;
          prefixish +=
              (kind == RangeKind::prefix || kind == RangeKind::full) ? 1 : 0;
          suffixish +=
              (kind == RangeKind::suffix || kind == RangeKind::full) ? 1 : 0;
        }
        ok = ok && bounded <= 1;
        const RangeKind kind = classify(l, r, f2);
        if (kind == RangeKind::full)
          ok = ok && cover.size() == 1 && cover[0].node == v &&
               cover[0].lo == 1 && cover[0].hi == f3;
        if (kind == RangeKind::prefix)
          ok = ok && cover.size() <= 3 && prefixish == cover.size();
        if (kind == RangeKind::suffix)
          ok = ok && cover.size() <= 3 && suffixish == cover.size();
        if (!ok) {
          ++bad;
          CAPTURE(v);
          CAPTURE(l);
          CAPTURE(r);
          CHECK(ok);
        }
      }
    }
  }
  CHECK(checked == 73u * 36u);
  CHECK(bad == 0);
  CHECK_THROWS_AS(cover_range(s, RangeKey{3, 1, 1, 2}), std::invalid_argument);
}

TEST_CASE("iterated covers stay within the budget") {
  const TreeSchedule s = plan_fanouts(256, 2, 100000);
  REQUIRE(s.levels == 4);
  std::size_t checked = 0;
  for (std::uint32_t v = 1; v < 2 * s.m_padded; ++v) {
    if (!node_is_internal(s, 2, v)) continue;
    for (std::uint16_t l = 1; l <= s.fanout[2]; ++l) {
      for (std::uint16_t r = l; r <= s.fanout[2]; ++r) {
        const RangeKey key{2, v, l, r};
        const LeafSpan span = range_leaf_span(s, key);
        std::vector<RangeKey> cur{key};
        std::size_t budget = 1;
        for (int j = 2; j < s.levels; ++j) {
          std::vector<RangeKey> nxt;
          for (const RangeKey& k : cur) {
            const auto cov = cover_range(s, k);
            nxt.insert(nxt.end(), cov.begin(), cov.end());
          }
          cur = std::move(nxt);
          budget = 2 * budget * s.beta;  // running 2*beta^j bound
          REQUIRE(members_valid(s, j + 1, cur));
          REQUIRE(is_partition(s, cur, span.lo, span.hi));
          REQUIRE(cur.size() <= budget - 1);
        }
        ++checked;
      }
    }
  }
  CHECK(checked == 17u * 136u);
}

TEST_CASE("interval decompositions are exact") {
  {
    const TreeSchedule s = plan_fanouts(8, 3, 64);
    for (std::uint32_t a = 1; a <= 8; ++a) {
      for (std::uint32_t b = a; b <= 8; ++b) {
        const auto keys = decompose_interval(s, a, b);
        if (a == b) {
          CHECK(keys.empty());
          continue;
        }
        CAPTURE(a);
        CAPTURE(b);
        REQUIRE(members_valid(s, 2, keys));
        REQUIRE(is_partition(s, keys, a, b));
        REQUIRE(keys.size() <= 2 * static_cast<std::size_t>(s.height[2]) - 1);
      }
    }
    const auto full = decompose_interval(s, 1, 8);
    REQUIRE(full.size() == 1);
    CHECK(classify(full[0].lo, full[0].hi, s.fanout[2]) == RangeKind::full);
    CHECK(full[0].node == 1);
  }
  {
    const TreeSchedule s = plan_fanouts(512, 3, 2048);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::uint32_t> dist(1, 512);
    for (int i = 0; i < 2000; ++i) {
      std::uint32_t a = dist(rng), b = dist(rng);
      if (a > b) std::swap(a, b);
      const auto keys = decompose_interval(s, a, b);
      if (a == b) {
        REQUIRE(keys.empty());
        continue;
      }
      CAPTURE(a);
      CAPTURE(b);
      REQUIRE(members_valid(s, 2, keys));
      REQUIRE(is_partition(s, keys, a, b));
      REQUIRE(keys.size() <= 2 * static_cast<std::size_t>(s.height[2]) - 1);
    }
    CHECK_THROWS_AS(decompose_interval(s, 0, 4), std::invalid_argument);
    CHECK_THROWS_AS(decompose_interval(s, 3, 513), std::invalid_argument);
    CHECK_THROWS_AS(decompose_interval(s, 9, 4), std::invalid_argument);
  }
}

TEST_CASE("small builds populate every layer") {
  Config cfg;
  std::vector<Point4> pts = make_instance(8, 8, 3);
  for (std::size_t i = 0; i < 8; ++i) pts[i].c[0] = static_cast<Coord>(i + 1);
  const TreeSchedule s = plan_fanouts(8, 3, 8, cfg.nested_c);
  const CuttingStore store = build_all_cuttings(pts, s, cfg);

  CHECK(store.stats.points == 8);
  CHECK(store.stats.nested_cells == 0);
  CHECK(store.stats.gamma_links == 0);
  CHECK(store.stats.lambda_links == 21);
  const auto keys = store.keys(2);
  REQUIRE(keys.size() == 21);
  CHECK(store.keys(3).empty());

  std::uint64_t tree_cells = 0;
  for (const RangeKey& k : keys) {
    const RangeEntry& entry = store.at(k);
    REQUIRE(entry.cutting.cells.size() == 1);
    tree_cells += 1;
    CHECK(entry.cutting.cells[0].apex.x == store.cap1);
    CHECK(entry.cutting.cells[0].apex.y == store.cap2);
    CHECK(entry.cutting.cells[0].apex.z == store.cap3);
    CHECK(entry.tree_index.cell_count() == 1);
    CHECK(entry.nested.empty());
    REQUIRE(entry.lambda.size() == 1);
    REQUIRE(entry.lambda[0].size() == 1);
    const std::uint32_t want_node = (k.lo == 1 && k.hi == 2)
                                        ? k.node
                                        : 2 * k.node + (k.lo - 1);
    CHECK(entry.lambda[0][0].node == want_node);
    CHECK(entry.lambda[0][0].cell == 0);
    const std::size_t span_size = store.range_points(k).size();
    const LeafSpan span = range_leaf_span(s, k);
    CHECK(span_size == span.hi - span.lo + 1);  // one point per leaf
  }
  for (std::uint32_t v = 1; v < 16; ++v) {
    REQUIRE(store.log6[v].cutting.cells.size() == 1);
    REQUIRE(store.log6[v].cell_dom3.size() == 1);
    const LeafSpan span = node_leaf_span(s.e, v);
    CHECK(store.log6[v].cell_dom3[0].size() == span.hi - span.lo + 1);
    tree_cells += 1;
  }
  CHECK(store.stats.tree_cells == tree_cells);

  const auto all = store.log6[1].cell_dom3[0].report(store.cap1, store.cap2,
                                                     store.cap3);
  CHECK(all.size() == 8);

  CHECK(store.find(RangeKey{2, 1, 1, 2}) != nullptr);
  CHECK(store.find(RangeKey{2, 9, 1, 2}) == nullptr);
  CHECK_THROWS_AS(store.at(RangeKey{3, 1, 1, 2}), std::out_of_range);
  for (std::uint32_t leaf = 1; leaf <= 8; ++leaf) {
    REQUIRE(store.leaf_points(leaf).size() == 1);
    CHECK(store.leaf_points(leaf)[0].c[0] == leaf);
  }

  // byte-for-byte determinism of a rebuild
  const CuttingStore again = build_all_cuttings(pts, s, cfg);
  CHECK(again.stats.total_entities() == store.stats.total_entities());
  for (const RangeKey& k : keys) {
    const auto& a = store.at(k).cutting.cells;
    const auto& b = again.at(k).cutting.cells;
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].apex.x == b[i].apex.x);
      CHECK(a[i].apex.y == b[i].apex.y);
      CHECK(a[i].apex.z == b[i].apex.z);
    }
  }

  // an empty instance still builds every layer
  const CuttingStore empty =
      build_all_cuttings(std::span<const Point4>{}, s, cfg);
  CHECK(empty.stats.points == 0);
  CHECK(empty.keys(2).size() == 21);
  CHECK(empty.leaf_points(4).empty());

  std::vector<Point4> bad = pts;
  bad[0].c[0] = 9;  // beyond the padded leaves
  CHECK_THROWS_AS(build_all_cuttings(bad, s, cfg), std::invalid_argument);
  bad[0].c[0] = 0;
  CHECK_THROWS_AS(build_all_cuttings(bad, s, cfg), std::invalid_argument);

  // leaves between m and the padded count are legal and stay empty
  const TreeSchedule s6 = plan_fanouts(6, 3, 8, cfg.nested_c);
  std::vector<Point4> padded = pts;
  for (Point4& p : padded) p.c[0] = std::min<Coord>(p.c[0], 6);
  padded[0].c[0] = 7;
  const CuttingStore wide = build_all_cuttings(padded, s6, cfg);
  CHECK(wide.stats.points == 8);
  CHECK(wide.leaf_points(7).size() == 1);
  CHECK(wide.leaf_points(8).empty());
}

TEST_CASE("the large fixture wires nested cuttings, gamma, and lambda") {
  const CuttingStore& store = big_fixture();
  const TreeSchedule& s = store.schedule;
  REQUIRE(s.levels == 3);
  REQUIRE(s.delta == 2);
  CHECK(store.trees[2].size() == 73u * 36u);
  CHECK(store.trees[3].size() == 511u * 3u);
  CHECK(store.stats.nested_cells > 0);
  CHECK(store.stats.gamma_links >= store.stats.nested_cells);
  CHECK(store.stats.lambda_links > 0);
  CHECK(store.stats.dom3_entries > 0);
  CHECK(store.stats.flat_entries > 0);

  std::size_t lambda_total = 0;
  for (const RangeKey& k : store.keys(2)) {
    const RangeEntry& entry = store.at(k);
    const LeafSpan span = range_leaf_span(s, k);
    REQUIRE(entry.nested.size() == entry.cutting.cells.size());
    REQUIRE(entry.lambda.size() == entry.cutting.cells.size());
    for (std::size_t ci = 0; ci < entry.cutting.cells.size(); ++ci) {
      const Point3 owner = entry.cutting.cells[ci].apex;
      const auto& links = entry.lambda[ci];
      REQUIRE(links.size() <= 5);
      lambda_total += links.size();
      std::vector<std::pair<std::uint32_t, std::uint32_t>> spans;
      for (const LambdaRef& l : links) {
        const LeafSpan ls = node_leaf_span(s.e, l.node);
        spans.push_back({ls.lo, ls.hi});
        const auto& bottom = store.log6[l.node];
        REQUIRE(l.cell < bottom.cutting.cells.size());
        CHECK(cell_contains(bottom.cutting.cells[l.cell].apex, owner));
      }
      std::sort(spans.begin(), spans.end());
      REQUIRE(spans.front().first == span.lo);
      for (std::size_t i = 1; i < spans.size(); ++i)
        REQUIRE(spans[i].first == spans[i - 1].second + 1);
      REQUIRE(spans.back().second == span.hi);
    }
  }
  CHECK(lambda_total == store.stats.lambda_links);

  for (const RangeKey& k : store.keys(3)) {
    const RangeEntry& entry = store.at(k);
    CHECK(entry.nested.empty());
    CHECK(entry.lambda.empty());
    CHECK(entry.tree_index.cell_count() == 0);
  }

  // gamma wiring on every entry
  const auto keys2 = store.keys(2);
  std::size_t gamma_checked = 0;
  for (std::size_t ki = 0; ki < keys2.size(); ++ki) {
    const RangeEntry& entry = store.at(keys2[ki]);
    const auto cover = cover_range(s, entry.key);
    const LeafSpan span = range_leaf_span(s, entry.key);
    REQUIRE(is_partition(s, cover, span.lo, span.hi));
    for (std::size_t ci = 0; ci < entry.nested.size(); ++ci) {
      const NestedInfo& info = entry.nested[ci];
      const Point3 owner = entry.cutting.cells[ci].apex;
      REQUIRE(info.apexes.size() == info.cutting.cells.size());
      REQUIRE(info.gamma.size() == info.apexes.size());
      for (std::size_t nj = 0; nj < info.apexes.size(); ++nj) {
        const Point3& probe = info.apexes[nj];
        REQUIRE(cell_contains(owner, probe));
        REQUIRE(info.gamma[nj].size() == cover.size());
        REQUIRE(info.gamma[nj].size() <= 5);
        for (std::size_t t = 0; t < cover.size(); ++t) {
          const GammaRef& g = info.gamma[nj][t];
          REQUIRE(g.key == cover[t]);
          const RangeEntry& tgt = store.at(g.key);
          REQUIRE(g.cell < tgt.cutting.cells.size());
          REQUIRE(cell_contains(tgt.cutting.cells[g.cell].apex, probe));
        }
        ++gamma_checked;
      }
    }
  }
  CHECK(gamma_checked >= 1000);
}

TEST_CASE("sampled nested links reproduce the conflict answers") {
  const CuttingStore& store = big_fixture();
  const TreeSchedule& s = store.schedule;
  std::mt19937_64 rng(99);
  const auto keys2 = store.keys(2);
  std::size_t pairs = 0;
  for (std::size_t ki = 0; ki < keys2.size(); ki += 5) {
    const RangeEntry& entry = store.at(keys2[ki]);
    const auto range4 = store.range_points(entry.key);
    for (std::size_t ci = 0; ci < entry.nested.size(); ++ci) {
      const NestedInfo& info = entry.nested[ci];
      if (info.apexes.empty()) continue;
      std::uniform_int_distribution<std::size_t> pick(0, info.apexes.size() - 1);
      for (int rep = 0; rep < 2; ++rep) {
        const std::size_t nj = pick(rng);
        const Point3& apex = info.apexes[nj];
        const Point3 q{
            std::uniform_int_distribution<Coord>(0, apex.x)(rng),
            std::uniform_int_distribution<Coord>(0, apex.y)(rng),
            std::uniform_int_distribution<Coord>(0, apex.z)(rng), 0};
        std::vector<PointId> want;
        for (const Point4& p : range4)
          if (p.c[1] <= q.x && p.c[2] <= q.y && p.c[3] <= q.z)
            want.push_back(p.id);
        std::sort(want.begin(), want.end());
        std::vector<PointId> got;
        for (const GammaRef& g : info.gamma[nj]) {
          const RangeEntry& tgt = store.at(g.key);
          const Point3 ta = tgt.cutting.cells[g.cell].apex;
          for (const Point4& p : store.range_points(g.key))
            if (p.c[1] <= q.x && p.c[2] <= q.y && p.c[3] <= q.z &&
                p.c[1] <= ta.x && p.c[2] <= ta.y && p.c[3] <= ta.z)
              got.push_back(p.id);
        }
        std::sort(got.begin(), got.end());
        const bool dup =
            std::adjacent_find(got.begin(), got.end()) != got.end();
        CAPTURE(ki);
        CAPTURE(ci);
        CAPTURE(nj);
        REQUIRE(!dup);
        REQUIRE(got == want);
        ++pairs;
      }
    }
  }
  CHECK(pairs >= 1000);
  (void)s;
}

TEST_CASE("sampled stored cuttings satisfy the cutting properties") {
  const CuttingStore& store = big_fixture();
  const TreeSchedule& s = store.schedule;
  VerifyOptions opt;
  opt.cap_x = store.cap1;
  opt.cap_y = store.cap2;
  opt.cap_z = store.cap3;
  opt.sample_columns = 1500;

  std::vector<Point3> proj;
  auto project = [&](std::span<const Point4> span4) {
    proj.clear();
    for (const Point4& p : span4)
      proj.push_back(Point3{p.c[1], p.c[2], p.c[3], p.id});
  };

  // the busiest tree-3 cuttings: the root node's three ranges
  for (const RangeKey k :
       {RangeKey{3, 1, 1, 2}, RangeKey{3, 1, 1, 1}, RangeKey{3, 1, 2, 2}}) {
    const RangeEntry& entry = store.at(k);
    project(store.range_points(k));
    const auto report = verify_cutting(proj, entry.cutting.t,
                                       apexes_of(entry.cutting), opt);
    CAPTURE(k.node);
    CHECK(report.passed);
    CHECK(entry.cutting.cells.size() <=
          4 * proj.size() / entry.cutting.t + 4);
  }

  // sampled nested cuttings, raw (pre-clip) apexes against their members
  const auto keys2 = store.keys(2);
  int nested_done = 0;
  for (std::size_t ki = 0; ki < keys2.size() && nested_done < 3; ki += 301) {
    const RangeEntry& entry = store.at(keys2[ki]);
    project(store.range_points(entry.key));
    for (std::size_t ci = 0; ci < entry.nested.size() && nested_done < 3; ++ci) {
      const Point3 owner = entry.cutting.cells[ci].apex;
      std::vector<Point3> members;
      for (const Point3& p : proj)
        if (cell_contains(owner, p)) members.push_back(p);
      const NestedInfo& info = entry.nested[ci];
      const auto report = verify_cutting(members, info.cutting.t,
                                         apexes_of(info.cutting), opt);
      CAPTURE(ki);
      CHECK(report.passed);
      ++nested_done;
    }
  }
  CHECK(nested_done == 3);

  // sampled bottom-layer cuttings
  for (std::uint32_t v : {1u, 5u, 700u}) {
    project(store.span_points(node_leaf_span(s.e, v)));
    const Log6Node& node = store.log6[v];
    const auto report =
        verify_cutting(proj, node.cutting.t, apexes_of(node.cutting), opt);
    CAPTURE(v);
    CHECK(report.passed);
  }
}

TEST_CASE("bottom layer dominance structures answer within their cells") {
  const CuttingStore& store = big_fixture();
  const TreeSchedule& s = store.schedule;
  std::mt19937_64 rng(123);
  std::vector<Point3> proj;
  for (std::uint32_t v : {1u, 2u, 3u, 40u, 511u, 900u}) {
    proj.clear();
    for (const Point4& p : store.span_points(node_leaf_span(s.e, v)))
      proj.push_back(Point3{p.c[1], p.c[2], p.c[3], p.id});
    const Log6Node& node = store.log6[v];
    REQUIRE(node.cell_dom3.size() == node.cutting.cells.size());
    for (int rep = 0; rep < 300; ++rep) {
      const Point3 q{std::uniform_int_distribution<Coord>(0, store.cap1)(rng),
                     std::uniform_int_distribution<Coord>(0, store.cap2)(rng),
                     std::uniform_int_distribution<Coord>(0, store.cap3)(rng),
                     0};
      const auto cell = first_containing_cell(node.cutting, q);
      if (!cell) {
        // uncovered probes dominate more than the coverage threshold
        CHECK(count_dominated(proj, q.x, q.y, q.z) >
              static_cast<std::uint64_t>(0.5 * node.cutting.t));
        continue;
      }
      const auto got = node.cell_dom3[*cell].report(q.x, q.y, q.z);
      const auto want = report_dominated(proj, q.x, q.y, q.z);
      CAPTURE(v);
      REQUIRE(got == want);
    }
  }
}
