#include "orthorange/outer.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace orthorange {

namespace {

constexpr Coord kNoBound = std::numeric_limits<Coord>::max();

// Exponent of the top leaf count: 2^e is the smallest power of two above
// n^(1/3), so every group holds fewer than n^(2/3) points and the per-level
// size sums of the recursion decay geometrically. The restricted structure
// pads the leaf line to a beta-power exponent internally; snapping here
// would pin the group count across a wide window of n and stretch the
// recursion depth to log n.
std::uint32_t pick_exponent(std::size_t n, std::uint32_t beta) {
  (void)beta;
  const double target = std::log2(static_cast<double>(n)) / 3.0;
  const auto e = static_cast<std::uint32_t>(std::floor(target)) + 1;
  return std::max<std::uint32_t>(e, 2);
}

}  // namespace

FiveSided::FiveSided(std::span<const Point4> pts, const Config& cfg)
    : n_(pts.size()), cfg_(cfg) {
  if (n_ <= static_cast<std::size_t>(cfg.cutoff_n0)) {
    flat_.assign(pts.begin(), pts.end());
    stats_.points = n_;
    stats_.flat_entries = n_;
    return;
  }
  std::vector<std::array<Coord, 4>> ranks(n_);
  {
    std::vector<std::uint32_t> order(n_);
    for (int axis = 0; axis < 4; ++axis) {
      std::iota(order.begin(), order.end(), 0u);
      std::sort(order.begin(), order.end(),
                [&](std::uint32_t a, std::uint32_t b) {
                  if (pts[a].c[axis] != pts[b].c[axis])
                    return pts[a].c[axis] < pts[b].c[axis];
                  return pts[a].id < pts[b].id;
                });
      vals_[axis].resize(n_);
      for (std::size_t r = 0; r < n_; ++r) {
        vals_[axis][r] = pts[order[r]].c[axis];
        ranks[order[r]][axis] = static_cast<Coord>(r + 1);
      }
    }
  }
  const std::uint32_t e = pick_exponent(n_, cfg_.beta);
  m_ = 1u << e;
  chunk_ = static_cast<std::uint32_t>((n_ + m_ - 1) / m_);
  used_ = static_cast<std::uint32_t>((n_ + chunk_ - 1) / chunk_);
  std::vector<Point4> transformed(n_);
  std::vector<std::vector<Point4>> groups(used_);
  for (std::size_t i = 0; i < n_; ++i) {
    const Coord leaf = (ranks[i][0] - 1) / chunk_ + 1;
    transformed[i] =
        Point4{{leaf, ranks[i][1], ranks[i][2], ranks[i][3]}, pts[i].id};
    groups[leaf - 1].push_back(pts[i]);
  }
  top_ = std::make_unique<RestrictedStructure>(
      std::span<const Point4>(transformed), m_, cfg_);
  stats_ = top_->build_stats();
  bottoms_.reserve(used_);
  for (const auto& g : groups) {
    bottoms_.emplace_back(std::span<const Point4>(g), cfg_);
    stats_.merge(bottoms_.back().build_stats());
  }
}

Coord FiveSided::lower_rank(int axis, Coord v) const {
  const auto& vs = vals_[axis];
  return static_cast<Coord>(std::lower_bound(vs.begin(), vs.end(), v) -
                            vs.begin()) +
         1;
}

Coord FiveSided::upper_rank(int axis, Coord v) const {
  const auto& vs = vals_[axis];
  return static_cast<Coord>(std::upper_bound(vs.begin(), vs.end(), v) -
                            vs.begin());
}

std::size_t FiveSided::depth() const {
  if (!top_) return 0;
  std::size_t d = 0;
  for (const FiveSided& b : bottoms_) d = std::max(d, b.depth());
  return d + 1;
}

void FiveSided::query_into(Coord a1, Coord b1, Coord b2, Coord b3, Coord b4,
                           std::vector<PointId>& out, QueryStats& qs) const {
  if (n_ == 0) return;
  if (!top_) {
    qs.branch = QueryBranch::scan;
    qs.scanned_points += flat_.size();
    for (const Point4& p : flat_)
      if (p.c[0] >= a1 && p.c[0] <= b1 && p.c[1] <= b2 && p.c[2] <= b3 &&
          p.c[3] <= b4)
        out.push_back(p.id);
    return;
  }
  const Coord lo = lower_rank(0, a1), hi = upper_rank(0, b1);
  if (lo > hi) return;
  const Coord r2 = upper_rank(1, b2), r3 = upper_rank(2, b3),
              r4 = upper_rank(3, b4);
  if (r2 == 0 || r3 == 0 || r4 == 0) return;
  const std::uint32_t va = (lo - 1) / chunk_ + 1, vb = (hi - 1) / chunk_ + 1;
  if (va == vb) {
    bottoms_[va - 1].query_into(a1, b1, b2, b3, b4, out, qs);
    return;
  }
  const Coord start_a =
      static_cast<Coord>(static_cast<std::uint64_t>(va - 1) * chunk_ + 1);
  const Coord end_b = static_cast<Coord>(
      std::min<std::uint64_t>(static_cast<std::uint64_t>(vb) * chunk_, n_));
  const std::uint32_t full_lo = va + (lo > start_a ? 1 : 0);
  const std::uint32_t full_hi = vb - (hi < end_b ? 1 : 0);
  if (full_lo <= full_hi) {
    QueryStats sub;
    const auto mid = top_->report(full_lo, full_hi, r2, r3, r4, &sub);
    qs.absorb(sub);
    if (qs.candidate_counts.empty()) {
      qs.candidate_counts = sub.candidate_counts;
      qs.branch = sub.branch;
    }
    out.insert(out.end(), mid.begin(), mid.end());
  }
  // Boundary groups carry one trivial side: the fully covered direction is
  // implied by the group's rank interval lying inside [lo, hi].
  if (lo > start_a) bottoms_[va - 1].query_into(a1, kNoBound, b2, b3, b4, out, qs);
  if (hi < end_b) bottoms_[vb - 1].query_into(0, b1, b2, b3, b4, out, qs);
}

bool FiveSided::empty_into(Coord a1, Coord b1, Coord b2, Coord b3, Coord b4,
                           QueryStats& qs) const {
  if (n_ == 0) return true;
  if (!top_) {
    qs.branch = QueryBranch::scan;
    qs.scanned_points += flat_.size();
    for (const Point4& p : flat_)
      if (p.c[0] >= a1 && p.c[0] <= b1 && p.c[1] <= b2 && p.c[2] <= b3 &&
          p.c[3] <= b4)
        return false;
    return true;
  }
  const Coord lo = lower_rank(0, a1), hi = upper_rank(0, b1);
  if (lo > hi) return true;
  const Coord r2 = upper_rank(1, b2), r3 = upper_rank(2, b3),
              r4 = upper_rank(3, b4);
  if (r2 == 0 || r3 == 0 || r4 == 0) return true;
  const std::uint32_t va = (lo - 1) / chunk_ + 1, vb = (hi - 1) / chunk_ + 1;
  if (va == vb) return bottoms_[va - 1].empty_into(a1, b1, b2, b3, b4, qs);
  const Coord start_a =
      static_cast<Coord>(static_cast<std::uint64_t>(va - 1) * chunk_ + 1);
  const Coord end_b = static_cast<Coord>(
      std::min<std::uint64_t>(static_cast<std::uint64_t>(vb) * chunk_, n_));
  const std::uint32_t full_lo = va + (lo > start_a ? 1 : 0);
  const std::uint32_t full_hi = vb - (hi < end_b ? 1 : 0);
  if (full_lo <= full_hi) {
    QueryStats sub;
    const bool e = top_->empty(full_lo, full_hi, r2, r3, r4, &sub);
    qs.absorb(sub);
    if (qs.candidate_counts.empty()) {
      qs.candidate_counts = sub.candidate_counts;
      qs.branch = sub.branch;
    }
    if (!e) return false;
  }
  if (lo > start_a && !bottoms_[va - 1].empty_into(a1, kNoBound, b2, b3, b4, qs))
    return false;
  if (hi < end_b && !bottoms_[vb - 1].empty_into(0, b1, b2, b3, b4, qs))
    return false;
  return true;
}

std::vector<PointId> FiveSided::query_5sided(Coord a1, Coord b1, Coord b2,
                                             Coord b3, Coord b4,
                                             QueryStats* stats) const {
  QueryStats local;
  QueryStats& qs = stats ? *stats : local;
  std::vector<PointId> out;
  query_into(a1, b1, b2, b3, b4, out, qs);
  std::sort(out.begin(), out.end());
  assert(std::adjacent_find(out.begin(), out.end()) == out.end());
  return out;
}

std::vector<PointId> FiveSided::query_dominance(Coord b1, Coord b2, Coord b3,
                                                Coord b4,
                                                QueryStats* stats) const {
  return query_5sided(0, b1, b2, b3, b4, stats);
}

bool FiveSided::empty_5sided(Coord a1, Coord b1, Coord b2, Coord b3, Coord b4,
                             QueryStats* stats) const {
  QueryStats local;
  QueryStats& qs = stats ? *stats : local;
  return empty_into(a1, b1, b2, b3, b4, qs);
}

GeneralStructure::GeneralStructure(std::span<const PointD> pts, int dims,
                                   const Config& cfg)
    : d_(dims), n_(pts.size()), cfg_(cfg) {
  if (dims < 4)
    throw std::invalid_argument("box structures need at least four dimensions");
  pts_.assign(pts.begin(), pts.end());
  for (const PointD& p : pts_)
    if (static_cast<int>(p.c.size()) != d_)
      throw std::invalid_argument("point dimensionality mismatch");
  id2idx_.reserve(n_);
  for (std::uint32_t i = 0; i < n_; ++i)
    if (!id2idx_.emplace(pts_[i].id, i).second)
      throw std::invalid_argument("duplicate point id");
  vals_.assign(d_, {});
  rank_.assign(n_, std::vector<Coord>(d_));
  std::vector<std::uint32_t> order(n_);
  for (int axis = 0; axis < d_; ++axis) {
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) {
                if (pts_[a].c[axis] != pts_[b].c[axis])
                  return pts_[a].c[axis] < pts_[b].c[axis];
                return pts_[a].id < pts_[b].id;
              });
    vals_[axis].resize(n_);
    for (std::size_t r = 0; r < n_; ++r) {
      vals_[axis][r] = pts_[order[r]].c[axis];
      rank_[order[r]][axis] = static_cast<Coord>(r + 1);
    }
  }
  stats_.points = n_;
  if (n_ == 0) return;
  std::vector<std::uint32_t> all(n_);
  std::iota(all.begin(), all.end(), 0u);
  std::sort(all.begin(), all.end(), [&](std::uint32_t a, std::uint32_t b) {
    return rank_[a][1] < rank_[b][1];
  });
  root_ = build_node(1, static_cast<std::uint32_t>(n_), std::move(all), false,
                     true);
}

int GeneralStructure::build_node(std::uint32_t lo, std::uint32_t hi,
                                 std::vector<std::uint32_t>&& subset,
                                 bool reflected, bool is_root) {
  (void)is_root;
  const int idx = static_cast<int>(tree_.size());
  tree_.emplace_back();
  tree_[idx].lo = lo;
  tree_[idx].hi = hi;
  ++stats_.forest_entries;
  if (subset.size() <= static_cast<std::size_t>(cfg_.cutoff_n0) || lo == hi) {
    stats_.flat_entries += subset.size();
    tree_[idx].subset = std::move(subset);
    return idx;
  }
  {
    std::vector<Point4> proj(subset.size());
    const Coord nn = static_cast<Coord>(n_);
    for (std::size_t k = 0; k < subset.size(); ++k) {
      const std::uint32_t i = subset[k];
      const Coord r2 = reflected ? nn + 1 - rank_[i][1] : rank_[i][1];
      proj[k] = Point4{{rank_[i][0], r2, rank_[i][2], rank_[i][3]},
                       pts_[i].id};
    }
    FiveSided fs(std::span<const Point4>(proj), cfg_);
    stats_.merge(fs.build_stats());
    tree_[idx].fs = std::move(fs);
    tree_[idx].has_fs = true;
  }
  const std::uint32_t mid = (lo + hi) / 2;
  const auto split = std::partition_point(
      subset.begin(), subset.end(),
      [&](std::uint32_t i) { return rank_[i][1] <= mid; });
  std::vector<std::uint32_t> leftp(subset.begin(), split);
  std::vector<std::uint32_t> rightp(split, subset.end());
  subset.clear();
  subset.shrink_to_fit();
  const int l = build_node(lo, mid, std::move(leftp), true, false);
  const int r = build_node(mid + 1, hi, std::move(rightp), false, false);
  tree_[idx].left = l;
  tree_[idx].right = r;
  return idx;
}

Coord GeneralStructure::lower_rank(int axis, Coord v) const {
  const auto& vs = vals_[axis];
  return static_cast<Coord>(std::lower_bound(vs.begin(), vs.end(), v) -
                            vs.begin()) +
         1;
}

Coord GeneralStructure::upper_rank(int axis, Coord v) const {
  const auto& vs = vals_[axis];
  return static_cast<Coord>(std::upper_bound(vs.begin(), vs.end(), v) -
                            vs.begin());
}

void GeneralStructure::collect_child(int idx, Coord slot2, Coord lo1,
                                     Coord hi1, Coord hi3, Coord hi4,
                                     std::vector<PointId>& cand,
                                     QueryStats& qs) const {
  const TreeNode& node = tree_[idx];
  ++qs.node_visits;
  if (node.has_fs) {
    QueryStats sub;
    const auto ids = node.fs.query_5sided(lo1, hi1, slot2, hi3, hi4, &sub);
    qs.absorb(sub);
    if (qs.candidate_counts.empty()) {
      qs.candidate_counts = sub.candidate_counts;
      qs.branch = sub.branch;
    }
    cand.insert(cand.end(), ids.begin(), ids.end());
  } else {
    qs.scanned_points += node.subset.size();
    for (std::uint32_t i : node.subset) cand.push_back(pts_[i].id);
  }
}

std::vector<PointId> GeneralStructure::query_box(
    std::span<const std::pair<Coord, Coord>> box, QueryStats* stats) const {
  QueryStats local;
  QueryStats& qs = stats ? *stats : local;
  if (static_cast<int>(box.size()) != d_)
    throw std::invalid_argument("box dimensionality mismatch");
  std::vector<PointId> out;
  if (n_ == 0 || root_ < 0) return out;
  std::vector<std::pair<Coord, Coord>> rb(d_);
  for (int axis = 0; axis < d_; ++axis) {
    rb[axis] = {lower_rank(axis, box[axis].first),
                upper_rank(axis, box[axis].second)};
    if (rb[axis].first > rb[axis].second) return out;
  }
  const Coord nn = static_cast<Coord>(n_);
  const Coord la = rb[1].first, lb = rb[1].second;
  std::vector<PointId> cand;
  if (la <= 1) {
    // Trivial lower bound on the lifted axis: one 5-sided query at the root.
    collect_child(root_, lb, rb[0].first, rb[0].second, rb[2].second,
                  rb[3].second, cand, qs);
  } else {
    int cur = root_;
    while (true) {
      const TreeNode& node = tree_[cur];
      ++qs.node_visits;
      if (node.left < 0) {
        qs.scanned_points += node.subset.size();
        for (std::uint32_t i : node.subset) cand.push_back(pts_[i].id);
        break;
      }
      const std::uint32_t mid = (node.lo + node.hi) / 2;
      if (lb <= mid) {
        cur = node.left;
        continue;
      }
      if (la > mid) {
        cur = node.right;
        continue;
      }
      // Split node: the left part keeps only the lower bound (reflected into
      // an upper bound), the right part only the upper bound.
      collect_child(node.left, nn + 1 - la, rb[0].first, rb[0].second,
                    rb[2].second, rb[3].second, cand, qs);
      collect_child(node.right, lb, rb[0].first, rb[0].second, rb[2].second,
                    rb[3].second, cand, qs);
      break;
    }
  }
  qs.scanned_points += cand.size();
  out.reserve(cand.size());
  for (const PointId id : cand) {
    const std::uint32_t i = id2idx_.at(id);
    bool ok = true;
    for (int axis = 0; axis < d_ && ok; ++axis)
      ok = rb[axis].first <= rank_[i][axis] &&
           rank_[i][axis] <= rb[axis].second;
    if (ok) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  assert(std::adjacent_find(out.begin(), out.end()) == out.end());
  return out;
}

std::size_t GeneralStructure::tree_depth() const {
  std::size_t best = 0;
  std::vector<std::pair<int, std::size_t>> stack;
  if (root_ >= 0) stack.push_back({root_, 1});
  while (!stack.empty()) {
    const auto [idx, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const TreeNode& node = tree_[idx];
    if (node.left >= 0) stack.push_back({node.left, d + 1});
    if (node.right >= 0) stack.push_back({node.right, d + 1});
  }
  return best;
}

void GeneralStructure::for_each_five_sided(
    const std::function<void(const FiveSided&)>& fn) const {
  for (const TreeNode& node : tree_)
    if (node.has_fs) fn(node.fs);
}

}  // namespace orthorange
