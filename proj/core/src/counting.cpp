#include "orthorange/counting.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace orthorange {

// ---------------------------------------------------------------------------
// Count4

Count4::Count4(std::span<const Point4> pts) : n_(pts.size()) {
  nodes_.emplace_back();  // id 0 = none
  if (n_ == 0) return;
  std::vector<Point4> work(pts.begin(), pts.end());
  root_ = build(std::move(work), 0);
}

std::uint32_t Count4::build(std::vector<Point4>&& pts, int level) {
  Node nd;
  if (level == 3) {
    nd.off = static_cast<std::uint32_t>(last_vals_.size());
    nd.len = static_cast<std::uint32_t>(pts.size());
    for (const Point4& p : pts) last_vals_.push_back(p.c[3]);
    std::sort(last_vals_.begin() + nd.off, last_vals_.end());
    nodes_.push_back(nd);
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }
  std::sort(pts.begin(), pts.end(), [level](const Point4& a, const Point4& b) {
    if (a.c[level] != b.c[level]) return a.c[level] < b.c[level];
    return a.id < b.id;
  });
  if (pts.size() <= kLeafCutoff) {
    nd.off = static_cast<std::uint32_t>(leaf_pts_.size());
    nd.len = static_cast<std::uint32_t>(pts.size());
    leaf_pts_.insert(leaf_pts_.end(), pts.begin(), pts.end());
    nodes_.push_back(nd);
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }
  const std::size_t mid = pts.size() / 2;
  nd.split = pts[mid - 1].c[level];
  std::vector<Point4> lo(pts.begin(), pts.begin() + mid);
  std::vector<Point4> hi(pts.begin() + mid, pts.end());
  nd.left = build(std::move(lo), level);
  nd.right = build(std::move(hi), level);
  nd.child = build(std::move(pts), level + 1);
  nodes_.push_back(nd);
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

std::uint64_t Count4::query_node(std::uint32_t id, int level, const Coord* bounds) const {
  if (id == 0) return 0;
  ++node_visits_;
  const Node& nd = nodes_[id];
  if (level == 3) {
    const Coord* beg = last_vals_.data() + nd.off;
    return static_cast<std::uint64_t>(std::upper_bound(beg, beg + nd.len, bounds[3]) - beg);
  }
  if (nd.left == 0) {  // leaf slice: scan remaining bounds
    std::uint64_t cnt = 0;
    for (std::uint32_t i = 0; i < nd.len; ++i) {
      const Point4& p = leaf_pts_[nd.off + i];
      bool ok = true;
      for (int d = level; d < 4; ++d) ok = ok && p.c[d] <= bounds[d];
      cnt += ok ? 1 : 0;
    }
    return cnt;
  }
  if (bounds[level] >= nd.split) {
    // Entire left subtree satisfies this coordinate: drop to its next level.
    const Node& ln = nodes_[nd.left];
    std::uint64_t left_cnt;
    if (ln.left == 0 && level < 3 && ln.child == 0) {
      left_cnt = query_node(nd.left, level, bounds);  // leaf: rescans, still exact
    } else {
      left_cnt = query_node(ln.child, level + 1, bounds);
      ++node_visits_;
    }
    return left_cnt + query_node(nd.right, level, bounds);
  }
  return query_node(nd.left, level, bounds);
}

std::uint64_t Count4::prefix4(Coord a, Coord b, Coord c, Coord d) const {
  if (root_ == 0 || a == 0) return 0;
  const Coord bounds[4] = {a, b, c, d};
  return query_node(root_, 0, bounds);
}

std::uint64_t Count4::count_restricted(Coord l, Coord r, Coord x, Coord y, Coord z) const {
  ++counting_calls_;
  if (l == 0) l = 1;
  if (r < l) return 0;
  const std::uint64_t hi = prefix4(r, x, y, z);
  const std::uint64_t lo = (l == 1) ? 0 : prefix4(l - 1, x, y, z);
  return hi - lo;
}

std::uint64_t Count4::count_box(const RankBox& box) const {
  if (box.dim != 4) throw std::invalid_argument("count_box: dim must be 4");
  if (box.empty()) return 0;
  std::int64_t total = 0;
  for (int mask = 0; mask < 8; ++mask) {
    Coord t[3];
    int sign = 1;
    bool zero = false;
    for (int d = 0; d < 3; ++d) {
      if (mask & (1 << d)) {
        if (box.lo[d + 1] <= 1) { zero = true; break; }
        t[d] = box.lo[d + 1] - 1;
        sign = -sign;
      } else {
        t[d] = box.hi[d + 1];
      }
    }
    if (zero) continue;
    const std::uint64_t c = count_restricted(box.lo[0], box.hi[0], t[0], t[1], t[2]);
    total += sign * static_cast<std::int64_t>(c);
  }
  assert(total >= 0);
  return static_cast<std::uint64_t>(total);
}

Coord Count4::select(Coord l, Coord r, int axis, Coord fa, Coord fb, std::uint64_t k,
                     Coord cap) const {
  assert(axis >= 1 && axis <= 3);
  // Smallest v in [1, cap] whose count exceeds k; the answer is v - 1 (or cap).
  Coord lo = 1, hi = cap + 1;
  while (lo < hi) {
    const Coord mid = lo + (hi - lo) / 2;
    Coord b[3] = {fa, fa, fb};
    if (axis == 1) { b[0] = mid; b[1] = fa; b[2] = fb; }
    if (axis == 2) { b[0] = fa; b[1] = mid; b[2] = fb; }
    if (axis == 3) { b[0] = fa; b[1] = fb; b[2] = mid; }
    if (count_restricted(l, r, b[0], b[1], b[2]) > k) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo - 1;
}

// ---------------------------------------------------------------------------
// Brute provider

namespace {

class BruteProvider final : public CountingProvider {
 public:
  BruteProvider(std::span<const Point3> pts, Coord cx, Coord cy, Coord cz)
      : pts_(pts.begin(), pts.end()) {
    cx_ = cx; cy_ = cy; cz_ = cz;
    std::sort(pts_.begin(), pts_.end(), [](const Point3& a, const Point3& b) {
      return a.z < b.z;
    });
    plane_ = cz;
    active_ = pts_.size();
  }

  void set_plane(Coord z) override {
    assert(z <= plane_);
    plane_ = z;
    while (active_ > 0 && pts_[active_ - 1].z > z) --active_;
  }

  std::uint64_t count2(Coord x, Coord y) override {
    ++counting_queries;
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < active_; ++i)
      c += (pts_[i].x <= x && pts_[i].y <= y) ? 1 : 0;
    return c;
  }

  Coord select_x(Coord y, std::uint64_t k) override {
    ++selection_queries;
    scratch_.clear();
    for (std::size_t i = 0; i < active_; ++i)
      if (pts_[i].y <= y) scratch_.push_back(pts_[i].x);
    return kth_minus_one(k, cx_);
  }

  Coord select_y(Coord x, std::uint64_t k) override {
    ++selection_queries;
    scratch_.clear();
    for (std::size_t i = 0; i < active_; ++i)
      if (pts_[i].x <= x) scratch_.push_back(pts_[i].y);
    return kth_minus_one(k, cy_);
  }

  Coord select_z(Coord x, Coord y, std::uint64_t k) override {
    ++selection_queries;
    scratch_.clear();
    for (const Point3& p : pts_)  // static: ignores the plane
      if (p.x <= x && p.y <= y) scratch_.push_back(p.z);
    return kth_minus_one(k, cz_);
  }

 private:
  Coord kth_minus_one(std::uint64_t k, Coord cap) {
    if (scratch_.size() <= k) return cap;
    auto nth = scratch_.begin() + static_cast<std::ptrdiff_t>(k);
    std::nth_element(scratch_.begin(), nth, scratch_.end());
    return *nth - 1;
  }

  std::vector<Point3> pts_;
  std::vector<Coord> scratch_;
  Coord plane_ = 0;
  std::size_t active_ = 0;
};

// ---------------------------------------------------------------------------
// Fast provider: x- and y-segment trees with per-node Fenwick-tracked entries.

struct SideTree {
  std::vector<Coord> keys;              // sorted unique primary coordinate
  std::size_t base = 1;                 // leaves occupy [base, base + P)
  std::vector<std::vector<Coord>> secondary;  // per node, sorted secondary coord
  std::vector<std::vector<Coord>> payload;    // z values aligned with secondary
  std::vector<std::vector<std::int32_t>> fen;
  std::vector<std::vector<std::int32_t>> nxt, prv;  // circular lists, sentinel = len
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> locs;  // per point

  void build(std::span<const Point3> pts, bool primary_is_x, bool with_lists) {
    keys.clear();
    for (const Point3& p : pts) keys.push_back(primary_is_x ? p.x : p.y);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    std::size_t P = 1;
    while (P < std::max<std::size_t>(keys.size(), 1)) P <<= 1;
    base = P;
    secondary.assign(2 * P, {});
    payload.assign(2 * P, {});
    fen.assign(2 * P, {});
    if (with_lists) { nxt.assign(2 * P, {}); prv.assign(2 * P, {}); }
    locs.assign(pts.size(), {});

    // Gather (secondary, z, point) per node along each point's leaf-to-root path.
    std::vector<std::vector<std::array<Coord, 2>>> tmp(2 * P);
    std::vector<std::vector<std::uint32_t>> owner(2 * P);
    for (std::uint32_t i = 0; i < pts.size(); ++i) {
      const Point3& p = pts[i];
      const Coord prim = primary_is_x ? p.x : p.y;
      const Coord sec = primary_is_x ? p.y : p.x;
      std::size_t v = base + static_cast<std::size_t>(
          std::lower_bound(keys.begin(), keys.end(), prim) - keys.begin());
      for (; v >= 1; v /= 2) {
        tmp[v].push_back({sec, p.z});
        owner[v].push_back(i);
      }
    }
    for (std::size_t v = 1; v < 2 * P; ++v) {
      const std::size_t len = tmp[v].size();
      if (len == 0 && !with_lists) continue;
      std::vector<std::uint32_t> order(len);
      for (std::uint32_t j = 0; j < len; ++j) order[j] = j;
      std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return tmp[v][a][0] < tmp[v][b][0];
      });
      secondary[v].resize(len);
      payload[v].resize(len);
      fen[v].assign(len + 1, 0);
      for (std::uint32_t j = 0; j < len; ++j) {
        secondary[v][j] = tmp[v][order[j]][0];
        payload[v][j] = tmp[v][order[j]][1];
        locs[owner[v][order[j]]].push_back({static_cast<std::uint32_t>(v), j});
      }
      for (std::size_t j = 1; j <= len; ++j)
        fen[v][j] = static_cast<std::int32_t>(j & (~j + 1));  // all-ones Fenwick
      if (with_lists) {
        nxt[v].resize(len + 1);
        prv[v].resize(len + 1);
        for (std::size_t j = 0; j <= len; ++j) {
          nxt[v][j] = static_cast<std::int32_t>((j + 1) % (len + 1));
          prv[v][j] = static_cast<std::int32_t>(j == 0 ? len : j - 1);
        }
      }
    }
  }

  static void fen_add(std::vector<std::int32_t>& f, std::size_t pos, std::int32_t d) {
    for (std::size_t i = pos + 1; i < f.size(); i += i & (~i + 1)) f[i] += d;
  }
  static std::int64_t fen_sum(const std::vector<std::int32_t>& f, std::size_t cnt) {
    std::int64_t s = 0;
    for (std::size_t i = cnt; i > 0; i -= i & (~i + 1)) s += f[i];
    return s;
  }

  // Active entries in node v with secondary coordinate <= b.
  std::int64_t node_count(std::size_t v, Coord b) const {
    const auto& sec = secondary[v];
    const std::size_t pos = static_cast<std::size_t>(
        std::upper_bound(sec.begin(), sec.end(), b) - sec.begin());
    return fen_sum(fen[v], pos);
  }

  std::size_t prefix_len(Coord primary_bound) const {
    return static_cast<std::size_t>(
        std::upper_bound(keys.begin(), keys.end(), primary_bound) - keys.begin());
  }

  void erase_point(std::uint32_t idx, bool with_lists) {
    for (auto [v, pos] : locs[idx]) {
      fen_add(fen[v], pos, -1);
      if (with_lists) {
        auto& nx = nxt[v];
        auto& pv = prv[v];
        nx[static_cast<std::size_t>(pv[pos])] = nx[pos];
        pv[static_cast<std::size_t>(nx[pos])] = pv[pos];
      }
    }
  }

  // count of active points with primary <= pb and secondary <= sb
  std::int64_t count(Coord pb, Coord sb) const {
    std::size_t cnt = prefix_len(pb);
    std::int64_t total = 0;
    std::size_t lo = base, hi = base + cnt;  // [lo, hi): leaf id range
    while (lo < hi) {
      if (lo & 1) total += node_count(lo++, sb);
      if (hi & 1) total += node_count(--hi, sb);
      lo /= 2; hi /= 2;
    }
    return total;
  }

  // primary coordinate of the kk-th (1-based) active point in primary order
  // among {secondary <= sb}; returns false if fewer than kk such points.
  bool kth_by_primary(Coord sb, std::uint64_t kk, Coord* out) const {
    if (keys.empty()) return false;
    std::size_t v = 1;
    std::int64_t want = static_cast<std::int64_t>(kk);
    if (node_count(1, sb) < want) return false;
    while (v < base) {
      const std::int64_t lc = node_count(2 * v, sb);
      if (lc >= want) {
        v = 2 * v;
      } else {
        want -= lc;
        v = 2 * v + 1;
      }
    }
    const std::size_t leaf = v - base;
    assert(leaf < keys.size());
    *out = keys[leaf];
    return true;
  }

  // Append the z payloads of active entries with secondary <= sb over the
  // primary prefix <= pb. Requires with_lists.
  void collect_z(Coord pb, Coord sb, std::vector<Coord>& out) const {
    std::size_t cnt = prefix_len(pb);
    std::size_t lo = base, hi = base + cnt;
    auto emit = [&](std::size_t v) {
      const auto& sec = secondary[v];
      const std::size_t len = sec.size();
      for (std::size_t j = static_cast<std::size_t>(nxt[v][len]); j != len;
           j = static_cast<std::size_t>(nxt[v][j])) {
        if (sec[j] > sb) break;
        out.push_back(payload[v][j]);
      }
    };
    while (lo < hi) {
      if (lo & 1) emit(lo++);
      if (hi & 1) emit(--hi);
      lo /= 2; hi /= 2;
    }
  }
};

class FastProvider final : public CountingProvider {
 public:
  FastProvider(std::span<const Point3> pts, Coord cx, Coord cy, Coord cz)
      : pts_(pts.begin(), pts.end()) {
    cx_ = cx; cy_ = cy; cz_ = cz;
    plane_ = cz;
    xtree_.build(pts_, /*primary_is_x=*/true, /*with_lists=*/true);
    ytree_.build(pts_, /*primary_is_x=*/false, /*with_lists=*/false);
    zorder_.resize(pts_.size());
    for (std::uint32_t i = 0; i < pts_.size(); ++i) zorder_[i] = i;
    std::sort(zorder_.begin(), zorder_.end(), [&](std::uint32_t a, std::uint32_t b) {
      return pts_[a].z > pts_[b].z;
    });
  }

  void set_plane(Coord z) override {
    assert(z <= plane_);
    plane_ = z;
    while (del_ptr_ < zorder_.size() && pts_[zorder_[del_ptr_]].z > z) {
      xtree_.erase_point(zorder_[del_ptr_], true);
      ytree_.erase_point(zorder_[del_ptr_], false);
      ++del_ptr_;
    }
  }

  std::uint64_t count2(Coord x, Coord y) override {
    ++counting_queries;
    return static_cast<std::uint64_t>(xtree_.count(x, y));
  }

  Coord select_x(Coord y, std::uint64_t k) override {
    ++selection_queries;
    Coord v = 0;
    if (!xtree_.kth_by_primary(y, k + 1, &v)) return cx_;
    return v - 1;
  }

  Coord select_y(Coord x, std::uint64_t k) override {
    ++selection_queries;
    Coord v = 0;
    if (!ytree_.kth_by_primary(x, k + 1, &v)) return cy_;
    return v - 1;
  }

  Coord select_z(Coord x, Coord y, std::uint64_t k) override {
    ++selection_queries;
    scratch_.clear();
    xtree_.collect_z(x, y, scratch_);
    // Static answer whenever it lies below the plane; otherwise the caller
    // clamps, so the cap sentinel is exact (see constructor notes).
    if (scratch_.size() <= k) return cz_;
    auto nth = scratch_.begin() + static_cast<std::ptrdiff_t>(k);
    std::nth_element(scratch_.begin(), nth, scratch_.end());
    return *nth - 1;
  }

 private:
  std::vector<Point3> pts_;
  SideTree xtree_, ytree_;
  std::vector<std::uint32_t> zorder_;
  std::size_t del_ptr_ = 0;
  std::vector<Coord> scratch_;
  Coord plane_ = 0;
};

// ---------------------------------------------------------------------------
// Count4-backed provider

class Count4Provider final : public CountingProvider {
 public:
  Count4Provider(const Count4& index, Coord lo, Coord hi, Coord cx, Coord cy, Coord cz)
      : c4_(index), lo_(lo), hi_(hi) {
    cx_ = cx; cy_ = cy; cz_ = cz;
    plane_ = cz;
  }

  void set_plane(Coord z) override {
    assert(z <= plane_);
    plane_ = z;
  }

  std::uint64_t count2(Coord x, Coord y) override {
    ++counting_queries;
    return c4_.count_restricted(lo_, hi_, x, y, plane_);
  }

  Coord select_x(Coord y, std::uint64_t k) override {
    ++selection_queries;
    const std::uint64_t before = c4_.counting_calls();
    const Coord r = c4_.select(lo_, hi_, 1, y, plane_, k, cx_);
    counting_queries += c4_.counting_calls() - before;
    return r;
  }

  Coord select_y(Coord x, std::uint64_t k) override {
    ++selection_queries;
    const std::uint64_t before = c4_.counting_calls();
    const Coord r = c4_.select(lo_, hi_, 2, x, plane_, k, cy_);
    counting_queries += c4_.counting_calls() - before;
    return r;
  }

  Coord select_z(Coord x, Coord y, std::uint64_t k) override {
    ++selection_queries;
    const std::uint64_t before = c4_.counting_calls();
    const Coord r = c4_.select(lo_, hi_, 3, x, y, k, cz_);  // static
    counting_queries += c4_.counting_calls() - before;
    return r;
  }

 private:
  const Count4& c4_;
  Coord lo_, hi_;
  Coord plane_ = 0;
};

}  // namespace

std::unique_ptr<CountingProvider> make_fast_provider(std::span<const Point3> pts,
                                                     Coord cap_x, Coord cap_y,
                                                     Coord cap_z) {
  return std::make_unique<FastProvider>(pts, cap_x, cap_y, cap_z);
}

std::unique_ptr<CountingProvider> make_brute_provider(std::span<const Point3> pts,
                                                      Coord cap_x, Coord cap_y,
                                                      Coord cap_z) {
  return std::make_unique<BruteProvider>(pts, cap_x, cap_y, cap_z);
}

std::unique_ptr<CountingProvider> make_count4_provider(const Count4& index, Coord lo,
                                                       Coord hi, Coord cap_x,
                                                       Coord cap_y, Coord cap_z) {
  return std::make_unique<Count4Provider>(index, lo, hi, cap_x, cap_y, cap_z);
}

}  // namespace orthorange
