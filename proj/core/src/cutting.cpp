#include "orthorange/cutting.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <stdexcept>

namespace orthorange {

Coord compute_end_event(CountingProvider& provider, Coord x, Coord y,
                        std::uint32_t k) {
  assert(k >= 1);
  return provider.select_z(x, y, k - 1);
}

namespace {

// Events ordered by (endz descending, x ascending): the queue's begin() is the
// next corner to fire, ties resolved at the smallest x.
struct EventOrder {
  bool operator()(const std::pair<Coord, Coord>& a,
                  const std::pair<Coord, Coord>& b) const {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  }
};

class SweepEngine {
 public:
  SweepEngine(CountingProvider& prov, std::uint32_t k, Coord cx, Coord cy, Coord cz,
              SweepStats& stats, std::vector<CuttingCell>& cells, SweepTrace* trace)
      : prov_(prov), k_(k), cx_(cx), cy_(cy), cz_(cz), stats_(stats), cells_(cells),
        trace_(trace) {}

  void run() {
    plane_ = cz_;
    prov_.set_plane(plane_);
    begin_trace_patch();
    Coord y = cy_;
    while (true) {
      const Coord x = prov_.select_x(y, 10ull * k_);
      emit_outer(x, y);
      if (x == cx_) break;
      y = prov_.select_y(x, 9ull * k_);
    }
    ensure_notches(0, cx_);

    const std::size_t patch_limit = 64 * (cells_.size() + queue_.size() + 16) + 4096;
    while (!queue_.empty()) {
      const auto ev = *queue_.begin();
      queue_.erase(queue_.begin());
      ++stats_.queue_ops;
      ++stats_.patches;
      if (stats_.patches > patch_limit && stats_.patches > 64 * cells_.size() + 4096)
        throw std::runtime_error("sweep: patch count exceeded safety bound");
      fire(ev.first, ev.second);
    }
    assert(outers_.size() == 1);
    assert(outers_.begin()->first == cx_ && outers_.begin()->second == cy_);
  }

 private:
  void begin_trace_patch() {
    cur_emits_.clear();
    seam_x_ = kNoSeam;
    if (trace_) {
      trace_->patches.emplace_back();
      trace_->patches.back().plane = plane_;
    }
  }

  bool emitted_this_patch(Coord x) const {
    return std::find(cur_emits_.begin(), cur_emits_.end(), x) != cur_emits_.end();
  }

  void fire(Coord endz, Coord x0) {
    plane_ = endz;
    prov_.set_plane(plane_);
    begin_trace_patch();

    auto iit = inners_.find(x0);
    assert(iit != inners_.end() && iit->second.second == endz);
    inners_.erase(iit);

    auto ait = outers_.find(x0);
    assert(ait != outers_.end());
    const Coord wlo = (ait == outers_.begin()) ? 0 : std::prev(ait)->first;
    Coord y = ait->second;
    Coord f = x0;
    Coord whi = cx_;

    while (true) {
      const Coord x = prov_.select_x(y, 10ull * k_);
      assert(x >= f);
      // Reconnection test: the rightmost surviving inner corner in (f, x]
      // (its y is minimal there, so it is the only candidate at this level).
      auto ub = inners_.upper_bound(x);
      if (ub != inners_.begin()) {
        const auto cand = std::prev(ub);
        if (cand->first > f && cand->second.first <= y &&
            prov_.count2(cand->first, cand->second.first) >= 7ull * k_) {
          const Coord sx = cand->first;
          emit_outer(sx, y);
          if (emitted_this_patch(sx)) seam_x_ = sx;
          whi = sx;
          break;
        }
      }
      emit_outer(x, y);
      if (x == cx_) break;
      y = prov_.select_y(x, 9ull * k_);
      f = x;
    }
    ensure_notches(wlo, whi);
  }

  void emit_outer(Coord xe, Coord ye) {
    // Absorb staircase corners dominated by the new outer corner. Both maps
    // have y strictly decreasing in x, so the absorbed run is contiguous.
    for (auto it = outers_.upper_bound(xe); it != outers_.begin();) {
      const auto p = std::prev(it);
      if (p->second > ye) break;
      it = outers_.erase(p);
    }
    for (auto it = inners_.upper_bound(xe); it != inners_.begin();) {
      const auto p = std::prev(it);
      if (p->second.first > ye) break;
      queue_.erase({p->second.second, p->first});
      ++stats_.queue_ops;
      it = inners_.erase(p);
    }
    // A surviving corner at (>= xe, >= ye) already covers the candidate: its
    // cell was stamped at a higher plane, so both corner and cell are redundant.
    const auto lb = outers_.lower_bound(xe);
    if (lb != outers_.end() && lb->second >= ye) return;
    outers_[xe] = ye;
    cur_emits_.push_back(xe);
    CuttingCell cell;
    cell.apex = Point3{xe, ye, plane_, static_cast<PointId>(cells_.size())};
    cells_.push_back(std::move(cell));
    ++stats_.cells_emitted;
  }

  void ensure_notches(Coord wlo, Coord whi) {
    auto it = outers_.lower_bound(wlo);
    while (it != outers_.end() && it->first <= whi) {
      const auto nxt = std::next(it);
      if (nxt == outers_.end()) {
        // rightmost corner carries no inner notch
        drop_inner(it->first);
        break;
      }
      const Coord want_y = nxt->second;
      const auto ex = inners_.find(it->first);
      if (ex != inners_.end() && ex->second.first == want_y) {
        it = nxt;  // unchanged notch: static end event is identical
        continue;
      }
      if (ex != inners_.end()) drop_inner(it->first);
      const Coord raw = compute_end_event(prov_, it->first, want_y, k_);
      const Coord endz = std::min(raw, plane_);
      inners_[it->first] = {want_y, endz};
      queue_.insert({endz, it->first});
      ++stats_.queue_ops;
      // The trace reports the patch's own alternation corners: notches between
      // two corners emitted by this patch, plus the clipped seam. Notches
      // against surviving older corners are reconciliation bookkeeping.
      if (trace_ && emitted_this_patch(it->first) &&
          (emitted_this_patch(nxt->first) || it->first == seam_x_))
        trace_->patches.back().new_inners.push_back({it->first, want_y});
      it = nxt;
    }
  }

  void drop_inner(Coord x) {
    const auto ex = inners_.find(x);
    if (ex == inners_.end()) return;
    queue_.erase({ex->second.second, ex->first});
    ++stats_.queue_ops;
    inners_.erase(ex);
  }

  CountingProvider& prov_;
  const std::uint32_t k_;
  const Coord cx_, cy_, cz_;
  SweepStats& stats_;
  std::vector<CuttingCell>& cells_;
  SweepTrace* trace_;

  std::map<Coord, Coord> outers_;                      // x -> y
  std::map<Coord, std::pair<Coord, Coord>> inners_;    // x -> (y, endz)
  std::set<std::pair<Coord, Coord>, EventOrder> queue_;  // (endz, x)
  Coord plane_ = 0;
  static constexpr Coord kNoSeam = ~Coord{0};
  std::vector<Coord> cur_emits_;  // outer corners inserted by the current patch
  Coord seam_x_ = kNoSeam;
};

}  // namespace

Cutting build_cutting_sweep(std::span<const Point3> pts, std::uint32_t t,
                            Coord cap_x, Coord cap_y, Coord cap_z,
                            CountingProvider& provider, bool fill_conflict_lists,
                            SweepTrace* trace) {
  Cutting cut;
  cut.t = std::max<std::uint32_t>(t, 1);
  cut.n = pts.size();
  cut.cap_x = cap_x;
  cut.cap_y = cap_y;
  cut.cap_z = cap_z;
  const std::uint64_t c0 = provider.counting_queries;
  const std::uint64_t s0 = provider.selection_queries;
  SweepEngine engine(provider, cut.t, cap_x, cap_y, cap_z, cut.stats, cut.cells,
                     trace);
  engine.run();
  cut.stats.counting_queries = provider.counting_queries - c0;
  cut.stats.selection_queries = provider.selection_queries - s0;
  if (fill_conflict_lists) fill_conflicts(cut, pts);
  return cut;
}

Cutting build_cutting_naive(std::span<const Point3> pts, std::uint32_t t,
                            Coord cap_x, Coord cap_y, Coord cap_z,
                            bool fill_conflict_lists) {
  Cutting cut;
  cut.t = std::max<std::uint32_t>(t, 1);
  cut.n = pts.size();
  cut.cap_x = cap_x;
  cut.cap_y = cap_y;
  cut.cap_z = cap_z;
  const std::uint64_t k = cut.t;

  Coord plane = cap_z;
  std::vector<std::pair<Coord, Coord>> outers;   // x asc, y desc
  std::vector<std::pair<Coord, Coord>> notches;  // transient, x asc

  auto count_at = [&](Coord x, Coord y) {
    std::uint64_t c = 0;
    for (const Point3& p : pts)
      c += (p.z <= plane && p.x <= x && p.y <= y) ? 1 : 0;
    return c;
  };
  std::vector<Coord> scratch;
  auto kth_or = [&](std::uint64_t kk, Coord cap) {
    if (scratch.size() <= kk) return cap;
    auto nth = scratch.begin() + static_cast<std::ptrdiff_t>(kk);
    std::nth_element(scratch.begin(), nth, scratch.end());
    return static_cast<Coord>(*nth - 1);
  };
  auto selx = [&](Coord y, std::uint64_t kk) {
    scratch.clear();
    for (const Point3& p : pts)
      if (p.z <= plane && p.y <= y) scratch.push_back(p.x);
    return kth_or(kk, cap_x);
  };
  auto sely = [&](Coord x, std::uint64_t kk) {
    scratch.clear();
    for (const Point3& p : pts)
      if (p.z <= plane && p.x <= x) scratch.push_back(p.y);
    return kth_or(kk, cap_y);
  };
  auto selz_static = [&](Coord x, Coord y, std::uint64_t kk) {
    scratch.clear();
    for (const Point3& p : pts)
      if (p.x <= x && p.y <= y) scratch.push_back(p.z);
    return kth_or(kk, cap_z);
  };

  auto emit = [&](Coord xe, Coord ye) {
    auto dominated = [&](const std::pair<Coord, Coord>& c) {
      return c.first <= xe && c.second <= ye;
    };
    outers.erase(std::remove_if(outers.begin(), outers.end(), dominated),
                 outers.end());
    notches.erase(std::remove_if(notches.begin(), notches.end(), dominated),
                  notches.end());
    auto lb = std::lower_bound(outers.begin(), outers.end(), xe,
                               [](const auto& o, Coord v) { return o.first < v; });
    if (lb != outers.end() && lb->second >= ye) return;
    outers.insert(lb, {xe, ye});
    CuttingCell cell;
    cell.apex = Point3{xe, ye, plane, static_cast<PointId>(cut.cells.size())};
    cut.cells.push_back(std::move(cell));
  };

  // initial staircase at the top plane
  {
    Coord y = cap_y;
    while (true) {
      const Coord x = selx(y, 10 * k);
      emit(x, y);
      if (x == cap_x) break;
      y = sely(x, 9 * k);
    }
  }

  const std::size_t round_limit = 64 * (pts.size() + 16) + 4096;
  std::size_t rounds = 0;
  while (outers.size() > 1) {
    if (++rounds > round_limit)
      throw std::runtime_error("naive: round count exceeded safety bound");
    // recompute every notch from scratch; fire the highest end event
    std::size_t best = outers.size();
    Coord best_e = 0;
    for (std::size_t i = 0; i + 1 < outers.size(); ++i) {
      const Coord raw = selz_static(outers[i].first, outers[i + 1].second, k - 1);
      const Coord e = std::min(raw, plane);
      if (best == outers.size() || e > best_e ||
          (e == best_e && outers[i].first < outers[best].first)) {
        best = i;
        best_e = e;
      }
    }
    plane = best_e;

    notches.clear();
    for (std::size_t i = 0; i + 1 < outers.size(); ++i)
      if (i != best) notches.push_back({outers[i].first, outers[i + 1].second});

    Coord y = outers[best].second;
    Coord f = outers[best].first;
    while (true) {
      const Coord x = selx(y, 10 * k);
      const Coord ycur = y;
      // rightmost surviving notch in (f, x]
      std::size_t cand = notches.size();
      for (std::size_t i = notches.size(); i-- > 0;) {
        if (notches[i].first <= x) { cand = i; break; }
      }
      if (cand != notches.size() && notches[cand].first > f &&
          notches[cand].second <= ycur &&
          count_at(notches[cand].first, notches[cand].second) >= 7 * k) {
        emit(notches[cand].first, ycur);
        break;
      }
      emit(x, ycur);
      if (x == cap_x) break;
      y = sely(x, 9 * k);
      f = x;
    }
  }
  assert(outers.size() == 1 && outers[0].first == cap_x && outers[0].second == cap_y);

  cut.stats.cells_emitted = cut.cells.size();
  cut.stats.patches = rounds;
  if (fill_conflict_lists) fill_conflicts(cut, pts);
  return cut;
}

Cutting build_cutting_auto(std::span<const Point3> pts, std::uint32_t t,
                           Coord cap_x, Coord cap_y, Coord cap_z,
                           const Config& cfg, bool fill_conflict_lists) {
  if (cfg.constructor == ConstructorKind::naive)
    return build_cutting_naive(pts, t, cap_x, cap_y, cap_z, fill_conflict_lists);
  auto prov = make_fast_provider(pts, cap_x, cap_y, cap_z);
  return build_cutting_sweep(pts, t, cap_x, cap_y, cap_z, *prov,
                             fill_conflict_lists);
}

void fill_conflicts(Cutting& cut, std::span<const Point3> pts) {
  // Scan points in z-order so each cell only examines candidates below its plane.
  std::vector<std::uint32_t> order(pts.size());
  for (std::uint32_t i = 0; i < pts.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return pts[a].z < pts[b].z;
  });
  std::vector<Coord> zs(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) zs[i] = pts[order[i]].z;
  for (CuttingCell& cell : cut.cells) {
    cell.conflict.clear();
    const std::size_t hi = static_cast<std::size_t>(
        std::upper_bound(zs.begin(), zs.end(), cell.apex.z) - zs.begin());
    for (std::size_t i = 0; i < hi; ++i) {
      const Point3& p = pts[order[i]];
      if (p.x <= cell.apex.x && p.y <= cell.apex.y) cell.conflict.push_back(p.id);
    }
    std::sort(cell.conflict.begin(), cell.conflict.end());
  }
}

std::vector<Point3> apexes_of(const Cutting& cut) {
  std::vector<Point3> out;
  out.reserve(cut.cells.size());
  for (const CuttingCell& c : cut.cells) out.push_back(c.apex);
  return out;
}

}  // namespace orthorange
