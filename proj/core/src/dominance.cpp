#include "orthorange/dominance.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <numeric>

namespace orthorange {

namespace {

bool zid_less(const Point3& a, const Point3& b) {
  if (a.z != b.z) return a.z < b.z;
  return a.id < b.id;
}

}  // namespace

Dom3::Dom3(std::span<const Point3> pts) : pts_(pts.begin(), pts.end()) {
  std::sort(pts_.begin(), pts_.end(), zid_less);
  const std::size_t n = pts_.size();
  stored_points_ = n;
  blocks_ = (n + kBlock - 1) / kBlock;
  base_ = std::bit_ceil(std::max<std::size_t>(blocks_, 1));
  psts_.assign(2 * base_, Pst{});
  // A priority search tree per interior node whose block range is fully
  // populated; only those nodes can appear in a canonical decomposition.
  for (std::size_t v = 1; v < base_; ++v) {
    const int d = std::bit_width(v) - 1;
    const std::size_t span = base_ >> d;
    const std::size_t blo = (v - (std::size_t{1} << d)) * span;
    const std::size_t bhi = blo + span;
    if (bhi * kBlock > n) continue;
    build_pst(v, blo * kBlock, bhi * kBlock);
  }
}

void Dom3::build_pst(std::size_t v, std::size_t plo, std::size_t phi) {
  Pst t;
  t.m = static_cast<std::uint32_t>(phi - plo);
  t.pbase = std::bit_ceil(t.m);
  t.x_off = xs_.size();
  t.slot_off = slots_.size();

  std::vector<std::uint32_t> xorder(t.m);
  std::iota(xorder.begin(), xorder.end(), 0u);
  std::sort(xorder.begin(), xorder.end(), [&](std::uint32_t a, std::uint32_t b) {
    const Point3& pa = pts_[plo + a];
    const Point3& pb = pts_[plo + b];
    if (pa.x != pb.x) return pa.x < pb.x;
    return pa.id < pb.id;
  });
  for (std::uint32_t o : xorder) xs_.push_back(pts_[plo + o].x);
  slots_.resize(t.slot_off + 2 * static_cast<std::size_t>(t.pbase));

  // Insert in ascending (y, id); each point settles at the first free slot
  // on its root-to-leaf path, which yields the min-heap order on y.
  std::vector<std::uint32_t> yorder(t.m);
  std::iota(yorder.begin(), yorder.end(), 0u);
  std::sort(yorder.begin(), yorder.end(), [&](std::uint32_t a, std::uint32_t b) {
    const Point3& pa = pts_[plo + xorder[a]];
    const Point3& pb = pts_[plo + xorder[b]];
    if (pa.y != pb.y) return pa.y < pb.y;
    return pa.id < pb.id;
  });
  for (std::uint32_t xpos : yorder) {
    const Point3& p = pts_[plo + xorder[xpos]];
    std::size_t node = 1, lo = 0, hi = t.pbase;
    while (slots_[t.slot_off + node].id != kEmpty) {
      const std::size_t mid = lo + ((hi - lo) >> 1);
      if (xpos < mid) {
        node = 2 * node;
        hi = mid;
      } else {
        node = 2 * node + 1;
        lo = mid;
      }
    }
    slots_[t.slot_off + node] = Slot{p.x, p.y, p.id};
  }
  stored_points_ += t.m;
  psts_[v] = t;
}

void Dom3::query_pst(const Pst& t, Coord x, Coord y,
                     std::vector<PointId>& out) const {
  struct Frame {
    std::uint32_t v, lo, hi;
  };
  Frame stack[72];
  int sp = 0;
  stack[sp++] = Frame{1, 0, t.pbase};
  while (sp) {
    const Frame f = stack[--sp];
    if (f.lo >= t.m || xs_[t.x_off + f.lo] > x) continue;  // min x beyond bound
    const Slot& s = slots_[t.slot_off + f.v];
    if (s.id == kEmpty || s.y > y) continue;  // heap prune on y
    if (s.x <= x) out.push_back(s.id);
    if (f.v < t.pbase) {
      const std::uint32_t mid = f.lo + ((f.hi - f.lo) >> 1);
      stack[sp++] = Frame{2 * f.v + 1, mid, f.hi};
      stack[sp++] = Frame{2 * f.v, f.lo, mid};
    }
  }
}

bool Dom3::exists_pst(const Pst& t, Coord x, Coord y) const {
  struct Frame {
    std::uint32_t v, lo, hi;
  };
  Frame stack[72];
  int sp = 0;
  stack[sp++] = Frame{1, 0, t.pbase};
  while (sp) {
    const Frame f = stack[--sp];
    if (f.lo >= t.m || xs_[t.x_off + f.lo] > x) continue;
    const Slot& s = slots_[t.slot_off + f.v];
    if (s.id == kEmpty || s.y > y) continue;
    if (s.x <= x) return true;
    if (f.v < t.pbase) {
      const std::uint32_t mid = f.lo + ((f.hi - f.lo) >> 1);
      stack[sp++] = Frame{2 * f.v + 1, mid, f.hi};
      stack[sp++] = Frame{2 * f.v, f.lo, mid};
    }
  }
  return false;
}

bool Dom3::exists(Coord x, Coord y, Coord z) const {
  if (pts_.empty()) return false;
  const auto it = std::upper_bound(
      pts_.begin(), pts_.end(), z,
      [](Coord zq, const Point3& p) { return zq < p.z; });
  const std::size_t vpts = static_cast<std::size_t>(it - pts_.begin());
  if (vpts == 0) return false;
  const std::size_t fb = vpts / kBlock;
  auto check = [&](std::size_t v) {
    ++node_visits_;
    if (v >= base_) {
      const std::size_t b = v - base_;
      for (std::size_t i = b * kBlock; i < b * kBlock + kBlock; ++i)
        if (pts_[i].x <= x && pts_[i].y <= y) return true;
      return false;
    }
    return exists_pst(psts_[v], x, y);
  };
  std::size_t lo = base_, hi = base_ + fb;
  while (lo < hi) {
    if (lo & 1)
      if (check(lo++)) return true;
    if (hi & 1)
      if (check(--hi)) return true;
    lo >>= 1;
    hi >>= 1;
  }
  if (fb * kBlock < vpts) {
    ++node_visits_;
    for (std::size_t i = fb * kBlock; i < vpts; ++i)
      if (pts_[i].x <= x && pts_[i].y <= y) return true;
  }
  return false;
}

void Dom3::scan_xy(std::size_t lo, std::size_t hi, Coord x, Coord y,
                   std::vector<PointId>& out) const {
  for (std::size_t i = lo; i < hi; ++i)
    if (pts_[i].x <= x && pts_[i].y <= y) out.push_back(pts_[i].id);
}

void Dom3::report_into(Coord x, Coord y, Coord z,
                       std::vector<PointId>& out) const {
  if (pts_.empty()) return;
  const auto it = std::upper_bound(
      pts_.begin(), pts_.end(), z,
      [](Coord zq, const Point3& p) { return zq < p.z; });
  const std::size_t vpts = static_cast<std::size_t>(it - pts_.begin());
  if (vpts == 0) return;
  const std::size_t fb = vpts / kBlock;  // fully eligible blocks
  std::size_t lo = base_, hi = base_ + fb;
  while (lo < hi) {
    if (lo & 1) {
      ++node_visits_;
      const std::size_t v = lo++;
      if (v >= base_) {
        const std::size_t b = v - base_;
        scan_xy(b * kBlock, b * kBlock + kBlock, x, y, out);
      } else {
        assert(psts_[v].m);
        query_pst(psts_[v], x, y, out);
      }
    }
    if (hi & 1) {
      ++node_visits_;
      const std::size_t v = --hi;
      if (v >= base_) {
        const std::size_t b = v - base_;
        scan_xy(b * kBlock, b * kBlock + kBlock, x, y, out);
      } else {
        assert(psts_[v].m);
        query_pst(psts_[v], x, y, out);
      }
    }
    lo >>= 1;
    hi >>= 1;
  }
  if (fb * kBlock < vpts) {  // partial tail; z holds by position
    ++node_visits_;
    scan_xy(fb * kBlock, vpts, x, y, out);
  }
}

std::vector<PointId> Dom3::report(Coord x, Coord y, Coord z) const {
  std::vector<PointId> out;
  report_into(x, y, z, out);
  std::sort(out.begin(), out.end());
  return out;
}

SlowDom4::SlowDom4(std::span<const Point4> pts) : pts_(pts.begin(), pts.end()) {
  std::sort(pts_.begin(), pts_.end(), [](const Point4& a, const Point4& b) {
    if (a.c[0] != b.c[0]) return a.c[0] < b.c[0];
    return a.id < b.id;
  });
  const std::size_t n = pts_.size();
  stored_points_ = n;
  blocks_ = (n + kBlock - 1) / kBlock;
  base_ = std::bit_ceil(std::max<std::size_t>(blocks_, 1));
  nodes_.resize(2 * base_);
  std::vector<Point3> proj;
  for (std::size_t v = 1; v < base_; ++v) {
    const int d = std::bit_width(v) - 1;
    const std::size_t span = base_ >> d;
    const std::size_t blo = (v - (std::size_t{1} << d)) * span;
    const std::size_t bhi = blo + span;
    if (bhi * kBlock > n) continue;
    proj.clear();
    for (std::size_t i = blo * kBlock; i < bhi * kBlock; ++i)
      proj.push_back(Point3{pts_[i].c[1], pts_[i].c[2], pts_[i].c[3], pts_[i].id});
    nodes_[v] = Dom3(proj);
    stored_points_ += proj.size();
  }
}

void SlowDom4::scan_rest(std::size_t lo, std::size_t hi, Coord q2, Coord q3,
                         Coord q4, std::vector<PointId>& out) const {
  for (std::size_t i = lo; i < hi; ++i) {
    const Point4& p = pts_[i];
    if (p.c[1] <= q2 && p.c[2] <= q3 && p.c[3] <= q4) out.push_back(p.id);
  }
}

void SlowDom4::report_box_into(Coord lo1, Coord hi1, Coord q2, Coord q3,
                               Coord q4, std::vector<PointId>& out) const {
  if (pts_.empty() || lo1 > hi1) return;
  const auto first = std::partition_point(
      pts_.begin(), pts_.end(), [&](const Point4& p) { return p.c[0] < lo1; });
  const auto last = std::partition_point(
      pts_.begin(), pts_.end(), [&](const Point4& p) { return p.c[0] <= hi1; });
  const std::size_t s = static_cast<std::size_t>(first - pts_.begin());
  const std::size_t e = static_cast<std::size_t>(last - pts_.begin());
  if (s >= e) return;
  const std::size_t bs = (s + kBlock - 1) / kBlock;
  const std::size_t be = e / kBlock;
  if (bs >= be) {
    ++node_visits_;
    scan_rest(s, e, q2, q3, q4, out);
    return;
  }
  if (s < bs * kBlock) {
    ++node_visits_;
    scan_rest(s, bs * kBlock, q2, q3, q4, out);
  }
  std::size_t lo = base_ + bs, hi = base_ + be;
  auto visit = [&](std::size_t v) {
    ++node_visits_;
    if (v >= base_) {
      const std::size_t b = v - base_;
      scan_rest(b * kBlock, b * kBlock + kBlock, q2, q3, q4, out);
    } else {
      assert(nodes_[v].size() > 0);
      nodes_[v].report_into(q2, q3, q4, out);
    }
  };
  while (lo < hi) {
    if (lo & 1) visit(lo++);
    if (hi & 1) visit(--hi);
    lo >>= 1;
    hi >>= 1;
  }
  if (be * kBlock < e) {
    ++node_visits_;
    scan_rest(be * kBlock, e, q2, q3, q4, out);
  }
}

std::vector<PointId> SlowDom4::report_box(Coord lo1, Coord hi1, Coord q2,
                                          Coord q3, Coord q4) const {
  std::vector<PointId> out;
  report_box_into(lo1, hi1, q2, q3, q4, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<PointId> SlowDom4::report(Coord q1, Coord q2, Coord q3,
                                      Coord q4) const {
  return report_box(0, q1, q2, q3, q4);
}

std::optional<PointId> one_report(std::span<const Point4> pts,
                                  const RankBox& box) {
  for (const Point4& p : pts)
    if (in_box(box, p.c.data())) return p.id;
  return std::nullopt;
}

}  // namespace orthorange
