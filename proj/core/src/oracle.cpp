#include "orthorange/oracle.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <queue>
#include <random>

namespace orthorange {

std::vector<PointId> oracle_report(const RankedPointSet& set, const RankBox& box) {
  std::vector<PointId> out;
  if (box.empty()) return out;
  for (std::size_t i = 0; i < set.n; ++i) {
    if (in_box(box, &set.coords[i * set.dim])) out.push_back(static_cast<PointId>(i));
  }
  return out;
}

std::uint64_t oracle_count(const RankedPointSet& set, const RankBox& box) {
  if (box.empty()) return 0;
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < set.n; ++i) {
    if (in_box(box, &set.coords[i * set.dim])) ++c;
  }
  return c;
}

std::uint64_t count_dominated(std::span<const Point3> pts, Coord x, Coord y, Coord z) {
  std::uint64_t c = 0;
  for (const auto& p : pts)
    if (p.x <= x && p.y <= y && p.z <= z) ++c;
  return c;
}

std::vector<PointId> report_dominated(std::span<const Point3> pts, Coord x, Coord y,
                                      Coord z) {
  std::vector<PointId> out;
  for (const auto& p : pts)
    if (p.x <= x && p.y <= y && p.z <= z) out.push_back(p.id);
  std::sort(out.begin(), out.end());
  return out;
}

Coord oracle_select(std::span<const Point3> pts, int axis, Coord a, Coord b,
                    std::uint64_t k, Coord cap) {
  // Collect the axis coordinates of points dominated in the two fixed axes.
  std::vector<Coord> vals;
  for (const auto& p : pts) {
    Coord f1, f2, v;
    switch (axis) {
      case 0: f1 = p.y; f2 = p.z; v = p.x; break;
      case 1: f1 = p.x; f2 = p.z; v = p.y; break;
      default: f1 = p.x; f2 = p.y; v = p.z; break;
    }
    if (f1 <= a && f2 <= b) vals.push_back(v);
  }
  if (vals.size() <= k) return cap;
  std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(k),
                   vals.end());
  Coord kth1 = vals[k];  // (k+1)-th smallest
  return kth1 == 0 ? 0 : std::min<Coord>(kth1 - 1, cap);
}

namespace {

// Max apex z over apexes with ax >= x and ay >= y, answered via a y-sorted
// suffix maximum over the apexes still alive at the current x.
struct ApexCover {
  std::vector<Point3> by_y;      // alive apexes sorted by y asc
  std::vector<Coord> suffix_max; // suffix max of z over by_y

  void rebuild(std::span<const Point3> apexes, Coord x) {
    by_y.clear();
    for (const auto& a : apexes)
      if (a.x >= x) by_y.push_back(a);
    std::sort(by_y.begin(), by_y.end(),
              [](const Point3& l, const Point3& r) { return l.y < r.y; });
    suffix_max.assign(by_y.size() + 1, 0);
    bool any = false;
    for (std::size_t i = by_y.size(); i-- > 0;) {
      suffix_max[i] = std::max(suffix_max[i + 1], by_y[i].z + 1);  // store z+1, 0 = none
      any = true;
    }
    (void)any;
  }
  // Returns max apex z with ay >= y, or -1 encoded as false via out param.
  bool query(Coord y, Coord& out) const {
    auto it = std::lower_bound(by_y.begin(), by_y.end(), y,
                               [](const Point3& a, Coord v) { return a.y < v; });
    Coord enc = suffix_max[static_cast<std::size_t>(it - by_y.begin())];
    if (enc == 0) return false;
    out = enc - 1;
    return true;
  }
};

// Max z such that #{p <= (x,y,z)} <= K for the eligible point multiset zs.
Coord column_zmax(std::vector<Coord>& zs, std::uint64_t K, Coord cap_z) {
  if (zs.size() <= K) return cap_z;
  std::nth_element(zs.begin(), zs.begin() + static_cast<std::ptrdiff_t>(K), zs.end());
  Coord kth1 = zs[K];
  return kth1 == 0 ? 0 : kth1 - 1;  // kth1 <= cap_z always in rank space
}

}  // namespace

VerifyReport verify_cutting(std::span<const Point3> pts, std::uint32_t t,
                            std::span<const Point3> apexes, const VerifyOptions& opt) {
  VerifyReport rep;
  const auto K = static_cast<std::uint64_t>(std::floor(opt.c1 * t));
  const auto conflict_bound = opt.c2 * t;

  // Property 2: conflict-list sizes.
  for (const auto& a : apexes) {
    std::size_t c = count_dominated(pts, a.x, a.y, a.z);
    rep.max_conflict = std::max(rep.max_conflict, c);
    if (static_cast<double>(c) > conflict_bound) {
      ++rep.conflict_violations;
      if (rep.witnesses.size() < opt.max_witnesses) rep.witnesses.push_back(a);
    }
  }

  // Property 3: coverage. One probe column per (x, y); the z extent of the
  // shallow region and of the covering apexes are compared directly.
  auto check_column = [&](Coord x, Coord y, const ApexCover* cover) {
    std::vector<Coord> zs;
    for (const auto& p : pts)
      if (p.x <= x && p.y <= y) zs.push_back(p.z);
    Coord zmax = column_zmax(zs, K, opt.cap_z);
    Coord zcov = 0;
    bool covered;
    if (cover != nullptr) {
      covered = cover->query(y, zcov);
    } else {
      covered = false;
      for (const auto& a : apexes)
        if (a.x >= x && a.y >= y) {
          covered = true;
          zcov = std::max(zcov, a.z);
        }
    }
    ++rep.columns_checked;
    rep.probes_checked += static_cast<std::uint64_t>(zmax) + 1;
    if (!covered || zcov < zmax) {
      ++rep.coverage_violations;
      if (rep.witnesses.size() < opt.max_witnesses)
        rep.witnesses.push_back(Point3{x, y, zmax, 0});
    }
  };

  if (pts.size() <= opt.exhaustive_threshold) {
    // Breakpoint grid: both zmax and the apex cover are constant between
    // consecutive point / apex coordinates, so testing breakpoints is exact.
    std::vector<Coord> xs{0}, ys{0};
    for (const auto& p : pts) {
      xs.push_back(p.x);
      ys.push_back(p.y);
    }
    for (const auto& a : apexes) {
      if (a.x + 1 <= opt.cap_x) xs.push_back(a.x + 1);
      if (a.y + 1 <= opt.cap_y) ys.push_back(a.y + 1);
    }
    xs.push_back(opt.cap_x);
    ys.push_back(opt.cap_y);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    ApexCover cover;
    for (Coord x : xs) {
      cover.rebuild(apexes, x);
      std::vector<Point3> elig;
      for (const auto& p : pts)
        if (p.x <= x) elig.push_back(p);
      std::sort(elig.begin(), elig.end(),
                [](const Point3& l, const Point3& r) { return l.y < r.y; });
      // Ascending y walk keeping the K+1 smallest z values in a max-heap.
      std::priority_queue<Coord> heap;
      std::size_t next = 0;
      for (Coord y : ys) {
        while (next < elig.size() && elig[next].y <= y) {
          heap.push(elig[next].z);
          if (heap.size() > K + 1) heap.pop();
          ++next;
        }
        Coord zmax = opt.cap_z;
        if (heap.size() == K + 1) {
          Coord kth1 = heap.top();
          zmax = kth1 == 0 ? 0 : kth1 - 1;
        }
        Coord zcov = 0;
        bool covered = cover.query(y, zcov);
        ++rep.columns_checked;
        rep.probes_checked += static_cast<std::uint64_t>(zmax) + 1;
        if (!covered || zcov < zmax) {
          ++rep.coverage_violations;
          if (rep.witnesses.size() < opt.max_witnesses)
            rep.witnesses.push_back(Point3{x, y, zmax, 0});
        }
      }
    }
  } else {
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<Coord> dx(0, opt.cap_x), dy(0, opt.cap_y);
    for (std::size_t i = 0; i < opt.sample_columns; ++i)
      check_column(dx(rng), dy(rng), nullptr);
    // Apex-adjacent columns catch seam mistakes that sampling can miss.
    for (const auto& a : apexes) {
      check_column(a.x, a.y, nullptr);
      if (a.x + 1 <= opt.cap_x) check_column(a.x + 1, a.y, nullptr);
      if (a.y + 1 <= opt.cap_y) check_column(a.x, a.y + 1, nullptr);
    }
  }

  rep.passed = rep.conflict_violations == 0 && rep.coverage_violations == 0;
  return rep;
}

}  // namespace orthorange
