#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "doctest.h"
#include "orthorange/config.hpp"
#include "orthorange/cutting.hpp"
#include "orthorange/find_any.hpp"

using namespace orthorange;

namespace {

std::vector<Point3> random_points3(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Point3> pts(n);
  for (int d = 0; d < 3; ++d) {
    std::vector<Coord> perm(n);
    std::iota(perm.begin(), perm.end(), Coord{1});
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < n; ++i) {
      if (d == 0) pts[i].x = perm[i];
      if (d == 1) pts[i].y = perm[i];
      if (d == 2) pts[i].z = perm[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) pts[i].id = static_cast<PointId>(i);
  return pts;
}

std::optional<PointId> scan_any(const std::vector<Point3>& apexes, Coord x, Coord y,
                                Coord z) {
  std::optional<PointId> best;
  for (const Point3& a : apexes)
    if (a.x >= x && a.y >= y && a.z >= z)
      if (!best || a.id < *best) best = a.id;
  return best;
}

}  // namespace

TEST_CASE("agreement with the linear containment scan") {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (std::size_t n : {50u, 300u, 1000u}) {
    for (std::uint32_t t : {2u, 8u, 24u}) {
      auto pts = random_points3(n, 700 + n + t);
      const auto cap = static_cast<Coord>(n);
      const Cutting cut = build_cutting_auto(pts, t, cap, cap, cap, Config{}, false);
      const auto apexes = apexes_of(cut);
      FindAnyIndex idx(apexes);
      REQUIRE(idx.cell_count() == apexes.size());
      std::uniform_int_distribution<Coord> dist(0, cap + 2);
      for (int q = 0; q < 1200; ++q) {
        const Coord x = dist(rng), y = dist(rng), z = dist(rng);
        const auto got = idx.find(x, y, z);
        const auto want = scan_any(apexes, x, y, z);
        CAPTURE(n); CAPTURE(t); CAPTURE(x); CAPTURE(y); CAPTURE(z);
        REQUIRE(got.has_value() == want.has_value());
        if (got) {
          const Point3& a = apexes[*got];
          REQUIRE((a.x >= x && a.y >= y && a.z >= z));
          CHECK(idx.find(x, y, z) == got);  // deterministic
        }
        ++checked;
      }
    }
  }
  CHECK(checked >= 10000);
}

TEST_CASE("boundary behaviours") {
  const std::vector<Point3> none;
  FindAnyIndex empty{std::span<const Point3>(none)};
  CHECK(!empty.find(1, 1, 1).has_value());

  std::vector<Point3> one{{5, 6, 7, 42}};
  FindAnyIndex single(one);
  CHECK(single.find(5, 6, 7) == PointId{42});
  CHECK(single.find(1, 1, 1) == PointId{42});
  CHECK(!single.find(6, 1, 1).has_value());
  CHECK(!single.find(1, 7, 1).has_value());
  CHECK(!single.find(1, 1, 8).has_value());
  CHECK(single.size_entries() <= 16);

  // origin query hits whenever any cell exists with apex at or above (1,1,1)
  auto pts = random_points3(200, 5);
  const Cutting cut = build_cutting_auto(pts, 4, 200, 200, 200, Config{}, false);
  FindAnyIndex idx(apexes_of(cut));
  CHECK(idx.find(1, 1, 1).has_value());
  // a query beyond every apex in x misses
  CHECK(!idx.find(201, 1, 1).has_value());
}

TEST_CASE("equal apexes resolve to the lowest cell id") {
  std::vector<Point3> apexes{
      {10, 10, 10, 5}, {10, 10, 10, 2}, {10, 10, 10, 9}, {3, 20, 10, 7}};
  FindAnyIndex idx(apexes);
  CHECK(idx.find(10, 10, 10) == PointId{2});
  CHECK(idx.find(4, 4, 4) == PointId{2});   // staircase prefers the wide apex
  CHECK(idx.find(1, 15, 1) == PointId{7});
}

TEST_CASE("size stays proportional to the cell count") {
  for (std::size_t n : {100u, 400u, 1600u}) {
    auto pts = random_points3(n, 9 + n);
    const auto cap = static_cast<Coord>(n);
    const Cutting cut = build_cutting_auto(pts, 4, cap, cap, cap, Config{}, false);
    FindAnyIndex idx(apexes_of(cut));
    CAPTURE(n); CAPTURE(idx.cell_count()); CAPTURE(idx.size_entries());
    CHECK(idx.size_entries() <= 40 * (idx.cell_count() + 1));
  }
}

TEST_CASE("comparison counts follow the squared-log budget") {
  std::mt19937_64 rng(66);
  for (std::size_t n : {64u, 512u, 4096u}) {
    auto pts = random_points3(n, 13 + n);
    const auto cap = static_cast<Coord>(n);
    const Cutting cut = build_cutting_auto(pts, 4, cap, cap, cap, Config{}, false);
    FindAnyIndex idx(apexes_of(cut));
    const double lg = std::log2(static_cast<double>(idx.cell_count()) + 2);
    std::uniform_int_distribution<Coord> dist(0, cap);
    const int reps = 500;
    const std::uint64_t before = idx.comparisons();
    for (int q = 0; q < reps; ++q) idx.find(dist(rng), dist(rng), dist(rng));
    const double mean = static_cast<double>(idx.comparisons() - before) / reps;
    CAPTURE(n); CAPTURE(mean);
    CHECK(mean <= 4.0 * lg * lg + 16.0);
  }
}
