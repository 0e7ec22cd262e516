#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "orthorange/config.hpp"
#include "orthorange/restricted.hpp"

namespace orthorange {

// Full four-dimensional structure for 5-sided queries
// [a1,b1] x (-inf,b2] x (-inf,b3] x (-inf,b4] and dominance queries, in
// original coordinate space (ties allowed: every axis is reduced to ranks
// internally, ties broken by id). The first axis is cut into m ~ n^(1/3)
// rank groups: a restricted structure answers the fully covered groups and
// per-group structures recurse on the two boundary groups; instances at or
// below the cutoff are plain scanned lists.
class FiveSided {
 public:
  FiveSided() = default;
  FiveSided(std::span<const Point4> pts, const Config& cfg);

  std::vector<PointId> query_5sided(Coord a1, Coord b1, Coord b2, Coord b3,
                                    Coord b4,
                                    QueryStats* stats = nullptr) const;
  std::vector<PointId> query_dominance(Coord b1, Coord b2, Coord b3, Coord b4,
                                       QueryStats* stats = nullptr) const;
  bool empty_5sided(Coord a1, Coord b1, Coord b2, Coord b3, Coord b4,
                    QueryStats* stats = nullptr) const;

  const BuildStats& build_stats() const { return stats_; }
  std::size_t size() const { return n_; }
  bool is_flat() const { return top_ == nullptr; }
  std::uint32_t leaf_count() const { return m_; }
  std::size_t depth() const;
  const RestrictedStructure* top() const { return top_.get(); }
  const std::vector<FiveSided>& bottoms() const { return bottoms_; }

 private:
  void query_into(Coord a1, Coord b1, Coord b2, Coord b3, Coord b4,
                  std::vector<PointId>& out, QueryStats& qs) const;
  bool empty_into(Coord a1, Coord b1, Coord b2, Coord b3, Coord b4,
                  QueryStats& qs) const;
  Coord lower_rank(int axis, Coord v) const;  // first rank with value >= v
  Coord upper_rank(int axis, Coord v) const;  // number of values <= v

  std::size_t n_ = 0;
  Config cfg_;
  std::vector<Point4> flat_;                // base case at or below the cutoff
  std::array<std::vector<Coord>, 4> vals_;  // sorted values per axis
  std::uint32_t m_ = 0;                     // top leaf groups
  std::uint32_t chunk_ = 0;                 // ranks per group
  std::uint32_t used_ = 0;                  // nonempty groups
  std::unique_ptr<RestrictedStructure> top_;
  std::vector<FiveSided> bottoms_;
  BuildStats stats_;
};

// A point with an arbitrary number of coordinates, for d >= 4 instances.
struct PointD {
  std::vector<Coord> c;
  PointId id = 0;
};

// Box reporting in d >= 4 dimensions. A balanced rank tree over the second
// axis supplies a lowest-common-ancestor split of [a2,b2]; the two children
// answer 5-sided queries, the left one over points with the second axis
// reflected so that the remaining lower bound becomes an upper bound. Lower
// bounds on axes three and four plus both bounds on axes past the fourth are
// enforced by filtering the candidate points, which keeps the structure a
// single tree of 5-sided instances.
class GeneralStructure {
 public:
  GeneralStructure() = default;
  GeneralStructure(std::span<const PointD> pts, int dims, const Config& cfg);

  std::vector<PointId> query_box(std::span<const std::pair<Coord, Coord>> box,
                                 QueryStats* stats = nullptr) const;

  int dims() const { return d_; }
  std::size_t size() const { return n_; }
  const BuildStats& build_stats() const { return stats_; }
  std::size_t tree_depth() const;
  void for_each_five_sided(const std::function<void(const FiveSided&)>& fn) const;

 private:
  struct TreeNode {
    std::uint32_t lo = 0, hi = 0;  // rank span on the second axis
    int left = -1, right = -1;
    bool has_fs = false;
    FiveSided fs;
    std::vector<std::uint32_t> subset;  // internal indices when pruned
  };

  int build_node(std::uint32_t lo, std::uint32_t hi,
                 std::vector<std::uint32_t>&& subset, bool reflected,
                 bool is_root);
  void collect_child(int idx, Coord slot2, Coord lo1, Coord hi1, Coord hi3,
                     Coord hi4, std::vector<PointId>& cand,
                     QueryStats& qs) const;
  Coord lower_rank(int axis, Coord v) const;
  Coord upper_rank(int axis, Coord v) const;

  int d_ = 0;
  std::size_t n_ = 0;
  Config cfg_;
  std::vector<PointD> pts_;                // by internal index
  std::vector<std::vector<Coord>> vals_;   // per axis, sorted values
  std::vector<std::vector<Coord>> rank_;   // per internal index, d ranks
  std::unordered_map<PointId, std::uint32_t> id2idx_;
  std::vector<TreeNode> tree_;
  int root_ = -1;
  BuildStats stats_;
};

}  // namespace orthorange
