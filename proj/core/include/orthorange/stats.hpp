#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace orthorange {

// Instrumentation for one cutting construction.
struct SweepStats {
  std::uint64_t counting_queries = 0;
  std::uint64_t selection_queries = 0;
  std::uint64_t queue_ops = 0;
  std::uint64_t cells_emitted = 0;
  std::uint64_t patches = 0;

  std::uint64_t total_ops() const {
    return counting_queries + selection_queries + queue_ops;
  }
  void merge(const SweepStats& o) {
    counting_queries += o.counting_queries;
    selection_queries += o.selection_queries;
    queue_ops += o.queue_ops;
    cells_emitted += o.cells_emitted;
    patches += o.patches;
  }
};

enum class QueryBranch { scan, slow, lambda, early };

inline std::string to_string(QueryBranch b) {
  switch (b) {
    case QueryBranch::scan: return "scan";
    case QueryBranch::slow: return "slow";
    case QueryBranch::lambda: return "lambda";
    case QueryBranch::early: return "early";
  }
  return "?";
}

// Per-query instrumentation, merged bottom-up across recursion levels.
struct QueryStats {
  std::uint64_t iterations = 0;
  std::uint64_t findany_calls = 0;
  std::uint64_t findany_comparisons = 0;
  std::uint64_t cells_touched = 0;
  std::uint64_t scanned_points = 0;
  std::uint64_t node_visits = 0;
  QueryBranch branch = QueryBranch::scan;
  std::vector<std::uint64_t> candidate_counts;  // |C_i| per iteration, top call

  std::uint64_t work() const {
    return findany_comparisons + cells_touched + scanned_points + node_visits;
  }
  void absorb(const QueryStats& o) {
    iterations += o.iterations;
    findany_calls += o.findany_calls;
    findany_comparisons += o.findany_comparisons;
    cells_touched += o.cells_touched;
    scanned_points += o.scanned_points;
    node_visits += o.node_visits;
  }
};

// Totals reported by build: entity counts feed the size-trend checks.
struct BuildStats {
  std::uint64_t points = 0;
  std::uint64_t tree_cells = 0;
  std::uint64_t nested_cells = 0;
  std::uint64_t gamma_links = 0;
  std::uint64_t lambda_links = 0;
  std::uint64_t dom3_entries = 0;
  std::uint64_t slow4_entries = 0;
  std::uint64_t flat_entries = 0;
  std::uint64_t forest_entries = 0;
  SweepStats construction;

  std::uint64_t total_entities() const {
    return points + tree_cells + nested_cells + gamma_links + lambda_links +
           dom3_entries + slow4_entries + flat_entries + forest_entries;
  }
  void merge(const BuildStats& o) {
    points += o.points;
    tree_cells += o.tree_cells;
    nested_cells += o.nested_cells;
    gamma_links += o.gamma_links;
    lambda_links += o.lambda_links;
    dom3_entries += o.dom3_entries;
    slow4_entries += o.slow4_entries;
    flat_entries += o.flat_entries;
    forest_entries += o.forest_entries;
    construction.merge(o.construction);
  }
};

}  // namespace orthorange
