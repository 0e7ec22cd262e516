#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <span>
#include <sstream>

#include "commands.hpp"
#include "index.hpp"
#include "io.hpp"
#include "orthorange/cutting.hpp"
#include "orthorange/hierarchy.hpp"
#include "orthorange/oracle.hpp"
#include "orthorange/restricted.hpp"

namespace orthorange::cli {

namespace {

struct Violation {
  std::string what;
  std::string location;
  std::string structure;             // index kind to rebuild when minimizing
  std::optional<QuerySpec> query;    // mismatch repros
  std::optional<Point3> witness;     // cutting repros (rank space)
};

struct Counts {
  std::uint64_t cuttings = 0;
  std::uint64_t cutting_cells = 0;
  std::uint64_t decompositions = 0;
  std::uint64_t covers = 0;
  std::uint64_t dom4 = 0, five = 0, box = 0;
  std::uint64_t iteration_bounds = 0;
  std::uint64_t candidate_bounds = 0;
  std::uint64_t visit_bounds = 0;
  std::uint64_t reruns = 0;
};

using CutVerifyOptions = ::orthorange::VerifyOptions;

std::vector<Point3> project3(std::span<const Point4> pts) {
  std::vector<Point3> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    out[i] = Point3{pts[i].c[1], pts[i].c[2], pts[i].c[3], pts[i].id};
  return out;
}

std::string key_text(const RangeKey& k) {
  std::ostringstream out;
  out << "t" << int(k.tree) << ".v" << k.node << "[" << k.lo << "," << k.hi
      << "]";
  return out.str();
}

// True when the spans tile [a, b] exactly once, in any emission order.
bool spans_partition(std::vector<LeafSpan> spans, std::uint32_t a,
                     std::uint32_t b) {
  std::sort(spans.begin(), spans.end(),
            [](const LeafSpan& x, const LeafSpan& y) { return x.lo < y.lo; });
  std::uint32_t expect = a;
  for (const LeafSpan& s : spans) {
    if (s.lo != expect || s.hi < s.lo) return false;
    expect = s.hi + 1;
  }
  return expect == b + 1;
}

// Walks the restricted structures of a 5-sided recursion, depth first.
bool walk_restricted(
    const FiveSided& f, const std::string& where,
    const std::function<bool(const RestrictedStructure&, const std::string&)>&
        fn) {
  if (f.top() != nullptr && !fn(*f.top(), where)) return false;
  const auto& bottoms = f.bottoms();
  for (std::size_t i = 0; i < bottoms.size(); ++i)
    if (!walk_restricted(bottoms[i], where + "/b" + std::to_string(i), fn))
      return false;
  return true;
}

class Verifier {
 public:
  Verifier(const VerifyOptions& opt, const Dataset& data)
      : opt_(opt), data_(data), rng_(opt.seed * 0x2545f4914f6cdd1dULL + 7) {}

  const std::optional<Violation>& violation() const { return violation_; }
  const Counts& counts() const { return counts_; }

  // Every stored cutting of every restricted structure reachable from `idx`,
  // including the nested layers and the per-node bottom layer.
  bool check_cuttings(const BuiltIndex& idx) {
    auto on_store = [&](const RestrictedStructure& rs,
                        const std::string& where) {
      return check_store(rs.store(), idx.kind, where);
    };
    if (idx.five) return walk_restricted(*idx.five, idx.kind, on_store);
    bool ok = true;
    std::size_t node = 0;
    idx.general->for_each_five_sided([&](const FiveSided& f) {
      const std::string where = idx.kind + "/fs" + std::to_string(node++);
      if (ok) ok = walk_restricted(f, where, on_store);
    });
    return ok;
  }

  // Sampled interval decompositions and range covers on one schedule.
  bool check_schedule(const CuttingStore& st, const std::string& where) {
    const TreeSchedule& s = st.schedule;
    std::uniform_int_distribution<std::uint32_t> leaf(1, s.m_padded);
    for (int i = 0; i < 100; ++i) {
      std::uint32_t a = leaf(rng_), b = leaf(rng_);
      if (a > b) std::swap(a, b);
      if (a == b) continue;
      const auto keys = decompose_interval(s, a, b);
      bool ok = keys.size() <= 2 * std::size_t(s.height[2]) - 1;
      std::vector<LeafSpan> spans;
      for (const RangeKey& k : keys) {
        if (k.tree != 2) ok = false;
        spans.push_back(range_leaf_span(s, k));
      }
      if (ok) ok = spans_partition(spans, a, b);
      ++counts_.decompositions;
      if (!ok)
        return flag("interval decomposition is not a partition of [" +
                        std::to_string(a) + "," + std::to_string(b) + "]",
                    where, "");
    }
    for (int i = 2; i + 1 <= s.levels; ++i) {
      const auto keys = st.keys(i);
      if (keys.empty()) continue;
      std::uniform_int_distribution<std::size_t> pick(0, keys.size() - 1);
      for (int r = 0; r < 50; ++r) {
        const RangeKey k = keys[pick(rng_)];
        const auto cover = cover_range(s, k);
        const LeafSpan parent = range_leaf_span(s, k);
        bool ok = !cover.empty() &&
                  cover.size() <= 2 * std::size_t(s.beta) - 1;
        std::vector<LeafSpan> spans;
        for (const RangeKey& c : cover) {
          if (c.tree != k.tree + 1) ok = false;
          spans.push_back(range_leaf_span(s, c));
        }
        if (ok) ok = spans_partition(spans, parent.lo, parent.hi);
        ++counts_.covers;
        if (!ok)
          return flag("range cover is not a partition of " + key_text(k),
                      where, "");
      }
    }
    return true;
  }

  // Random queries of every applicable type against the scan oracle, with
  // the per-query statistics bounds checked as they fly by.
  bool check_queries(const BuiltIndex& idx) {
    const bool is_five = idx.five != nullptr;
    std::vector<QueryType> types;
    if (is_five) {
      types = {QueryType::dom4, QueryType::five_sided};
    } else {
      types = {QueryType::box};
      if (idx.data.dim == 4)
        types.insert(types.end(),
                     {QueryType::dom4, QueryType::five_sided});
    }
    for (QueryType t : types) {
      for (std::size_t i = 0; i < opt_.queries; ++i) {
        const QuerySpec q = random_query(data_, t, rng_);
        const QueryResult res = run_query(idx, q);
        const std::vector<PointId> want =
            data_.oracle(data_.canonicalize(q.box));
        count_query(t);
        if (res.ids != want)
          return flag("answer disagrees with the oracle (" +
                          std::to_string(res.ids.size()) + " ids vs " +
                          std::to_string(want.size()) + ")",
                      idx.kind + " " + to_string(t), idx.kind, q);
        if (!check_stats_bounds(idx, res.stats))
          return flag(bound_error_, idx.kind + " " + to_string(t), idx.kind,
                      q);
        if (i % 16 == 0) {
          const QueryResult again = run_query(idx, q);
          ++counts_.reruns;
          if (again.ids != res.ids)
            return flag("answer changed between identical runs",
                        idx.kind + " " + to_string(t), idx.kind, q);
        }
      }
    }
    return true;
  }

  bool fault_pending() const { return opt_.fault_inject && !tampered_; }

 private:
  bool flag(std::string what, std::string location, std::string structure,
            std::optional<QuerySpec> query = std::nullopt,
            std::optional<Point3> witness = std::nullopt) {
    violation_ = Violation{std::move(what), std::move(location),
                           std::move(structure), std::move(query),
                           std::move(witness)};
    return false;
  }

  bool check_store(const CuttingStore& st, const std::string& kind,
                   const std::string& where) {
    const TreeSchedule& s = st.schedule;
    for (int i = 2; i <= s.levels; ++i) {
      for (const RangeKey& key : st.keys(i)) {
        const RangeEntry& entry = st.at(key);
        const std::vector<Point3> pts = project3(st.range_points(key));
        if (!check_cutting(pts, entry.cutting, kind,
                           where + "/" + key_text(key)))
          return false;
        for (std::size_t ci = 0; ci < entry.nested.size(); ++ci) {
          const Point3 owner = entry.cutting.cells[ci].apex;
          std::vector<Point3> members;
          for (const Point3& p : pts)
            if (cell_contains(owner, p)) members.push_back(p);
          if (!check_cutting(members, entry.nested[ci].cutting, kind,
                             where + "/" + key_text(key) + "/cell" +
                                 std::to_string(ci)))
            return false;
        }
      }
    }
    for (std::uint32_t v = 1; v < 2 * s.m_padded; ++v) {
      const std::vector<Point3> pts =
          project3(st.span_points(node_leaf_span(s.e, v)));
      if (!check_cutting(pts, st.log6[v].cutting, kind,
                         where + "/bottom.v" + std::to_string(v)))
        return false;
    }
    return true;
  }

  bool check_cutting(std::span<const Point3> pts, const Cutting& cut,
                     const std::string& kind, const std::string& where) {
    std::vector<Point3> apexes = apexes_of(cut);
    if (fault_pending()) {
      // Injected defect: discard every cell, so some shallow probe is
      // uncovered and the coverage sweep must trip.
      apexes.clear();
      tampered_ = true;
    }
    CutVerifyOptions vo;
    vo.c1 = opt_.cfg.c1;
    vo.c2 = opt_.cfg.c2;
    vo.cap_x = cut.cap_x;
    vo.cap_y = cut.cap_y;
    vo.cap_z = cut.cap_z;
    vo.exhaustive_threshold = 512;
    vo.sample_columns = 384;
    vo.seed = opt_.seed + counts_.cuttings;
    const VerifyReport rep = verify_cutting(pts, cut.t, apexes, vo);
    ++counts_.cuttings;
    counts_.cutting_cells += cut.cells.size();
    const std::size_t cell_bound = 4 * pts.size() / std::max(1u, cut.t) + 4;
    if (!rep.passed || cut.cells.size() > cell_bound) {
      std::ostringstream what;
      what << "cutting properties violated (conflict=" << rep.conflict_violations
           << " coverage=" << rep.coverage_violations
           << " cells=" << cut.cells.size() << "/" << cell_bound << ")";
      std::optional<Point3> w;
      if (!rep.witnesses.empty()) w = rep.witnesses.front();
      return flag(what.str(), where, kind, std::nullopt, w);
    }
    return true;
  }

  void count_query(QueryType t) {
    if (t == QueryType::dom4) ++counts_.dom4;
    if (t == QueryType::five_sided) ++counts_.five;
    if (t == QueryType::box) ++counts_.box;
  }

  // Iteration, candidate and node-visit bounds from the query statistics.
  bool check_stats_bounds(const BuiltIndex& idx, const QueryStats& qs) {
    const double lgn = std::log2(std::max<double>(4, idx.data.size()));
    const double iter_bound = std::log(lgn) / std::log(3.0) + 2.0;
    ++counts_.iteration_bounds;
    if (double(qs.iterations) > iter_bound + 1e-9) {
      bound_error_ = "iteration count " + std::to_string(qs.iterations) +
                     " exceeds log3(log2 n) + 2";
      return false;
    }
    if (idx.five && idx.five->top() != nullptr) {
      const double c0 = 2.0 * idx.five->top()->schedule().height[2];
      const double beta = idx.cfg.beta;
      for (std::size_t j = 0; j < qs.candidate_counts.size(); ++j) {
        ++counts_.candidate_bounds;
        const double bound = c0 * std::pow(beta, double(j) + 3.0) - 1.0;
        if (double(qs.candidate_counts[j]) > bound) {
          bound_error_ = "candidate set " + std::to_string(j) + " holds " +
                         std::to_string(qs.candidate_counts[j]) +
                         " cells, above " + std::to_string(bound);
          return false;
        }
      }
    }
    if (idx.general) {
      // Each lifted dimension multiplies the canonical-node count by O(log n)
      // and every canonical node runs sub-queries with their own visits.
      const int lifted = std::max(1, idx.data.dim - 3);
      const double bound = 2.0 * lgn * lgn * lifted + 8.0;
      ++counts_.visit_bounds;
      if (double(qs.node_visits) > bound) {
        bound_error_ = "node visits " + std::to_string(qs.node_visits) +
                       " exceed 2 log2^2 n per lifted dimension";
        return false;
      }
    }
    return true;
  }

  VerifyOptions opt_;
  const Dataset& data_;
  std::mt19937_64 rng_;
  Counts counts_;
  std::optional<Violation> violation_;
  bool tampered_ = false;
  std::string bound_error_;
};

void write_repro(const std::string& path, const Dataset& data,
                 const Violation& v) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write `" + path + "`");
  out << "# dim=" << data.dim << " n=" << data.size() << "\n";
  out << "# repro: " << v.what << "\n";
  out << "# location: " << v.location << "\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.ids[i];
    for (int d = 0; d < data.dim; ++d)
      out << '\t' << nlohmann::json(data.raw_rows[i][d]).dump();
    out << "\n";
  }
  if (v.query) {
    out << "# query: ";
    write_query(out, *v.query);
  }
  if (v.witness)
    out << "# witness probe (rank space): x=" << v.witness->x
        << " y=" << v.witness->y << " z=" << v.witness->z << "\n";
}

// Greedy chunk removal: keeps deleting ranges of points while the failure
// reproduces, until single removals stop helping or the budget runs out.
Dataset minimize(const Dataset& full,
                 const std::function<bool(const Dataset&)>& still_fails,
                 int budget) {
  std::vector<PointId> ids = full.ids;
  std::vector<std::vector<double>> rows = full.raw_rows;
  auto candidate = [&](std::size_t pos, std::size_t len) {
    std::vector<PointId> cid;
    std::vector<std::vector<double>> crow;
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (i < pos || i >= pos + len) {
        cid.push_back(ids[i]);
        crow.push_back(rows[i]);
      }
    return std::pair(std::move(cid), std::move(crow));
  };
  std::size_t chunk = std::max<std::size_t>(1, ids.size() / 2);
  while (budget > 0) {
    bool removed = false;
    for (std::size_t pos = 0; pos < ids.size() && budget > 0;) {
      const std::size_t len = std::min(chunk, ids.size() - pos);
      auto [cid, crow] = candidate(pos, len);
      --budget;
      if (still_fails(make_dataset(full.dim, cid, crow))) {
        ids = std::move(cid);
        rows = std::move(crow);
        removed = true;
      } else {
        pos += len;
      }
    }
    if (chunk > 1)
      chunk = std::max<std::size_t>(1, chunk / 2);
    else if (!removed)
      break;
  }
  return make_dataset(full.dim, std::move(ids), std::move(rows));
}

}  // namespace

int cmd_verify(const VerifyOptions& opt) {
  Dataset data;
  try {
    data = load_points_file(opt.points);
  } catch (const ParseError& e) {
    std::cerr << "orthorange: " << opt.points;
    if (e.line > 0) std::cerr << ":" << e.line;
    std::cerr << ": " << e.what() << "\n";
    return kExitFail;
  }
  if (data.dim < 4) {
    std::cerr << "orthorange: verification needs dim >= 4, `" << opt.points
              << "` has dim=" << data.dim << "\n";
    return kExitFail;
  }

  std::vector<std::string> kinds;
  if (data.dim == 4) kinds = {"5sided", "general"};
  else kinds = {"general"};

  std::cout << "orthorange verify: n=" << data.size() << " dim=" << data.dim
            << " structures=[";
  for (std::size_t i = 0; i < kinds.size(); ++i)
    std::cout << (i ? " " : "") << kinds[i];
  std::cout << "] queries=" << opt.queries << " seed=" << opt.seed
            << (opt.fault_inject ? " fault-inject=on" : "") << "\n";

  Verifier v(opt, data);
  std::optional<Violation> violation;
  try {
    for (const std::string& kind : kinds) {
      const BuiltIndex idx = build_index(kind, data, opt.cfg);
      if (!v.check_cuttings(idx)) break;
      const RestrictedStructure* top = nullptr;
      if (idx.five) {
        top = idx.five->top();
      } else {
        idx.general->for_each_five_sided([&](const FiveSided& f) {
          if (top == nullptr) top = f.top();
        });
      }
      if (top != nullptr && !v.check_schedule(top->store(), kind)) break;
      if (!v.check_queries(idx)) break;
    }
    violation = v.violation();
    if (!violation && v.fault_pending())
      violation = Violation{
          "fault injection requested but the instance stores no cuttings",
          "cutting sweep", kinds.front(), std::nullopt, std::nullopt};
  } catch (const std::exception& e) {
    violation = Violation{std::string("exception: ") + e.what(), "build",
                          kinds.front(), std::nullopt, std::nullopt};
  }

  const Counts& c = v.counts();
  std::cout << "  cuttings checked: " << c.cuttings << " (" << c.cutting_cells
            << " cells)\n"
            << "  decompositions checked: " << c.decompositions
            << ", covers checked: " << c.covers << "\n"
            << "  oracle queries: dom4=" << c.dom4 << " 5sided=" << c.five
            << " box=" << c.box << "\n"
            << "  stats bounds: iterations=" << c.iteration_bounds
            << " candidates=" << c.candidate_bounds
            << " node-visits=" << c.visit_bounds << "\n"
            << "  determinism re-runs: " << c.reruns << "\n";

  if (!violation) {
    std::cout << "verify: PASS\n";
    return kExitPass;
  }

  std::cout << "verify: FAIL - " << violation->what << " at "
            << violation->location << "\n";

  // Reduce the instance while the same class of failure reproduces, then
  // dump points plus the offending query for replay.
  const Violation& vio = *violation;
  auto still_fails = [&](const Dataset& sub) -> bool {
    try {
      const std::string kind =
          vio.structure.empty() ? kinds.front() : vio.structure;
      const BuiltIndex idx = build_index(kind, sub, opt.cfg);
      if (vio.query) {
        const QueryResult res = run_query(idx, *vio.query);
        return res.ids != sub.oracle(sub.canonicalize(vio.query->box));
      }
      VerifyOptions sub_opt = opt;
      Verifier vv(sub_opt, sub);
      return !vv.check_cuttings(idx);
    } catch (const std::exception&) {
      return true;  // a crash on the subset is still a repro
    }
  };
  Dataset small = data;
  try {
    small = minimize(data, still_fails, 48);
  } catch (const std::exception&) {
    // fall back to the full instance
  }
  try {
    write_repro(opt.repro_out, small, vio);
    std::cout << "repro: " << opt.repro_out << " (n=" << small.size() << ")\n";
  } catch (const std::exception& e) {
    std::cerr << "orthorange: " << e.what() << "\n";
  }
  return kExitFail;
}

}  // namespace orthorange::cli
