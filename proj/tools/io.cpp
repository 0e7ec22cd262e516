#include "io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <iostream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "orthorange/oracle.hpp"

namespace orthorange::cli {

namespace {

void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool parse_double(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  const char* b = tok.data();
  const char* e = b + tok.size();
  const auto res = std::from_chars(b, e, out);
  return res.ec == std::errc{} && res.ptr == e && !std::isnan(out) &&
         std::isfinite(out);
}

bool parse_id(const std::string& tok, PointId& out) {
  if (tok.empty()) return false;
  const char* b = tok.data();
  const char* e = b + tok.size();
  std::uint64_t v = 0;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc{} || res.ptr != e) return false;
  if (v > std::numeric_limits<PointId>::max()) return false;
  out = static_cast<PointId>(v);
  return true;
}

// Accepts -inf/+inf/inf; otherwise a finite decimal number.
bool parse_bound(const std::string& tok, double& out) {
  if (tok == "-inf") {
    out = kNegInf;
    return true;
  }
  if (tok == "+inf" || tok == "inf") {
    out = kPosInf;
    return true;
  }
  return parse_double(tok, out);
}

std::string fmt_bound(double v) {
  if (v == kNegInf) return "-inf";
  if (v == kPosInf) return "+inf";
  return nlohmann::json(v).dump();  // shortest round-trip decimal
}

}  // namespace

std::vector<Point4> Dataset::to_point4() const {
  std::vector<Point4> out(size());
  for (std::size_t i = 0; i < size(); ++i) {
    out[i].c = {ranks.at(i, 0), ranks.at(i, 1), ranks.at(i, 2), ranks.at(i, 3)};
    out[i].id = ids[i];
  }
  return out;
}

std::vector<PointD> Dataset::to_pointd() const {
  std::vector<PointD> out(size());
  for (std::size_t i = 0; i < size(); ++i) {
    out[i].c.resize(dim);
    for (int d = 0; d < dim; ++d) out[i].c[d] = ranks.at(i, d);
    out[i].id = ids[i];
  }
  return out;
}

RankBox Dataset::canonicalize(const RawBox& box) const {
  return canonicalize_query(ranks, box);
}

std::vector<PointId> Dataset::oracle(const RankBox& box) const {
  std::vector<PointId> rows = oracle_report(ranks, box);
  for (PointId& r : rows) r = ids[r];
  std::sort(rows.begin(), rows.end());
  return rows;
}

Dataset make_dataset(int dim, std::vector<PointId> ids,
                     std::vector<std::vector<double>> rows) {
  if (dim < 1 || dim > kMaxDim)
    throw ParseError(0, "dimension must be between 1 and " +
                            std::to_string(kMaxDim));
  if (ids.size() != rows.size())
    throw ParseError(0, "id/row count mismatch");
  Dataset out;
  out.dim = dim;
  out.ids = std::move(ids);
  out.raw_rows = std::move(rows);
  out.ranks = to_rank_space(out.raw_rows, dim);
  return out;
}

Dataset load_points(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header line");
  chomp(line);
  int dim = 0;
  long long n = -1;
  if (std::sscanf(line.c_str(), "# dim=%d n=%lld", &dim, &n) != 2)
    throw ParseError(1, "header must be `# dim=<d> n=<n>`");
  if (dim < 1 || dim > kMaxDim)
    throw ParseError(1, "dimension must be between 1 and " +
                            std::to_string(kMaxDim));
  if (n < 0) throw ParseError(1, "negative point count");

  std::vector<PointId> ids;
  std::vector<std::vector<double>> rows;
  std::unordered_set<PointId> seen;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> toks = split_tabs(line);
    if (static_cast<int>(toks.size()) != dim + 1)
      throw ParseError(lineno, "expected " + std::to_string(dim + 1) +
                                   " tab-separated fields, got " +
                                   std::to_string(toks.size()));
    PointId id = 0;
    if (!parse_id(toks[0], id))
      throw ParseError(lineno, "invalid point id `" + toks[0] + "`");
    if (!seen.insert(id).second)
      throw ParseError(lineno, "duplicate point id " + std::to_string(id));
    std::vector<double> row(dim);
    for (int d = 0; d < dim; ++d)
      if (!parse_double(toks[d + 1], row[d]))
        throw ParseError(lineno, "invalid coordinate `" + toks[d + 1] + "`");
    ids.push_back(id);
    rows.push_back(std::move(row));
  }
  if (static_cast<long long>(ids.size()) != n)
    throw ParseError(lineno, "header promises n=" + std::to_string(n) +
                                 " points, file has " +
                                 std::to_string(ids.size()));
  return make_dataset(dim, std::move(ids), std::move(rows));
}

Dataset load_points_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open `" + path + "`");
  return load_points(in);
}

void write_points(std::ostream& out, int dim,
                  const std::vector<std::vector<std::uint32_t>>& rows) {
  out << "# dim=" << dim << " n=" << rows.size() << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << i;
    for (int d = 0; d < dim; ++d) out << '\t' << rows[i][d];
    out << "\n";
  }
}

bool parse_distribution(const std::string& text, Distribution& out) {
  if (text == "uniform") {
    out = Distribution::uniform;
    return true;
  }
  if (text == "clustered") {
    out = Distribution::clustered;
    return true;
  }
  if (text == "diagonal") {
    out = Distribution::diagonal;
    return true;
  }
  return false;
}

std::vector<std::vector<std::uint32_t>> generate_rows(std::size_t n, int dim,
                                                      Distribution dist,
                                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 12345);
  const std::uint32_t span =
      static_cast<std::uint32_t>(std::max<std::size_t>(4 * n, 16));
  std::uniform_int_distribution<std::uint32_t> uni(1, span);
  std::vector<std::vector<std::uint32_t>> rows(
      n, std::vector<std::uint32_t>(dim, 0));
  switch (dist) {
    case Distribution::uniform:
      for (auto& row : rows)
        for (auto& c : row) c = uni(rng);
      break;
    case Distribution::clustered: {
      const std::size_t k = std::max<std::size_t>(1, n / 64);
      std::vector<std::vector<std::uint32_t>> centers(
          k, std::vector<std::uint32_t>(dim, 0));
      for (auto& c : centers)
        for (auto& v : c) v = uni(rng);
      const std::uint32_t radius = std::max<std::uint32_t>(1, span / 32);
      std::uniform_int_distribution<std::uint32_t> off(0, 2 * radius);
      std::uniform_int_distribution<std::size_t> pick(0, k - 1);
      for (auto& row : rows) {
        const auto& c = centers[pick(rng)];
        for (int d = 0; d < dim; ++d) {
          const std::int64_t v =
              static_cast<std::int64_t>(c[d]) + off(rng) - radius;
          row[d] = static_cast<std::uint32_t>(std::clamp<std::int64_t>(
              v, 1, span));
        }
      }
      break;
    }
    case Distribution::diagonal: {
      // One shared permutation: every dimension carries the same value, so
      // the per-dimension ranks coincide before reduction.
      std::vector<std::uint32_t> perm(n);
      for (std::size_t i = 0; i < n; ++i)
        perm[i] = static_cast<std::uint32_t>(i + 1);
      std::shuffle(perm.begin(), perm.end(), rng);
      for (std::size_t i = 0; i < n; ++i)
        for (int d = 0; d < dim; ++d) rows[i][d] = perm[i];
      break;
    }
  }
  return rows;
}

std::string to_string(QueryType t) {
  switch (t) {
    case QueryType::dom4: return "dom4";
    case QueryType::five_sided: return "5sided";
    case QueryType::box: return "box";
  }
  return "?";
}

std::vector<QuerySpec> load_queries(std::istream& in, int dim) {
  std::vector<QuerySpec> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> toks = split_tabs(line);
    QuerySpec q;
    q.line = lineno;
    if (toks[0] == "dom4") {
      q.type = QueryType::dom4;
    } else if (toks[0] == "5sided") {
      q.type = QueryType::five_sided;
    } else if (toks[0] == "box") {
      q.type = QueryType::box;
    } else {
      throw ParseError(lineno, "unknown query type `" + toks[0] + "`");
    }
    const int qdim = q.type == QueryType::box ? dim : 4;
    if (q.type != QueryType::box && dim != 4)
      throw ParseError(lineno, to_string(q.type) +
                                   " queries need a 4-dimensional index, "
                                   "index has dim=" +
                                   std::to_string(dim));
    if (static_cast<int>(toks.size()) != 1 + 2 * qdim)
      throw ParseError(lineno, "expected " + std::to_string(2 * qdim) +
                                   " bounds for " + to_string(q.type) +
                                   ", got " + std::to_string(toks.size() - 1));
    q.box.dim = qdim;
    for (int d = 0; d < qdim; ++d) {
      if (!parse_bound(toks[1 + 2 * d], q.box.lo[d]))
        throw ParseError(lineno, "invalid bound `" + toks[1 + 2 * d] + "`");
      if (!parse_bound(toks[2 + 2 * d], q.box.hi[d]))
        throw ParseError(lineno, "invalid bound `" + toks[2 + 2 * d] + "`");
    }
    if (q.type == QueryType::dom4)
      for (int d = 0; d < 4; ++d)
        if (q.box.lo[d] != kNegInf)
          throw ParseError(lineno, "dom4 lower bounds must be -inf");
    if (q.type == QueryType::five_sided)
      for (int d = 1; d < 4; ++d)
        if (q.box.lo[d] != kNegInf)
          throw ParseError(lineno,
                           "5sided lower bounds past the first must be -inf");
    out.push_back(q);
  }
  return out;
}

QuerySpec random_query(const Dataset& data, QueryType t,
                       std::mt19937_64& rng) {
  auto raw = [&](int d) {
    if (data.size() == 0) return 0.5;
    std::uniform_int_distribution<std::size_t> row(0, data.size() - 1);
    double v = data.raw_rows[row(rng)][d];
    std::uniform_int_distribution<int> tweak(0, 3);
    if (tweak(rng) == 0) v += 0.5;  // off-grid bound between two values
    return v;
  };
  QuerySpec q;
  q.type = t;
  q.box.dim = t == QueryType::box ? data.dim : 4;
  std::uniform_int_distribution<int> inf(0, 5);  // 1-in-6 unbounded sides
  for (int d = 0; d < q.box.dim; ++d) {
    double a = raw(d), b = raw(d);
    if (a > b) std::swap(a, b);
    const bool lo_allowed =
        t == QueryType::box || (t == QueryType::five_sided && d == 0);
    q.box.lo[d] = lo_allowed && inf(rng) > 0 ? a : kNegInf;
    q.box.hi[d] = inf(rng) > 0 ? b : kPosInf;
  }
  return q;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write `" + path + "`");
  return file;
}

std::vector<QuerySpec> load_queries_file(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open `" + path + "`");
  return load_queries(in, dim);
}

void write_query(std::ostream& out, const QuerySpec& q) {
  out << to_string(q.type);
  for (int d = 0; d < q.box.dim; ++d)
    out << '\t' << fmt_bound(q.box.lo[d]) << '\t' << fmt_bound(q.box.hi[d]);
  out << "\n";
}

nlohmann::ordered_json to_json(const BuildStats& s) {
  nlohmann::ordered_json j;
  j["points"] = s.points;
  j["tree_cells"] = s.tree_cells;
  j["nested_cells"] = s.nested_cells;
  j["gamma_links"] = s.gamma_links;
  j["lambda_links"] = s.lambda_links;
  j["dom3_entries"] = s.dom3_entries;
  j["slow4_entries"] = s.slow4_entries;
  j["flat_entries"] = s.flat_entries;
  j["forest_entries"] = s.forest_entries;
  j["total_entities"] = s.total_entities();
  j["construction"] = {{"counting_queries", s.construction.counting_queries},
                       {"selection_queries", s.construction.selection_queries},
                       {"queue_ops", s.construction.queue_ops},
                       {"cells_emitted", s.construction.cells_emitted},
                       {"patches", s.construction.patches}};
  return j;
}

nlohmann::ordered_json to_json(const QueryStats& s) {
  nlohmann::ordered_json j;
  j["iterations"] = s.iterations;
  j["findany_calls"] = s.findany_calls;
  j["findany_comparisons"] = s.findany_comparisons;
  j["cells_touched"] = s.cells_touched;
  j["scanned_points"] = s.scanned_points;
  j["node_visits"] = s.node_visits;
  j["branch"] = to_string(s.branch);
  j["candidate_counts"] = s.candidate_counts;
  j["work"] = s.work();
  return j;
}

}  // namespace orthorange::cli
