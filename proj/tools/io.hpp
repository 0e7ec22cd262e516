#pragma once

#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "orthorange/geometry.hpp"
#include "orthorange/outer.hpp"
#include "orthorange/stats.hpp"

namespace orthorange::cli {

// File-level failure with a 1-based line number (0 = whole file).
struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& msg)
      : std::runtime_error(msg), line(line_) {}
};

// A loaded instance: raw rows reduced to rank space, original ids kept.
// Ranks are a permutation of 1..n per dimension (ties broken by row order),
// so query bounds translate through canonicalize_query without changing the
// reported set.
struct Dataset {
  int dim = 0;
  std::vector<PointId> ids;                   // [row]
  std::vector<std::vector<double>> raw_rows;  // [row][dim], as parsed
  RankedPointSet ranks;

  std::size_t size() const { return ids.size(); }
  std::vector<Point4> to_point4() const;  // dim == 4 only
  std::vector<PointD> to_pointd() const;
  RankBox canonicalize(const RawBox& box) const;
  std::vector<PointId> oracle(const RankBox& box) const;  // sorted file ids
  std::vector<PointId> oracle(const RawBox& box) const {
    return oracle(canonicalize(box));
  }
};

Dataset make_dataset(int dim, std::vector<PointId> ids,
                     std::vector<std::vector<double>> rows);

Dataset load_points(std::istream& in);
Dataset load_points_file(const std::string& path);
void write_points(std::ostream& out, int dim,
                  const std::vector<std::vector<std::uint32_t>>& rows);

enum class Distribution { uniform, clustered, diagonal };
bool parse_distribution(const std::string& text, Distribution& out);
std::vector<std::vector<std::uint32_t>> generate_rows(std::size_t n, int dim,
                                                      Distribution dist,
                                                      std::uint64_t seed);

enum class QueryType { dom4, five_sided, box };
std::string to_string(QueryType t);

struct QuerySpec {
  QueryType type = QueryType::box;
  RawBox box;
  int line = 0;
};

// Rows are `type<TAB>lo1<TAB>hi1<TAB>...`; dom4 and 5sided rows carry four
// bound pairs and need a 4-dimensional index, box rows carry `dim` pairs.
std::vector<QuerySpec> load_queries(std::istream& in, int dim);
std::vector<QuerySpec> load_queries_file(const std::string& path, int dim);
void write_query(std::ostream& out, const QuerySpec& q);

// Random query with bounds drawn from the dataset's raw values (some nudged
// off-grid, some unbounded), honoring the shape rules of each type.
QuerySpec random_query(const Dataset& data, QueryType t, std::mt19937_64& rng);

// Opens `path` for writing, or aliases stdout when empty or "-".
std::ostream& open_output(const std::string& path, std::ofstream& file);

nlohmann::ordered_json to_json(const BuildStats& s);
nlohmann::ordered_json to_json(const QueryStats& s);

}  // namespace orthorange::cli
