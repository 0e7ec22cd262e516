#pragma once

#include <memory>
#include <string>

#include "io.hpp"
#include "orthorange/config.hpp"
#include "orthorange/outer.hpp"

namespace orthorange::cli {

// A built structure together with the dataset it answers over. Index files
// persist the raw points plus the configuration; loading replays the
// deterministic build and cross-checks the recorded build statistics, so a
// loaded index is bit-for-bit the in-memory one.
struct BuiltIndex {
  std::string kind;  // 5sided | dominance4 | general
  Config cfg;
  Dataset data;
  BuildStats stats;
  std::unique_ptr<FiveSided> five;          // kind != general
  std::unique_ptr<GeneralStructure> general;  // kind == general
};

bool valid_kind(const std::string& kind);
BuiltIndex build_index(const std::string& kind, Dataset data, const Config& cfg);
void save_index(const std::string& path, const BuiltIndex& idx);
BuiltIndex load_index(const std::string& path);

nlohmann::ordered_json config_json(const Config& cfg);
Config config_from_json(const nlohmann::ordered_json& j);

struct QueryResult {
  std::vector<PointId> ids;
  QueryStats stats;
};

// Executes one parsed query; throws std::runtime_error when the index kind
// cannot answer the query type.
QueryResult run_query(const BuiltIndex& idx, const QuerySpec& q);

}  // namespace orthorange::cli
