#include "index.hpp"

#include <fstream>
#include <utility>

namespace orthorange::cli {

namespace {
constexpr int kIndexVersion = 1;
}

bool valid_kind(const std::string& kind) {
  return kind == "5sided" || kind == "dominance4" || kind == "general";
}

BuiltIndex build_index(const std::string& kind, Dataset data,
                       const Config& cfg) {
  if (!valid_kind(kind))
    throw std::runtime_error("unknown structure `" + kind + "`");
  BuiltIndex idx;
  idx.kind = kind;
  idx.cfg = cfg;
  idx.data = std::move(data);
  if (kind == "general") {
    if (idx.data.dim < 4)
      throw std::runtime_error(
          "structure `general` needs at least four dimensions, file has dim=" +
          std::to_string(idx.data.dim));
    const std::vector<PointD> pts = idx.data.to_pointd();
    idx.general = std::make_unique<GeneralStructure>(pts, idx.data.dim, cfg);
    idx.stats = idx.general->build_stats();
  } else {
    if (idx.data.dim != 4)
      throw std::runtime_error("structure `" + kind +
                               "` needs dimension 4, file has dim=" +
                               std::to_string(idx.data.dim));
    const std::vector<Point4> pts = idx.data.to_point4();
    idx.five = std::make_unique<FiveSided>(pts, cfg);
    idx.stats = idx.five->build_stats();
  }
  return idx;
}

nlohmann::ordered_json config_json(const Config& cfg) {
  nlohmann::ordered_json j;
  j["c1"] = cfg.c1;
  j["c2"] = cfg.c2;
  j["beta"] = cfg.beta;
  j["nested_c"] = cfg.nested_c;
  j["cutoff_n0"] = cfg.cutoff_n0;
  j["log6_c"] = cfg.log6_c;
  j["lambda_c"] = cfg.lambda_c;
  j["constructor"] = to_string(cfg.constructor);
  j["seed"] = cfg.seed;
  return j;
}

Config config_from_json(const nlohmann::ordered_json& j) {
  Config cfg;
  cfg.c1 = j.at("c1").get<double>();
  cfg.c2 = j.at("c2").get<double>();
  cfg.beta = j.at("beta").get<int>();
  cfg.nested_c = j.at("nested_c").get<int>();
  cfg.cutoff_n0 = j.at("cutoff_n0").get<int>();
  cfg.log6_c = j.at("log6_c").get<int>();
  cfg.lambda_c = j.at("lambda_c").get<int>();
  if (!parse_constructor(j.at("constructor").get<std::string>(),
                         cfg.constructor))
    throw std::runtime_error("bad constructor in index file");
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

void save_index(const std::string& path, const BuiltIndex& idx) {
  nlohmann::ordered_json j;
  j["format"] = "orthorange-index";
  j["version"] = kIndexVersion;
  j["structure"] = idx.kind;
  j["dim"] = idx.data.dim;
  j["config"] = config_json(idx.cfg);
  j["build_stats"] = to_json(idx.stats);
  nlohmann::ordered_json pts = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < idx.data.size(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    row.push_back(idx.data.ids[i]);
    for (int d = 0; d < idx.data.dim; ++d)
      row.push_back(idx.data.raw_rows[i][d]);
    pts.push_back(std::move(row));
  }
  j["points"] = std::move(pts);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write `" + path + "`");
  out << j.dump() << "\n";
}

BuiltIndex load_index(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open `" + path + "`");
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("index file `" + path + "` is not valid: " +
                             e.what());
  }
  if (j.value("format", "") != "orthorange-index" ||
      j.value("version", 0) != kIndexVersion)
    throw std::runtime_error("`" + path + "` is not an index file");
  const std::string kind = j.at("structure").get<std::string>();
  const int dim = j.at("dim").get<int>();
  const Config cfg = config_from_json(j.at("config"));

  std::vector<PointId> ids;
  std::vector<std::vector<double>> rows;
  for (const auto& row : j.at("points")) {
    if (static_cast<int>(row.size()) != dim + 1)
      throw std::runtime_error("index point row has wrong arity");
    ids.push_back(row[0].get<PointId>());
    std::vector<double> r(dim);
    for (int d = 0; d < dim; ++d) r[d] = row[d + 1].get<double>();
    rows.push_back(std::move(r));
  }
  BuiltIndex idx =
      build_index(kind, make_dataset(dim, std::move(ids), std::move(rows)),
                  cfg);
  if (to_json(idx.stats) != j.at("build_stats"))
    throw std::runtime_error(
        "index file `" + path +
        "` does not replay to the recorded build statistics (corrupt file or "
        "mismatched library version)");
  return idx;
}

QueryResult run_query(const BuiltIndex& idx, const QuerySpec& q) {
  const char* need = nullptr;
  if (q.type == QueryType::five_sided && idx.kind == "dominance4")
    need = "5sided or general";
  if (q.type == QueryType::box && idx.kind != "general") need = "general";
  if (need)
    throw std::runtime_error("index structure `" + idx.kind +
                             "` cannot answer " + to_string(q.type) +
                             " queries (needs " + need + ")");
  QueryResult res;
  const RankBox rb = idx.data.canonicalize(q.box);
  if (rb.empty()) return res;
  if (idx.general) {
    std::vector<std::pair<Coord, Coord>> box(idx.data.dim);
    for (int d = 0; d < idx.data.dim; ++d) box[d] = {rb.lo[d], rb.hi[d]};
    res.ids = idx.general->query_box(box, &res.stats);
    return res;
  }
  if (q.type == QueryType::dom4)
    res.ids = idx.five->query_dominance(rb.hi[0], rb.hi[1], rb.hi[2], rb.hi[3],
                                        &res.stats);
  else
    res.ids = idx.five->query_5sided(rb.lo[0], rb.hi[0], rb.hi[1], rb.hi[2],
                                     rb.hi[3], &res.stats);
  return res;
}

}  // namespace orthorange::cli
