#include "commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "index.hpp"
#include "io.hpp"

namespace orthorange::cli {

namespace {

int fail(const std::string& msg) {
  std::cerr << "orthorange: " << msg << "\n";
  return kExitFail;
}

std::string describe(const ParseError& e, const std::string& path) {
  std::ostringstream out;
  out << path;
  if (e.line > 0) out << ":" << e.line;
  out << ": " << e.what();
  return out.str();
}

}  // namespace

int cmd_gen(const GenOptions& opt) {
  Distribution dist;
  if (!parse_distribution(opt.dist, dist))
    return fail("unknown distribution `" + opt.dist + "`");
  if (opt.dim < 1 || opt.dim > kMaxDim)
    return fail("dimension must be between 1 and " + std::to_string(kMaxDim));
  const auto rows = generate_rows(opt.n, opt.dim, dist, opt.seed);
  try {
    std::ofstream file;
    std::ostream& out = open_output(opt.out, file);
    write_points(out, opt.dim, rows);
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return kExitPass;
}

int cmd_build(const BuildOptions& opt) {
  try {
    Dataset data = load_points_file(opt.points);
    if (opt.dim != 0 && opt.dim != data.dim)
      return fail("`" + opt.points + "` has dim=" + std::to_string(data.dim) +
                  ", but --dim=" + std::to_string(opt.dim) + " was requested");
    BuiltIndex idx = build_index(opt.structure, std::move(data), opt.cfg);
    save_index(opt.out, idx);
    const std::string stats = to_json(idx.stats).dump(2);
    std::cout << stats << "\n";
    if (!opt.stats_out.empty()) {
      std::ofstream sf(opt.stats_out);
      if (!sf) return fail("cannot write `" + opt.stats_out + "`");
      sf << stats << "\n";
    }
  } catch (const ParseError& e) {
    return fail(describe(e, opt.points));
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return kExitPass;
}

int cmd_query(const QueryOptions& opt) {
  try {
    const BuiltIndex idx = load_index(opt.index);
    std::vector<QuerySpec> specs;
    try {
      specs = load_queries_file(opt.queries, idx.data.dim);
    } catch (const ParseError& e) {
      return fail(describe(e, opt.queries));
    }
    std::ofstream file;
    std::ostream& out = open_output(opt.out, file);
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const QueryResult res = run_query(idx, specs[i]);
      nlohmann::ordered_json j;
      j["query_index"] = i;
      j["ids"] = res.ids;
      j["stats"] = to_json(res.stats);
      out << j.dump() << "\n";
    }
  } catch (const ParseError& e) {
    return fail(describe(e, opt.index));
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return kExitPass;
}

}  // namespace orthorange::cli
