#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "doctest.h"
#include "index.hpp"
#include "io.hpp"
#include "json.hpp"

using namespace orthorange;
using namespace orthorange::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path p = fs::temp_directory_path() /
                 ("orthorange_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  const fs::path so = scratch_dir() / "stdout.txt";
  const fs::path se = scratch_dir() / "stderr.txt";
  const std::string cmd = std::string(ORTHORANGE_CLI_PATH) + " " + args +
                          " > " + so.string() + " 2> " + se.string();
  const int rc = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(so);
  r.err = slurp(se);
  return r;
}

Dataset tiny_dataset() {
  // Ties in every dimension, floats and negatives mixed in.
  std::vector<PointId> ids = {10, 11, 12, 13, 14, 15};
  std::vector<std::vector<double>> rows = {
      {1.5, 2.0, 3.0, 4.0},  {1.5, 1.0, 3.0, -2.0}, {-7.0, 2.0, 0.5, 4.0},
      {3.0, 2.0, 3.0, 9.0},  {0.0, -1.0, 8.0, 4.0}, {3.0, 5.0, -1.0, 0.25},
  };
  return make_dataset(4, std::move(ids), std::move(rows));
}

std::vector<PointId> brute_force(const Dataset& d, const RawBox& b) {
  std::vector<PointId> out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    bool in = true;
    for (int k = 0; k < d.dim; ++k)
      in = in && d.raw_rows[i][k] >= b.lo[k] && d.raw_rows[i][k] <= b.hi[k];
    if (in) out.push_back(d.ids[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("generate_rows is deterministic and distribution-shaped") {
  const auto a = generate_rows(64, 4, Distribution::uniform, 9);
  const auto b = generate_rows(64, 4, Distribution::uniform, 9);
  CHECK(a == b);
  const auto c = generate_rows(64, 4, Distribution::uniform, 10);
  CHECK(a != c);
  CHECK(generate_rows(0, 4, Distribution::uniform, 1).empty());

  // Diagonal rows have identical coordinates across dimensions, so the
  // pre-reduction ranks agree in every dimension.
  const auto diag = generate_rows(40, 5, Distribution::diagonal, 3);
  for (const auto& row : diag)
    for (int k = 1; k < 5; ++k) CHECK(row[k] == row[0]);

  const auto clus = generate_rows(256, 4, Distribution::clustered, 7);
  CHECK(clus.size() == 256);
}

TEST_CASE("points files round-trip through load_points") {
  std::ostringstream out;
  out << "# dim=3 n=4\n";
  out << "7\t1.25\t-3\t10\n";
  out << "9\t0\t2.5\t10\n";
  out << "2\t-8\t-3\t11\n";
  out << "5\t44\t9\t-0.5\n";
  std::istringstream in(out.str());
  const Dataset d = load_points(in);
  CHECK(d.dim == 3);
  CHECK(d.size() == 4);
  CHECK(d.ids == std::vector<PointId>{7, 9, 2, 5});
  CHECK(d.raw_rows[0][0] == doctest::Approx(1.25));
  // Rank reduction: distinct ranks 1..n per dimension, ties broken by row.
  for (int k = 0; k < 3; ++k) {
    std::vector<bool> seen(5, false);
    for (std::size_t i = 0; i < 4; ++i) {
      const Coord r = d.ranks.at(i, k);
      CHECK(r >= 1);
      CHECK(r <= 4);
      CHECK(!seen[r]);
      seen[r] = true;
    }
  }
  // Dimension 2 has the tie -3 vs -3 on rows 0 and 2: earlier row wins.
  CHECK(d.ranks.at(0, 1) < d.ranks.at(2, 1));
}

TEST_CASE("load_points reports the offending line") {
  auto expect_line = [](const std::string& text, int line) {
    std::istringstream in(text);
    try {
      load_points(in);
      FAIL_CHECK("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line == line);
    }
  };
  expect_line("dim=2 n=1\n1\t2\t3\n", 1);                      // bad header
  expect_line("# dim=2 n=2\n1\t2\t3\n4\t5\n", 3);              // arity
  expect_line("# dim=2 n=2\n1\t2\t3\n1\t5\t6\n", 3);           // duplicate id
  expect_line("# dim=9 n=0\n", 1);                             // dim too big
  expect_line("# dim=2 n=3\n1\t2\t3\n", 2);                    // count short
  expect_line("# dim=2 n=1\n1\tx\t3\n", 2);                    // bad number
  expect_line("# dim=2 n=1\n1\tnan\t3\n", 2);                  // nan
}

TEST_CASE("query files parse bounds and reject malformed rows") {
  {
    std::istringstream in(
        "dom4\t-inf\t5\t-inf\t5.5\t-inf\t+inf\t-inf\t5\n"
        "5sided\t1\t5\t-inf\t6\t-inf\t7\t-inf\t8\n"
        "box\t1\t2\t3\t4\t5\t6\t7\t8\n");
    const auto qs = load_queries(in, 4);
    REQUIRE(qs.size() == 3);
    CHECK(qs[0].type == QueryType::dom4);
    CHECK(qs[0].box.hi[1] == doctest::Approx(5.5));
    CHECK(qs[0].box.hi[2] == kPosInf);
    CHECK(qs[1].type == QueryType::five_sided);
    CHECK(qs[1].box.lo[0] == doctest::Approx(1));
    CHECK(qs[2].type == QueryType::box);
  }
  auto expect_line = [](const std::string& text, int dim, int line) {
    std::istringstream in(text);
    try {
      load_queries(in, dim);
      FAIL_CHECK("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line == line);
    }
  };
  // dom4 lower bounds must be -inf.
  expect_line("dom4\t0\t5\t-inf\t5\t-inf\t5\t-inf\t5\n", 4, 1);
  // 5sided lower bounds past the first must be -inf.
  expect_line("5sided\t1\t5\t0\t5\t-inf\t5\t-inf\t5\n", 4, 1);
  // Wrong arity.
  expect_line("box\t1\t2\t3\t4\n", 4, 1);
  // dom4 against a 5-dimensional index.
  expect_line("dom4\t-inf\t5\t-inf\t5\t-inf\t5\t-inf\t5\n", 5, 1);
  // Unknown type.
  expect_line("ball\t1\t2\n", 4, 1);
  // Error on the second line.
  expect_line("box\t1\t2\t3\t4\t5\t6\t7\t8\nbox\t1\n", 4, 2);
}

TEST_CASE("canonicalized oracle answers match raw-value filtering") {
  const Dataset d = tiny_dataset();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coord(-9.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    RawBox b = RawBox::unbounded(4);
    for (int k = 0; k < 4; ++k) {
      double lo = coord(rng), hi = coord(rng);
      if (lo > hi) std::swap(lo, hi);
      if (i % 3 == 0) lo = kNegInf;  // exercise one-sided boxes too
      b.lo[k] = lo;
      b.hi[k] = hi;
    }
    CHECK(d.oracle(b) == brute_force(d, b));
  }
  // Boundary equality: a box whose edge sits exactly on a tied value.
  RawBox b = RawBox::unbounded(4);
  b.lo[0] = 1.5;
  b.hi[0] = 1.5;
  CHECK(d.oracle(b) == std::vector<PointId>{10, 11});
}

TEST_CASE("built structures agree with the oracle on random queries") {
  const auto rows = generate_rows(180, 4, Distribution::clustered, 21);
  std::vector<PointId> ids;
  std::vector<std::vector<double>> raw;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ids.push_back(PointId(1000 + i));
    raw.push_back({double(rows[i][0]), double(rows[i][1]), double(rows[i][2]),
                   double(rows[i][3])});
  }
  Dataset data = make_dataset(4, std::move(ids), std::move(raw));
  const Config cfg;
  std::mt19937_64 rng(77);
  for (const char* kind : {"5sided", "dominance4", "general"}) {
    const BuiltIndex idx = build_index(kind, data, cfg);
    const std::vector<QueryType> types =
        std::string(kind) == "general"
            ? std::vector<QueryType>{QueryType::box, QueryType::dom4}
        : std::string(kind) == "5sided"
            ? std::vector<QueryType>{QueryType::five_sided, QueryType::dom4}
            : std::vector<QueryType>{QueryType::dom4};
    for (QueryType t : types)
      for (int i = 0; i < 40; ++i) {
        const QuerySpec q = random_query(data, t, rng);
        CHECK(run_query(idx, q).ids == data.oracle(q.box));
      }
  }
}

TEST_CASE("index files round-trip and reject tampering") {
  const auto rows = generate_rows(96, 4, Distribution::uniform, 31);
  std::vector<PointId> ids;
  std::vector<std::vector<double>> raw;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ids.push_back(PointId(i));
    raw.push_back({double(rows[i][0]), double(rows[i][1]), double(rows[i][2]),
                   double(rows[i][3])});
  }
  Dataset data = make_dataset(4, std::move(ids), std::move(raw));
  const Config cfg;
  const BuiltIndex idx = build_index("5sided", data, cfg);
  const fs::path file = scratch_dir() / "roundtrip.json";
  save_index(file.string(), idx);

  const BuiltIndex loaded = load_index(file.string());
  CHECK(loaded.kind == idx.kind);
  CHECK(loaded.data.size() == idx.data.size());
  std::mt19937_64 rng(3);
  for (int i = 0; i < 30; ++i) {
    const QuerySpec q = random_query(data, QueryType::five_sided, rng);
    CHECK(run_query(loaded, q).ids == run_query(idx, q).ids);
  }

  // Tampered stats must be rejected on load.
  nlohmann::ordered_json j;
  {
    std::ifstream in(file);
    in >> j;
  }
  j["build_stats"]["tree_cells"] = j["build_stats"]["tree_cells"].get<int>() + 1;
  const fs::path bad = scratch_dir() / "tampered.json";
  {
    std::ofstream out(bad);
    out << j.dump();
  }
  CHECK_THROWS_WITH_AS(load_index(bad.string()),
                       doctest::Contains("does not replay"), std::runtime_error);

  // An empty dataset still round-trips.
  const BuiltIndex empty =
      build_index("general", make_dataset(4, {}, {}), cfg);
  const fs::path efile = scratch_dir() / "empty.json";
  save_index(efile.string(), empty);
  const BuiltIndex eloaded = load_index(efile.string());
  QuerySpec q;
  q.type = QueryType::box;
  q.box = RawBox::unbounded(4);
  CHECK(run_query(eloaded, q).ids.empty());
}

TEST_CASE("cli: exit codes and help") {
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("build --points nowhere.tsv").code == 2);  // missing required
  CHECK(run_cli("gen --n 5 --dist sideways").code == 2);
}

TEST_CASE("cli: gen is deterministic and supports n=0") {
  const fs::path a = scratch_dir() / "a.tsv";
  const fs::path b = scratch_dir() / "b.tsv";
  REQUIRE(run_cli("gen --n 50 --dim 4 --seed 12 --out " + a.string()).code == 0);
  REQUIRE(run_cli("gen --n 50 --dim 4 --seed 12 --out " + b.string()).code == 0);
  CHECK(slurp(a) == slurp(b));
  REQUIRE(run_cli("gen --n 50 --dim 4 --seed 13 --out " + b.string()).code == 0);
  CHECK(slurp(a) != slurp(b));

  const RunResult zero = run_cli("gen --n 0 --dim 4");
  CHECK(zero.code == 0);
  CHECK(zero.out == "# dim=4 n=0\n");
}

TEST_CASE("cli: build, query and rebuild determinism") {
  const fs::path pts = scratch_dir() / "pipe_pts.tsv";
  const fs::path idx = scratch_dir() / "pipe_idx.json";
  const fs::path qs = scratch_dir() / "pipe_q.tsv";
  const fs::path s1 = scratch_dir() / "stats1.json";
  const fs::path s2 = scratch_dir() / "stats2.json";
  REQUIRE(run_cli("gen --n 150 --dim 4 --seed 8 --out " + pts.string()).code ==
          0);
  REQUIRE(run_cli("build --points " + pts.string() +
                  " --structure 5sided --out " + idx.string() +
                  " --stats-out " + s1.string())
              .code == 0);
  REQUIRE(run_cli("build --points " + pts.string() +
                  " --structure 5sided --out " + idx.string() +
                  " --stats-out " + s2.string())
              .code == 0);
  CHECK(slurp(s1) == slurp(s2));  // byte-identical stats JSON

  // Compose a query batch and cross-check the answers with the oracle.
  const Dataset data = load_points_file(pts.string());
  std::mt19937_64 rng(4);
  std::vector<QuerySpec> specs;
  {
    std::ofstream out(qs);
    for (int i = 0; i < 25; ++i) {
      const QueryType t = i % 2 ? QueryType::dom4 : QueryType::five_sided;
      QuerySpec q = random_query(data, t, rng);
      specs.push_back(q);
      write_query(out, q);
    }
  }
  const RunResult res = run_cli("query --index " + idx.string() +
                                " --queries " + qs.string());
  REQUIRE(res.code == 0);
  std::istringstream lines(res.out);
  std::string line;
  int i = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("query_index").get<int>() == i);
    CHECK(j.at("ids").get<std::vector<PointId>>() ==
          data.oracle(specs[std::size_t(i)].box));
    CHECK(j.at("stats").contains("work"));
    ++i;
  }
  CHECK(i == 25);

  // Dimension mismatch: dom4 rows against a 5-dimensional general index.
  const fs::path p5 = scratch_dir() / "p5.tsv";
  const fs::path i5 = scratch_dir() / "i5.json";
  REQUIRE(run_cli("gen --n 40 --dim 5 --seed 2 --out " + p5.string()).code ==
          0);
  REQUIRE(run_cli("build --points " + p5.string() +
                  " --structure general --out " + i5.string())
              .code == 0);
  const RunResult mis = run_cli("query --index " + i5.string() +
                                " --queries " + qs.string());
  CHECK(mis.code == 1);
  CHECK(mis.err.find("4-dimensional") != std::string::npos);

  // Malformed points: parse errors carry the line number and exit 1.
  const fs::path badp = scratch_dir() / "bad_pts.tsv";
  {
    std::ofstream out(badp);
    out << "# dim=4 n=2\n1\t2\t3\t4\t5\n6\t7\t8\n";
  }
  const RunResult bad = run_cli("build --points " + badp.string() +
                                " --structure 5sided --out " + idx.string());
  CHECK(bad.code == 1);
  CHECK(bad.err.find(":3:") != std::string::npos);
}

TEST_CASE("cli: verify passes clean and fails under fault injection") {
  const fs::path pts = scratch_dir() / "verify_pts.tsv";
  REQUIRE(run_cli("gen --n 160 --dim 4 --seed 6 --out " + pts.string()).code ==
          0);
  const RunResult ok =
      run_cli("verify --points " + pts.string() + " --queries 40 --seed 3");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("verify: PASS") != std::string::npos);

  const fs::path repro = scratch_dir() / "verify_repro.tsv";
  const RunResult bad = run_cli("verify --points " + pts.string() +
                                " --queries 40 --seed 3 --fault-inject" +
                                " --repro-out " + repro.string());
  CHECK(bad.code == 1);
  CHECK(bad.out.find("verify: FAIL") != std::string::npos);
  REQUIRE(fs::exists(repro));
  // The repro is a loadable points file smaller than the input.
  const Dataset mini = load_points_file(repro.string());
  CHECK(mini.size() < 160);
  CHECK(mini.dim == 4);
}

TEST_CASE("cli: bench emits the ladder CSV with fits") {
  const RunResult two = run_cli(
      "bench --sizes 256,512 --reps 1 --queries 20 --structures 5sided");
  REQUIRE(two.code == 0);
  std::istringstream lines(two.out);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line ==
        "n,structure,build_ms,query_p50_ms,findany_calls_mean,iterations_mean,"
        "cells_total");
  std::vector<std::string> rows;
  std::vector<std::string> fits;
  while (std::getline(lines, line)) {
    if (line.rfind("# fit", 0) == 0)
      fits.push_back(line);
    else if (!line.empty())
      rows.push_back(line);
  }
  REQUIRE(rows.size() == 2);
  CHECK(!fits.empty());
  CHECK(fits.front().find("r2=") != std::string::npos);
  // cells_total, the last column, must not shrink as n grows.
  auto last_col = [](const std::string& row) {
    return std::stoll(row.substr(row.rfind(',') + 1));
  };
  CHECK(last_col(rows[0]) <= last_col(rows[1]));

  const RunResult one =
      run_cli("bench --sizes 300 --reps 1 --queries 10 --structures general");
  REQUIRE(one.code == 0);
  CHECK(one.out.find("# fit") == std::string::npos);
  CHECK(one.out.find("300,general,") != std::string::npos);
}
