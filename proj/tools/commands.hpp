#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orthorange/config.hpp"

namespace orthorange::cli {

// Exit codes shared by every subcommand: 0 pass, 1 data or verification
// failure, 2 usage (usage errors are raised by the flag parser in main).
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

struct GenOptions {
  std::size_t n = 0;
  int dim = 4;
  std::string dist = "uniform";
  std::uint64_t seed = 1;
  std::string out;  // empty = stdout
};
int cmd_gen(const GenOptions& opt);

struct BuildOptions {
  std::string points;
  std::string structure;
  int dim = 0;  // 0 = take the file header's dimension
  std::string out;
  std::string stats_out;  // optional copy of the stats JSON
  Config cfg;
};
int cmd_build(const BuildOptions& opt);

struct QueryOptions {
  std::string index;
  std::string queries;
  std::string out;  // empty = stdout
};
int cmd_query(const QueryOptions& opt);

struct VerifyOptions {
  std::string points;
  std::size_t queries = 1000;
  std::uint64_t seed = 1;
  std::string repro_out = "orthorange_repro.tsv";
  bool fault_inject = false;
  Config cfg;
};
int cmd_verify(const VerifyOptions& opt);

struct BenchOptions {
  std::vector<std::size_t> sizes = {512, 1024, 2048, 4096};
  int reps = 3;
  std::vector<std::string> structures = {"5sided", "general"};
  std::size_t queries = 200;
  std::string dist = "uniform";
  std::uint64_t seed = 1;
  std::string out;  // empty = stdout
  Config cfg;
};
int cmd_bench(const BenchOptions& opt);

}  // namespace orthorange::cli
