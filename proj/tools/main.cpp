#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "orthorange/config.hpp"

namespace {

using orthorange::Config;
using namespace orthorange::cli;

// Flags shared by the building subcommands; --seed lands in cfg.seed and is
// synced into the command options after parsing.
void add_config_flags(CLI::App* cmd, Config& cfg, std::string& ctor) {
  cmd->add_option("--c1", cfg.c1, "coverage constant of the cutting properties");
  cmd->add_option("--c2", cfg.c2, "conflict-list constant");
  cmd->add_option("--beta", cfg.beta, "tree-family branching parameter");
  cmd->add_option("--nested-c", cfg.nested_c,
                  "divisor of the nested cutting level");
  cmd->add_option("--cutoff-n0", cfg.cutoff_n0,
                  "recursion cutoff of the 5-sided structure");
  cmd->add_option("--constructor", ctor, "cutting constructor")
      ->check(CLI::IsMember({"sweep", "naive"}));
  cmd->add_option("--seed", cfg.seed, "random seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orthogonal range reporting in four and more dimensions"};
  app.require_subcommand(1);

  Config base;
  const std::string env_log = orthorange::apply_env_overrides(base);
  if (!env_log.empty())
    std::cerr << "orthorange: environment overrides: " << env_log << "\n";

  GenOptions gen;
  gen.seed = base.seed;
  BuildOptions build;
  build.cfg = base;
  QueryOptions query;
  VerifyOptions verify;
  verify.cfg = base;
  BenchOptions bench;
  bench.cfg = base;
  std::string build_ctor = to_string(base.constructor);
  std::string verify_ctor = build_ctor;
  std::string bench_ctor = build_ctor;

  CLI::App* g = app.add_subcommand("gen", "generate a points file");
  g->add_option("--n", gen.n, "point count")->required();
  g->add_option("--dim", gen.dim, "dimensions (1..8)");
  g->add_option("--dist", gen.dist, "distribution")
      ->check(CLI::IsMember({"uniform", "clustered", "diagonal"}));
  g->add_option("--seed", gen.seed, "random seed");
  g->add_option("--out", gen.out, "output file (default stdout)");

  CLI::App* b = app.add_subcommand("build", "build an index from a points file");
  b->add_option("--points", build.points, "points file")->required();
  b->add_option("--structure", build.structure, "structure kind")
      ->required()
      ->check(CLI::IsMember({"5sided", "dominance4", "general"}));
  b->add_option("--dim", build.dim, "expected dimension, checked against the file");
  b->add_option("--out", build.out, "index file")->required();
  b->add_option("--stats-out", build.stats_out, "copy of the stats JSON");
  add_config_flags(b, build.cfg, build_ctor);

  CLI::App* q = app.add_subcommand("query", "run a query batch against an index");
  q->add_option("--index", query.index, "index file")->required();
  q->add_option("--queries", query.queries, "queries file")->required();
  q->add_option("--out", query.out, "results JSONL (default stdout)");

  CLI::App* v = app.add_subcommand(
      "verify", "build every structure and check it against the oracle");
  v->add_option("--points", verify.points, "points file")->required();
  v->add_option("--queries", verify.queries, "random queries per type");
  v->add_option("--repro-out", verify.repro_out, "repro file on failure");
  v->add_flag("--fault-inject", verify.fault_inject,
              "corrupt one stored cutting, for testing the failure path");
  add_config_flags(v, verify.cfg, verify_ctor);

  CLI::App* bn = app.add_subcommand("bench", "benchmark a size ladder to CSV");
  bn->add_option("--sizes", bench.sizes, "n ladder")->delimiter(',');
  bn->add_option("--reps", bench.reps, "repetitions per size");
  bn->add_option("--structures", bench.structures, "structures to measure")
      ->delimiter(',');
  bn->add_option("--queries", bench.queries, "queries per build");
  bn->add_option("--dist", bench.dist, "distribution")
      ->check(CLI::IsMember({"uniform", "clustered", "diagonal"}));
  bn->add_option("--out", bench.out, "CSV file (default stdout)");
  add_config_flags(bn, bench.cfg, bench_ctor);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // help and friends
    app.exit(e);
    return kExitUsage;
  }

  orthorange::parse_constructor(build_ctor, build.cfg.constructor);
  orthorange::parse_constructor(verify_ctor, verify.cfg.constructor);
  orthorange::parse_constructor(bench_ctor, bench.cfg.constructor);
  verify.seed = verify.cfg.seed;
  bench.seed = bench.cfg.seed;

  if (g->parsed()) return cmd_gen(gen);
  if (b->parsed()) return cmd_build(build);
  if (q->parsed()) return cmd_query(query);
  if (v->parsed()) return cmd_verify(verify);
  if (bn->parsed()) return cmd_bench(bench);
  return kExitUsage;
}
