#pragma once

#include <cstdint>
#include <string>

namespace orthorange {

enum class ConstructorKind { sweep, naive };

// Tunable constants shared by the constructors and the hierarchy.
struct Config {
  double c1 = 0.5;          // coverage constant of the cutting properties
  double c2 = 10.0;         // conflict-list constant
  int beta = 3;             // tree-family branching parameter
  int nested_c = 20;        // divisor in nested level u_i = f_i^2 / nested_c
  int cutoff_n0 = 64;       // recursion cutoff for the 5-sided structure
  int log6_c = 1;           // multiplier for the (c * log^6 n)-level layer
  int lambda_c = 2;         // bound constant for |Lambda(C)|
  ConstructorKind constructor = ConstructorKind::sweep;
  std::uint64_t seed = 1;
};

// Applies ORTHORANGE_* environment overrides (same names as the CLI flags,
// uppercased). Returns a description of what was overridden, for logging.
std::string apply_env_overrides(Config& cfg);

std::string to_string(ConstructorKind kind);
bool parse_constructor(const std::string& text, ConstructorKind& out);

}  // namespace orthorange
