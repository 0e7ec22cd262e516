#include "orthorange/config.hpp"

#include <cstdlib>
#include <sstream>

namespace orthorange {

std::string to_string(ConstructorKind kind) {
  return kind == ConstructorKind::sweep ? "sweep" : "naive";
}

bool parse_constructor(const std::string& text, ConstructorKind& out) {
  if (text == "sweep") {
    out = ConstructorKind::sweep;
    return true;
  }
  if (text == "naive") {
    out = ConstructorKind::naive;
    return true;
  }
  return false;
}

std::string apply_env_overrides(Config& cfg) {
  std::ostringstream log;
  auto get = [](const char* name) -> const char* { return std::getenv(name); };
  if (const char* v = get("ORTHORANGE_C1")) {
    cfg.c1 = std::atof(v);
    log << "c1=" << cfg.c1 << " ";
  }
  if (const char* v = get("ORTHORANGE_C2")) {
    cfg.c2 = std::atof(v);
    log << "c2=" << cfg.c2 << " ";
  }
  if (const char* v = get("ORTHORANGE_BETA")) {
    cfg.beta = std::atoi(v);
    log << "beta=" << cfg.beta << " ";
  }
  if (const char* v = get("ORTHORANGE_NESTED_C")) {
    cfg.nested_c = std::atoi(v);
    log << "nested_c=" << cfg.nested_c << " ";
  }
  if (const char* v = get("ORTHORANGE_CUTOFF_N0")) {
    cfg.cutoff_n0 = std::atoi(v);
    log << "cutoff_n0=" << cfg.cutoff_n0 << " ";
  }
  if (const char* v = get("ORTHORANGE_CONSTRUCTOR")) {
    ConstructorKind kind;
    if (parse_constructor(v, kind)) {
      cfg.constructor = kind;
      log << "constructor=" << to_string(kind) << " ";
    }
  }
  if (const char* v = get("ORTHORANGE_SEED")) {
    cfg.seed = std::strtoull(v, nullptr, 10);
    log << "seed=" << cfg.seed << " ";
  }
  return log.str();
}

}  // namespace orthorange
