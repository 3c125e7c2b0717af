#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ncsg/group.hpp"
#include "ncsg/symbol.hpp"

namespace ncsg {

// Run configuration: one JSON file fully determines a run. Parsing is
// strict — unknown keys are rejected with their JSON-pointer path — and
// grid-capability checks happen at load time, not mid-pipeline.

struct WitnessConfig {
  double band = 0.0;    // 0 → Λ/8
  double radius = 0.0;  // 0 → group default
  std::string expr;
};

struct ResolventConfig {
  double re = 0.0, im = 0.0;
  double r_min = 0.0;
};

struct AnalysisConfig {
  std::vector<double> shells;       // default: geometric, ratio 2, Λ/8 … Λ
  int k_fixed = 5;
  /// Section truncations for gohberg/compactness/normality. Empty → the
  /// same geometric ladder capped by the symbol's assembly margin.
  std::vector<double> lambda_list;
  std::vector<double> r_list;       // default: Λ/16, Λ/8, Λ/4
  /// Torus: k·e₁ labels; su2: two_ell labels. Empty → weights nearest
  /// Λ/8, Λ/4, Λ/2.
  std::vector<int> xi_sequence;
  WitnessConfig witness;
  double floor_tol = 0.05;
  double compact_tol = 1e-3;
  double interior_cap = 0.0;  // 0 → Λ/2
  ResolventConfig resolvent;
  int seminorm_alpha = 1, seminorm_beta = 1;
  double seminorm_rho = 1.0;
  double elliptic_threshold = 1e6;
  double elliptic_r_min = 0.0;
};

struct FieldConfig {
  std::string expr;
  int band = -1;
};

struct OutputConfig {
  std::string path;            // empty → no report file
  std::string format = "json";
  std::string symbol_path;     // extract: NCSYM1 destination
};

struct RunConfig {
  GroupDescriptor group;
  double lambda = 0.0;  // 0 → exactness/2
  std::optional<SymbolSpec> symbol;
  std::optional<FieldConfig> field;
  AnalysisConfig analysis;
  OutputConfig output;
  double grid_exactness = 0.0;  // filled at load
};

/// Strict parse + defaults. Throws ConfigError naming the offending key
/// ("/foo", "/analysis/bar") on schema violations, including Λ above the
/// grid's exactness degree.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace ncsg
