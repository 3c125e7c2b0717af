// ncsg — matrix-symbol quantization and spectral diagnostics on T^n and SU(2).
//
// One JSON config fully determines a run; flags only select the command,
// config path, output path/format, and an optional NCSYM1 symbol override.
// Exit codes: 0 success, 2 verdict failure (gohberg floor violated,
// resolvent region not invertible), 1 error.

#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ncsg/config.hpp"
#include "ncsg/errors.hpp"
#include "ncsg/expr.hpp"
#include "ncsg/fourier.hpp"
#include "ncsg/group.hpp"
#include "ncsg/linalg.hpp"
#include "ncsg/report.hpp"
#include "ncsg/spectral.hpp"
#include "ncsg/symbol.hpp"

namespace {

using namespace ncsg;

struct CliOptions {
  std::string config_path;
  std::string out_path;      // overrides output.path
  std::string format;        // overrides output.format
  std::string symbol_path;   // overrides the config symbol with an NCSYM1 file
};

OrderedJson complex_json(const Complex& z) {
  return OrderedJson::array({z.real(), z.imag()});
}

OrderedJson matrix_json(const ComplexMatrix& m) {
  OrderedJson rows = OrderedJson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    OrderedJson row = OrderedJson::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

OrderedJson envelope(const char* command, const RunConfig& cfg) {
  OrderedJson env;
  env["command"] = command;
  env["group"] = cfg.group.name();
  env["lambda"] = cfg.lambda;
  return env;
}

Symbol make_symbol(const Space& s, const RunConfig& cfg, const CliOptions& opts) {
  if (!opts.symbol_path.empty()) return load_symbol(opts.symbol_path, s);
  if (!cfg.symbol)
    throw ConfigError("this command requires a symbol", "/symbol");
  return build_symbol(*cfg.symbol, s, cfg.lambda);
}

ScalarField make_field(const Space& s, const RunConfig& cfg) {
  if (!cfg.field) throw ConfigError("this command requires a field", "/field");
  const ExprAst ast = parse_expr(cfg.field->expr, ExprContext::for_group(s.group(), false));
  return sample(
      s, [&ast](const GroupPoint& x) { return Complex(eval_expr(ast, {&x, nullptr}), 0.0); },
      cfg.field->band);
}

/// Config labels → dual indices with strictly increasing weights.
/// Empty config: the irreps nearest Λ/8, Λ/4, Λ/2.
std::vector<std::size_t> resolve_sequence(const Space& s, const RunConfig& cfg) {
  std::vector<std::size_t> out;
  if (cfg.analysis.xi_sequence.empty()) {
    for (const double target : {cfg.lambda / 8.0, cfg.lambda / 4.0, cfg.lambda / 2.0}) {
      std::size_t best = 0;
      double dist = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < s.dual().size(); ++a) {
        const double d = std::abs(s.dual()[a].weight - target);
        if (d < dist) {
          dist = d;
          best = a;
        }
      }
      out.push_back(best);
    }
  } else {
    for (std::size_t i = 0; i < cfg.analysis.xi_sequence.size(); ++i) {
      const int label = cfg.analysis.xi_sequence[i];
      Irrep want;
      if (s.group().kind == GroupKind::torus) {
        std::vector<int> k(static_cast<std::size_t>(s.group().torus_dim), 0);
        k[0] = label;
        want = torus_irrep(k);
      } else {
        if (label < 0)
          throw ConfigError("two_ell must be nonnegative",
                            "/analysis/xi_sequence/" + std::to_string(i));
        want = su2_irrep(label);
      }
      bool found = false;
      for (std::size_t a = 0; a < s.dual().size(); ++a) {
        if (same_label(s.dual()[a], want)) {
          out.push_back(a);
          found = true;
          break;
        }
      }
      if (!found)
        throw ConfigError("label not in the dual at this lambda",
                          "/analysis/xi_sequence/" + std::to_string(i));
    }
  }
  // strictly increasing weights; drop duplicates (e.g. ±k on the torus)
  std::vector<std::size_t> seq;
  for (const std::size_t a : out) {
    if (!seq.empty() && s.dual()[a].weight <= s.dual()[seq.back()].weight + 1e-12) continue;
    seq.push_back(a);
  }
  if (seq.empty()) throw ConfigError("empty irrep sequence", "/analysis/xi_sequence");
  return seq;
}

/// Section truncations: the configured list, or a geometric ladder capped
/// by the assembly margin exactness − x_band (and by σ's own Λ).
std::vector<double> section_list(const Space& s, const Symbol& sigma,
                                 const RunConfig& cfg) {
  if (!cfg.analysis.lambda_list.empty()) return cfg.analysis.lambda_list;
  const double margin =
      s.grid().exactness_degree - std::max(0, sigma.x_band);
  const double cap = std::min(sigma.lambda, margin);
  if (cap < 1.0)
    throw ConfigError("no section fits the assembly margin", "/analysis/lambda_list");
  std::vector<double> out;
  for (const double v : {cap / 8.0, cap / 4.0, cap / 2.0, cap}) {
    if (v >= 1.0 && (out.empty() || v > out.back() + 1e-12)) out.push_back(v);
  }
  return out;
}

WitnessProfile witness_profile(const RunConfig& cfg) {
  WitnessProfile p;
  p.band = cfg.analysis.witness.band;
  p.radius = cfg.analysis.witness.radius;
  p.expr = cfg.analysis.witness.expr;
  return p;
}

void emit(const RunConfig& cfg, const CliOptions& opts, const OrderedJson& report,
          const std::vector<SpectralCsvRow>* table) {
  std::string format = opts.format.empty() ? cfg.output.format : opts.format;
  if (format != "json" && format != "csv")
    throw ConfigError("format must be \"json\" or \"csv\"", "/output/format");
  const std::string path = opts.out_path.empty() ? cfg.output.path : opts.out_path;
  if (path.empty()) return;
  if (format == "json") {
    write_text_file(path, dump_stable(report));
    return;
  }
  if (!table)
    throw ConfigError("csv output is defined only for dmin, gohberg, compactness",
                      "/output/format");
  write_text_file(path, csv_spectral_table(*table));
}

// ---------------------------------------------------------------- commands

int cmd_dual(const RunConfig& cfg, const CliOptions& opts) {
  Space s(cfg.group, cfg.lambda);
  OrderedJson env = envelope("dual", cfg);
  OrderedJson rows = OrderedJson::array();
  for (const Irrep& xi : s.dual()) {
    OrderedJson r;
    r["label"] = xi.label_string();
    r["dim"] = xi.dim;
    r["weight"] = xi.weight;
    r["lambda2"] = xi.casimir;
    rows.push_back(r);
  }
  env["size"] = s.dual().size();
  env["flat_dim"] = s.flat_dim();
  env["dual"] = rows;
  emit(cfg, opts, env, nullptr);
  std::printf("dual size=%zu flat_dim=%d max_weight=%.6f\n", s.dual().size(),
              s.flat_dim(), s.dual().empty() ? 0.0 : s.dual().back().weight);
  return 0;
}

int cmd_grid(const RunConfig& cfg, const CliOptions& opts) {
  Space s(cfg.group, cfg.lambda);
  const QuadratureGrid& g = s.grid();
  OrderedJson env = envelope("grid", cfg);
  env["points"] = g.points.size();
  env["exactness_degree"] = g.exactness_degree;
  env["single_degree_limit"] = g.single_degree_limit;
  double wsum = 0.0;
  for (const double w : g.weights) wsum += w;
  env["weight_sum"] = wsum;
  emit(cfg, opts, env, nullptr);
  std::printf("grid points=%zu exactness=%.6f single_degree=%d\n", g.points.size(),
              g.exactness_degree, g.single_degree_limit);
  return 0;
}

int cmd_analyze(const RunConfig& cfg, const CliOptions& opts) {
  Space s(cfg.group, cfg.lambda);
  const ScalarField f = make_field(s, cfg);
  const FourierCoefficients c = analyze(s, f);
  OrderedJson env = envelope("analyze", cfg);
  OrderedJson rows = OrderedJson::array();
  for (std::size_t a = 0; a < c.dual.size(); ++a) {
    OrderedJson r;
    r["label"] = c.dual[a].label_string();
    r["weight"] = c.dual[a].weight;
    r["coeff"] = matrix_json(c.coeff[a]);
    rows.push_back(r);
  }
  env["coefficients"] = rows;
  const double fl2 = field_l2(s, f);
  const double cl2 = coeff_l2(c);
  env["field_l2"] = fl2;
  env["coeff_l2"] = cl2;
  env["plancherel_gap"] = std::abs(fl2 - cl2);
  emit(cfg, opts, env, nullptr);
  std::printf("coeff_l2=%.6f plancherel_gap=%.3e\n", cl2, std::abs(fl2 - cl2));
  return 0;
}

int cmd_synthesize(const RunConfig& cfg, const CliOptions& opts) {
  Space s(cfg.group, cfg.lambda);
  const ScalarField f = make_field(s, cfg);
  const FourierCoefficients c = analyze(s, f);
  const ScalarField back = synthesize(s, c);
  ScalarField diff = back;
  for (std::size_t p = 0; p < diff.values.size(); ++p) diff.values[p] -= f.values[p];
  const double residual = field_l2(s, diff);
  OrderedJson env = envelope("synthesize", cfg);
  OrderedJson vals = OrderedJson::array();
  for (const Complex& v : back.values) vals.push_back(complex_json(v));
  env["values"] = vals;
  env["l2"] = field_l2(s, back);
  env["roundtrip_residual"] = residual;
  emit(cfg, opts, env, nullptr);
  std::printf("l2=%.6f roundtrip_residual=%.3e\n", field_l2(s, back), residual);
  return 0;
}

int cmd_quantize(const RunConfig& cfg, const CliOptions& opts) {
  Space s(cfg.group, cfg.lambda);
  const Symbol sigma = make_symbol(s, cfg, opts);
  const ScalarField f = make_field(s, cfg);
  const ScalarField out = quantize_apply(s, sigma, f);
  OrderedJson env = envelope("quantize", cfg);
  OrderedJson vals = OrderedJson::array();
  for (const Complex& v : out.values) vals.push_back(complex_json(v));
  env["values"] = vals;
  env["in_l2"] = field_l2(s, f);
  env["out_l2"] = field_l2(s, out);
  emit(cfg, opts, env, nullptr);
  std::printf("out_l2=%.6f\n", field_l2(s, out));
  return 0;
}

int cmd_extract(const RunConfig& cfg, const CliOptions& opts) {
  Space s(cfg.group, cfg.lambda);
  const Symbol sigma = make_symbol(s, cfg, opts);
  const Symbol ext = extract_symbol(
      s, sigma.lambda,
      [&s, &sigma](const ScalarField& f) { return quantize_apply(s, sigma, f); },
      sigma.x_band);
  double dev = 0.0;
  OrderedJson rows = OrderedJson::array();
  for (std::size_t a = 0; a < ext.dual.size(); ++a) {
    double da = 0.0;
    const std::size_t slots =
        (sigma.x_independent && ext.x_independent) ? 1 : s.n_points();
    for (std::size_t p = 0; p < slots; ++p) {
      const ComplexMatrix va = sigma.value(a, sigma.x_independent ? 0 : p);
      const ComplexMatrix vb = ext.value(a, ext.x_independent ? 0 : p);
      da = std::max(da, (va - vb).norm());
    }
    dev = std::max(dev, da);
    OrderedJson r;
    r["label"] = ext.dual[a].label_string();
    r["deviation"] = da;
    rows.push_back(r);
  }
  OrderedJson env = envelope("extract", cfg);
  env["x_independent"] = ext.x_independent;
  env["scalar"] = ext.scalar;
  env["x_band"] = ext.x_band;
  env["rows"] = rows;
  env["max_deviation"] = dev;
  if (!cfg.output.symbol_path.empty()) save_symbol(cfg.output.symbol_path, s, ext);
  emit(cfg, opts, env, nullptr);
  std::printf("max_deviation=%.3e\n", dev);
  return 0;
}

int cmd_diff(const RunConfig& cfg, const CliOptions& opts) {
  Space s(cfg.group, cfg.lambda);
  const Symbol sigma = make_symbol(s, cfg, opts);
  const AdmissibleFamily fam = admissible_family(cfg.group);
  OrderedJson env = envelope("diff", cfg);
  OrderedJson qs = OrderedJson::array();
  double max_norm = 0.0;
  for (const AdmissibleFunction& q : fam.functions) {
    const Symbol d = difference_op(s, sigma, q);
    OrderedJson rows = OrderedJson::array();
    for (std::size_t a = 0; a < d.dual.size(); ++a) {
      double sup = 0.0;
      for (std::size_t p = 0; p < d.grid_slots(); ++p) sup = std::max(sup, op_norm(d.value(a, p)));
      OrderedJson r;
      r["label"] = d.dual[a].label_string();
      r["weight"] = d.dual[a].weight;
      r["sup_norm"] = sup;
      rows.push_back(r);
      max_norm = std::max(max_norm, sup);
    }
    OrderedJson entry;
    entry["q"] = q.name;
    entry["vanishing_order"] = q.vanishing_order;
    entry["lambda_out"] = d.lambda;
    entry["rows"] = rows;
    qs.push_back(entry);
  }
  env["family_size"] = fam.functions.size();
  env["differences"] = qs;
  emit(cfg, opts, env, nullptr);
  std::printf("family_size=%zu max_first_difference=%.6e\n", fam.functions.size(),
              max_norm);
  return 0;
}

int cmd_seminorms(const RunConfig& cfg, const CliOptions& opts) {
  Space s(cfg.group, cfg.lambda);
  const Symbol sigma = make_symbol(s, cfg, opts);
  const SeminormReport rep =
      seminorm_report(s, sigma, cfg.analysis.seminorm_alpha, cfg.analysis.seminorm_beta,
                      cfg.analysis.seminorm_rho);
  OrderedJson env = envelope("seminorms", cfg);
  env["rho"] = rep.rho;
  OrderedJson table = OrderedJson::array();
  for (int a = 0; a <= rep.alpha_max; ++a) {
    OrderedJson row = OrderedJson::array();
    for (int b = 0; b <= rep.beta_max; ++b) row.push_back(rep.C(a, b));
    table.push_back(row);
  }
  env["C"] = table;
  env["sup_norm"] = rep.sup_norm;
  env["sup_dx"] = rep.sup_dx;
  env["sup_dq_rho"] = rep.sup_dq_rho;
  emit(cfg, opts, env, nullptr);
  std::printf("C00=%.6f sup_dx=%.6f sup_dq_rho=%.6f\n", rep.sup_norm, rep.sup_dx,
              rep.sup_dq_rho);
  return 0;
}

int cmd_elliptic(const RunConfig& cfg, const CliOptions& opts) {
  Space s(cfg.group, cfg.lambda);
  const Symbol sigma = make_symbol(s, cfg, opts);
  const EllipticityResult r = ellipticity_check(s, sigma, cfg.analysis.elliptic_threshold,
                                                cfg.analysis.elliptic_r_min);
  OrderedJson env = envelope("elliptic", cfg);
  env["elliptic"] = r.elliptic;
  env["singular"] = r.singular;
  env["bound"] = r.bound;
  env["c_threshold"] = r.c_threshold;
  env["r_min"] = r.r_min;
  if (r.witness_dual != static_cast<std::size_t>(-1)) {
    env["witness_label"] = s.dual()[r.witness_dual].label_string();
    env["witness_grid"] = r.witness_grid;
  }
  emit(cfg, opts, env, nullptr);
  std::printf("elliptic=%d singular=%d bound=%.6e\n", r.elliptic ? 1 : 0,
              r.singular ? 1 : 0, r.bound);
  return 0;
}

OrderedJson spectral_rows_json(const SpectralReport& rep) {
  OrderedJson rows = OrderedJson::array();
  for (const ShellRow& row : rep.rows) {
    OrderedJson r;
    r["shell_lo"] = row.lo;
    r["shell_hi"] = row.hi;
    r["d_min"] = row.d_min;
    r["d_max"] = row.d_max;
    r["count"] = row.count;
    r["empty"] = row.empty;
    rows.push_back(r);
  }
  return rows;
}

int cmd_dmin(const RunConfig& cfg, const CliOptions& opts) {
  Space s(cfg.group, cfg.lambda);
  const Symbol sigma = make_symbol(s, cfg, opts);
  const SpectralReport rep = dmin_dmax(s, sigma, cfg.analysis.shells);
  OrderedJson env = envelope("dmin", cfg);
  env["shells"] = spectral_rows_json(rep);
  env["d_min"] = rep.d_min_estimate;
  env["d_max"] = rep.d_max_estimate;
  env["ess_disc_radius"] = rep.ess_disc_radius;
  env["caveat"] = rep.caveat;
  std::vector<SpectralCsvRow> table;
  for (const ShellRow& row : rep.rows) {
    SpectralCsvRow r;
    r.shell_lo = row.lo;
    r.shell_hi = row.hi;
    if (!row.empty) {
      r.d_min = row.d_min;
      r.d_max = row.d_max;
    }
    table.push_back(r);
  }
  emit(cfg, opts, env, &table);
  std::printf("d_min=%.6f d_max=%.6f\n", rep.d_min_estimate, rep.d_max_estimate);
  return 0;
}

int cmd_gohberg(const RunConfig& cfg, const CliOptions& opts) {
  Space s(cfg.group, cfg.lambda);
  const Symbol sigma = make_symbol(s, cfg, opts);
  const std::vector<std::size_t> seq = resolve_sequence(s, cfg);
  const GohbergReport rep =
      gohberg_check(s, sigma, section_list(s, sigma, cfg), cfg.analysis.k_fixed,
                    cfg.analysis.shells, witness_profile(cfg), seq);
  OrderedJson env = envelope("gohberg", cfg);
  env["k_fixed"] = rep.k_fixed;
  env["d_min"] = rep.d_min_estimate;
  env["floor_tol"] = rep.floor_tol;
  OrderedJson sections = OrderedJson::array();
  for (std::size_t i = 0; i < rep.lambdas.size(); ++i) {
    OrderedJson r;
    r["lambda"] = rep.lambdas[i];
    r["s_k1"] = rep.s_k1[i];
    sections.push_back(r);
  }
  env["sections"] = sections;
  env["floor_ok"] = rep.floor_ok;
  env["vacuous"] = rep.vacuous;
  OrderedJson wrows = OrderedJson::array();
  for (const auto& row : rep.witness_rows) {
    OrderedJson r;
    r["label"] = row.xi.label_string();
    r["weight"] = row.xi.weight;
    r["lower_bound"] = row.difference_l2;
    wrows.push_back(r);
  }
  env["witness_rows"] = wrows;
  env["witness_best"] = rep.witness_best;
  env["upper_norm"] = rep.upper_norm;
  env["caveat"] = rep.caveat;
  std::vector<SpectralCsvRow> table;
  for (std::size_t i = 0; i < rep.lambdas.size(); ++i) {
    SpectralCsvRow r;
    r.shell_lo = rep.lambdas[i];
    r.d_min = rep.d_min_estimate;
    r.s_k1 = rep.s_k1[i];
    table.push_back(r);
  }
  emit(cfg, opts, env, &table);
  const double floor = rep.d_min_estimate * (1.0 - rep.floor_tol);
  std::printf("floor_ok=%d vacuous=%d d_min=%.6f floor=%.6f s_k1_last=%.6f "
              "witness_best=%.6f\n",
              rep.floor_ok ? 1 : 0, rep.vacuous ? 1 : 0, rep.d_min_estimate, floor,
              rep.s_k1.empty() ? 0.0 : rep.s_k1.back(), rep.witness_best);
  return rep.floor_ok ? 0 : 2;
}

int cmd_compactness(const RunConfig& cfg, const CliOptions& opts) {
  Space s(cfg.group, cfg.lambda);
  const Symbol sigma = make_symbol(s, cfg, opts);
  const double section = section_list(s, sigma, cfg).back();
  const CompactnessReport rep =
      compactness_diagnostic(s, sigma, section, cfg.analysis.r_list, cfg.analysis.shells,
                             cfg.analysis.compact_tol);
  OrderedJson env = envelope("compactness", cfg);
  env["section_lambda"] = section;
  env["d_max"] = rep.d_max_estimate;
  env["tol"] = rep.tol;
  OrderedJson rows = OrderedJson::array();
  for (std::size_t i = 0; i < rep.r_list.size(); ++i) {
    OrderedJson r;
    r["r"] = rep.r_list[i];
    r["tail_norm"] = rep.tail_norms[i];
    rows.push_back(r);
  }
  env["tails"] = rows;
  env["verdict"] = rep.verdict;
  env["compact_consistent"] = rep.compact_consistent;
  env["caveat"] = rep.caveat;
  std::vector<SpectralCsvRow> table;
  for (std::size_t i = 0; i < rep.r_list.size(); ++i) {
    SpectralCsvRow r;
    r.shell_lo = rep.r_list[i];
    r.d_max = rep.d_max_estimate;
    r.tail_norm = rep.tail_norms[i];
    table.push_back(r);
  }
  emit(cfg, opts, env, &table);
  std::printf("verdict=%s d_max=%.6f tail_last=%.6e\n", rep.verdict.c_str(),
              rep.d_max_estimate,
              rep.tail_norms.empty() ? 0.0 : rep.tail_norms.back());
  return 0;  // diagnostic either way
}

int cmd_witness(const RunConfig& cfg, const CliOptions& opts) {
  Space s(cfg.group, cfg.lambda);
  const Symbol sigma = make_symbol(s, cfg, opts);
  const std::vector<std::size_t> seq = resolve_sequence(s, cfg);
  const ShellProfile prof = shell_profile(s, sigma);
  const WitnessProfile wp = witness_profile(cfg);
  OrderedJson env = envelope("witness", cfg);
  OrderedJson rows = OrderedJson::array();
  double max_err = 0.0;
  for (const std::size_t a : seq) {
    const WitnessField w =
        witness(s, wp, s.dual()[a], s.grid().points[prof.entries[a].x_argmax]);
    OrderedJson r;
    r["label"] = s.dual()[a].label_string();
    r["weight"] = s.dual()[a].weight;
    r["band"] = w.field.band_degree;
    r["norm_u"] = w.norm_u;
    r["norm_field"] = w.norm_field;
    r["norm_error"] = w.norm_error;
    rows.push_back(r);
    max_err = std::max(max_err, w.norm_error);
  }
  env["rows"] = rows;
  env["max_norm_error"] = max_err;
  emit(cfg, opts, env, nullptr);
  std::printf("witnesses=%zu max_norm_error=%.3e\n", seq.size(), max_err);
  return 0;
}

int cmd_lemma_decay(const RunConfig& cfg, const CliOptions& opts) {
  Space s(cfg.group, cfg.lambda);
  const Symbol sigma = make_symbol(s, cfg, opts);
  const std::vector<std::size_t> seq = resolve_sequence(s, cfg);
  const LemmaDecayReport rep = lemma_decay_check(s, sigma, witness_profile(cfg), seq);
  OrderedJson env = envelope("lemma-decay", cfg);
  OrderedJson rows = OrderedJson::array();
  for (const LemmaDecayRow& row : rep.rows) {
    OrderedJson r;
    r["label"] = row.xi.label_string();
    r["weight"] = row.xi.weight;
    r["difference_l2"] = row.difference_l2;
    r["product_l2"] = row.product_l2;
    rows.push_back(r);
  }
  env["rows"] = rows;
  env["slope"] = rep.slope;
  env["negligible"] = rep.negligible;
  env["caveat"] = rep.caveat;
  emit(cfg, opts, env, nullptr);
  std::printf("slope=%.4f negligible=%d\n", rep.slope, rep.negligible ? 1 : 0);
  return 0;
}

int cmd_normality(const RunConfig& cfg, const CliOptions& opts) {
  Space s(cfg.group, cfg.lambda);
  const Symbol sigma = make_symbol(s, cfg, opts);
  const double section = section_list(s, sigma, cfg).back();
  const NormalityReport rep = essential_normality_check(
      s, sigma, section, cfg.analysis.r_list, cfg.analysis.interior_cap);
  OrderedJson env = envelope("normality", cfg);
  env["section_lambda"] = section;
  env["commutator_norm"] = rep.commutator_norm;
  env["operator_norm"] = rep.operator_norm;
  OrderedJson rows = OrderedJson::array();
  for (std::size_t i = 0; i < rep.r_list.size(); ++i) {
    OrderedJson r;
    r["r"] = rep.r_list[i];
    r["tail_norm"] = rep.tail_norms[i];
    rows.push_back(r);
  }
  env["tails"] = rows;
  env["slope"] = rep.slope;
  env["negligible"] = rep.negligible;
  env["caveat"] = rep.caveat;
  emit(cfg, opts, env, nullptr);
  std::printf("commutator_norm=%.6e negligible=%d slope=%.4f\n", rep.commutator_norm,
              rep.negligible ? 1 : 0, rep.slope);
  return 0;
}

int cmd_resolvent(const RunConfig& cfg, const CliOptions& opts) {
  Space s(cfg.group, cfg.lambda);
  const Symbol sigma = make_symbol(s, cfg, opts);
  const Complex shift(cfg.analysis.resolvent.re, cfg.analysis.resolvent.im);
  const ResolventReport rep = resolvent_bound(s, sigma, shift, cfg.analysis.resolvent.r_min);
  OrderedJson env = envelope("resolvent", cfg);
  env["lambda_shift"] = complex_json(rep.lambda_shift);
  env["r_min"] = rep.r_min;
  env["ok"] = rep.ok;
  env["min_singular"] = rep.min_singular;
  env["sup_inverse_norm"] = rep.sup_inverse_norm;
  emit(cfg, opts, env, nullptr);
  std::printf("ok=%d min_singular=%.6e sup_inverse_norm=%.6e\n", rep.ok ? 1 : 0,
              rep.min_singular, rep.sup_inverse_norm);
  return rep.ok ? 0 : 2;
}

struct CommandEntry {
  const char* name;
  const char* help;
  int (*fn)(const RunConfig&, const CliOptions&);
};

constexpr CommandEntry kCommands[] = {
    {"dual", "enumerate the truncated unitary dual", cmd_dual},
    {"grid", "quadrature grid summary", cmd_grid},
    {"analyze", "forward Fourier transform of a field", cmd_analyze},
    {"synthesize", "inverse transform round trip of a field", cmd_synthesize},
    {"quantize", "apply T_sigma to a field", cmd_quantize},
    {"extract", "recover the symbol of T_sigma and compare", cmd_extract},
    {"diff", "difference operators over the admissible family", cmd_diff},
    {"seminorms", "symbol-class seminorm table C_ab", cmd_seminorms},
    {"elliptic", "ellipticity / singularity check", cmd_elliptic},
    {"dmin", "d_min / d_max shell table", cmd_dmin},
    {"gohberg", "lower-bound certificates for ||T - K||", cmd_gohberg},
    {"compactness", "tail-norm compactness diagnostic", cmd_compactness},
    {"witness", "modulated-translated witness fields", cmd_witness},
    {"lemma-decay", "witness difference decay check", cmd_lemma_decay},
    {"normality", "essential-normality commutator tails", cmd_normality},
    {"resolvent", "symbol invertibility outside the disc", cmd_resolvent},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matrix-symbol quantization and spectral bounds on T^n and SU(2)"};
  app.require_subcommand(1);

  CliOptions opts;
  for (const CommandEntry& entry : kCommands) {
    CLI::App* sub = app.add_subcommand(entry.name, entry.help);
    sub->add_option("--config", opts.config_path, "JSON run configuration")
        ->required();
    sub->add_option("--out", opts.out_path, "report destination (overrides config)");
    sub->add_option("--format", opts.format, "json|csv (overrides config)");
    sub->add_option("--symbol", opts.symbol_path, "NCSYM1 symbol file override");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (const CommandEntry& entry : kCommands) {
      if (app.got_subcommand(entry.name)) {
        const RunConfig cfg = load_config(opts.config_path);
        return entry.fn(cfg, opts);
      }
    }
    std::fprintf(stderr, "error: no command selected\n");
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
