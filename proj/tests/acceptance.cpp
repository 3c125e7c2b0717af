// Acceptance suite: ten end-to-end criteria, one pass/fail line each.
// Usage: acceptance [N] — run criterion N (1..10) or all. Exit 0 iff every
// criterion that ran passed. Tolerances are pinned next to each check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "ncsg/errors.hpp"
#include "ncsg/fourier.hpp"
#include "ncsg/group.hpp"
#include "ncsg/linalg.hpp"
#include "ncsg/spectral.hpp"
#include "ncsg/symbol.hpp"

using namespace ncsg;

namespace {

// ------------------------------------------------------------------ helpers

std::string g_detail;

void notef(const char* fmt, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), fmt, a, b);
  g_detail = buf;
}

FourierCoefficients random_coefficients(const Space& s, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FourierCoefficients c;
  c.dual = s.dual();
  c.lambda = s.lambda();
  for (const Irrep& xi : c.dual) {
    ComplexMatrix m(xi.dim, xi.dim);
    for (int i = 0; i < xi.dim; ++i)
      for (int j = 0; j < xi.dim; ++j) m(i, j) = Complex(u(rng), u(rng));
    c.coeff.push_back(m);
  }
  return c;
}

double lls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::size_t index_of_k(const Space& s, int k) {
  for (std::size_t a = 0; a < s.dual().size(); ++a)
    if (s.dual()[a].k == std::vector<int>{k}) return a;
  throw NumericError("k not in dual");
}

std::size_t index_of_two_ell(const Space& s, int two_ell) {
  for (std::size_t a = 0; a < s.dual().size(); ++a)
    if (s.dual()[a].two_ell == two_ell) return a;
  throw NumericError("two_ell not in dual");
}

SymbolSpec spec_of(SymbolSpec::Family f, double power = 0.0, const std::string& e = "",
                   const std::string& path = "") {
  SymbolSpec sp;
  sp.family = f;
  sp.power = power;
  sp.expr = e;
  sp.path = path;
  return sp;
}

std::filesystem::path scratch_dir() {
  static const std::filesystem::path dir = [] {
    auto p = std::filesystem::temp_directory_path() /
             ("ncsg_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(p);
    return p;
  }();
  return dir;
}

double max_symbol_deviation(const Space& s, const Symbol& a, const Symbol& b) {
  double dev = 0.0;
  const std::size_t n = std::min(a.dual.size(), b.dual.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < s.n_points(); ++p) {
      const ComplexMatrix va = a.value(i, a.x_independent ? 0 : p);
      const ComplexMatrix vb = b.value(i, b.x_independent ? 0 : p);
      dev = std::max(dev, (va - vb).cwiseAbs().maxCoeff());
    }
  }
  return dev;
}

// --------------------------------------------------------------- criterion 1

bool plancherel_identity() {
  constexpr double kTol = 1e-9;
  constexpr int kFields = 100;

  Space torus(GroupDescriptor::torus(1, 256), 32.0);
  Space su2(GroupDescriptor::su2(24, 24, 24), 4.8);
  if (su2.dual().back().two_ell != 8) {
    notef("su2 dual tops out at two_ell=%g",
          static_cast<double>(su2.dual().back().two_ell));
    return false;
  }

  for (const Space* s : {&torus, &su2}) {
    std::mt19937 rng(s->group().kind == GroupKind::torus ? 11u : 13u);
    for (int t = 0; t < kFields; ++t) {
      const FourierCoefficients c = random_coefficients(*s, rng);
      const ScalarField f = synthesize(*s, c);
      const double fl2 = field_l2(*s, f);
      const double cl2 = coeff_l2(c);
      const double gap = std::abs(fl2 - cl2) / cl2;
      if (gap > kTol) {
        notef("relative gap %.3e > 1e-9", gap);
        return false;
      }
    }
  }
  return true;
}

// --------------------------------------------------------------- criterion 2

bool quantize_extract_round_trip() {
  constexpr double kTolIndependent = 1e-9;
  constexpr double kTolDependent = 1e-7;

  Space torus(GroupDescriptor::torus(1, 64), 16.0);
  Space su2(GroupDescriptor::su2(16, 16, 16), std::sqrt(13.0));  // two_ell ≤ 6

  const std::string torus_file = (scratch_dir() / "c2_torus.ncsym").string();
  const std::string su2_file = (scratch_dir() / "c2_su2.ncsym").string();
  save_symbol(torus_file, torus,
              build_symbol(spec_of(SymbolSpec::Family::multiplication, 0, "2+cos(x1)"),
                           torus, torus.lambda()));
  save_symbol(su2_file, su2,
              build_symbol(spec_of(SymbolSpec::Family::corner_projection), su2,
                           su2.lambda()));

  const auto run = [&](const Space& s, const std::vector<SymbolSpec>& specs) {
    for (const SymbolSpec& sp : specs) {
      const Symbol sigma = build_symbol(sp, s, s.lambda());
      const Symbol ext = extract_symbol(
          s, sigma.lambda,
          [&s, &sigma](const ScalarField& f) { return quantize_apply(s, sigma, f); },
          sigma.x_band);
      const double dev = max_symbol_deviation(s, sigma, ext);
      const double tol = sigma.x_independent ? kTolIndependent : kTolDependent;
      if (dev > tol) {
        notef("family deviation %.3e > %.1e", dev, tol);
        return false;
      }
    }
    return true;
  };

  const bool torus_ok = run(
      torus, {spec_of(SymbolSpec::Family::multiplier_power, -1.0),
              spec_of(SymbolSpec::Family::multiplication, 0, "2+cos(x1)"),
              spec_of(SymbolSpec::Family::product, -2.0, "1+0.5*sin(x1)"),
              spec_of(SymbolSpec::Family::corner_projection),
              spec_of(SymbolSpec::Family::laplacian_resolvent),
              spec_of(SymbolSpec::Family::scalar_expr, 0, "(2+cos(x1))*k1/xi_weight"),
              spec_of(SymbolSpec::Family::file, 0, "", torus_file)});
  if (!torus_ok) return false;
  return run(su2, {spec_of(SymbolSpec::Family::multiplier_power, -1.0),
                   spec_of(SymbolSpec::Family::multiplication, 0, "re_a"),
                   spec_of(SymbolSpec::Family::product, -1.0, "2+re_a"),
                   spec_of(SymbolSpec::Family::corner_projection),
                   spec_of(SymbolSpec::Family::laplacian_resolvent),
                   spec_of(SymbolSpec::Family::scalar_expr, 0, "re_a/xi_weight"),
                   spec_of(SymbolSpec::Family::file, 0, "", su2_file)});
}

// --------------------------------------------------------------- criterion 3

bool laplacian_symbol() {
  constexpr double kTolExtract = 1e-8;
  constexpr double kTolCasimir = 1e-3;  // relative

  Space torus(GroupDescriptor::torus(1, 32), 6.0);
  Space su2(GroupDescriptor::su2(24, 24, 24), 6.0);

  for (const Space* s : {&torus, &su2}) {
    const Symbol lap =
        build_symbol(spec_of(SymbolSpec::Family::scalar_expr, 0, "0-xi_lambda2"), *s,
                     s->lambda());
    const Symbol ext = extract_symbol(
        *s, lap.lambda,
        [s, &lap](const ScalarField& f) { return quantize_apply(*s, lap, f); },
        0);
    for (std::size_t a = 0; a < ext.dual.size(); ++a) {
      const ComplexMatrix want =
          -ext.dual[a].casimir * ComplexMatrix::Identity(ext.dual[a].dim, ext.dual[a].dim);
      const double dev = (ext.value(a, 0) - want).cwiseAbs().maxCoeff();
      if (dev > kTolExtract) {
        notef("extracted Laplacian deviates by %.3e", dev);
        return false;
      }
    }
    // Casimir second difference along the label ladder: 2 on T^1 (λ²=k²),
    // 1/2 on SU(2) (λ²=t(t+2)/4); read it off the extracted diagonal.
    const auto lambda2_of = [&](int label) {
      const std::size_t a = s->group().kind == GroupKind::torus
                                ? index_of_k(*s, label)
                                : index_of_two_ell(*s, label);
      return -ext.value(a, 0)(0, 0).real();
    };
    const double expect = s->group().kind == GroupKind::torus ? 2.0 : 0.5;
    for (int label = 1; label <= 3; ++label) {
      const double fd =
          lambda2_of(label + 1) - 2.0 * lambda2_of(label) + lambda2_of(label - 1);
      if (std::abs(fd - expect) / expect > kTolCasimir) {
        notef("Casimir second difference %.6f (expected %.1f)", fd, expect);
        return false;
      }
    }
  }
  return true;
}

// --------------------------------------------------------------- criterion 4

bool torus_scalar_dmin_equals_dmax() {
  constexpr double kTol = 1e-12;

  Space s(GroupDescriptor::torus(1, 32), 16.0);
  const std::vector<double> shells{2.0, 4.0, 8.0, 16.0};
  const std::vector<std::string> exprs{
      "(2+cos(x1))/xi_weight",
      "sin(x1)*k1/xi_weight",
      "1/(1+xi_lambda2)",
      "(2+sin(x1))*exp(0-xi_lambda2/512)",
      "cos(2*x1)+3",
      "k1/(1+xi_weight)",
      "(1+0.5*cos(x1))*(1+xi_lambda2)^(0-0.5)",
      "abs(sin(x1))+1",
      "sqrt(1+xi_lambda2)/(2+xi_lambda2)",
      "(3+cos(3*x1))*k1*k1/(1+xi_lambda2)",
  };
  for (const std::string& e : exprs) {
    const Symbol sigma =
        build_symbol(spec_of(SymbolSpec::Family::scalar_expr, 0, e), s, s.lambda());
    const SpectralReport rep = dmin_dmax(s, sigma, shells);
    for (const ShellRow& row : rep.rows) {
      if (row.empty) continue;
      if (std::abs(row.d_min - row.d_max) > kTol) {
        notef("per-shell gap %.3e > 1e-12", std::abs(row.d_min - row.d_max));
        return false;
      }
    }
  }
  return true;
}

// --------------------------------------------------------------- criterion 5

bool gohberg_floor() {
  constexpr double kFloorFraction = 0.02;   // s_6 ≥ 3·(1−0.02) at Λ = 512
  constexpr double kMonotoneSlack = 1e-6;
  constexpr double kOracleTol = 1e-12;

  Space s(GroupDescriptor::torus(1, 2048), 512.0);
  const Symbol sigma = build_symbol(
      spec_of(SymbolSpec::Family::multiplication, 0, "2+cos(x1)"), s, s.lambda());
  const GohbergReport rep =
      gohberg_check(s, sigma, {64.0, 128.0, 256.0, 512.0}, 5,
                    {64.0, 128.0, 256.0, 512.0}, WitnessProfile{}, {});
  if (std::abs(rep.d_min_estimate - 3.0) > kOracleTol) {
    notef("d_min %.12f != 3", rep.d_min_estimate);
    return false;
  }
  for (std::size_t i = 1; i < rep.s_k1.size(); ++i) {
    if (rep.s_k1[i] < rep.s_k1[i - 1] - kMonotoneSlack) {
      notef("s_6 not nondecreasing: %.9f after %.9f", rep.s_k1[i], rep.s_k1[i - 1]);
      return false;
    }
  }
  if (rep.s_k1.back() < 3.0 * (1.0 - kFloorFraction)) {
    notef("s_6(512) = %.6f < %.6f", rep.s_k1.back(), 3.0 * (1.0 - kFloorFraction));
    return false;
  }
  return true;
}

// --------------------------------------------------------------- criterion 6

bool witness_certificate() {
  constexpr double kLowerTarget = 2.8;
  constexpr double kNormTol = 1e-8;

  Space s(GroupDescriptor::torus(1, 256), 80.0);
  const Symbol sigma = build_symbol(
      spec_of(SymbolSpec::Family::multiplication, 0, "2+cos(x1)"), s, s.lambda());
  WitnessProfile prof;
  prof.band = 10.0;
  std::vector<std::size_t> ks;
  for (int k : {8, 16, 32, 64}) ks.push_back(index_of_k(s, k));

  const ShellProfile shells = shell_profile(s, sigma);
  for (const std::size_t a : ks) {
    const WitnessField w =
        witness(s, prof, s.dual()[a], s.grid().points[shells.entries[a].x_argmax]);
    if (w.norm_error > kNormTol) {
      notef("norm identity off by %.3e > 1e-8", w.norm_error);
      return false;
    }
  }

  const GohbergReport rep = gohberg_check(s, sigma, {80.0}, 5, {10.0, 20.0, 40.0, 80.0},
                                          prof, ks);
  if (rep.witness_best < kLowerTarget) {
    notef("running max %.6f < 2.8", rep.witness_best);
    return false;
  }
  if (rep.witness_best > rep.upper_norm + 1e-10) {
    notef("lower bound %.6f exceeds the section norm", rep.witness_best);
    return false;
  }
  return true;
}

// --------------------------------------------------------------- criterion 7

bool lemma_decay() {
  constexpr double kTorusSlope = -0.8;
  constexpr double kMonotoneSlack = 1e-9;

  Space torus(GroupDescriptor::torus(1, 128), 64.0);
  const Symbol sgn = build_symbol(
      spec_of(SymbolSpec::Family::scalar_expr, 0, "k1/xi_weight"), torus, torus.lambda());
  WitnessProfile tprof;
  tprof.band = 8.0;
  std::vector<std::size_t> ks;
  for (int k : {8, 12, 16, 24, 32}) ks.push_back(index_of_k(torus, k));
  const LemmaDecayReport tr = lemma_decay_check(torus, sgn, tprof, ks);
  if (tr.slope > kTorusSlope) {
    notef("torus slope %.4f > -0.8", tr.slope);
    return false;
  }

  Space su2(GroupDescriptor::su2(16, 16, 16), 4.0);
  const Symbol inv =
      build_symbol(spec_of(SymbolSpec::Family::multiplier_power, -1.0), su2, 4.0);
  WitnessProfile sprof;
  sprof.band = std::sqrt(2.0);
  std::vector<std::size_t> ts;
  for (int t : {1, 2, 3, 4}) ts.push_back(index_of_two_ell(su2, t));
  const LemmaDecayReport sr = lemma_decay_check(su2, inv, sprof, ts);
  for (std::size_t i = 1; i < sr.rows.size(); ++i) {
    if (sr.rows[i].difference_l2 >
        sr.rows[i - 1].difference_l2 * (1.0 + kMonotoneSlack)) {
      notef("su2 row %g not monotone", static_cast<double>(i));
      return false;
    }
  }
  return true;
}

// --------------------------------------------------------------- criterion 8

bool compactness_tails() {
  constexpr double kOracleTol = 1e-10;
  constexpr double kTorusSlope = -0.9;
  constexpr double kSu2Slope = -0.7;

  const auto dmax_oracle = [](const Space& s, double lo) {
    // (1+R'²)^{-1/2} for the smallest weight ≥ lo in the dual
    double best = 0.0;
    for (const Irrep& xi : s.dual())
      if (xi.weight >= lo) best = std::max(best, 1.0 / xi.weight);
    return best;
  };

  Space torus(GroupDescriptor::torus(1, 64), 32.0);
  const Symbol tinv =
      build_symbol(spec_of(SymbolSpec::Family::multiplier_power, -1.0), torus, 32.0);
  const CompactnessReport tr =
      compactness_diagnostic(torus, tinv, 24.0, {4.0, 8.0, 16.0}, {4.0, 8.0, 16.0, 32.0},
                             0.1);
  if (std::abs(tr.d_max_estimate - dmax_oracle(torus, 16.0)) > kOracleTol) {
    notef("torus d_max off the diagonal oracle by %.3e",
          std::abs(tr.d_max_estimate - dmax_oracle(torus, 16.0)));
    return false;
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < tr.r_list.size(); ++i) {
    lx.push_back(std::log(tr.r_list[i]));
    ly.push_back(std::log(tr.tail_norms[i]));
  }
  if (lls_slope(lx, ly) > kTorusSlope) {
    notef("torus tail slope %.4f > -0.9", lls_slope(lx, ly));
    return false;
  }
  if (!tr.compact_consistent) {
    g_detail = "torus ⟨ξ⟩^{-1} not flagged compact-consistent";
    return false;
  }

  Space su2(GroupDescriptor::su2(16, 16, 16), 4.0);
  const Symbol sinv =
      build_symbol(spec_of(SymbolSpec::Family::multiplier_power, -1.0), su2, 4.0);
  const CompactnessReport sr = compactness_diagnostic(
      su2, sinv, 4.0, {1.5, 2.5, 3.5}, {1.2, 1.8, 2.6, 4.0}, 0.5);
  if (std::abs(sr.d_max_estimate - dmax_oracle(su2, 2.6)) > kOracleTol) {
    notef("su2 d_max off the diagonal oracle by %.3e",
          std::abs(sr.d_max_estimate - dmax_oracle(su2, 2.6)));
    return false;
  }
  lx.clear();
  ly.clear();
  for (std::size_t i = 0; i < sr.r_list.size(); ++i) {
    lx.push_back(std::log(sr.r_list[i]));
    ly.push_back(std::log(sr.tail_norms[i]));
  }
  if (lls_slope(lx, ly) > kSu2Slope) {
    notef("su2 tail slope %.4f > -0.7", lls_slope(lx, ly));
    return false;
  }

  const Symbol ident =
      build_symbol(spec_of(SymbolSpec::Family::multiplier_power, 0.0), torus, 32.0);
  const CompactnessReport ir = compactness_diagnostic(
      torus, ident, 24.0, {4.0, 8.0, 16.0}, {4.0, 8.0, 16.0, 32.0}, 1e-3);
  if (ir.verdict != "not compact") {
    g_detail = "identity verdict \"" + ir.verdict + "\"";
    return false;
  }
  return true;
}

// --------------------------------------------------------------- criterion 9

bool matrix_phenomenon() {
  Space s(GroupDescriptor::su2(8, 8, 8), std::sqrt(4.75));
  const Symbol corner =
      build_symbol(spec_of(SymbolSpec::Family::corner_projection), s, s.lambda());
  const SpectralReport rep = dmin_dmax(s, corner, {1.2, 1.5, 2.2});
  if (rep.d_min_estimate != 0.0) {
    notef("d_min %.3e != 0", rep.d_min_estimate);
    return false;
  }
  if (std::abs(rep.d_max_estimate - 1.0) > 1e-12) {
    notef("d_max %.15f != 1", rep.d_max_estimate);
    return false;
  }
  const EllipticityResult ell = ellipticity_check(s, corner, 1e6, 0.0);
  if (!ell.singular) {
    g_detail = "corner projection not reported singular";
    return false;
  }
  return true;
}

// -------------------------------------------------------------- criterion 10

bool scaling_and_determinism() {
  constexpr double kRelTol = 1e-10;
  constexpr double kScale = 5.0;

  Space s(GroupDescriptor::torus(1, 32), 16.0);
  const Symbol s1 = build_symbol(
      spec_of(SymbolSpec::Family::scalar_expr, 0, "(2+cos(x1))/xi_weight"), s, 16.0);
  const Symbol s5 = build_symbol(
      spec_of(SymbolSpec::Family::scalar_expr, 0, "5*(2+cos(x1))/xi_weight"), s, 16.0);

  const ShellProfile p1 = shell_profile(s, s1);
  const ShellProfile p5 = shell_profile(s, s5);
  for (std::size_t a = 0; a < p1.entries.size(); ++a) {
    if (p1.entries[a].x_argmax != p5.entries[a].x_argmax) {
      notef("argmax moved at dual index %g", static_cast<double>(a));
      return false;
    }
  }

  WitnessProfile prof;
  prof.band = 3.0;
  const std::vector<std::size_t> wits{index_of_k(s, 2), index_of_k(s, 5)};
  const GohbergReport g1 =
      gohberg_check(s, s1, {4.0, 8.0}, 2, {2.0, 4.0, 8.0}, prof, wits);
  const GohbergReport g5 =
      gohberg_check(s, s5, {4.0, 8.0}, 2, {2.0, 4.0, 8.0}, prof, wits);
  const auto rel = [](double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
  };
  if (rel(g5.d_min_estimate, kScale * g1.d_min_estimate) > kRelTol ||
      rel(g5.upper_norm, kScale * g1.upper_norm) > kRelTol ||
      rel(g5.witness_best, kScale * g1.witness_best) > kRelTol) {
    g_detail = "report scalars do not scale by c";
    return false;
  }
  for (std::size_t i = 0; i < g1.s_k1.size(); ++i) {
    if (rel(g5.s_k1[i], kScale * g1.s_k1[i]) > kRelTol) {
      notef("s_k1[%g] breaks scaling", static_cast<double>(i));
      return false;
    }
  }

  // identical runs of the CLI produce byte-identical report files
  const std::string cfg_path = (scratch_dir() / "c10.json").string();
  {
    std::ofstream out(cfg_path);
    out << R"json({
      "group": {"kind": "torus", "dim": 1, "points": 32},
      "lambda": 16.0,
      "symbol": {"family": "scalar_expr", "expr": "(2+cos(x1))/xi_weight"}
    })json";
  }
  const std::string r1 = (scratch_dir() / "c10_run1.json").string();
  const std::string r2 = (scratch_dir() / "c10_run2.json").string();
  const std::string base = std::string(NCSG_TOOL_PATH) + " gohberg --config " + cfg_path;
  if (std::system((base + " --out " + r1 + " > /dev/null 2>&1").c_str()) < 0 ||
      std::system((base + " --out " + r2 + " > /dev/null 2>&1").c_str()) < 0) {
    g_detail = "could not launch the CLI";
    return false;
  }
  std::ifstream f1(r1, std::ios::binary), f2(r2, std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  if (b1.empty() || b1 != b2) {
    g_detail = "report files differ between identical runs";
    return false;
  }
  return true;
}

struct Criterion {
  int id;
  const char* name;
  bool (*fn)();
};

constexpr Criterion kCriteria[] = {
    {1, "plancherel-identity", plancherel_identity},
    {2, "quantize-extract-round-trip", quantize_extract_round_trip},
    {3, "laplacian-symbol", laplacian_symbol},
    {4, "torus-scalar-dmin-equals-dmax", torus_scalar_dmin_equals_dmax},
    {5, "gohberg-floor", gohberg_floor},
    {6, "witness-certificate", witness_certificate},
    {7, "lemma-decay", lemma_decay},
    {8, "compactness-tails", compactness_tails},
    {9, "matrix-phenomenon", matrix_phenomenon},
    {10, "scaling-and-determinism", scaling_and_determinism},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int ran = 0, passed = 0;
  for (const Criterion& c : kCriteria) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    bool ok = false;
    g_detail.clear();
    try {
      ok = c.fn();
    } catch (const std::exception& e) {
      g_detail = e.what();
    }
    if (ok) {
      ++passed;
      std::printf("PASS %2d %s\n", c.id, c.name);
    } else {
      std::printf("FAIL %2d %s%s%s\n", c.id, c.name, g_detail.empty() ? "" : ": ",
                  g_detail.c_str());
    }
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no such criterion: %d\n", only);
    return 1;
  }
  if (only == 0) std::printf("acceptance: %d/%d passed\n", passed, ran);
  return passed == ran ? 0 : 1;
}
