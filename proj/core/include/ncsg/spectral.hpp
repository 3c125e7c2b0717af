#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "ncsg/symbol.hpp"

namespace ncsg {

/// All finite-truncation reports carry this caveat: in finite dimensions
/// every operator is compact, so the Gohberg bound can only manifest as the
/// fixed-k, growing-Λ singular-value floor.
extern const char* const kFiniteSectionCaveat;

/// Per-irrep extremes of σ over the grid:
///   s_min(ξ) = sup_x λ_min(σσ*)/‖σ‖_op  (0/0 := 0),
///   s_max(ξ) = sup_x ‖σ‖_op,
/// with the grid point attaining s_min's sup (ties → lowest index).
struct ShellProfile {
  struct Entry {
    Irrep xi;
    double s_min = 0.0;
    double s_max = 0.0;
    std::size_t x_argmax = 0;
  };
  std::vector<Entry> entries;  // σ's dual, enumeration order
};

ShellProfile shell_profile(const Space& s, const Symbol& sigma);

/// One row per shell [lo, hi): the maxima of s_min/s_max over the irreps
/// inside. Empty shells are flagged and excluded from the final estimates.
struct ShellRow {
  double lo = 0.0, hi = 0.0;
  double d_min = 0.0, d_max = 0.0;
  std::size_t count = 0;
  bool empty = false;
};

/// d_min/d_max estimated from the outermost non-empty shell; the full
/// sequence is kept so convergence stays the reader's judgment.
struct SpectralReport {
  std::vector<ShellRow> rows;
  double d_min_estimate = 0.0;
  double d_max_estimate = 0.0;
  double ess_disc_radius = 0.0;  // = d_max_estimate
  std::string caveat;
};

/// shells: strictly increasing weight thresholds, at least two intervals.
SpectralReport dmin_dmax(const Space& s, const Symbol& sigma,
                         const std::vector<double>& shells);

/// Band-limited bump u used by the witness construction: the Fourier
/// projection of (1−(h/r)²)² (h = geodesic distance to e) onto weights
/// ≤ band, Fejér-damped by (1−⟨ξ⟩/(band+1)), then L²-normalized.
/// radius ≤ 0 selects the group default (π/4 torus, π/3 su2). A nonempty
/// expr overrides the bump with a DSL profile (point variables only).
struct WitnessProfile {
  double band = 0.0;
  double radius = 0.0;
  std::string expr;
};

/// u_{ξn}(x) = d_{ξn}^{-1/2} ξ_n(x) u(x·x_{ξn}^{-1}).
struct WitnessField {
  MatrixField field;
  ScalarField base;      // u on the grid (normalized)
  FourierCoefficients base_hat;
  Irrep xi_n;
  GroupPoint x_xin;
  double norm_u = 0.0;      // ‖u‖_{L²} (1 after normalization)
  double norm_field = 0.0;  // ‖u_{ξn}‖_{L²}
  double norm_error = 0.0;  // |norm_field − norm_u|
};

WitnessField witness(const Space& s, const WitnessProfile& profile,
                     const Irrep& xi_n, const GroupPoint& x_xin);

/// ‖u_{ξn}σ(·,ξn) − T_σu_{ξn}‖_{L²} per ξ_n, with the log-log slope of the
/// difference against ⟨ξn⟩. x_{ξn} is taken from shell_profile.
struct LemmaDecayRow {
  Irrep xi;
  double difference_l2 = 0.0;
  double product_l2 = 0.0;  // ‖u_{ξn}σ(·,ξn)‖, for scale
};

struct LemmaDecayReport {
  std::vector<LemmaDecayRow> rows;
  double slope = 0.0;
  bool negligible = false;  // all differences at roundoff: slope meaningless
  std::string caveat;
};

/// dual_indices: indices into s.dual(), weights strictly increasing.
LemmaDecayReport lemma_decay_check(const Space& s, const Symbol& sigma,
                                   const WitnessProfile& profile,
                                   const std::vector<std::size_t>& dual_indices);

/// Two Gohberg certificates: (a) the s_{k+1}(T_Λ) floor over increasing Λ
/// (principal blocks of one max-Λ assembly), (b) witness lower bounds
/// ‖(T_σ−K)u_{ξn}‖/‖u‖ for increasing ξ_n. K = nullptr means K = 0.
struct GohbergReport {
  std::vector<double> lambdas;
  std::vector<double> s_k1;  // s_{k_fixed+1} per Λ
  int k_fixed = 5;
  double d_min_estimate = 0.0;
  double floor_tol = 0.05;
  bool floor_ok = false;   // s_k1.back() ≥ d_min·(1−floor_tol)
  bool vacuous = false;    // d_min ≈ 0: no obstruction from the bound
  std::vector<LemmaDecayRow> witness_rows;  // difference_l2 = lower bound
  double witness_best = 0.0;                // running max of the lower bounds
  double upper_norm = 0.0;                  // ‖T_Λmax − K‖_op (SVD)
  std::string caveat;
};

GohbergReport gohberg_check(const Space& s, const Symbol& sigma,
                            const std::vector<double>& lambda_list, int k_fixed,
                            const std::vector<double>& shells,
                            const WitnessProfile& profile,
                            const std::vector<std::size_t>& witness_indices,
                            const OperatorMatrix* K = nullptr);

/// Tail norms ‖T_Λ restricted to basis rows/cols with ⟨ξ⟩ ≥ R‖_op per R,
/// plus the full singular-value profile. compact_consistent iff the d_max
/// estimate is ≤ tol and the tails decrease (5% jitter) to ≤ tol.
struct CompactnessReport {
  double d_max_estimate = 0.0;
  std::vector<double> r_list;
  std::vector<double> tail_norms;
  std::vector<double> singular_values;
  double tol = 1e-3;
  bool compact_consistent = false;
  std::string verdict;  // "compact-consistent" | "not compact"
  std::string caveat;
};

CompactnessReport compactness_diagnostic(const Space& s, const Symbol& sigma,
                                         double lambda,
                                         const std::vector<double>& r_list,
                                         const std::vector<double>& shells,
                                         double tol = 1e-3);

/// min over grid x and ⟨ξ⟩ ≥ r_min of s_min(σ(x,ξ) − λI); ok iff it stays
/// ≥ 1e-12, and sup_inverse_norm is the max of the inverses.
struct ResolventReport {
  bool ok = false;
  double sup_inverse_norm = 0.0;
  double min_singular = 0.0;
  Complex lambda_shift;
  double r_min = 0.0;
};

ResolventReport resolvent_bound(const Space& s, const Symbol& sigma,
                                Complex lambda_shift, double r_min);

/// C = T_ΛT_Λ* − T_Λ*T_Λ; tail norms of C over r_list shells restricted to
/// weights ≤ interior_cap (boundary rows of the finite section excluded),
/// with the log-log decay slope.
struct NormalityReport {
  double commutator_norm = 0.0;
  double operator_norm = 0.0;
  std::vector<double> r_list;
  std::vector<double> tail_norms;
  double slope = 0.0;
  bool negligible = false;  // ‖C‖ at roundoff relative to ‖T‖²
  std::string caveat;
};

NormalityReport essential_normality_check(const Space& s, const Symbol& sigma,
                                          double lambda,
                                          const std::vector<double>& r_list,
                                          double interior_cap);

}  // namespace ncsg
