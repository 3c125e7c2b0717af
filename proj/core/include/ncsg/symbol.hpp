#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ncsg/expr.hpp"
#include "ncsg/fourier.hpp"

namespace ncsg {

// Symbols σ(x,ξ): construction, left quantization T_σ, operator-matrix
// assembly in the Peter–Weyl basis, symbol extraction, the kernel R(x,z),
// difference operators Δ_q, the seminorm table C_{αβ}, and the ellipticity
// test. Symbols are immutable; every operation is pure.

/// σ(x,ξ) sampled on a Space: one d_ξ×d_ξ matrix per (dual index, grid
/// index). Storage collapses along axes the symbol does not use:
/// x_independent keeps one grid slot; scalar keeps one complex per slot.
struct Symbol {
  GroupDescriptor group;
  double lambda = 0.0;        // dual truncation Λ (weight units)
  std::vector<Irrep> dual;    // prefix of the space's dual
  bool x_independent = false;
  bool scalar = false;
  /// Band-limit of x ↦ σ(x,ξ) in alias-degree units (torus |k|_∞, su2
  /// two_ell); 0 for multipliers, −1 = unknown (blocks assembly).
  int x_band = 0;

  /// scalar storage: (dual index, grid slot); grid slot count is 1 when
  /// x_independent.
  Eigen::MatrixXcd scalar_values;
  /// matrix storage: [dual index][grid slot]
  std::vector<std::vector<ComplexMatrix>> matrix_values;

  /// Exact off-grid evaluation when the symbol came from a closed form;
  /// empty for file-loaded or extracted symbols.
  std::function<ComplexMatrix(const GroupPoint&, const Irrep&)> evaluator;

  std::size_t grid_slots() const {
    return scalar ? static_cast<std::size_t>(scalar_values.cols())
                  : (matrix_values.empty() ? 0 : matrix_values[0].size());
  }
  /// σ(x_p, ξ_a) materialized as a d×d matrix.
  ComplexMatrix value(std::size_t dual_index, std::size_t grid_index) const;
  /// Scalar slot (valid only when scalar).
  Complex scalar_value(std::size_t dual_index, std::size_t grid_index) const;
};

struct SymbolSpec {
  enum class Family {
    multiplier_power,    // ⟨ξ⟩^s · I
    multiplication,      // a(x) · I
    product,             // a(x)·⟨ξ⟩^s · I
    corner_projection,   // E_11 (d_ξ ≥ 2), 1 (d_ξ = 1)
    laplacian_resolvent, // (c + λ_ξ²)^{-1} · I
    scalar_expr,         // g(x, ξ) · I over point and dual variables
    file,                // NCSYM1 container
  };
  Family family = Family::multiplier_power;
  double power = 0.0;        // multiplier_power / product
  double resolvent_c = 1.0;  // laplacian_resolvent
  std::string expr;          // multiplication / product / scalar_expr
  std::string path;          // file
};

/// Finite section of T_σ over the orthonormal Peter–Weyl basis
/// e_{ξ,i,j} = √d_ξ·ξ_ij, rows/columns in flat order offset(ξ)+i·d_ξ+j.
struct OperatorMatrix {
  double lambda = 0.0;
  std::vector<Irrep> dual;
  std::vector<int> offsets;
  ComplexMatrix matrix;

  struct BasisIndex {
    std::size_t dual_index;
    int i, j;
  };
  int index_of(std::size_t dual_index, int i, int j) const;
  BasisIndex basis_of(int row) const;
  int size() const { return static_cast<int>(matrix.rows()); }
};

/// Validates that σ belongs to s: same group, dual a label-matched prefix
/// of s's dual covering σ.Λ, grid slots 1 or the full grid.
void check_symbol_space(const Space& s, const Symbol& sigma);

/// Builds σ per the family table above at truncation Λ (≤ space Λ).
/// Expression families measure the x-band from the grid samples.
Symbol build_symbol(const SymbolSpec& spec, const Space& s, double lambda);

/// Samples fn over (grid × dual); flags are detected from the samples,
/// x_band taken from the hint (−1 = unknown) unless x-independence makes
/// it 0. fn becomes the symbol's off-grid evaluator.
Symbol build_symbol_from_fn(
    const Space& s, double lambda,
    const std::function<ComplexMatrix(const GroupPoint&, const Irrep&)>& fn,
    int x_band_hint);

/// σ(x,ξ) off the grid: the evaluator when present, otherwise Fourier
/// interpolation in x (exact when the x-band fits the space's dual).
ComplexMatrix symbol_value_at(const Space& s, const Symbol& sigma,
                              const GroupPoint& x, std::size_t dual_index);

/// Tf(x) = Σ_ξ d_ξ Tr(ξ(x)·σ(x,ξ)·f̂(ξ)) over σ's dual.
ScalarField quantize_apply(const Space& s, const Symbol& sigma, const ScalarField& f);

/// Entry (row,col) = ⟨T_σ e_col, e_row⟩_{L²}. Block-diagonal (exactly) for
/// x-independent σ. Pre: Λ ≤ σ.Λ and Λ ≤ exactness_degree − x_band; violations
/// throw AliasingError rather than aliasing silently.
OperatorMatrix assemble_operator_matrix(const Space& s, const Symbol& sigma, double lambda);

/// Coefficient vector in the operator-matrix basis: v[(ξ,i,j)] = √d_ξ·f̂(ξ)_ji
/// (so that f = Σ v·e_{ξ,i,j}); inverse mapping below.
Eigen::VectorXcd coefficients_to_basis(const OperatorMatrix& m, const FourierCoefficients& c);
FourierCoefficients basis_to_coefficients(const OperatorMatrix& m, const Eigen::VectorXcd& v);

/// σ_T(x,ξ) = ξ(x)*·(Tξ)(x), the operator applied to each matrix entry of
/// ξ(·) through the callback. x_band_hint: −1 if unknown.
Symbol extract_symbol(const Space& s, double lambda,
                      const std::function<ScalarField(const ScalarField&)>& apply,
                      int x_band_hint);

/// R(x,z) = Σ_ξ d_ξ Tr(σ(x,ξ)ξ(z)) sampled over z for a fixed grid x.
ScalarField kernel_R(const Space& s, const Symbol& sigma, std::size_t x_index);

/// (Δ_qσ)(x,ξ) = ∫ q(z)·R(x,z)·ξ(z)* dz. The output truncation shrinks by
/// the band of q; an empty output dual is an AliasingError.
Symbol difference_op(const Space& s, const Symbol& sigma, const AdmissibleFunction& q);

/// C_{αβ} = max_{x,ξ} ‖∂_x^β Δ^α σ(x,ξ)‖_op·⟨ξ⟩^{|α|}, α over the admissible
/// family (iterated difference_op), β over one-parameter subgroup directions
/// (central differences, h = 1e-4 torus / 1e-3 su2). Orders ≤ 2.
struct SeminormReport {
  int alpha_max = 0, beta_max = 0;
  double rho = 0.0;
  Eigen::MatrixXd C;    // (alpha_max+1) × (beta_max+1)
  double sup_norm = 0;  // ‖σ‖ = C(0,0)
  double sup_dx = 0;    // ‖∂_x σ‖ (first derivative, no ⟨ξ⟩ factor)
  double sup_dq_rho = 0;  // max_q ‖Δ_q σ‖·⟨ξ⟩^ρ
};
SeminormReport seminorm_report(const Space& s, const Symbol& sigma,
                               int alpha_max, int beta_max, double rho);

/// Over all grid x and ⟨ξ⟩ ≥ r_min: singular (s_min ≤ 1e-12) → not elliptic;
/// otherwise bound = max 1/s_min and elliptic ⇔ bound ≤ c_threshold.
struct EllipticityResult {
  bool elliptic = false;
  bool singular = false;
  double bound = 0.0;
  double c_threshold = 0.0;
  double r_min = 0.0;
  /// argmax of ‖σ^{-1}‖ (or the first singular site)
  std::size_t witness_dual = static_cast<std::size_t>(-1);
  std::size_t witness_grid = static_cast<std::size_t>(-1);
};
EllipticityResult ellipticity_check(const Space& s, const Symbol& sigma,
                                    double c_threshold, double r_min);

/// NCSYM1 container: magic "NCSYM1\0\0", u64 LE header length, UTF-8 JSON
/// header (group, grid, ordered dual, ordering declaration, flags), then the
/// matrices dual-major then grid-index, d_ξ² row-major complex (f64 LE re,im).
void save_symbol(const std::string& path, const Space& s, const Symbol& sigma);
Symbol load_symbol(const std::string& path, const Space& s);

}  // namespace ncsg
