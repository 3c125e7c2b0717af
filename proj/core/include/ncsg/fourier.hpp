#pragma once

#include <functional>
#include <vector>

#include "ncsg/group.hpp"

namespace ncsg {

/// A complex scalar function sampled on the quadrature grid. band_degree is
/// an optional alias-degree hint (torus: |k|_∞; su2: two_ell) that
/// aliasing-sensitive operations use to assert safety margins; −1 = unknown.
struct ScalarField {
  std::vector<Complex> values;
  int band_degree = -1;
};

/// A d×d matrix-valued function sampled on the grid.
struct MatrixField {
  std::vector<ComplexMatrix> values;
  int dim = 0;
  int band_degree = -1;
};

/// f̂: one d_ξ×d_ξ matrix per irrep, in enumeration order, truncated at Λ.
struct FourierCoefficients {
  std::vector<Irrep> dual;
  std::vector<ComplexMatrix> coeff;
  double lambda = 0.0;

  const ComplexMatrix* find(const Irrep& xi) const;
};

/// Grid + truncated dual + the cached table of all matrix coefficients,
/// C(p, flat(ξ,i,j)) = ξ(x_p)_{ij}. Every transform is a product against C,
/// so results are deterministic (serial GEMM) and shared across modules.
class Space {
 public:
  Space(const GroupDescriptor& g, double lambda);

  const GroupDescriptor& group() const { return group_; }
  const QuadratureGrid& grid() const { return grid_; }
  const std::vector<Irrep>& dual() const { return dual_; }
  double lambda() const { return lambda_; }
  std::size_t n_points() const { return grid_.points.size(); }
  int flat_dim() const { return flat_dim_; }
  int offset(std::size_t irrep_index) const { return offsets_[irrep_index]; }
  const ComplexMatrix& table() const { return table_; }
  /// Largest alias-degree of the dual (torus |k|_∞ / su2 two_ell).
  int max_degree() const { return max_degree_; }

 private:
  GroupDescriptor group_;
  QuadratureGrid grid_;
  std::vector<Irrep> dual_;
  double lambda_;
  std::vector<int> offsets_;
  int flat_dim_ = 0;
  int max_degree_ = 0;
  ComplexMatrix table_;
};

/// Largest alias-degree any irrep of weight ≤ Λ can have.
int max_degree_for_weight(const GroupDescriptor& g, double lambda);

ScalarField sample(const Space& s, const std::function<Complex(const GroupPoint&)>& f,
                   int band_degree = -1);

/// f̂(ξ) = ∫ f(x) ξ(x)* dx for every ξ in the space's dual; exact for
/// band-limited f within the grid's exactness degree.
FourierCoefficients analyze(const Space& s, const ScalarField& f);

/// f(x) = Σ_ξ d_ξ Tr(ξ(x) f̂(ξ)) over the coefficients' own dual.
ScalarField synthesize(const Space& s, const FourierCoefficients& c);

/// Batched transforms in the flat layout flat(ξ,i,j) = offset(ξ) + i·d + j.
/// analyze_batch: (points × n) samples → (flat_dim × n) coefficients.
/// synthesize_batch: (flat_dim × n) coefficients → (points × n) samples.
ComplexMatrix analyze_batch(const Space& s, const ComplexMatrix& fields);
ComplexMatrix synthesize_batch(const Space& s, const ComplexMatrix& flat_coeffs);

double field_l2(const Space& s, const ScalarField& f);
double coeff_l2(const FourierCoefficients& c);
/// ‖w‖ = (∫ ‖w(x)‖_HS² dx)^{1/2}.
double matrix_field_l2(const Space& s, const MatrixField& w);

/// Pointwise product; band-degree hints add (unknown stays unknown).
ScalarField multiply(const ScalarField& a, const ScalarField& b);

}  // namespace ncsg
