#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "ncsg/linalg.hpp"

namespace ncsg {

enum class GroupKind { torus, su2 };

/// Which concrete group we are on, plus its quadrature-grid sizes.
struct GroupDescriptor {
  GroupKind kind = GroupKind::torus;
  int torus_dim = 1;     // n
  int torus_points = 2;  // M points per dimension
  int su2_alpha = 2, su2_beta = 2, su2_gamma = 2;

  static GroupDescriptor torus(int n, int points_per_dim);
  static GroupDescriptor su2(int m_alpha, int m_beta, int m_gamma);

  int manifold_dim() const { return kind == GroupKind::torus ? torus_dim : 3; }
  bool same_group(const GroupDescriptor& o) const {
    return kind == o.kind && (kind != GroupKind::torus || torus_dim == o.torus_dim);
  }
  std::string name() const;
  void validate() const;
};

/// A group element. Torus: angles in [0,2π). SU(2): unit quaternion
/// (w,x,y,z) with cached ZYZ Euler angles α∈[0,2π), β∈[0,π], γ∈[0,4π);
/// the quaternion maps to the defining matrix [[w−iz, −y−ix],[y−ix, w+iz]].
struct GroupPoint {
  GroupKind kind = GroupKind::torus;
  std::vector<double> angles;            // torus only
  std::array<double, 4> quat{1, 0, 0, 0};  // su2 only
  std::array<double, 3> euler{0, 0, 0};    // su2 only, derived view
};

GroupPoint torus_point(std::vector<double> angles);
GroupPoint su2_point(double w, double x, double y, double z);
GroupPoint su2_point_euler(double alpha, double beta, double gamma);
GroupPoint identity_point(const GroupDescriptor& g);

GroupPoint mul(const GroupPoint& a, const GroupPoint& b);
GroupPoint inv(const GroupPoint& a);

/// Distance from the identity: torus — Euclidean norm of the angle vector
/// reduced to (−π,π]; su2 — the rotation angle 2·arccos|w| ∈ [0,π].
double geodesic_h(const GroupPoint& x);

/// Point at parameter t on the axis-th one-parameter subgroup through e
/// (torus: t·e_axis; su2: rotation by angle t about coordinate axis).
GroupPoint exp_direction(const GroupDescriptor& g, int axis, double t);

/// An irreducible unitary representation. Torus labels are integer vectors
/// k ∈ ℤ^n (d=1, λ²=|k|²); SU(2) labels are doubled spins two_ell
/// (d=two_ell+1, λ²=ℓ(ℓ+1)). weight = ⟨ξ⟩ = √(1+λ²).
struct Irrep {
  GroupKind kind = GroupKind::torus;
  std::vector<int> k;  // torus
  int two_ell = 0;     // su2
  int dim = 1;
  double casimir = 0.0;
  double weight = 1.0;
  std::string label_string() const;
};

Irrep torus_irrep(std::vector<int> k);
Irrep su2_irrep(int two_ell);
Irrep trivial_irrep(const GroupDescriptor& g);

inline bool same_label(const Irrep& a, const Irrep& b) {
  return a.kind == b.kind &&
         (a.kind == GroupKind::torus ? a.k == b.k : a.two_ell == b.two_ell);
}

/// All irreps with ⟨ξ⟩ ≤ Λ, sorted ascending by weight then label.
/// Λ < 1 (empty dual) is an error.
std::vector<Irrep> enumerate_dual(const GroupDescriptor& g, double lambda);

/// ξ(x): torus 1×1 e^{ik·x}; su2 the Wigner D-matrix D^ℓ(α,β,γ) with rows
/// indexed by m = ℓ..−ℓ descending and D^ℓ_{mn} = e^{−imα} d^ℓ_{mn}(β) e^{−inγ}.
ComplexMatrix evaluate_irrep(const Irrep& xi, const GroupPoint& x);

/// Alias-degree of an irrep: torus |k|_∞, su2 two_ell. Two matrix
/// coefficients integrate exactly when their degrees sum below the grid's
/// single_degree_limit.
int degree(const Irrep& xi);

/// Little Wigner d^j_{m'm}(β) in doubled-integer labels (two_j ≤ 32).
double wigner_little_d(int two_j, int two_mp, int two_m, double beta);

struct QuadratureGrid {
  GroupDescriptor group;
  std::vector<GroupPoint> points;
  std::vector<double> weights;  // sum to 1
  /// Largest Λ such that ∫ ξ_ij η̄_kl is exact for all ⟨ξ⟩,⟨η⟩ ≤ Λ.
  double exactness_degree = 0.0;
  /// Largest degree(ξ)+degree(η) (plus any multiplier band) integrated exactly.
  int single_degree_limit = 0;
};

/// Haar quadrature: torus — M^n equispaced, uniform weights; su2 — α,γ
/// equispaced on [0,2π),[0,4π), β Gauss–Legendre in cos β. M_γ must be even
/// (odd M_γ aliases integer against half-integer spins).
QuadratureGrid quadrature_grid(const GroupDescriptor& g);

/// One function of a strongly admissible collection: q_j(e)=0, smooth, and
/// jointly vanishing only at e. vanishing_order is the order of the zero at e.
struct AdmissibleFunction {
  std::string name;
  int vanishing_order = 1;
  std::function<Complex(const GroupPoint&)> eval;
};

struct AdmissibleFamily {
  GroupDescriptor group;
  std::vector<AdmissibleFunction> functions;
};

/// Torus: q_j = e^{ix_j}−1. SU(2): Re(a−1), Im(a), Re(b), Im(b) of the
/// defining matrix [[a,b],[−b̄,ā]]; Re(a−1) vanishes to second order but the
/// remaining three give gradient rank 3 = dim SU(2) at e.
AdmissibleFamily admissible_family(const GroupDescriptor& g);

}  // namespace ncsg
