#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

#include "ncsg/errors.hpp"

namespace ncsg {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Throws NumericError if any entry is NaN or Inf.
void require_finite(const ComplexMatrix& M, const char* what);

struct HermitianEigs {
  RealVector eigenvalues;  // ascending
  ComplexMatrix U;         // columns are eigenvectors, M = U diag U*
};

/// Eigendecomposition of (M+M*)/2. Input must be square; it is symmetrized
/// before decomposition, so tiny anti-Hermitian noise is tolerated.
HermitianEigs hermitian_eigs(const ComplexMatrix& M);

struct SvdResult {
  ComplexMatrix U;  // m×r, r = min(m,n)
  RealVector s;     // descending, ≥ 0
  ComplexMatrix V;  // n×r; M = U diag(s) V*
};

SvdResult svd(const ComplexMatrix& M);

/// Singular values only (descending), cheaper than a full svd().
RealVector singular_values(const ComplexMatrix& M);

struct MatrixNorms {
  double op_norm = 0.0;            // largest singular value
  double hs_norm = 0.0;            // sqrt(Tr MM*)
  double min_eig_of_MMstar = 0.0;  // square M only; clamped to 0 near zero
  bool has_min_eig = false;
};

/// op/HS norms for any matrix; the smallest eigenvalue of MM* is filled in
/// only for square M (it equals the smallest singular value squared).
MatrixNorms matrix_norms(const ComplexMatrix& M);

double op_norm(const ComplexMatrix& M);
double hs_norm(const ComplexMatrix& M);

/// Σ_ij A_ij·conj(B_ij) = Tr(B*A), deterministic pairwise order.
Complex hs_inner(const ComplexMatrix& A, const ComplexMatrix& B);

// NCMAT1 on-disk format: 8-byte magic "NCMAT1\0\0", then u32 little-endian
// version=1, rows, cols, pad=0, then rows·cols row-major complex entries,
// each two little-endian IEEE-754 doubles (re, im).
void write_ncmat1(const std::string& path, const ComplexMatrix& M);
ComplexMatrix read_ncmat1(const std::string& path);

}  // namespace ncsg
