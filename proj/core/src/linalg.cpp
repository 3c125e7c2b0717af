#include "ncsg/linalg.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "ncsg/reduce.hpp"

static_assert(std::endian::native == std::endian::little,
              "NCMAT1 I/O writes raw little-endian words");

namespace ncsg {

void require_finite(const ComplexMatrix& M, const char* what) {
  if (!M.allFinite()) {
    throw NumericError(std::string(what) + ": non-finite matrix entry");
  }
}

HermitianEigs hermitian_eigs(const ComplexMatrix& M) {
  if (M.rows() != M.cols()) {
    throw DimensionError("hermitian_eigs: matrix must be square, got " +
                         std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
  }
  require_finite(M, "hermitian_eigs");
  const ComplexMatrix H = 0.5 * (M + M.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H);
  if (es.info() != Eigen::Success) {
    throw NumericError("hermitian_eigs: eigensolver failed to converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

namespace {

// Jacobi is more accurate for small blocks (irrep-sized symbols); divide and
// conquer for the large truncated operators.
constexpr Eigen::Index kJacobiMaxDim = 32;

}  // namespace

SvdResult svd(const ComplexMatrix& M) {
  require_finite(M, "svd");
  constexpr unsigned opts = Eigen::ComputeThinU | Eigen::ComputeThinV;
  if (std::min(M.rows(), M.cols()) <= kJacobiMaxDim) {
    Eigen::JacobiSVD<ComplexMatrix> dec(M, opts);
    return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
  }
  Eigen::BDCSVD<ComplexMatrix> dec(M, opts);
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

RealVector singular_values(const ComplexMatrix& M) {
  require_finite(M, "singular_values");
  if (std::min(M.rows(), M.cols()) <= kJacobiMaxDim) {
    return Eigen::JacobiSVD<ComplexMatrix>(M).singularValues();
  }
  return Eigen::BDCSVD<ComplexMatrix>(M).singularValues();
}

MatrixNorms matrix_norms(const ComplexMatrix& M) {
  require_finite(M, "matrix_norms");
  MatrixNorms out;
  out.hs_norm = hs_norm(M);
  const RealVector s = singular_values(M);
  out.op_norm = s.size() ? s(0) : 0.0;
  if (M.rows() == M.cols()) {
    // For square M the eigenvalues of MM* are the squared singular values.
    double m = s.size() ? s(s.size() - 1) : 0.0;
    m = m * m;
    out.min_eig_of_MMstar = (m > -1e-12 && m < 0.0) ? 0.0 : m;
    out.has_min_eig = true;
  }
  return out;
}

double op_norm(const ComplexMatrix& M) {
  require_finite(M, "op_norm");
  if (M.size() == 0) return 0.0;
  return singular_values(M)(0);
}

double hs_norm(const ComplexMatrix& M) {
  require_finite(M, "hs_norm");
  const Complex* data = M.data();
  const double sq = pairwise_sum<double>(
      static_cast<std::size_t>(M.size()),
      [data](std::size_t i) { return std::norm(data[i]); });
  return std::sqrt(sq);
}

Complex hs_inner(const ComplexMatrix& A, const ComplexMatrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw DimensionError("hs_inner: shape mismatch");
  }
  const Complex* a = A.data();
  const Complex* b = B.data();
  return pairwise_sum<Complex>(
      static_cast<std::size_t>(A.size()),
      [a, b](std::size_t i) { return a[i] * std::conj(b[i]); });
}

namespace {

constexpr char kMagic[8] = {'N', 'C', 'M', 'A', 'T', '1', '\0', '\0'};

void put_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t get_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

}  // namespace

void write_ncmat1(const std::string& path, const ComplexMatrix& M) {
  require_finite(M, "write_ncmat1");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("write_ncmat1: cannot open " + path);
  os.write(kMagic, 8);
  put_u32(os, 1);
  put_u32(os, static_cast<std::uint32_t>(M.rows()));
  put_u32(os, static_cast<std::uint32_t>(M.cols()));
  put_u32(os, 0);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      const double re = M(i, j).real(), im = M(i, j).imag();
      os.write(reinterpret_cast<const char*>(&re), 8);
      os.write(reinterpret_cast<const char*>(&im), 8);
    }
  }
  if (!os) throw IoError("write_ncmat1: short write to " + path);
}

ComplexMatrix read_ncmat1(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("read_ncmat1: cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || !std::equal(magic, magic + 8, kMagic)) {
    throw IoError("read_ncmat1: bad magic in " + path);
  }
  const std::uint32_t version = get_u32(is);
  if (version != 1) {
    throw IoError("read_ncmat1: unsupported version " + std::to_string(version));
  }
  const std::uint32_t rows = get_u32(is);
  const std::uint32_t cols = get_u32(is);
  get_u32(is);  // pad
  if (!is) throw IoError("read_ncmat1: truncated header in " + path);
  ComplexMatrix M(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j) {
      double re = 0, im = 0;
      is.read(reinterpret_cast<char*>(&re), 8);
      is.read(reinterpret_cast<char*>(&im), 8);
      M(i, j) = Complex(re, im);
    }
  }
  if (!is) throw IoError("read_ncmat1: truncated payload in " + path);
  require_finite(M, "read_ncmat1");
  return M;
}

}  // namespace ncsg
