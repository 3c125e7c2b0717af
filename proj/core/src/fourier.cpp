#include "ncsg/fourier.hpp"

#include <cmath>

#include "ncsg/parallel.hpp"
#include "ncsg/reduce.hpp"

namespace ncsg {

const ComplexMatrix* FourierCoefficients::find(const Irrep& xi) const {
  for (std::size_t i = 0; i < dual.size(); ++i) {
    if (same_label(dual[i], xi)) return &coeff[i];
  }
  return nullptr;
}

int max_degree_for_weight(const GroupDescriptor& g, double lambda) {
  if (lambda < 1.0) return 0;
  const double cap = lambda * lambda * (1.0 + 1e-12) + 1e-12;
  if (g.kind == GroupKind::torus) {
    return static_cast<int>(std::floor(std::sqrt(std::max(0.0, cap - 1.0))));
  }
  // largest t with 1 + (t/2)(t/2+1) ≤ Λ², i.e. (t+1)² ≤ 4Λ²−3
  return std::max(0, static_cast<int>(std::floor(std::sqrt(4.0 * cap - 3.0))) - 1);
}

Space::Space(const GroupDescriptor& g, double lambda)
    : group_(g), grid_(quadrature_grid(g)), dual_(enumerate_dual(g, lambda)), lambda_(lambda) {
  offsets_.reserve(dual_.size() + 1);
  int off = 0;
  for (const auto& xi : dual_) {
    offsets_.push_back(off);
    off += xi.dim * xi.dim;
    max_degree_ = std::max(max_degree_, degree(xi));
  }
  offsets_.push_back(off);
  flat_dim_ = off;
  const std::size_t P = grid_.points.size();
  table_.resize(P, flat_dim_);
  parallel_for(P, [&](std::size_t p) {
    for (std::size_t a = 0; a < dual_.size(); ++a) {
      const ComplexMatrix m = evaluate_irrep(dual_[a], grid_.points[p]);
      const int d = dual_[a].dim;
      const int base = offsets_[a];
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) table_(p, base + i * d + j) = m(i, j);
      }
    }
  });
}

ScalarField sample(const Space& s, const std::function<Complex(const GroupPoint&)>& f,
                   int band_degree) {
  ScalarField out;
  out.band_degree = band_degree;
  out.values.resize(s.n_points());
  const auto& pts = s.grid().points;
  parallel_for(pts.size(), [&](std::size_t p) { out.values[p] = f(pts[p]); });
  return out;
}

ComplexMatrix analyze_batch(const Space& s, const ComplexMatrix& fields) {
  if (fields.rows() != static_cast<Eigen::Index>(s.n_points())) {
    throw DimensionError("analyze_batch: field length does not match grid size");
  }
  ComplexMatrix weighted = fields;
  for (Eigen::Index p = 0; p < weighted.rows(); ++p) {
    weighted.row(p) *= s.grid().weights[p];
  }
  ComplexMatrix tmp = s.table().adjoint() * weighted;  // tmp[(ξ,a,b)] = f̂(ξ)_{ba}
  ComplexMatrix out(tmp.rows(), tmp.cols());
  const auto& dual = s.dual();
  for (std::size_t ix = 0; ix < dual.size(); ++ix) {
    const int d = dual[ix].dim, base = s.offset(ix);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) out.row(base + i * d + j) = tmp.row(base + j * d + i);
    }
  }
  return out;
}

ComplexMatrix synthesize_batch(const Space& s, const ComplexMatrix& flat_coeffs) {
  if (flat_coeffs.rows() != s.flat_dim()) {
    throw DimensionError("synthesize_batch: coefficient layout does not match dual");
  }
  ComplexMatrix scaled(flat_coeffs.rows(), flat_coeffs.cols());
  const auto& dual = s.dual();
  for (std::size_t ix = 0; ix < dual.size(); ++ix) {
    const int d = dual[ix].dim, base = s.offset(ix);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        scaled.row(base + i * d + j) = double(d) * flat_coeffs.row(base + j * d + i);
      }
    }
  }
  return s.table() * scaled;
}

FourierCoefficients analyze(const Space& s, const ScalarField& f) {
  if (f.values.size() != s.n_points()) {
    throw DimensionError("analyze: field length does not match grid size");
  }
  ComplexMatrix col(s.n_points(), 1);
  for (std::size_t p = 0; p < f.values.size(); ++p) col(p, 0) = f.values[p];
  const ComplexMatrix flat = analyze_batch(s, col);
  FourierCoefficients c;
  c.dual = s.dual();
  c.lambda = s.lambda();
  c.coeff.reserve(c.dual.size());
  for (std::size_t ix = 0; ix < c.dual.size(); ++ix) {
    const int d = c.dual[ix].dim, base = s.offset(ix);
    ComplexMatrix m(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) m(i, j) = flat(base + i * d + j, 0);
    }
    c.coeff.push_back(std::move(m));
  }
  return c;
}

ScalarField synthesize(const Space& s, const FourierCoefficients& c) {
  ScalarField out;
  out.values.assign(s.n_points(), Complex(0, 0));
  int band = 0;
  // Shared prefix of the enumeration goes through the cached table in one
  // product; irreps beyond the space's dual are summed directly.
  ComplexMatrix flat = ComplexMatrix::Zero(s.flat_dim(), 1);
  std::vector<std::size_t> extra;
  for (std::size_t i = 0; i < c.dual.size(); ++i) {
    if (c.dual[i].kind != s.group().kind) {
      throw GroupMismatchError("synthesize: coefficients from a different group");
    }
    if (i < s.dual().size() && same_label(c.dual[i], s.dual()[i])) {
      const int d = c.dual[i].dim, base = s.offset(i);
      if (c.coeff[i].rows() != d || c.coeff[i].cols() != d) {
        throw DimensionError("synthesize: coefficient block has wrong shape");
      }
      for (int r = 0; r < d; ++r) {
        for (int cc = 0; cc < d; ++cc) flat(base + r * d + cc, 0) = c.coeff[i](r, cc);
      }
    } else {
      extra.push_back(i);
    }
    band = std::max(band, degree(c.dual[i]));
  }
  const ComplexMatrix main = synthesize_batch(s, flat);
  for (std::size_t p = 0; p < out.values.size(); ++p) out.values[p] = main(p, 0);
  for (std::size_t idx : extra) {
    const Irrep& xi = c.dual[idx];
    const double d = xi.dim;
    parallel_for(out.values.size(), [&](std::size_t p) {
      const ComplexMatrix m = evaluate_irrep(xi, s.grid().points[p]);
      out.values[p] += d * (m * c.coeff[idx]).trace();
    });
  }
  out.band_degree = band;
  return out;
}

double field_l2(const Space& s, const ScalarField& f) {
  if (f.values.size() != s.n_points()) {
    throw DimensionError("field_l2: field length does not match grid size");
  }
  const auto& w = s.grid().weights;
  const double sq = pairwise_sum<double>(f.values.size(), [&](std::size_t p) {
    return w[p] * std::norm(f.values[p]);
  });
  return std::sqrt(sq);
}

double coeff_l2(const FourierCoefficients& c) {
  const double sq = pairwise_sum<double>(c.coeff.size(), [&](std::size_t i) {
    const double h = hs_norm(c.coeff[i]);
    return c.dual[i].dim * h * h;
  });
  return std::sqrt(sq);
}

double matrix_field_l2(const Space& s, const MatrixField& w) {
  if (w.values.size() != s.n_points()) {
    throw DimensionError("matrix_field_l2: field length does not match grid size");
  }
  const auto& wt = s.grid().weights;
  const double sq = pairwise_sum<double>(w.values.size(), [&](std::size_t p) {
    const double h = hs_norm(w.values[p]);
    return wt[p] * h * h;
  });
  return std::sqrt(sq);
}

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
  if (a.values.size() != b.values.size()) {
    throw DimensionError("multiply: field sizes differ");
  }
  ScalarField out;
  out.values.resize(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) out.values[i] = a.values[i] * b.values[i];
  out.band_degree = (a.band_degree >= 0 && b.band_degree >= 0)
                        ? a.band_degree + b.band_degree
                        : -1;
  return out;
}

}  // namespace ncsg
