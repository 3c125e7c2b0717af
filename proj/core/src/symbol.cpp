#include "ncsg/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "ncsg/errors.hpp"
#include "ncsg/linalg.hpp"
#include "ncsg/parallel.hpp"
#include "ncsg/reduce.hpp"

namespace ncsg {
namespace {

using nlohmann::json;

constexpr double kWeightTol = 1e-12;
constexpr double kSingularTol = 1e-12;
// Every admissible-family function has this alias-degree (torus: e^{ix_j}−1;
// su2: entries of the two_ell=1 representation).
constexpr int kAdmissibleBand = 1;

std::size_t dual_prefix_count(const Space& s, double lambda) {
  const auto& dual = s.dual();
  std::size_t n = 0;
  while (n < dual.size() && dual[n].weight <= lambda + kWeightTol) ++n;
  return n;
}

void check_space_symbol(const Space& s, const Symbol& sigma) {
  if (!s.group().same_group(sigma.group)) {
    throw GroupMismatchError("symbol and space use different groups");
  }
  if (sigma.dual.size() > s.dual().size()) {
    throw DimensionError("symbol dual exceeds the space's dual");
  }
  for (std::size_t a = 0; a < sigma.dual.size(); ++a) {
    if (!same_label(sigma.dual[a], s.dual()[a])) {
      throw DimensionError("symbol dual is not a prefix of the space's dual");
    }
  }
  if (dual_prefix_count(s, sigma.lambda) != sigma.dual.size()) {
    throw DimensionError("symbol dual does not cover its declared truncation");
  }
  const std::size_t slots = sigma.grid_slots();
  if (slots != 1 && slots != s.n_points()) {
    throw DimensionError("symbol grid storage does not match the space");
  }
}

Symbol make_scalar_symbol(const Space& s, double lambda, std::size_t n_dual,
                          bool x_independent) {
  Symbol sym;
  sym.group = s.group();
  sym.lambda = lambda;
  sym.dual.assign(s.dual().begin(), s.dual().begin() + static_cast<long>(n_dual));
  sym.x_independent = x_independent;
  sym.scalar = true;
  sym.scalar_values.setZero(static_cast<long>(n_dual),
                            x_independent ? 1 : static_cast<long>(s.n_points()));
  return sym;
}

Symbol make_matrix_symbol(const Space& s, double lambda, std::size_t n_dual,
                          bool x_independent) {
  Symbol sym;
  sym.group = s.group();
  sym.lambda = lambda;
  sym.dual.assign(s.dual().begin(), s.dual().begin() + static_cast<long>(n_dual));
  sym.x_independent = x_independent;
  sym.scalar = false;
  sym.matrix_values.resize(n_dual);
  const std::size_t slots = x_independent ? 1 : s.n_points();
  for (std::size_t a = 0; a < n_dual; ++a) {
    sym.matrix_values[a].assign(slots, ComplexMatrix());
  }
  return sym;
}

std::size_t require_dual(const Space& s, double lambda, const char* op) {
  if (lambda > s.lambda() + kWeightTol) {
    throw DimensionError(std::string(op) + ": truncation exceeds the space's dual");
  }
  const std::size_t n = dual_prefix_count(s, lambda);
  if (n == 0) {
    throw AliasingError(std::string(op) + ": empty dual at the requested truncation");
  }
  return n;
}

/// σ(slot,·) in the space's flat layout, zero beyond the symbol's prefix.
Eigen::VectorXcd flat_column(const Space& s, const Symbol& sigma, std::size_t slot) {
  Eigen::VectorXcd flat = Eigen::VectorXcd::Zero(s.flat_dim());
  for (std::size_t a = 0; a < sigma.dual.size(); ++a) {
    const int d = sigma.dual[a].dim;
    const int base = s.offset(a);
    if (sigma.scalar) {
      const Complex v = sigma.scalar_value(a, slot);
      for (int i = 0; i < d; ++i) flat[base + i * d + i] = v;
    } else {
      const ComplexMatrix& m = sigma.matrix_values[a][sigma.x_independent ? 0 : slot];
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) flat[base + i * d + j] = m(i, j);
    }
  }
  return flat;
}

/// ξ(x)_{ij} for every dual entry at an arbitrary point, flat layout.
Eigen::RowVectorXcd irrep_row(const Space& s, const GroupPoint& x) {
  Eigen::RowVectorXcd row(s.flat_dim());
  for (std::size_t a = 0; a < s.dual().size(); ++a) {
    const ComplexMatrix m = evaluate_irrep(s.dual()[a], x);
    const int d = s.dual()[a].dim;
    const int base = s.offset(a);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) row[base + i * d + j] = m(i, j);
  }
  return row;
}

int measured_x_band(const Space& s, const ComplexMatrix& fields) {
  const ComplexMatrix coeffs = analyze_batch(s, fields);
  const double scale = coeffs.cwiseAbs().maxCoeff();
  if (scale <= 0.0) return 0;
  int band = 0;
  for (std::size_t a = 0; a < s.dual().size(); ++a) {
    const int d = s.dual()[a].dim;
    const int base = s.offset(a);
    const double block = coeffs.middleRows(base, d * d).cwiseAbs().maxCoeff();
    if (block > 1e-12 * scale) band = std::max(band, degree(s.dual()[a]));
  }
  return band;
}

ComplexMatrix corner_matrix(int d) {
  ComplexMatrix e = ComplexMatrix::Zero(d, d);
  e(0, 0) = 1.0;
  return e;
}

struct FlagScan {
  bool x_independent = true;
  bool scalar = true;
};

void scan_matrix_flags(const ComplexMatrix& v, const ComplexMatrix& first,
                       double tol, FlagScan& f) {
  if (f.x_independent && (v - first).cwiseAbs().maxCoeff() > tol) {
    f.x_independent = false;
  }
  if (f.scalar) {
    const int d = static_cast<int>(v.rows());
    const Complex mean = v.trace() / static_cast<double>(d);
    ComplexMatrix dev = v;
    dev.diagonal().array() -= mean;
    if (dev.cwiseAbs().maxCoeff() > tol) f.scalar = false;
  }
}

/// Off-grid σ samples: the evaluator when present, else x-Fourier
/// interpolation with a per-symbol coefficient cache (exact when the x-band
/// fits inside the space's dual).
class SymbolSampler {
 public:
  SymbolSampler(const Space& s, const Symbol& sigma) : s_(s), sigma_(sigma) {
    if (sigma.evaluator || sigma.x_independent) return;
    xcoef_.resize(sigma.dual.size());
    const std::size_t p_count = s.n_points();
    for (std::size_t a = 0; a < sigma.dual.size(); ++a) {
      const int d = sigma.dual[a].dim;
      ComplexMatrix fields(p_count, d * d);
      for (std::size_t p = 0; p < p_count; ++p) {
        if (sigma.scalar) {
          const Complex v = sigma.scalar_value(a, p);
          for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) fields(p, i * d + j) = (i == j) ? v : Complex(0);
        } else {
          const ComplexMatrix& m = sigma.matrix_values[a][p];
          for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) fields(p, i * d + j) = m(i, j);
        }
      }
      xcoef_[a] = analyze_batch(s, fields);  // flat × d²
    }
  }

  ComplexMatrix at(const GroupPoint& x, std::size_t a) const {
    if (sigma_.evaluator) return sigma_.evaluator(x, sigma_.dual[a]);
    if (sigma_.x_independent) return sigma_.value(a, 0);
    return interp(irrep_row(s_, x), a);
  }

  /// σ(x,·) in the space's flat layout; shares one irrep_row across the dual.
  Eigen::VectorXcd flat_at(const GroupPoint& x) const {
    Eigen::VectorXcd flat = Eigen::VectorXcd::Zero(s_.flat_dim());
    Eigen::RowVectorXcd row;
    const bool need_row = !sigma_.evaluator && !sigma_.x_independent;
    if (need_row) row = irrep_row(s_, x);
    for (std::size_t a = 0; a < sigma_.dual.size(); ++a) {
      const int d = sigma_.dual[a].dim;
      const int base = s_.offset(a);
      ComplexMatrix v;
      if (sigma_.evaluator) {
        v = sigma_.evaluator(x, sigma_.dual[a]);
      } else if (sigma_.x_independent) {
        v = sigma_.value(a, 0);
      } else {
        v = interp(row, a);
      }
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) flat[base + i * d + j] = v(i, j);
    }
    return flat;
  }

 private:
  ComplexMatrix interp(const Eigen::RowVectorXcd& row, std::size_t a) const {
    const int d = sigma_.dual[a].dim;
    // synthesize each entry at x: Σ_η d_η Tr(η(x)·ĉ(η))
    Eigen::RowVectorXcd scaled(s_.flat_dim());
    for (std::size_t b = 0; b < s_.dual().size(); ++b) {
      const int db = s_.dual()[b].dim;
      const int base = s_.offset(b);
      for (int i = 0; i < db; ++i)
        for (int j = 0; j < db; ++j)
          scaled[base + i * db + j] = static_cast<double>(db) * row[base + j * db + i];
    }
    Eigen::RowVectorXcd entries = scaled * xcoef_[a];
    ComplexMatrix v(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) v(i, j) = entries[i * d + j];
    return v;
  }

  const Space& s_;
  const Symbol& sigma_;
  std::vector<ComplexMatrix> xcoef_;
};

ScalarField sample_admissible(const Space& s, const AdmissibleFunction& q) {
  ScalarField f;
  f.values.resize(s.n_points());
  f.band_degree = kAdmissibleBand;
  for (std::size_t p = 0; p < s.n_points(); ++p) f.values[p] = q.eval(s.grid().points[p]);
  return f;
}

}  // namespace

void check_symbol_space(const Space& s, const Symbol& sigma) {
  check_space_symbol(s, sigma);
}

ComplexMatrix Symbol::value(std::size_t dual_index, std::size_t grid_index) const {
  const int d = dual[dual_index].dim;
  if (scalar) {
    return scalar_value(dual_index, grid_index) * ComplexMatrix::Identity(d, d);
  }
  return matrix_values[dual_index][x_independent ? 0 : grid_index];
}

Complex Symbol::scalar_value(std::size_t dual_index, std::size_t grid_index) const {
  return scalar_values(static_cast<long>(dual_index),
                       x_independent ? 0 : static_cast<long>(grid_index));
}

int OperatorMatrix::index_of(std::size_t dual_index, int i, int j) const {
  const int d = dual[dual_index].dim;
  return offsets[dual_index] + i * d + j;
}

OperatorMatrix::BasisIndex OperatorMatrix::basis_of(int row) const {
  auto it = std::upper_bound(offsets.begin(), offsets.end(), row);
  const std::size_t a = static_cast<std::size_t>(it - offsets.begin()) - 1;
  const int d = dual[a].dim;
  const int rel = row - offsets[a];
  return {a, rel / d, rel % d};
}

Symbol build_symbol(const SymbolSpec& spec, const Space& s, double lambda) {
  using Family = SymbolSpec::Family;
  if (spec.family == Family::file) {
    Symbol loaded = load_symbol(spec.path, s);
    if (lambda > loaded.lambda + kWeightTol) {
      throw AliasingError("file symbol is truncated below the requested dual");
    }
    const std::size_t n = dual_prefix_count(s, lambda);
    if (n < loaded.dual.size()) {
      loaded.dual.resize(n);
      loaded.lambda = lambda;
      if (loaded.scalar) {
        loaded.scalar_values.conservativeResize(static_cast<long>(n), Eigen::NoChange);
      } else {
        loaded.matrix_values.resize(n);
      }
    }
    return loaded;
  }

  const std::size_t n_dual = require_dual(s, lambda, "build_symbol");
  const GroupDescriptor& g = s.group();

  switch (spec.family) {
    case Family::multiplier_power: {
      Symbol sym = make_scalar_symbol(s, lambda, n_dual, true);
      const double p = spec.power;
      for (std::size_t a = 0; a < n_dual; ++a) {
        sym.scalar_values(static_cast<long>(a), 0) = std::pow(sym.dual[a].weight, p);
      }
      sym.evaluator = [p](const GroupPoint&, const Irrep& xi) -> ComplexMatrix {
        return std::pow(xi.weight, p) * ComplexMatrix::Identity(xi.dim, xi.dim);
      };
      return sym;
    }
    case Family::laplacian_resolvent: {
      const double c = spec.resolvent_c;
      if (!(c > 0.0)) throw NumericError("laplacian_resolvent requires c > 0");
      Symbol sym = make_scalar_symbol(s, lambda, n_dual, true);
      for (std::size_t a = 0; a < n_dual; ++a) {
        sym.scalar_values(static_cast<long>(a), 0) = 1.0 / (c + sym.dual[a].casimir);
      }
      sym.evaluator = [c](const GroupPoint&, const Irrep& xi) -> ComplexMatrix {
        return (1.0 / (c + xi.casimir)) * ComplexMatrix::Identity(xi.dim, xi.dim);
      };
      return sym;
    }
    case Family::corner_projection: {
      Symbol sym = make_matrix_symbol(s, lambda, n_dual, true);
      for (std::size_t a = 0; a < n_dual; ++a) {
        sym.matrix_values[a][0] = corner_matrix(sym.dual[a].dim);
      }
      sym.evaluator = [](const GroupPoint&, const Irrep& xi) {
        return corner_matrix(xi.dim);
      };
      return sym;
    }
    case Family::multiplication:
    case Family::product:
    case Family::scalar_expr: {
      const bool dual_vars = spec.family == Family::scalar_expr;
      const ExprAst ast = parse_expr(spec.expr, ExprContext::for_group(g, dual_vars));
      const double power = spec.family == Family::product ? spec.power : 0.0;

      const std::size_t p_count = s.n_points();
      Eigen::VectorXcd point_factor;  // a(x_p) when the expr is ξ-free
      if (!ast.uses_dual) {
        point_factor.resize(ast.uses_point ? static_cast<long>(p_count) : 1);
        for (long p = 0; p < point_factor.size(); ++p) {
          EvalEnv env;
          env.x = &s.grid().points[static_cast<std::size_t>(p)];
          point_factor[p] = eval_expr(ast, env);
        }
      }

      Symbol sym = make_scalar_symbol(s, lambda, n_dual, !ast.uses_point);
      for (std::size_t a = 0; a < n_dual; ++a) {
        const Irrep& xi = sym.dual[a];
        const double mult = std::pow(xi.weight, power);
        for (long p = 0; p < sym.scalar_values.cols(); ++p) {
          Complex v;
          if (!ast.uses_dual) {
            v = point_factor[std::min<long>(p, point_factor.size() - 1)];
          } else {
            EvalEnv env;
            env.x = &s.grid().points[static_cast<std::size_t>(p)];
            env.xi = &xi;
            v = eval_expr(ast, env);
          }
          sym.scalar_values(static_cast<long>(a), p) = mult * v;
        }
      }

      if (ast.uses_point) {
        // measure the x-band from the grid samples (max over the dual)
        if (!ast.uses_dual) {
          ComplexMatrix field(p_count, 1);
          for (std::size_t p = 0; p < p_count; ++p) field(static_cast<long>(p), 0) = point_factor[static_cast<long>(p)];
          sym.x_band = measured_x_band(s, field);
        } else {
          ComplexMatrix fields(p_count, n_dual);
          for (std::size_t a = 0; a < n_dual; ++a)
            for (std::size_t p = 0; p < p_count; ++p)
              fields(static_cast<long>(p), static_cast<long>(a)) =
                  sym.scalar_values(static_cast<long>(a), static_cast<long>(p));
          sym.x_band = measured_x_band(s, fields);
        }
      }

      ExprPtr root = ast.root;
      const bool uses_dual = ast.uses_dual;
      sym.evaluator = [root, power, uses_dual](const GroupPoint& x,
                                               const Irrep& xi) -> ComplexMatrix {
        ExprAst local{root, true, uses_dual};
        EvalEnv env;
        env.x = &x;
        env.xi = &xi;
        const double v = eval_expr(local, env) * std::pow(xi.weight, power);
        return v * ComplexMatrix::Identity(xi.dim, xi.dim);
      };
      return sym;
    }
    case Family::file:
      break;
  }
  throw ConfigError("unknown symbol family", "/symbol/family");
}

Symbol build_symbol_from_fn(
    const Space& s, double lambda,
    const std::function<ComplexMatrix(const GroupPoint&, const Irrep&)>& fn,
    int x_band_hint) {
  const std::size_t n_dual = require_dual(s, lambda, "build_symbol_from_fn");
  const std::size_t p_count = s.n_points();

  std::vector<std::vector<ComplexMatrix>> values(n_dual);
  double scale = 0.0;
  for (std::size_t a = 0; a < n_dual; ++a) {
    const Irrep& xi = s.dual()[a];
    values[a].resize(p_count);
    auto& row = values[a];
    parallel_for(p_count, [&](std::size_t p) {
      ComplexMatrix v = fn(s.grid().points[p], xi);
      if (v.rows() != xi.dim || v.cols() != xi.dim) {
        throw DimensionError("symbol function returned a wrong-sized matrix");
      }
      row[p] = std::move(v);
    });
    for (std::size_t p = 0; p < p_count; ++p) {
      require_finite(row[p], "symbol samples");
      scale = std::max(scale, row[p].cwiseAbs().maxCoeff());
    }
  }

  const double tol = 1e-11 * std::max(scale, 1.0);
  FlagScan flags;
  for (std::size_t a = 0; a < n_dual; ++a)
    for (std::size_t p = 0; p < p_count; ++p)
      scan_matrix_flags(values[a][p], values[a][0], tol, flags);

  const std::size_t slots = flags.x_independent ? 1 : p_count;
  Symbol sym = flags.scalar ? make_scalar_symbol(s, lambda, n_dual, flags.x_independent)
                            : make_matrix_symbol(s, lambda, n_dual, flags.x_independent);
  for (std::size_t a = 0; a < n_dual; ++a) {
    for (std::size_t p = 0; p < slots; ++p) {
      if (flags.scalar) {
        const int d = sym.dual[a].dim;
        sym.scalar_values(static_cast<long>(a), static_cast<long>(p)) =
            values[a][p].trace() / static_cast<double>(d);
      } else {
        sym.matrix_values[a][p] = values[a][p];
      }
    }
  }
  sym.x_band = flags.x_independent ? 0 : x_band_hint;
  sym.evaluator = fn;
  return sym;
}

ComplexMatrix symbol_value_at(const Space& s, const Symbol& sigma,
                              const GroupPoint& x, std::size_t dual_index) {
  check_space_symbol(s, sigma);
  SymbolSampler sampler(s, sigma);
  return sampler.at(x, dual_index);
}

ScalarField quantize_apply(const Space& s, const Symbol& sigma, const ScalarField& f) {
  check_space_symbol(s, sigma);
  if (f.values.size() != s.n_points()) {
    throw DimensionError("field length does not match the grid");
  }
  const FourierCoefficients fc = analyze(s, f);

  const int max_deg = sigma.dual.empty() ? 0 : degree(sigma.dual.back());
  const int out_band = sigma.x_band < 0 ? -1 : std::min(max_deg + sigma.x_band, s.max_degree());

  if (sigma.x_independent) {
    FourierCoefficients prod;
    prod.lambda = sigma.lambda;
    prod.dual = sigma.dual;
    prod.coeff.resize(sigma.dual.size());
    for (std::size_t a = 0; a < sigma.dual.size(); ++a) {
      prod.coeff[a] = sigma.value(a, 0) * fc.coeff[a];
    }
    ScalarField out = synthesize(s, prod);
    out.band_degree = out_band;
    return out;
  }

  ScalarField out;
  out.values.resize(s.n_points());
  out.band_degree = out_band;
  const ComplexMatrix& table = s.table();
  parallel_for(s.n_points(), [&](std::size_t p) {
    Complex acc = 0.0;
    for (std::size_t a = 0; a < sigma.dual.size(); ++a) {
      const int d = sigma.dual[a].dim;
      const int base = s.offset(a);
      if (sigma.scalar) {
        Complex tr = 0.0;
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            tr += table(static_cast<long>(p), base + i * d + j) * fc.coeff[a](j, i);
        acc += static_cast<double>(d) * sigma.scalar_value(a, p) * tr;
      } else {
        const ComplexMatrix prod = sigma.matrix_values[a][p] * fc.coeff[a];
        Complex tr = 0.0;
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            tr += table(static_cast<long>(p), base + i * d + j) * prod(j, i);
        acc += static_cast<double>(d) * tr;
      }
    }
    out.values[p] = acc;
  });
  return out;
}

OperatorMatrix assemble_operator_matrix(const Space& s, const Symbol& sigma, double lambda) {
  check_space_symbol(s, sigma);
  if (lambda > sigma.lambda + kWeightTol) {
    throw AliasingError("assembly truncation exceeds the symbol's dual");
  }
  if (sigma.x_band < 0) {
    throw AliasingError("symbol has an unknown x-band; assembly would risk aliasing");
  }
  if (lambda > s.grid().exactness_degree - sigma.x_band + kWeightTol) {
    throw AliasingError("assembly truncation violates the anti-aliasing margin");
  }
  const std::size_t n_dual = require_dual(s, lambda, "assemble_operator_matrix");

  OperatorMatrix om;
  om.lambda = lambda;
  om.dual.assign(s.dual().begin(), s.dual().begin() + static_cast<long>(n_dual));
  om.offsets.resize(n_dual);
  int n = 0;
  for (std::size_t a = 0; a < n_dual; ++a) {
    om.offsets[a] = n;
    n += om.dual[a].dim * om.dual[a].dim;
  }

  if (sigma.x_independent) {
    om.matrix = ComplexMatrix::Zero(n, n);
    for (std::size_t a = 0; a < n_dual; ++a) {
      const int d = om.dual[a].dim;
      const ComplexMatrix v = sigma.value(a, 0);
      for (int i = 0; i < d; ++i) {
        om.matrix.block(om.offsets[a] + i * d, om.offsets[a] + i * d, d, d) = v;
      }
    }
    return om;
  }

  // ⟨T e_col, e_row⟩ by quadrature: B^H·A with
  //   A(p,(ξ,i,j)) = w_p·√d_ξ·(ξ(x_p)σ(x_p,ξ))_{ij},  B(p,(η,k,l)) = √d_η·η(x_p)_{kl}
  const std::size_t p_count = s.n_points();
  const ComplexMatrix& table = s.table();
  ComplexMatrix A(p_count, n), B(p_count, n);
  parallel_for(p_count, [&](std::size_t p) {
    const double w = s.grid().weights[p];
    for (std::size_t a = 0; a < n_dual; ++a) {
      const int d = om.dual[a].dim;
      const double rd = std::sqrt(static_cast<double>(d));
      const int sbase = s.offset(a);
      const int obase = om.offsets[a];
      if (sigma.scalar) {
        const Complex v = sigma.scalar_value(a, p);
        for (int e = 0; e < d * d; ++e) {
          const Complex xi = table(static_cast<long>(p), sbase + e);
          B(static_cast<long>(p), obase + e) = rd * xi;
          A(static_cast<long>(p), obase + e) = w * rd * v * xi;
        }
      } else {
        ComplexMatrix x(d, d);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            x(i, j) = table(static_cast<long>(p), sbase + i * d + j);
        const ComplexMatrix prod = x * sigma.matrix_values[a][p];
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) {
            B(static_cast<long>(p), obase + i * d + j) = rd * x(i, j);
            A(static_cast<long>(p), obase + i * d + j) = w * rd * prod(i, j);
          }
      }
    }
  });
  om.matrix = B.adjoint() * A;
  return om;
}

Eigen::VectorXcd coefficients_to_basis(const OperatorMatrix& m, const FourierCoefficients& c) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(m.size());
  for (std::size_t a = 0; a < m.dual.size(); ++a) {
    const ComplexMatrix* block = nullptr;
    if (a < c.dual.size() && same_label(m.dual[a], c.dual[a])) {
      block = &c.coeff[a];
    } else {
      block = c.find(m.dual[a]);
    }
    if (block == nullptr) continue;
    const int d = m.dual[a].dim;
    const double rd = std::sqrt(static_cast<double>(d));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        v[m.offsets[a] + i * d + j] = rd * (*block)(j, i);
  }
  return v;
}

FourierCoefficients basis_to_coefficients(const OperatorMatrix& m, const Eigen::VectorXcd& v) {
  if (v.size() != m.size()) throw DimensionError("basis vector has wrong length");
  FourierCoefficients c;
  c.lambda = m.lambda;
  c.dual = m.dual;
  c.coeff.resize(m.dual.size());
  for (std::size_t a = 0; a < m.dual.size(); ++a) {
    const int d = m.dual[a].dim;
    const double rd = std::sqrt(static_cast<double>(d));
    c.coeff[a].resize(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) c.coeff[a](j, i) = v[m.offsets[a] + i * d + j] / rd;
  }
  return c;
}

Symbol extract_symbol(const Space& s, double lambda,
                      const std::function<ScalarField(const ScalarField&)>& apply,
                      int x_band_hint) {
  const std::size_t n_dual = require_dual(s, lambda, "extract_symbol");
  const std::size_t p_count = s.n_points();
  const ComplexMatrix& table = s.table();

  std::vector<std::vector<ComplexMatrix>> values(n_dual);
  double scale = 0.0;
  for (std::size_t a = 0; a < n_dual; ++a) {
    const Irrep& xi = s.dual()[a];
    const int d = xi.dim;
    const int base = s.offset(a);
    // (Tξ)(x): the operator applied to each matrix entry of ξ
    ComplexMatrix applied(p_count, d * d);
    for (int e = 0; e < d * d; ++e) {
      ScalarField entry;
      entry.band_degree = degree(xi);
      entry.values.resize(p_count);
      for (std::size_t p = 0; p < p_count; ++p)
        entry.values[p] = table(static_cast<long>(p), base + e);
      ScalarField out = apply(entry);
      if (out.values.size() != p_count) {
        throw DimensionError("operator callback returned a field of wrong length");
      }
      for (std::size_t p = 0; p < p_count; ++p) {
        if (!std::isfinite(out.values[p].real()) || !std::isfinite(out.values[p].imag())) {
          throw NumericError("operator callback returned non-finite values");
        }
        applied(static_cast<long>(p), e) = out.values[p];
      }
    }
    values[a].resize(p_count);
    auto& row = values[a];
    parallel_for(p_count, [&](std::size_t p) {
      ComplexMatrix x(d, d), g(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          x(i, j) = table(static_cast<long>(p), base + i * d + j);
          g(i, j) = applied(static_cast<long>(p), i * d + j);
        }
      row[p] = x.adjoint() * g;
    });
    for (std::size_t p = 0; p < p_count; ++p)
      scale = std::max(scale, row[p].cwiseAbs().maxCoeff());
  }

  const double tol = 1e-11 * std::max(scale, 1.0);
  FlagScan flags;
  for (std::size_t a = 0; a < n_dual; ++a)
    for (std::size_t p = 0; p < p_count; ++p)
      scan_matrix_flags(values[a][p], values[a][0], tol, flags);

  const std::size_t slots = flags.x_independent ? 1 : p_count;
  Symbol sym = flags.scalar ? make_scalar_symbol(s, lambda, n_dual, flags.x_independent)
                            : make_matrix_symbol(s, lambda, n_dual, flags.x_independent);
  for (std::size_t a = 0; a < n_dual; ++a) {
    for (std::size_t p = 0; p < slots; ++p) {
      if (flags.scalar) {
        sym.scalar_values(static_cast<long>(a), static_cast<long>(p)) =
            values[a][p].trace() / static_cast<double>(sym.dual[a].dim);
      } else {
        sym.matrix_values[a][p] = values[a][p];
      }
    }
  }
  sym.x_band = flags.x_independent ? 0 : x_band_hint;
  return sym;
}

ScalarField kernel_R(const Space& s, const Symbol& sigma, std::size_t x_index) {
  check_space_symbol(s, sigma);
  if (x_index >= s.n_points()) throw DimensionError("kernel grid index out of range");
  const Eigen::VectorXcd flat = flat_column(s, sigma, sigma.x_independent ? 0 : x_index);
  const ComplexMatrix field = synthesize_batch(s, flat);
  ScalarField out;
  out.values.assign(field.data(), field.data() + field.rows());
  out.band_degree = sigma.dual.empty() ? 0 : degree(sigma.dual.back());
  return out;
}

Symbol difference_op(const Space& s, const Symbol& sigma, const AdmissibleFunction& q) {
  check_space_symbol(s, sigma);
  const double out_lambda = sigma.lambda - kAdmissibleBand;
  const std::size_t n_out = dual_prefix_count(s, out_lambda);
  if (n_out == 0) {
    throw AliasingError("difference_op: no margin left below the symbol's truncation");
  }
  const ScalarField qf = sample_admissible(s, q);
  const std::size_t p_count = s.n_points();

  bool out_scalar = true;
  for (std::size_t a = 0; a < n_out; ++a) out_scalar &= s.dual()[a].dim == 1;

  const std::size_t slots = sigma.x_independent ? 1 : p_count;
  Symbol out = out_scalar ? make_scalar_symbol(s, out_lambda, n_out, sigma.x_independent)
                          : make_matrix_symbol(s, out_lambda, n_out, sigma.x_independent);
  out.x_band = sigma.x_band;

  // (Δ_qσ)(x,·) = analyze(q·R(x,·)); batched over grid columns in chunks
  const std::size_t chunk_max = std::max<std::size_t>(1, (4u << 20) / p_count);
  for (std::size_t lo = 0; lo < slots; lo += chunk_max) {
    const std::size_t hi = std::min(slots, lo + chunk_max);
    const std::size_t nc = hi - lo;
    ComplexMatrix flat(s.flat_dim(), nc);
    for (std::size_t c = 0; c < nc; ++c) flat.col(static_cast<long>(c)) = flat_column(s, sigma, lo + c);
    ComplexMatrix r = synthesize_batch(s, flat);
    for (std::size_t p = 0; p < p_count; ++p) r.row(static_cast<long>(p)) *= qf.values[p];
    ComplexMatrix coeffs = analyze_batch(s, r);
    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t a = 0; a < n_out; ++a) {
        const int d = out.dual[a].dim;
        const int base = s.offset(a);
        if (out_scalar) {
          out.scalar_values(static_cast<long>(a), static_cast<long>(lo + c)) =
              coeffs(base, static_cast<long>(c));
        } else {
          ComplexMatrix& m = out.matrix_values[a][lo + c];
          m.resize(d, d);
          for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
              m(i, j) = coeffs(base + i * d + j, static_cast<long>(c));
        }
      }
    }
  }
  return out;
}

SeminormReport seminorm_report(const Space& s, const Symbol& sigma,
                               int alpha_max, int beta_max, double rho) {
  check_space_symbol(s, sigma);
  if (alpha_max < 0 || alpha_max > 2 || beta_max < 0 || beta_max > 2) {
    throw DimensionError("seminorm orders above 2 are not supported");
  }
  if (dual_prefix_count(s, sigma.lambda - alpha_max * kAdmissibleBand) == 0) {
    throw AliasingError("seminorm_report: difference margin exhausted");
  }

  const GroupDescriptor& g = s.group();
  const AdmissibleFamily family = admissible_family(g);
  const std::size_t m = family.functions.size();
  const int n_dirs = g.manifold_dim();
  const double h = g.kind == GroupKind::torus ? 1e-4 : 1e-3;
  const std::size_t p_count = s.n_points();

  // multi-index combinations per order (differences commute)
  std::vector<std::vector<std::vector<std::size_t>>> combos(alpha_max + 1);
  combos[0] = {{}};
  if (alpha_max >= 1) {
    for (std::size_t a = 0; a < m; ++a) combos[1].push_back({a});
  }
  if (alpha_max >= 2) {
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a; b < m; ++b) combos[2].push_back({a, b});
  }

  // direction tuples per β order
  std::vector<std::vector<std::vector<int>>> dirsets(beta_max + 1);
  dirsets[0] = {{}};
  if (beta_max >= 1) {
    for (int d = 0; d < n_dirs; ++d) dirsets[1].push_back({d});
  }
  if (beta_max >= 2) {
    for (int d = 0; d < n_dirs; ++d)
      for (int e = d; e < n_dirs; ++e) dirsets[2].push_back({d, e});
  }

  SymbolSampler sampler(s, sigma);
  std::vector<ScalarField> qfields(m);
  for (std::size_t a = 0; a < m; ++a) qfields[a] = sample_admissible(s, family.functions[a]);

  // Δ-chain at an arbitrary point: synthesize the kernel, multiply by q,
  // analyze; the valid prefix shrinks by one band per application.
  const auto delta_at = [&](const GroupPoint& x, const std::vector<std::size_t>& combo,
                            std::size_t& n_valid) -> Eigen::VectorXcd {
    Eigen::VectorXcd flat = sampler.flat_at(x);
    double lam = sigma.lambda;
    n_valid = sigma.dual.size();
    for (std::size_t qi : combo) {
      ComplexMatrix field = synthesize_batch(s, flat);
      for (std::size_t p = 0; p < p_count; ++p)
        field(static_cast<long>(p), 0) *= qfields[qi].values[p];
      const ComplexMatrix coeffs = analyze_batch(s, field);
      lam -= kAdmissibleBand;
      n_valid = dual_prefix_count(s, lam);
      flat.setZero();
      const std::size_t last = n_valid - 1;
      const int valid_len = s.offset(last) + s.dual()[last].dim * s.dual()[last].dim;
      flat.head(valid_len) = coeffs.col(0).head(valid_len);
    }
    return flat;
  };

  SeminormReport rep;
  rep.alpha_max = alpha_max;
  rep.beta_max = beta_max;
  rep.rho = rho;
  rep.C.setZero(alpha_max + 1, beta_max + 1);

  // per-symbol on-grid difference symbols (β = 0 column and FD centers)
  std::vector<std::vector<Symbol>> on_grid(alpha_max + 1);
  on_grid[0].push_back(sigma);
  for (int ord = 1; ord <= alpha_max; ++ord) {
    for (const auto& combo : combos[ord]) {
      Symbol cur = sigma;
      for (std::size_t qi : combo) cur = difference_op(s, cur, family.functions[qi]);
      on_grid[ord].push_back(std::move(cur));
    }
  }

  for (int ord = 0; ord <= alpha_max; ++ord) {
    for (std::size_t ci = 0; ci < combos[ord].size(); ++ci) {
      const Symbol& sym = on_grid[ord][ci];
      const std::size_t slots = sym.grid_slots();
      for (std::size_t a = 0; a < sym.dual.size(); ++a) {
        const double wpow = std::pow(sym.dual[a].weight, ord);
        for (std::size_t p = 0; p < slots; ++p) {
          const double nrm = sym.scalar ? std::abs(sym.scalar_value(a, p))
                                        : op_norm(sym.matrix_values[a][p]);
          rep.C(ord, 0) = std::max(rep.C(ord, 0), nrm * wpow);
          if (ord == 1) {
            rep.sup_dq_rho =
                std::max(rep.sup_dq_rho, nrm * std::pow(sym.dual[a].weight, rho));
          }
        }
      }
    }
  }
  rep.sup_norm = rep.C(0, 0);

  for (int bord = 1; bord <= beta_max; ++bord) {
    for (int ord = 0; ord <= alpha_max; ++ord) {
      for (std::size_t ci = 0; ci < combos[ord].size(); ++ci) {
        const auto& combo = combos[ord][ci];
        const Symbol& center = on_grid[ord][ci];
        for (const auto& dirs : dirsets[bord]) {
          std::vector<double> local(p_count, 0.0);
          parallel_for(p_count, [&](std::size_t p) {
            const GroupPoint& x = s.grid().points[p];
            std::size_t nv = center.dual.size();
            const auto shifted = [&](double t0, double t1) {
              GroupPoint y = mul(x, exp_direction(g, dirs[0], t0));
              if (bord == 2) y = mul(y, exp_direction(g, dirs[1], t1));
              return delta_at(y, combo, nv);
            };
            std::vector<Eigen::VectorXcd> stencil;
            if (bord == 1) {
              stencil.push_back(shifted(h, 0));
              stencil.push_back(shifted(-h, 0));
            } else if (dirs[0] == dirs[1]) {
              stencil.push_back(shifted(h, 0));
              stencil.push_back(shifted(-h, 0));
            } else {
              stencil.push_back(shifted(h, h));
              stencil.push_back(shifted(h, -h));
              stencil.push_back(shifted(-h, h));
              stencil.push_back(shifted(-h, -h));
            }
            double best = 0.0;
            for (std::size_t a = 0; a < nv; ++a) {
              const int d = center.dual[a].dim;
              const int base = s.offset(a);
              ComplexMatrix fd(d, d);
              for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                  const int e = base + i * d + j;
                  Complex v;
                  if (bord == 1) {
                    v = (stencil[0][e] - stencil[1][e]) / (2 * h);
                  } else if (dirs[0] == dirs[1]) {
                    const Complex c0 = center.value(a, p)(i, j);
                    v = (stencil[0][e] - 2.0 * c0 + stencil[1][e]) / (h * h);
                  } else {
                    v = (stencil[0][e] - stencil[1][e] - stencil[2][e] + stencil[3][e]) /
                        (4 * h * h);
                  }
                  fd(i, j) = v;
                }
              best = std::max(best, op_norm(fd) * std::pow(center.dual[a].weight, ord));
            }
            local[p] = best;
          });
          double combined = 0.0;
          for (double v : local) combined = std::max(combined, v);
          rep.C(ord, bord) = std::max(rep.C(ord, bord), combined);
          if (ord == 0 && bord == 1) rep.sup_dx = std::max(rep.sup_dx, combined);
        }
      }
    }
  }
  return rep;
}

EllipticityResult ellipticity_check(const Space& s, const Symbol& sigma,
                                    double c_threshold, double r_min) {
  check_space_symbol(s, sigma);
  EllipticityResult res;
  res.c_threshold = c_threshold;
  res.r_min = r_min;

  double min_smin = std::numeric_limits<double>::infinity();
  bool any = false;
  const std::size_t slots = sigma.grid_slots();
  for (std::size_t a = 0; a < sigma.dual.size(); ++a) {
    if (sigma.dual[a].weight < r_min - kWeightTol) continue;
    for (std::size_t p = 0; p < slots; ++p) {
      double smin;
      if (sigma.scalar) {
        smin = std::abs(sigma.scalar_value(a, p));
      } else {
        const RealVector sv = singular_values(sigma.matrix_values[a][p]);
        smin = sv[sv.size() - 1];
      }
      if (!any || smin < min_smin) {
        min_smin = smin;
        res.witness_dual = a;
        res.witness_grid = p;
        any = true;
      }
    }
  }
  if (!any) {
    // nothing above the cutoff: vacuously elliptic
    res.elliptic = true;
    res.bound = 0.0;
    return res;
  }
  if (min_smin <= kSingularTol) {
    res.singular = true;
    res.elliptic = false;
    res.bound = std::numeric_limits<double>::infinity();
    return res;
  }
  res.bound = 1.0 / min_smin;
  res.elliptic = res.bound <= c_threshold;
  return res;
}

namespace {

void write_bytes(std::ofstream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void write_f64(std::ofstream& out, double v) { write_bytes(out, &v, 8); }

json group_to_json(const GroupDescriptor& g) {
  json j;
  if (g.kind == GroupKind::torus) {
    j["kind"] = "torus";
    j["torus_dim"] = g.torus_dim;
    j["torus_points"] = g.torus_points;
  } else {
    j["kind"] = "su2";
    j["su2_grid"] = {g.su2_alpha, g.su2_beta, g.su2_gamma};
  }
  return j;
}

}  // namespace

void save_symbol(const std::string& path, const Space& s, const Symbol& sigma) {
  check_space_symbol(s, sigma);
  json header;
  header["group"] = group_to_json(s.group());
  header["lambda"] = sigma.lambda;
  header["ordering"] = "dual-major then grid-index";
  header["flags"] = {{"x_independent", sigma.x_independent},
                     {"scalar", sigma.scalar},
                     {"x_band", sigma.x_band}};
  header["grid_slots"] = sigma.grid_slots();
  json dual = json::array();
  for (const Irrep& xi : sigma.dual) {
    dual.push_back({{"label", xi.label_string()}, {"dim", xi.dim}});
  }
  header["dual"] = dual;
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  write_bytes(out, "NCSYM1\0\0", 8);
  const std::uint64_t len = text.size();
  write_bytes(out, &len, 8);
  write_bytes(out, text.data(), text.size());
  const std::size_t slots = sigma.grid_slots();
  for (std::size_t a = 0; a < sigma.dual.size(); ++a) {
    for (std::size_t p = 0; p < slots; ++p) {
      const ComplexMatrix v = sigma.value(a, p);
      const int d = sigma.dual[a].dim;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          write_f64(out, v(i, j).real());
          write_f64(out, v(i, j).imag());
        }
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

Symbol load_symbol(const std::string& path, const Space& s) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "NCSYM1\0\0", 8) != 0) {
    throw IoError("not an NCSYM1 container: " + path);
  }
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), 8);
  if (!in || len > (64u << 20)) throw IoError("corrupt NCSYM1 header length");
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw IoError("truncated NCSYM1 header");
  json header;
  try {
    header = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("bad NCSYM1 header JSON: ") + e.what());
  }

  try {
    const json& jg = header.at("group");
    const GroupDescriptor& g = s.group();
    const std::string kind = jg.at("kind").get<std::string>();
    const bool group_ok =
        (kind == "torus" && g.kind == GroupKind::torus &&
         jg.at("torus_dim").get<int>() == g.torus_dim &&
         jg.at("torus_points").get<int>() == g.torus_points) ||
        (kind == "su2" && g.kind == GroupKind::su2 &&
         jg.at("su2_grid") == json({g.su2_alpha, g.su2_beta, g.su2_gamma}));
    if (!group_ok) {
      throw GroupMismatchError("NCSYM1 container was written for a different group/grid");
    }

    const double lambda = header.at("lambda").get<double>();
    const json& dual = header.at("dual");
    if (dual.size() > s.dual().size()) {
      throw IoError("NCSYM1 dual exceeds the target space's dual");
    }
    for (std::size_t a = 0; a < dual.size(); ++a) {
      if (dual[a].at("label").get<std::string>() != s.dual()[a].label_string() ||
          dual[a].at("dim").get<int>() != s.dual()[a].dim) {
        throw IoError("NCSYM1 dual ordering does not match the target space");
      }
    }
    const json& flags = header.at("flags");
    const bool x_independent = flags.at("x_independent").get<bool>();
    const bool scalar = flags.at("scalar").get<bool>();
    const int x_band = flags.at("x_band").get<int>();
    const std::size_t slots = header.at("grid_slots").get<std::size_t>();
    if (slots != (x_independent ? 1 : s.n_points())) {
      throw IoError("NCSYM1 grid_slots does not match the target grid");
    }
    if (header.at("ordering").get<std::string>() != "dual-major then grid-index") {
      throw IoError("NCSYM1 declares an unsupported data ordering");
    }

    Symbol sym = scalar ? make_scalar_symbol(s, lambda, dual.size(), x_independent)
                        : make_matrix_symbol(s, lambda, dual.size(), x_independent);
    sym.x_band = x_band;
    for (std::size_t a = 0; a < dual.size(); ++a) {
      const int d = sym.dual[a].dim;
      for (std::size_t p = 0; p < slots; ++p) {
        ComplexMatrix v(d, d);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) {
            double re, im;
            in.read(reinterpret_cast<char*>(&re), 8);
            in.read(reinterpret_cast<char*>(&im), 8);
            if (!in) throw IoError("truncated NCSYM1 matrix data");
            v(i, j) = Complex(re, im);
          }
        if (scalar) {
          const Complex diag = v(0, 0);
          ComplexMatrix dev = v;
          dev.diagonal().array() -= diag;
          if (dev.cwiseAbs().maxCoeff() != 0.0) {
            throw IoError("NCSYM1 scalar flag contradicts the stored matrices");
          }
          sym.scalar_values(static_cast<long>(a), static_cast<long>(p)) = diag;
        } else {
          sym.matrix_values[a][p] = std::move(v);
        }
      }
    }
    return sym;
  } catch (const json::exception& e) {
    throw IoError(std::string("bad NCSYM1 header field: ") + e.what());
  }
}

}  // namespace ncsg
