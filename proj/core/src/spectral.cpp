#include "ncsg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ncsg/errors.hpp"
#include "ncsg/expr.hpp"
#include "ncsg/linalg.hpp"
#include "ncsg/parallel.hpp"

namespace ncsg {

const char* const kFiniteSectionCaveat =
    "finite-section caveat: every finite-dimensional operator is compact; "
    "the lower bound manifests only as the fixed-k singular-value floor "
    "s_{k+1}(T_L) as the truncation L grows";

namespace {

constexpr double kSingularFloor = 1e-12;

/// smallest/largest singular values of σ(x,ξ) for one (dual, grid) slot.
void slot_extremes(const Symbol& sigma, std::size_t a, std::size_t p,
                   double& s_lo, double& s_hi) {
  if (sigma.scalar) {
    s_lo = s_hi = std::abs(sigma.scalar_value(a, p));
    return;
  }
  const RealVector sv = singular_values(sigma.value(a, p));
  s_hi = sv.size() ? sv(0) : 0.0;
  s_lo = sv.size() ? sv(sv.size() - 1) : 0.0;
}

double slope_of_rows(const std::vector<double>& w, const std::vector<double>& v) {
  const double n = static_cast<double>(w.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double x = std::log(w[i]), y = std::log(v[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void require_increasing(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) throw DimensionError(std::string(what) + " must be strictly increasing");
  }
}

/// u(y) = Σ_ξ d_ξ Tr(ξ(y)û(ξ)) — exact off-grid evaluation of a
/// band-limited function.
Complex eval_at(const FourierCoefficients& c, const GroupPoint& y) {
  Complex v = 0.0;
  for (std::size_t a = 0; a < c.dual.size(); ++a) {
    if (c.coeff[a].cwiseAbs().maxCoeff() == 0.0) continue;
    v += static_cast<double>(c.dual[a].dim) *
         (evaluate_irrep(c.dual[a], y) * c.coeff[a]).trace();
  }
  return v;
}

int coeff_band(const FourierCoefficients& c, double scale) {
  int band = 0;
  for (std::size_t a = 0; a < c.dual.size(); ++a) {
    if (c.coeff[a].cwiseAbs().maxCoeff() > 1e-13 * scale)
      band = std::max(band, degree(c.dual[a]));
  }
  return band;
}

/// index of σ's dual entry matching ξ (σ's dual is a prefix of the space's).
std::size_t sigma_index_of(const Symbol& sigma, const Irrep& xi) {
  for (std::size_t a = 0; a < sigma.dual.size(); ++a) {
    if (same_label(sigma.dual[a], xi)) return a;
  }
  throw AliasingError("irrep exceeds the symbol truncation");
}

/// T_σ (or T_σ−K) applied entrywise to a matrix field.
MatrixField apply_entrywise(const Space& s, const Symbol& sigma,
                            const MatrixField& w, const OperatorMatrix* K) {
  const int d = w.dim;
  MatrixField out;
  out.dim = d;
  out.band_degree = -1;
  out.values.assign(w.values.size(), ComplexMatrix::Zero(d, d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      ScalarField f;
      f.band_degree = w.band_degree;
      f.values.resize(w.values.size());
      for (std::size_t p = 0; p < w.values.size(); ++p) f.values[p] = w.values[p](i, j);
      ScalarField tf = quantize_apply(s, sigma, f);
      if (K != nullptr) {
        const FourierCoefficients c = analyze(s, f);
        const Eigen::VectorXcd kv = K->matrix * coefficients_to_basis(*K, c);
        const ScalarField kf = synthesize(s, basis_to_coefficients(*K, kv));
        for (std::size_t p = 0; p < tf.values.size(); ++p) tf.values[p] -= kf.values[p];
      }
      for (std::size_t p = 0; p < tf.values.size(); ++p) out.values[p](i, j) = tf.values[p];
    }
  }
  return out;
}

/// first basis row whose irrep weight is ≥ bound (rows are weight-ascending).
int first_row_at_weight(const OperatorMatrix& om, double bound) {
  for (std::size_t a = 0; a < om.dual.size(); ++a) {
    if (om.dual[a].weight >= bound) return om.offsets[a];
  }
  return om.size();
}

/// basis rows with irrep weight ≤ bound form the leading principal block.
int prefix_rows_at_weight(const OperatorMatrix& om, double bound) {
  int n = 0;
  for (std::size_t a = 0; a < om.dual.size(); ++a) {
    if (om.dual[a].weight > bound + 1e-12) break;
    n = om.offsets[a] + om.dual[a].dim * om.dual[a].dim;
  }
  return n;
}

/// Quadrature margins for the witness diagnostics: the entrywise transforms
/// and the L² quadrature of u_{ξn}σ − T_σu_{ξn} must all stay exact.
void check_witness_margins(const Space& s, const Symbol& sigma,
                           const Irrep& xi_n, int u_band) {
  const int band_w = degree(xi_n) + u_band;
  const int xb = std::max(sigma.x_band, 0);
  const int single = s.grid().single_degree_limit;
  if (band_w + s.max_degree() > single || 2 * (band_w + xb) > single) {
    throw AliasingError("witness band exceeds the quadrature margin for this irrep");
  }
}

}  // namespace

ShellProfile shell_profile(const Space& s, const Symbol& sigma) {
  check_symbol_space(s, sigma);
  ShellProfile out;
  out.entries.resize(sigma.dual.size());
  parallel_for(sigma.dual.size(), [&](std::size_t a) {
    ShellProfile::Entry e;
    e.xi = sigma.dual[a];
    const std::size_t slots = sigma.grid_slots();
    for (std::size_t p = 0; p < slots; ++p) {
      double lo = 0, hi = 0;
      slot_extremes(sigma, a, p, lo, hi);
      const double ratio = hi <= kSingularFloor ? 0.0 : lo * lo / hi;
      if (ratio > e.s_min) {
        e.s_min = ratio;
        e.x_argmax = p;
      }
      e.s_max = std::max(e.s_max, hi);
    }
    out.entries[a] = e;
  });
  return out;
}

SpectralReport dmin_dmax(const Space& s, const Symbol& sigma,
                         const std::vector<double>& shells) {
  require_increasing(shells, "shells");
  if (shells.size() < 3) throw DimensionError("need at least two shells");
  std::size_t below = 0;
  for (std::size_t i = 0; i + 1 < shells.size(); ++i) {
    if (shells[i] < sigma.lambda) ++below;
  }
  if (below < 2) throw DimensionError("need at least two shells below the truncation");

  const ShellProfile prof = shell_profile(s, sigma);
  SpectralReport rep;
  rep.caveat = kFiniteSectionCaveat;
  for (std::size_t i = 0; i + 1 < shells.size(); ++i) {
    ShellRow row;
    row.lo = shells[i];
    row.hi = shells[i + 1];
    for (const ShellProfile::Entry& e : prof.entries) {
      if (e.xi.weight < row.lo || e.xi.weight >= row.hi) continue;
      row.d_min = std::max(row.d_min, e.s_min);
      row.d_max = std::max(row.d_max, e.s_max);
      ++row.count;
    }
    row.empty = row.count == 0;
    rep.rows.push_back(row);
  }
  for (const ShellRow& row : rep.rows) {
    if (row.empty) continue;
    rep.d_min_estimate = row.d_min;
    rep.d_max_estimate = row.d_max;
  }
  rep.ess_disc_radius = rep.d_max_estimate;
  return rep;
}

WitnessField witness(const Space& s, const WitnessProfile& profile,
                     const Irrep& xi_n, const GroupPoint& x_xin) {
  WitnessField w;
  w.xi_n = xi_n;
  w.x_xin = x_xin;

  ScalarField u;
  if (!profile.expr.empty()) {
    const ExprAst ast = parse_expr(profile.expr, ExprContext::for_group(s.group(), false));
    u = sample(s, [&](const GroupPoint& x) {
      EvalEnv env;
      env.x = &x;
      return eval_expr(ast, env);
    }, -1);
  } else {
    if (profile.band < 1.0) throw NumericError("witness band keeps no irrep");
    double r = profile.radius;
    if (r <= 0.0) r = s.group().kind == GroupKind::torus ? std::numbers::pi / 4.0
                                          : std::numbers::pi / 3.0;
    u = sample(s, [&](const GroupPoint& x) {
      const double h = geodesic_h(x);
      if (h >= r) return Complex(0.0);
      const double t = 1.0 - (h / r) * (h / r);
      return Complex(t * t);
    }, -1);
  }

  // project onto the band (Fejér-damped for the bump) and normalize
  FourierCoefficients c = analyze(s, u);
  const bool bump = profile.expr.empty();
  for (std::size_t a = 0; a < c.dual.size(); ++a) {
    if (bump) {
      const double f = 1.0 - c.dual[a].weight / (profile.band + 1.0);
      c.coeff[a] *= std::max(f, 0.0);
    }
  }
  ScalarField projected = synthesize(s, c);
  const double n = field_l2(s, projected);
  if (n <= 1e-14) throw NumericError("witness profile vanishes");
  for (Complex& v : projected.values) v /= n;
  for (ComplexMatrix& m : c.coeff) m /= n;
  projected.band_degree = coeff_band(c, 1.0);

  w.base = projected;
  w.base_hat = c;
  w.norm_u = field_l2(s, w.base);

  const GroupPoint shift = inv(x_xin);
  const double scale = 1.0 / std::sqrt(static_cast<double>(xi_n.dim));
  w.field.dim = xi_n.dim;
  w.field.band_degree = degree(xi_n) + projected.band_degree;
  w.field.values.assign(s.n_points(), ComplexMatrix());
  parallel_for(s.n_points(), [&](std::size_t p) {
    const GroupPoint& x = s.grid().points[p];
    const Complex uv = eval_at(c, mul(x, shift));
    w.field.values[p] = (scale * uv) * evaluate_irrep(xi_n, x);
  });

  w.norm_field = matrix_field_l2(s, w.field);
  w.norm_error = std::abs(w.norm_field - w.norm_u);
  return w;
}

LemmaDecayReport lemma_decay_check(const Space& s, const Symbol& sigma,
                                   const WitnessProfile& profile,
                                   const std::vector<std::size_t>& dual_indices) {
  if (dual_indices.empty()) throw DimensionError("empty irrep sequence");
  for (std::size_t i = 0; i < dual_indices.size(); ++i) {
    if (dual_indices[i] >= s.dual().size()) throw DimensionError("irrep index out of range");
    if (i > 0 && !(s.dual()[dual_indices[i]].weight > s.dual()[dual_indices[i - 1]].weight))
      throw DimensionError("irrep sequence must increase in weight");
  }

  const ShellProfile prof = shell_profile(s, sigma);
  LemmaDecayReport rep;
  rep.caveat = kFiniteSectionCaveat;
  double scale = 0.0;
  for (std::size_t idx : dual_indices) {
    const Irrep& xi = s.dual()[idx];
    const std::size_t sa = sigma_index_of(sigma, xi);

    WitnessField w = witness(s, profile, xi, s.grid().points[prof.entries[sa].x_argmax]);
    check_witness_margins(s, sigma, xi, w.base.band_degree);

    const MatrixField tw = apply_entrywise(s, sigma, w.field, nullptr);
    MatrixField diff;
    diff.dim = w.field.dim;
    diff.values.resize(s.n_points());
    MatrixField prod = diff;
    for (std::size_t p = 0; p < s.n_points(); ++p) {
      const std::size_t slot = sigma.x_independent ? 0 : p;
      const ComplexMatrix sv = sigma.value(sa, slot);
      prod.values[p] = w.field.values[p] * sv;
      diff.values[p] = prod.values[p] - tw.values[p];
    }

    LemmaDecayRow row;
    row.xi = xi;
    row.product_l2 = matrix_field_l2(s, prod);
    row.difference_l2 = matrix_field_l2(s, diff);
    scale = std::max({scale, row.product_l2, 1.0});
    rep.rows.push_back(row);
  }

  std::vector<double> ws, vs;
  for (const LemmaDecayRow& row : rep.rows) {
    if (row.difference_l2 > 1e-12 * scale) {
      ws.push_back(row.xi.weight);
      vs.push_back(row.difference_l2);
    }
  }
  if (ws.size() < 2) {
    rep.negligible = true;
    rep.slope = 0.0;
  } else {
    rep.slope = slope_of_rows(ws, vs);
  }
  return rep;
}

GohbergReport gohberg_check(const Space& s, const Symbol& sigma,
                            const std::vector<double>& lambda_list, int k_fixed,
                            const std::vector<double>& shells,
                            const WitnessProfile& profile,
                            const std::vector<std::size_t>& witness_indices,
                            const OperatorMatrix* K) {
  if (lambda_list.empty()) throw DimensionError("empty truncation list");
  require_increasing(lambda_list, "truncation list");
  if (k_fixed < 0) throw DimensionError("k_fixed must be nonnegative");

  GohbergReport rep;
  rep.caveat = kFiniteSectionCaveat;
  rep.k_fixed = k_fixed;
  rep.lambdas = lambda_list;
  rep.d_min_estimate = dmin_dmax(s, sigma, shells).d_min_estimate;

  const OperatorMatrix om = assemble_operator_matrix(s, sigma, lambda_list.back());
  if (K != nullptr) {
    if (K->size() != om.size()) throw DimensionError("K basis does not match the assembled section");
    for (std::size_t a = 0; a < om.dual.size(); ++a) {
      if (!same_label(K->dual[a], om.dual[a]))
        throw DimensionError("K basis does not match the assembled section");
    }
  }

  for (double lam : lambda_list) {
    const int n = prefix_rows_at_weight(om, lam);
    if (n == 0) throw AliasingError("empty section at the smallest truncation");
    ComplexMatrix block = om.matrix.topLeftCorner(n, n);
    if (K != nullptr) block -= K->matrix.topLeftCorner(n, n);
    const RealVector sv = singular_values(block);
    rep.s_k1.push_back(k_fixed < static_cast<int>(sv.size()) ? sv(k_fixed) : 0.0);
  }

  rep.vacuous = rep.d_min_estimate <= kSingularFloor;
  rep.floor_ok =
      rep.vacuous || rep.s_k1.back() >= rep.d_min_estimate * (1.0 - rep.floor_tol);

  {
    ComplexMatrix full = om.matrix;
    if (K != nullptr) full -= K->matrix;
    rep.upper_norm = op_norm(full);
  }

  const ShellProfile prof = shell_profile(s, sigma);
  for (std::size_t idx : witness_indices) {
    if (idx >= s.dual().size()) throw DimensionError("irrep index out of range");
    const Irrep& xi = s.dual()[idx];
    const std::size_t sa = sigma_index_of(sigma, xi);
    WitnessField w = witness(s, profile, xi, s.grid().points[prof.entries[sa].x_argmax]);
    check_witness_margins(s, sigma, xi, w.base.band_degree);
    const MatrixField res = apply_entrywise(s, sigma, w.field, K);
    LemmaDecayRow row;
    row.xi = xi;
    row.difference_l2 = matrix_field_l2(s, res) / w.norm_u;
    row.product_l2 = w.norm_field;
    rep.witness_rows.push_back(row);
    rep.witness_best = std::max(rep.witness_best, row.difference_l2);
  }
  return rep;
}

CompactnessReport compactness_diagnostic(const Space& s, const Symbol& sigma,
                                         double lambda,
                                         const std::vector<double>& r_list,
                                         const std::vector<double>& shells,
                                         double tol) {
  if (r_list.empty()) throw DimensionError("empty shell-radius list");
  require_increasing(r_list, "shell radii");
  if (r_list.back() >= lambda) throw DimensionError("shell radii must stay below the truncation");

  CompactnessReport rep;
  rep.caveat = kFiniteSectionCaveat;
  rep.tol = tol;
  rep.r_list = r_list;
  rep.d_max_estimate = dmin_dmax(s, sigma, shells).d_max_estimate;

  const OperatorMatrix om = assemble_operator_matrix(s, sigma, lambda);
  const RealVector sv = singular_values(om.matrix);
  rep.singular_values.assign(sv.data(), sv.data() + sv.size());

  for (double r : r_list) {
    const int r0 = first_row_at_weight(om, r);
    const int n = om.size() - r0;
    rep.tail_norms.push_back(n <= 0 ? 0.0 : op_norm(om.matrix.bottomRightCorner(n, n)));
  }

  bool decreasing = true;
  for (std::size_t i = 1; i < rep.tail_norms.size(); ++i) {
    if (rep.tail_norms[i] > rep.tail_norms[i - 1] * 1.05 + kSingularFloor) decreasing = false;
  }
  rep.compact_consistent =
      rep.d_max_estimate <= tol && decreasing && rep.tail_norms.back() <= tol;
  rep.verdict = rep.compact_consistent ? "compact-consistent" : "not compact";
  return rep;
}

ResolventReport resolvent_bound(const Space& s, const Symbol& sigma,
                                Complex lambda_shift, double r_min) {
  check_symbol_space(s, sigma);
  ResolventReport rep;
  rep.lambda_shift = lambda_shift;
  rep.r_min = r_min;
  rep.min_singular = std::numeric_limits<double>::infinity();

  for (std::size_t a = 0; a < sigma.dual.size(); ++a) {
    if (sigma.dual[a].weight < r_min) continue;
    const int d = sigma.dual[a].dim;
    for (std::size_t p = 0; p < sigma.grid_slots(); ++p) {
      double smin;
      if (sigma.scalar) {
        smin = std::abs(sigma.scalar_value(a, p) - lambda_shift);
      } else {
        const ComplexMatrix shifted =
            sigma.value(a, p) - lambda_shift * ComplexMatrix::Identity(d, d);
        const RealVector sv = singular_values(shifted);
        smin = sv(sv.size() - 1);
      }
      rep.min_singular = std::min(rep.min_singular, smin);
    }
  }

  if (std::isinf(rep.min_singular)) {  // vacuous region
    rep.ok = true;
    rep.sup_inverse_norm = 0.0;
    return rep;
  }
  rep.ok = rep.min_singular >= kSingularFloor;
  rep.sup_inverse_norm = rep.ok ? 1.0 / rep.min_singular
                                : std::numeric_limits<double>::infinity();
  return rep;
}

NormalityReport essential_normality_check(const Space& s, const Symbol& sigma,
                                          double lambda,
                                          const std::vector<double>& r_list,
                                          double interior_cap) {
  if (r_list.empty()) throw DimensionError("empty shell-radius list");
  require_increasing(r_list, "shell radii");
  if (interior_cap <= r_list.back())
    throw DimensionError("interior cap must exceed the largest shell radius");

  NormalityReport rep;
  rep.caveat = kFiniteSectionCaveat;
  rep.r_list = r_list;

  const OperatorMatrix om = assemble_operator_matrix(s, sigma, lambda);
  const ComplexMatrix& t = om.matrix;
  const ComplexMatrix c = t * t.adjoint() - t.adjoint() * t;
  rep.operator_norm = op_norm(t);
  rep.commutator_norm = op_norm(c);

  const double scale = std::max(1.0, rep.operator_norm * rep.operator_norm);
  rep.negligible = rep.commutator_norm <= 1e-10 * scale;

  const int cap = prefix_rows_at_weight(om, interior_cap);
  for (double r : r_list) {
    const int r0 = first_row_at_weight(om, r);
    const int n = cap - r0;
    rep.tail_norms.push_back(n <= 0 ? 0.0 : op_norm(c.block(r0, r0, n, n)));
  }

  std::vector<double> ws, vs;
  for (std::size_t i = 0; i < r_list.size(); ++i) {
    if (rep.tail_norms[i] > 1e-12 * scale) {
      ws.push_back(r_list[i]);
      vs.push_back(rep.tail_norms[i]);
    }
  }
  if (ws.size() < 2) {
    rep.negligible = true;
    rep.slope = 0.0;
  } else {
    rep.slope = slope_of_rows(ws, vs);
  }
  return rep;
}

}  // namespace ncsg
