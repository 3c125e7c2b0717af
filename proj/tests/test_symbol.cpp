#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "ncsg/errors.hpp"
#include "ncsg/symbol.hpp"

using namespace ncsg;

namespace {

Space& torus_space_32() {
  static Space s(GroupDescriptor::torus(1, 32), 16.0);
  return s;
}

Space& su2_space_8() {
  static Space s(GroupDescriptor::su2(8, 8, 8), std::sqrt(4.75));
  return s;
}

std::size_t dual_index_of_k(const Space& s, int k) {
  for (std::size_t a = 0; a < s.dual().size(); ++a) {
    if (s.dual()[a].k == std::vector<int>{k}) return a;
  }
  FAIL("k not in dual");
  return 0;
}

std::size_t dual_index_of_two_ell(const Space& s, int two_ell) {
  for (std::size_t a = 0; a < s.dual().size(); ++a) {
    if (s.dual()[a].two_ell == two_ell) return a;
  }
  FAIL("two_ell not in dual");
  return 0;
}

FourierCoefficients random_coefficients(const Space& s, double lambda, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FourierCoefficients c;
  c.lambda = lambda;
  for (const Irrep& xi : s.dual()) {
    if (xi.weight > lambda + 1e-12) break;
    c.dual.push_back(xi);
    ComplexMatrix m(xi.dim, xi.dim);
    for (int i = 0; i < xi.dim; ++i)
      for (int j = 0; j < xi.dim; ++j) m(i, j) = Complex(u(rng), u(rng));
    c.coeff.push_back(m);
  }
  return c;
}

double field_sup_distance(const ScalarField& a, const ScalarField& b) {
  REQUIRE(a.values.size() == b.values.size());
  double d = 0;
  for (std::size_t p = 0; p < a.values.size(); ++p)
    d = std::max(d, std::abs(a.values[p] - b.values[p]));
  return d;
}

Complex field_at_point(const FourierCoefficients& c, const GroupPoint& y) {
  Complex v = 0.0;
  for (std::size_t a = 0; a < c.dual.size(); ++a) {
    v += static_cast<double>(c.dual[a].dim) *
         (evaluate_irrep(c.dual[a], y) * c.coeff[a]).trace();
  }
  return v;
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

SymbolSpec spec_multiplier(double s) {
  SymbolSpec sp;
  sp.family = SymbolSpec::Family::multiplier_power;
  sp.power = s;
  return sp;
}

SymbolSpec spec_expr(SymbolSpec::Family f, const std::string& e, double power = 0.0) {
  SymbolSpec sp;
  sp.family = f;
  sp.expr = e;
  sp.power = power;
  return sp;
}

}  // namespace

TEST_CASE("build_symbol families and flags") {
  const Space& st = torus_space_32();
  const Space& ss = su2_space_8();

  Symbol ident = build_symbol(spec_multiplier(0.0), st, st.lambda());
  CHECK(ident.x_independent);
  CHECK(ident.scalar);
  CHECK(ident.x_band == 0);
  for (std::size_t a = 0; a < ident.dual.size(); ++a) {
    CHECK(std::abs(ident.scalar_value(a, 0) - 1.0) <= 1e-15);
  }

  Symbol inv = build_symbol(spec_multiplier(-1.0), st, st.lambda());
  const std::size_t k3 = dual_index_of_k(st, 3);
  CHECK(std::abs(inv.scalar_value(k3, 0) - std::pow(10.0, -0.5)) <= 1e-15);

  Symbol corner = build_symbol({SymbolSpec::Family::corner_projection}, ss, ss.lambda());
  CHECK(corner.x_independent);
  CHECK_FALSE(corner.scalar);
  const std::size_t t3 = dual_index_of_two_ell(ss, 3);
  ComplexMatrix e11 = corner.value(t3, 0);
  CHECK((e11 - ComplexMatrix::Identity(4, 4).col(0) * ComplexMatrix::Identity(4, 4).row(0)).cwiseAbs().maxCoeff() <= 1e-15);
  // two_ell=2 (spin 1): diag(1,0,0)
  const std::size_t t1 = dual_index_of_two_ell(ss, 2);
  ComplexMatrix d3 = corner.value(t1, 0);
  CHECK(std::abs(d3(0, 0) - 1.0) <= 1e-15);
  CHECK(d3.cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-15));

  SymbolSpec res;
  res.family = SymbolSpec::Family::laplacian_resolvent;
  res.resolvent_c = 1.0;
  Symbol r = build_symbol(res, ss, ss.lambda());
  CHECK(std::abs(r.scalar_value(t1, 0) - Complex(1.0 / 3.0)) <= 1e-15);
  res.resolvent_c = -1.0;
  CHECK_THROWS_AS(build_symbol(res, ss, ss.lambda()), NumericError);

  Symbol mult = build_symbol(
      spec_expr(SymbolSpec::Family::multiplication, "2+cos(x1)"), st, st.lambda());
  CHECK_FALSE(mult.x_independent);
  CHECK(mult.scalar);
  CHECK(mult.x_band == 1);
  for (std::size_t p = 0; p < st.n_points(); ++p) {
    const double a = 2.0 + std::cos(st.grid().points[p].angles[0]);
    CHECK(std::abs(mult.scalar_value(0, p) - Complex(a)) <= 1e-14);
  }

  // division by zero at the grid point x=0
  CHECK_THROWS_AS(build_symbol(spec_expr(SymbolSpec::Family::multiplication, "1/x1"),
                               st, st.lambda()),
                  NumericError);

  Symbol se = build_symbol(spec_expr(SymbolSpec::Family::scalar_expr, "k1/xi_weight"),
                           st, st.lambda());
  CHECK(se.x_independent);
  CHECK(std::abs(se.scalar_value(k3, 0) - Complex(3.0 / std::sqrt(10.0))) <= 1e-15);

  Symbol prod = build_symbol(
      spec_expr(SymbolSpec::Family::product, "2+cos(x1)", -1.0), st, st.lambda());
  CHECK(prod.x_band == 1);
  CHECK(prod.scalar);
  const double a7 = 2.0 + std::cos(st.grid().points[7].angles[0]);
  CHECK(std::abs(prod.scalar_value(k3, 7) - Complex(a7 / std::sqrt(10.0))) <= 1e-14);
}

TEST_CASE("quantize_apply: identity, multipliers, multiplication") {
  const Space& st = torus_space_32();

  Symbol ident = build_symbol(spec_multiplier(0.0), st, st.lambda());
  FourierCoefficients fc = random_coefficients(st, st.lambda(), 101);
  ScalarField f = synthesize(st, fc);
  ScalarField tf = quantize_apply(st, ident, f);
  CHECK(field_sup_distance(tf, f) <= 1e-10);

  // sigma(k) = -k^2 acting on e^{i3x}
  Symbol lap = build_symbol(spec_expr(SymbolSpec::Family::scalar_expr, "-xi_lambda2"),
                            st, st.lambda());
  ScalarField e3 = sample(st, [](const GroupPoint& x) {
    return std::polar(1.0, 3.0 * x.angles[0]);
  }, 3);
  ScalarField te3 = quantize_apply(st, lap, e3);
  for (std::size_t p = 0; p < st.n_points(); ++p) {
    CHECK(std::abs(te3.values[p] - (-9.0) * e3.values[p]) <= 1e-12);
  }

  Symbol mult = build_symbol(
      spec_expr(SymbolSpec::Family::multiplication, "2+cos(x1)"), st, st.lambda());
  ScalarField e1 = sample(st, [](const GroupPoint& x) {
    return std::polar(1.0, x.angles[0]);
  }, 1);
  ScalarField te1 = quantize_apply(st, mult, e1);
  for (std::size_t p = 0; p < st.n_points(); ++p) {
    const double a = 2.0 + std::cos(st.grid().points[p].angles[0]);
    CHECK(std::abs(te1.values[p] - a * e1.values[p]) <= 1e-12);
  }

  const Space& ss = su2_space_8();
  Symbol sident = build_symbol(spec_multiplier(0.0), ss, ss.lambda());
  FourierCoefficients sc = random_coefficients(ss, ss.lambda(), 102);
  ScalarField sf = synthesize(ss, sc);
  CHECK(field_sup_distance(quantize_apply(ss, sident, sf), sf) <= 1e-10);
}

TEST_CASE("assemble_operator_matrix: identity, diagonal, Toeplitz, margins") {
  const Space& st = torus_space_32();

  Symbol ident = build_symbol(spec_multiplier(0.0), st, st.lambda());
  OperatorMatrix mi = assemble_operator_matrix(st, ident, st.lambda());
  CHECK(mi.size() == static_cast<int>(st.dual().size()));
  CHECK((mi.matrix - ComplexMatrix::Identity(mi.size(), mi.size())).cwiseAbs().maxCoeff() <= 1e-15);

  Symbol inv = build_symbol(spec_multiplier(-1.0), st, st.lambda());
  OperatorMatrix md = assemble_operator_matrix(st, inv, 8.0);
  for (std::size_t a = 0; a < md.dual.size(); ++a) {
    const int r = md.index_of(a, 0, 0);
    CHECK(std::abs(md.matrix(r, r) - Complex(1.0 / md.dual[a].weight)) <= 1e-14);
  }
  // off-diagonal exactly zero for multipliers
  ComplexMatrix off = md.matrix;
  off.diagonal().setZero();
  CHECK(off.cwiseAbs().maxCoeff() == 0.0);

  Symbol mult = build_symbol(
      spec_expr(SymbolSpec::Family::multiplication, "2+cos(x1)"), st, st.lambda());
  OperatorMatrix mt = assemble_operator_matrix(st, mult, 8.0);
  // quadrature oracle: <a e_k, e_l> = sum_p w_p a(x_p) e^{i(k-l)x_p}
  for (std::size_t ra = 0; ra < mt.dual.size(); ++ra) {
    for (std::size_t ca = 0; ca < mt.dual.size(); ++ca) {
      Complex oracle = 0.0;
      for (std::size_t p = 0; p < st.n_points(); ++p) {
        const double x = st.grid().points[p].angles[0];
        const double a = 2.0 + std::cos(x);
        oracle += st.grid().weights[p] * a *
                  std::polar(1.0, (mt.dual[ca].k[0] - mt.dual[ra].k[0]) * x);
      }
      CHECK(std::abs(mt.matrix(mt.index_of(ra, 0, 0), mt.index_of(ca, 0, 0)) - oracle) <= 1e-13);
    }
  }
  // Toeplitz structure: diagonal 2, neighbours 1/2 (k-distance 1), rest 0
  for (std::size_t ra = 0; ra < mt.dual.size(); ++ra) {
    for (std::size_t ca = 0; ca < mt.dual.size(); ++ca) {
      const int dk = mt.dual[ca].k[0] - mt.dual[ra].k[0];
      const Complex v = mt.matrix(mt.index_of(ra, 0, 0), mt.index_of(ca, 0, 0));
      if (dk == 0) CHECK(std::abs(v - Complex(2.0)) <= 1e-13);
      else if (dk == 1 || dk == -1) CHECK(std::abs(v - Complex(0.5)) <= 1e-13);
      else CHECK(std::abs(v) <= 1e-13);
    }
  }

  // margins: x-band 1 at full exactness must refuse
  CHECK_THROWS_AS(assemble_operator_matrix(st, mult, st.grid().exactness_degree),
                  AliasingError);
  Symbol small = build_symbol(spec_multiplier(0.0), st, 4.0);
  CHECK_THROWS_AS(assemble_operator_matrix(st, small, 8.0), AliasingError);

  // index map is a bijection
  for (int r = 0; r < mi.size(); ++r) {
    const auto b = mi.basis_of(r);
    CHECK(mi.index_of(b.dual_index, b.i, b.j) == r);
  }
}

TEST_CASE("assembled matrix action agrees with quantize_apply") {
  const Space& st = torus_space_32();
  Symbol prod = build_symbol(
      spec_expr(SymbolSpec::Family::product, "2+cos(x1)", -1.0), st, st.lambda());
  const double lam = st.grid().exactness_degree - 1.0;
  OperatorMatrix om = assemble_operator_matrix(st, prod, lam);

  FourierCoefficients fc = random_coefficients(st, lam - 1.0, 202);
  Eigen::VectorXcd v = coefficients_to_basis(om, fc);
  Eigen::VectorXcd w = om.matrix * v;

  ScalarField f = synthesize(st, fc);
  ScalarField tf = quantize_apply(st, prod, f);
  FourierCoefficients tfc = analyze(st, tf);
  Eigen::VectorXcd w_direct = coefficients_to_basis(om, tfc);
  CHECK((w - w_direct).cwiseAbs().maxCoeff() <= 1e-9);

  // basis maps round trip (om's dual extends past fc's; the tail is zero)
  FourierCoefficients back = basis_to_coefficients(om, v);
  for (std::size_t a = 0; a < back.dual.size(); ++a) {
    if (a < fc.dual.size()) {
      REQUIRE(same_label(back.dual[a], fc.dual[a]));
      CHECK((back.coeff[a] - fc.coeff[a]).cwiseAbs().maxCoeff() <= 1e-15);
    } else {
      CHECK(back.coeff[a].cwiseAbs().maxCoeff() == 0.0);
    }
  }

  // su2, matrix-valued x-dependent symbol
  Space ss(GroupDescriptor::su2(12, 6, 24), 6.0);
  Symbol sp = build_symbol(spec_expr(SymbolSpec::Family::scalar_expr, "re_a/xi_weight"),
                           ss, ss.lambda());
  CHECK(sp.x_band == 1);
  const double slam = ss.grid().exactness_degree - 1.0;
  OperatorMatrix som = assemble_operator_matrix(ss, sp, slam);
  FourierCoefficients sfc = random_coefficients(ss, slam - 1.0, 203);
  Eigen::VectorXcd sv = coefficients_to_basis(som, sfc);
  Eigen::VectorXcd sw = som.matrix * sv;
  ScalarField sf = synthesize(ss, sfc);
  FourierCoefficients stf = analyze(ss, quantize_apply(ss, sp, sf));
  CHECK((sw - coefficients_to_basis(som, stf)).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("extract_symbol: identity, Laplacian, round trips, errors") {
  const Space& ss = su2_space_8();

  Symbol ext = extract_symbol(ss, ss.lambda(),
                              [](const ScalarField& f) { return f; }, 0);
  CHECK(ext.x_independent);
  CHECK(ext.scalar);
  for (std::size_t a = 0; a < ext.dual.size(); ++a) {
    CHECK(std::abs(ext.scalar_value(a, 0) - 1.0) <= 1e-12);
  }

  // group Laplacian applied as a multiplier
  Symbol lap_mult = build_symbol(
      spec_expr(SymbolSpec::Family::scalar_expr, "-xi_lambda2"), ss, ss.lambda());
  Symbol lap = extract_symbol(ss, ss.lambda(), [&](const ScalarField& f) {
    return quantize_apply(ss, lap_mult, f);
  }, 0);
  CHECK(lap.x_independent);
  CHECK(lap.scalar);
  for (std::size_t a = 0; a < lap.dual.size(); ++a) {
    CHECK(std::abs(lap.scalar_value(a, 0) - Complex(-lap.dual[a].casimir)) <= 1e-9);
  }

  // x-independent random matrix symbol round trip
  std::mt19937 rng(404);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<ComplexMatrix> blocks;
  for (const Irrep& xi : ss.dual()) {
    ComplexMatrix m(xi.dim, xi.dim);
    for (int i = 0; i < xi.dim; ++i)
      for (int j = 0; j < xi.dim; ++j) m(i, j) = Complex(u(rng), u(rng));
    blocks.push_back(m);
  }
  Symbol sigma0 = build_symbol_from_fn(
      ss, ss.lambda(),
      [&](const GroupPoint&, const Irrep& xi) {
        for (std::size_t a = 0; a < ss.dual().size(); ++a)
          if (same_label(ss.dual()[a], xi)) return blocks[a];
        return ComplexMatrix::Zero(xi.dim, xi.dim).eval();
      },
      0);
  CHECK(sigma0.x_independent);
  CHECK_FALSE(sigma0.scalar);
  Symbol round = extract_symbol(ss, ss.lambda(), [&](const ScalarField& f) {
    return quantize_apply(ss, sigma0, f);
  }, 0);
  for (std::size_t a = 0; a < round.dual.size(); ++a) {
    CHECK((round.value(a, 0) - blocks[a]).cwiseAbs().maxCoeff() <= 1e-9);
  }

  // x-dependent round trip with margin: band(1) + lambda within exactness
  Space st(GroupDescriptor::torus(1, 64), 20.0);
  Symbol prod = build_symbol(
      spec_expr(SymbolSpec::Family::product, "2+cos(x1)", -1.0), st, 20.0);
  Symbol round2 = extract_symbol(st, 20.0, [&](const ScalarField& f) {
    return quantize_apply(st, prod, f);
  }, 1);
  CHECK_FALSE(round2.x_independent);
  for (std::size_t a = 0; a < round2.dual.size(); ++a) {
    for (std::size_t p = 0; p < st.n_points(); ++p) {
      CHECK(std::abs(round2.scalar_value(a, p) - prod.scalar_value(a, p)) <= 1e-7);
    }
  }

  CHECK_THROWS_AS(extract_symbol(ss, ss.lambda(), [](const ScalarField& f) {
    ScalarField bad = f;
    bad.values.pop_back();
    return bad;
  }, 0), DimensionError);
  CHECK_THROWS_AS(extract_symbol(ss, ss.lambda(), [](const ScalarField& f) {
    ScalarField bad = f;
    bad.values[0] = Complex(std::nan(""), 0.0);
    return bad;
  }, 0), NumericError);
}

TEST_CASE("kernel_R: character sums and the convolution identity") {
  const Space& st = torus_space_32();
  Symbol ident = build_symbol(spec_multiplier(0.0), st, st.lambda());
  ScalarField r = kernel_R(st, ident, 0);
  // value at z = e equals the number of torus irreps (sum of d^2)
  CHECK(std::abs(r.values[0] - Complex(static_cast<double>(st.dual().size()))) <= 1e-10);

  Symbol mult = build_symbol(
      spec_expr(SymbolSpec::Family::multiplication, "2+cos(x1)"), st, st.lambda());
  const std::size_t px = 5;
  ScalarField rm = kernel_R(st, mult, px);
  const double ax = 2.0 + std::cos(st.grid().points[px].angles[0]);
  for (std::size_t p = 0; p < st.n_points(); ++p) {
    CHECK(std::abs(rm.values[p] - ax * r.values[p]) <= 1e-9);
  }

  // convolution identity on both groups
  const auto conv_check = [](const Space& s, const Symbol& sigma, double band, unsigned seed) {
    FourierCoefficients fc = random_coefficients(s, band, seed);
    ScalarField f = synthesize(s, fc);
    ScalarField tf = quantize_apply(s, sigma, f);
    for (std::size_t px2 : {std::size_t{0}, s.n_points() / 3, s.n_points() - 1}) {
      ScalarField r2 = kernel_R(s, sigma, px2);
      Complex conv = 0.0;
      for (std::size_t p = 0; p < s.n_points(); ++p) {
        const GroupPoint y = mul(s.grid().points[px2], inv(s.grid().points[p]));
        conv += s.grid().weights[p] * r2.values[p] * field_at_point(fc, y);
      }
      CHECK(std::abs(conv - tf.values[px2]) <= 1e-9);
    }
  };
  conv_check(st, mult, 8.0, 303);
  const Space& ss = su2_space_8();
  Symbol scorner = build_symbol({SymbolSpec::Family::corner_projection}, ss, ss.lambda());
  conv_check(ss, scorner, std::sqrt(1 + 0.25 * 2 * 4), 304);
}

TEST_CASE("difference_op: shift direction, zero symbol, decay, Leibniz") {
  Space st(GroupDescriptor::torus(1, 32), 16.0);
  const AdmissibleFamily fam = admissible_family(st.group());
  REQUIRE(fam.functions.size() == 1);

  Symbol tau = build_symbol(
      spec_expr(SymbolSpec::Family::scalar_expr, "1/(1+xi_lambda2)"), st, st.lambda());
  Symbol dtau = difference_op(st, tau, fam.functions[0]);
  CHECK(dtau.lambda == doctest::Approx(st.lambda() - 1.0));
  const auto m_of = [](int k) { return 1.0 / (1.0 + k * k); };
  for (std::size_t a = 0; a < dtau.dual.size(); ++a) {
    const int k = dtau.dual[a].k[0];
    // forced by the kernel integral: sigma(k-1) - sigma(k)
    CHECK(std::abs(dtau.scalar_value(a, 0) - Complex(m_of(k - 1) - m_of(k))) <= 1e-12);
  }

  // independent direct-integral oracle at a few k
  for (int k : {-5, 0, 1, 7}) {
    Complex oracle = 0.0;
    for (std::size_t p = 0; p < st.n_points(); ++p) {
      const double x = st.grid().points[p].angles[0];
      Complex rz = 0.0;
      for (const Irrep& xi : tau.dual) {
        rz += m_of(xi.k[0]) * std::polar(1.0, xi.k[0] * x);
      }
      const Complex q = std::polar(1.0, x) - 1.0;
      oracle += st.grid().weights[p] * q * rz * std::polar(1.0, -k * x);
    }
    const std::size_t idx = dual_index_of_k(st, k);
    REQUIRE(idx < dtau.dual.size());
    CHECK(std::abs(dtau.scalar_value(idx, 0) - oracle) <= 1e-12);
  }

  // constant-in-xi symbols are annihilated (both groups, every family member)
  Symbol ident = build_symbol(spec_multiplier(0.0), st, st.lambda());
  Symbol dident = difference_op(st, ident, fam.functions[0]);
  for (std::size_t a = 0; a < dident.dual.size(); ++a) {
    CHECK(std::abs(dident.scalar_value(a, 0)) <= 1e-13);
  }
  const Space& ss = su2_space_8();
  Symbol sident = build_symbol(spec_multiplier(0.0), ss, ss.lambda());
  for (const AdmissibleFunction& q : admissible_family(ss.group()).functions) {
    Symbol ds = difference_op(ss, sident, q);
    for (std::size_t a = 0; a < ds.dual.size(); ++a) {
      CHECK(ds.value(a, 0).cwiseAbs().maxCoeff() <= 1e-13);
    }
  }

  // decay: |Delta <k>^{-1}| ~ <k>^{-2}
  Space big(GroupDescriptor::torus(1, 128), 64.0);
  Symbol invp = build_symbol(spec_multiplier(-1.0), big, big.lambda());
  Symbol dinv = difference_op(big, invp, admissible_family(big.group()).functions[0]);
  std::vector<double> lx, ly;
  for (int k : {8, 12, 16, 24, 32}) {
    const std::size_t a = dual_index_of_k(big, k);
    lx.push_back(std::log(big.dual()[a].weight));
    ly.push_back(std::log(std::abs(dinv.scalar_value(a, 0))));
  }
  CHECK(lls_slope(lx, ly) <= -1.9);

  // Leibniz: Delta(sigma*tau)(k) = Delta(sigma)(k)*tau(k-1) + sigma(k)*Delta(tau)(k)
  Symbol sig = build_symbol(spec_multiplier(-1.0), st, st.lambda());
  Symbol prod = build_symbol(
      spec_expr(SymbolSpec::Family::scalar_expr, "(1/xi_weight)*(1/(1+xi_lambda2))"),
      st, st.lambda());
  Symbol dsig = difference_op(st, sig, fam.functions[0]);
  Symbol dprod = difference_op(st, prod, fam.functions[0]);
  for (std::size_t a = 0; a < dprod.dual.size(); ++a) {
    const int k = dprod.dual[a].k[0];
    const std::size_t ia = dual_index_of_k(st, k);
    const std::size_t im = dual_index_of_k(st, k - 1);
    const Complex lhs = dprod.scalar_value(a, 0);
    const Complex rhs = dsig.scalar_value(a, 0) * tau.scalar_value(im, 0) +
                        sig.scalar_value(ia, 0) * dtau.scalar_value(a, 0);
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }

  // margins: differencing a trivial-only symbol refuses
  Symbol tiny = build_symbol(spec_multiplier(0.0), st, 1.0);
  CHECK_THROWS_AS(difference_op(st, tiny, fam.functions[0]), AliasingError);
}

TEST_CASE("difference_op su2 against a direct quadrature oracle") {
  Space ss(GroupDescriptor::su2(16, 16, 16), 4.0);
  Symbol invp = build_symbol(spec_multiplier(-1.0), ss, ss.lambda());
  const AdmissibleFamily fam = admissible_family(ss.group());
  Symbol d = difference_op(ss, invp, fam.functions[2]);  // Re(b)

  // oracle: (q R)^ by raw loops, R(z) = sum_t d_t <xi_t>^{-1} tr D^t(z)
  const QuadratureGrid& grid = ss.grid();
  for (std::size_t a = 0; a < d.dual.size(); ++a) {
    const Irrep& xi = d.dual[a];
    ComplexMatrix oracle = ComplexMatrix::Zero(xi.dim, xi.dim);
    for (std::size_t p = 0; p < grid.points.size(); ++p) {
      Complex rz = 0.0;
      for (const Irrep& eta : invp.dual) {
        rz += static_cast<double>(eta.dim) / eta.weight *
              evaluate_irrep(eta, grid.points[p]).trace();
      }
      const Complex q = fam.functions[2].eval(grid.points[p]);
      const ComplexMatrix xim = evaluate_irrep(xi, grid.points[p]);
      oracle += grid.weights[p] * q * rz * xim.adjoint();
    }
    CHECK((d.value(a, 0) - oracle).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("seminorm_report") {
  const Space& st = torus_space_32();

  Symbol ident = build_symbol(spec_multiplier(0.0), st, st.lambda());
  SeminormReport ri = seminorm_report(st, ident, 2, 2, 1.0);
  CHECK(ri.C(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ri.C(1, 0) <= 1e-12);
  CHECK(ri.C(2, 0) <= 1e-12);
  CHECK(ri.C(0, 1) <= 1e-9);
  CHECK(ri.C(0, 2) <= 1e-4);
  CHECK(ri.sup_norm == ri.C(0, 0));

  Symbol invp = build_symbol(spec_multiplier(-1.0), st, st.lambda());
  SeminormReport rv = seminorm_report(st, invp, 0, 0, 1.0);
  CHECK(rv.C(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

  Symbol mult = build_symbol(
      spec_expr(SymbolSpec::Family::multiplication, "2+cos(x1)"), st, st.lambda());
  SeminormReport rm = seminorm_report(st, mult, 2, 2, 1.0);
  CHECK(rm.C(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(rm.C(0, 1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rm.C(0, 2) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(rm.C(1, 0) <= 1e-10);
  CHECK(rm.C(1, 1) <= 1e-6);
  CHECK(rm.sup_dx == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rm.sup_dq_rho <= 1e-10);

  // x- and xi-dependent: C(1,1) has a computable closed form
  Symbol prod = build_symbol(
      spec_expr(SymbolSpec::Family::product, "2+cos(x1)", -1.0), st, st.lambda());
  SeminormReport rp = seminorm_report(st, prod, 1, 1, 1.0);
  double expect10 = 0.0, expect11 = 0.0;
  for (const Irrep& xi : st.dual()) {
    if (xi.weight > st.lambda() - 1.0 + 1e-12) break;
    const int k = xi.k[0];
    const double dm = std::abs(1.0 / std::sqrt(1.0 + (k - 1.0) * (k - 1.0)) -
                               1.0 / xi.weight);
    expect10 = std::max(expect10, 3.0 * dm * xi.weight);
    expect11 = std::max(expect11, 1.0 * dm * xi.weight);
  }
  CHECK(rp.C(1, 0) == doctest::Approx(expect10).epsilon(1e-6));
  CHECK(rp.C(1, 1) == doctest::Approx(expect11).epsilon(1e-5));

  const Space& ss = su2_space_8();
  Symbol sinv = build_symbol(spec_multiplier(-1.0), ss, ss.lambda());
  SeminormReport rs = seminorm_report(ss, sinv, 1, 1, 1.0);
  CHECK(rs.C(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rs.C(0, 1) <= 1e-8);
  CHECK(rs.C(1, 0) > 0.0);
  CHECK(rs.sup_dq_rho > 0.0);

  Symbol tiny = build_symbol(spec_multiplier(0.0), st, 1.0);
  CHECK_THROWS_AS(seminorm_report(st, tiny, 1, 0, 1.0), AliasingError);
  CHECK_THROWS_AS(seminorm_report(st, ident, 3, 0, 1.0), DimensionError);
}

TEST_CASE("ellipticity_check") {
  const Space& st = torus_space_32();
  Symbol ident = build_symbol(spec_multiplier(0.0), st, st.lambda());
  EllipticityResult ri = ellipticity_check(st, ident, 1e6, 1.0);
  CHECK(ri.elliptic);
  CHECK_FALSE(ri.singular);
  CHECK(ri.bound == doctest::Approx(1.0).epsilon(1e-12));

  Symbol invp = build_symbol(spec_multiplier(-1.0), st, st.lambda());
  EllipticityResult rv = ellipticity_check(st, invp, 3.0, 1.0);
  CHECK_FALSE(rv.elliptic);
  CHECK_FALSE(rv.singular);
  // bound attained at the largest weight (ties between ±k share it)
  CHECK(rv.bound == doctest::Approx(st.dual().back().weight).epsilon(1e-12));
  CHECK(st.dual()[rv.witness_dual].weight ==
        doctest::Approx(st.dual().back().weight).epsilon(1e-15));
  // with a generous threshold the same symbol passes
  CHECK(ellipticity_check(st, invp, 1e6, 1.0).elliptic);

  const Space& ss = su2_space_8();
  Symbol corner = build_symbol({SymbolSpec::Family::corner_projection}, ss, ss.lambda());
  EllipticityResult rc = ellipticity_check(ss, corner, 1e6, 1.0);
  CHECK_FALSE(rc.elliptic);
  CHECK(rc.singular);
  CHECK(std::isinf(rc.bound));
}

TEST_CASE("NCSYM1 container round trips and validation") {
  const Space& st = torus_space_32();
  Symbol prod = build_symbol(
      spec_expr(SymbolSpec::Family::product, "2+cos(x1)", -1.0), st, st.lambda());
  const std::string path = "test_symbol_roundtrip.ncsym";
  save_symbol(path, st, prod);
  Symbol back = load_symbol(path, st);
  CHECK(back.scalar);
  CHECK_FALSE(back.x_independent);
  CHECK(back.x_band == 1);
  CHECK(back.lambda == prod.lambda);
  CHECK(back.dual.size() == prod.dual.size());
  CHECK((back.scalar_values - prod.scalar_values).cwiseAbs().maxCoeff() == 0.0);

  // file family with truncation
  SymbolSpec fromfile;
  fromfile.family = SymbolSpec::Family::file;
  fromfile.path = path;
  Symbol cut = build_symbol(fromfile, st, 8.0);
  CHECK(cut.lambda == 8.0);
  CHECK(cut.dual.back().weight <= 8.0);
  CHECK(std::abs(cut.scalar_value(3, 11) - prod.scalar_value(3, 11)) == 0.0);

  const Space& ss = su2_space_8();
  Symbol corner = build_symbol({SymbolSpec::Family::corner_projection}, ss, ss.lambda());
  const std::string path2 = "test_symbol_corner.ncsym";
  save_symbol(path2, ss, corner);
  Symbol back2 = load_symbol(path2, ss);
  CHECK(back2.x_independent);
  CHECK_FALSE(back2.scalar);
  for (std::size_t a = 0; a < back2.dual.size(); ++a) {
    CHECK((back2.value(a, 0) - corner.value(a, 0)).cwiseAbs().maxCoeff() == 0.0);
  }

  // wrong group
  CHECK_THROWS_AS(load_symbol(path, ss), GroupMismatchError);
  // corrupt magic
  const std::string bad = "test_symbol_bad.ncsym";
  {
    std::ofstream out(bad, std::ios::binary);
    out.write("NOTSYM10", 8);
  }
  CHECK_THROWS_AS(load_symbol(bad, st), IoError);
  // truncated data
  const std::string cutfile = "test_symbol_cut.ncsym";
  {
    std::ifstream in(path, std::ios::binary);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::ofstream out(cutfile, std::ios::binary);
    out.write(all.data(), static_cast<std::streamsize>(all.size() - 64));
  }
  CHECK_THROWS_AS(load_symbol(cutfile, st), IoError);

  std::remove(path.c_str());
  std::remove(path2.c_str());
  std::remove(bad.c_str());
  std::remove(cutfile.c_str());
}

TEST_CASE("symbol_value_at: evaluator and interpolation paths") {
  Space st(GroupDescriptor::torus(1, 64), 20.0);
  Symbol prod = build_symbol(
      spec_expr(SymbolSpec::Family::product, "2+cos(x1)", -1.0), st, 20.0);
  GroupPoint x = torus_point({0.7341});
  const std::size_t a5 = dual_index_of_k(st, 5);
  const Complex expect = (2.0 + std::cos(0.7341)) / st.dual()[a5].weight;
  // built symbols carry an exact evaluator
  CHECK(std::abs(symbol_value_at(st, prod, x, a5)(0, 0) - expect) <= 1e-12);

  // extracted symbols fall back to Fourier interpolation in x
  Symbol ext = extract_symbol(st, 20.0, [&](const ScalarField& f) {
    return quantize_apply(st, prod, f);
  }, 1);
  CHECK(!ext.evaluator);
  CHECK(std::abs(symbol_value_at(st, ext, x, a5)(0, 0) - expect) <= 1e-9);
}
