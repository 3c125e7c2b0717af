#include "ncsg/group.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ncsg {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double mod_positive(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0) r += period;
  if (r >= period) r = 0.0;  // fmod rounding at the boundary
  return r;
}

// Reduce to (−π, π].
double reduce_centered(double x) {
  double r = mod_positive(x, kTwoPi);
  if (r > kPi) r -= kTwoPi;
  return r;
}

std::array<double, 3> euler_from_quat(const std::array<double, 4>& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  // Defining matrix [[a,b],[−b̄,ā]] with a = w−iz, b = −y−ix; ZYZ convention
  // D^{1/2}(α,β,γ): a = e^{−i(α+γ)/2} cos(β/2), b = −e^{−i(α−γ)/2} sin(β/2).
  const double beta = 2.0 * std::atan2(std::hypot(x, y), std::hypot(w, z));
  const double s = std::atan2(z, w);   // (α+γ)/2 mod 2π
  const double d = -std::atan2(x, y);  // (α−γ)/2 mod 2π
  const double alpha = mod_positive(s + d, kTwoPi);
  const double gamma = mod_positive(alpha - 2.0 * d, 2.0 * kTwoPi);
  return {alpha, beta, gamma};
}

std::array<double, 4> quat_mul(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
          a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
          a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
          a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

double legendre_value(int n, double x) {
  if (n == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// Nodes ascending in x = cos β, weights summing to 2.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / pp;
      t -= dt;
      if (std::abs(dt) < 1e-15) {
        // one polishing step, then stop
        p0 = 1.0;
        p1 = t;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        pp = n * (t * p1 - p0) / (t * t - 1.0);
        t -= p1 / pp;
        break;
      }
    }
    x[n - 1 - i] = t;
    x[i] = -t;
    const double wv = 2.0 / ((1.0 - t * t) * pp * pp);
    w[i] = wv;
    w[n - 1 - i] = wv;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Little-d for ℓ ≤ 1 as explicit tables; recursion above.
Eigen::MatrixXd little_d_matrix(int two_ell, double beta) {
  const int d = two_ell + 1;
  Eigen::MatrixXd m(d, d);
  if (two_ell == 0) {
    m(0, 0) = 1.0;
    return m;
  }
  const double c = std::cos(0.5 * beta), s = std::sin(0.5 * beta);
  if (two_ell == 1) {
    m << c, -s, s, c;
    return m;
  }
  if (two_ell == 2) {
    const double cb = std::cos(beta), sb = std::sin(beta);
    const double r2 = std::numbers::sqrt2;
    m << 0.5 * (1 + cb), -sb / r2, 0.5 * (1 - cb),
         sb / r2, cb, -sb / r2,
         0.5 * (1 - cb), sb / r2, 0.5 * (1 + cb);
    return m;
  }
  for (int r = 0; r < d; ++r) {
    for (int col = 0; col < d; ++col) {
      m(r, col) = wigner_little_d(two_ell, two_ell - 2 * r, two_ell - 2 * col, beta);
    }
  }
  return m;
}

}  // namespace

double wigner_little_d(int two_j, int two_mp, int two_m, double beta) {
  if (std::abs(two_mp) > two_j || std::abs(two_m) > two_j ||
      ((two_j ^ two_mp) & 1) || ((two_j ^ two_m) & 1)) {
    throw DimensionError("wigner_little_d: invalid (two_j, two_mp, two_m)");
  }
  const double c = std::cos(0.5 * beta), s = std::sin(0.5 * beta);
  const int j0t = std::max(std::abs(two_mp), std::abs(two_m));

  // Seed d^{j0} where j0 = max(|m'|,|m|); one boundary index is ±j0.
  double cur;
  if (two_m == j0t) {
    cur = std::sqrt(binom(j0t, (j0t + two_mp) / 2)) *
          std::pow(c, (j0t + two_mp) / 2) * std::pow(s, (j0t - two_mp) / 2);
  } else if (two_m == -j0t) {
    cur = std::sqrt(binom(j0t, (j0t + two_mp) / 2)) *
          std::pow(c, (j0t - two_mp) / 2) * std::pow(-s, (j0t + two_mp) / 2);
  } else if (two_mp == j0t) {
    cur = std::sqrt(binom(j0t, (j0t + two_m) / 2)) *
          std::pow(c, (j0t + two_m) / 2) * std::pow(-s, (j0t - two_m) / 2);
  } else {
    cur = std::sqrt(binom(j0t, (j0t + two_m) / 2)) *
          std::pow(c, (j0t - two_m) / 2) * std::pow(s, (j0t + two_m) / 2);
  }
  if (two_j == j0t) return cur;

  // Three-term recursion in j for fixed (m', m).
  const double x = std::cos(beta);
  const double mp = 0.5 * two_mp, m = 0.5 * two_m;
  double prev = 0.0;
  int jt = j0t;
  if (j0t == 0) {  // m' = m = 0: Legendre; the j=0→1 step is d^1_00 = cos β
    prev = cur;
    cur = x;
    jt = 2;
  }
  while (jt < two_j) {
    const double j = 0.5 * jt;
    const double denom =
        j * std::sqrt(((j + 1) * (j + 1) - mp * mp) * ((j + 1) * (j + 1) - m * m));
    const double c1 = (2 * j + 1) * (j * (j + 1) * x - mp * m) / denom;
    const double c2 = (j + 1) * std::sqrt((j * j - mp * mp) * (j * j - m * m)) / denom;
    const double next = c1 * cur - c2 * prev;
    prev = cur;
    cur = next;
    jt += 2;
  }
  return cur;
}

GroupDescriptor GroupDescriptor::torus(int n, int points_per_dim) {
  GroupDescriptor g;
  g.kind = GroupKind::torus;
  g.torus_dim = n;
  g.torus_points = points_per_dim;
  g.validate();
  return g;
}

GroupDescriptor GroupDescriptor::su2(int m_alpha, int m_beta, int m_gamma) {
  GroupDescriptor g;
  g.kind = GroupKind::su2;
  g.su2_alpha = m_alpha;
  g.su2_beta = m_beta;
  g.su2_gamma = m_gamma;
  g.validate();
  return g;
}

std::string GroupDescriptor::name() const {
  if (kind == GroupKind::torus) return "T^" + std::to_string(torus_dim);
  return "SU(2)";
}

void GroupDescriptor::validate() const {
  if (kind == GroupKind::torus) {
    if (torus_dim < 1) throw DimensionError("torus dimension must be >= 1");
    if (torus_points < 2) throw DimensionError("torus grid needs >= 2 points per dimension");
  } else {
    if (su2_alpha < 2 || su2_beta < 2 || su2_gamma < 2) {
      throw DimensionError("su2 grid sizes must all be >= 2");
    }
    if (su2_gamma % 2 != 0) {
      throw DimensionError(
          "su2 gamma grid size must be even: an odd grid aliases integer "
          "against half-integer spins");
    }
  }
}

GroupPoint torus_point(std::vector<double> angles) {
  GroupPoint p;
  p.kind = GroupKind::torus;
  p.angles.reserve(angles.size());
  for (double a : angles) {
    if (!std::isfinite(a)) throw NumericError("torus_point: non-finite angle");
    p.angles.push_back(mod_positive(a, kTwoPi));
  }
  return p;
}

GroupPoint su2_point(double w, double x, double y, double z) {
  const double n2 = w * w + x * x + y * y + z * z;
  if (!std::isfinite(n2) || std::abs(n2 - 1.0) > 1e-6) {
    throw NumericError("su2_point: quaternion norm too far from 1");
  }
  const double inv_n = 1.0 / std::sqrt(n2);
  GroupPoint p;
  p.kind = GroupKind::su2;
  p.quat = {w * inv_n, x * inv_n, y * inv_n, z * inv_n};
  p.euler = euler_from_quat(p.quat);
  return p;
}

GroupPoint su2_point_euler(double alpha, double beta, double gamma) {
  // q = q_z(α)·q_y(β)·q_z(γ)
  const std::array<double, 4> qa{std::cos(0.5 * alpha), 0, 0, std::sin(0.5 * alpha)};
  const std::array<double, 4> qb{std::cos(0.5 * beta), 0, std::sin(0.5 * beta), 0};
  const std::array<double, 4> qc{std::cos(0.5 * gamma), 0, 0, std::sin(0.5 * gamma)};
  const std::array<double, 4> q = quat_mul(quat_mul(qa, qb), qc);
  return su2_point(q[0], q[1], q[2], q[3]);
}

GroupPoint identity_point(const GroupDescriptor& g) {
  if (g.kind == GroupKind::torus) {
    return torus_point(std::vector<double>(g.torus_dim, 0.0));
  }
  return su2_point(1, 0, 0, 0);
}

GroupPoint mul(const GroupPoint& a, const GroupPoint& b) {
  if (a.kind != b.kind) throw GroupMismatchError("mul: points from different groups");
  if (a.kind == GroupKind::torus) {
    if (a.angles.size() != b.angles.size()) {
      throw GroupMismatchError("mul: torus dimensions differ");
    }
    std::vector<double> s(a.angles.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = a.angles[i] + b.angles[i];
    return torus_point(std::move(s));
  }
  const auto q = quat_mul(a.quat, b.quat);
  return su2_point(q[0], q[1], q[2], q[3]);
}

GroupPoint inv(const GroupPoint& a) {
  if (a.kind == GroupKind::torus) {
    std::vector<double> s(a.angles.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = -a.angles[i];
    return torus_point(std::move(s));
  }
  return su2_point(a.quat[0], -a.quat[1], -a.quat[2], -a.quat[3]);
}

double geodesic_h(const GroupPoint& x) {
  if (x.kind == GroupKind::torus) {
    double s = 0.0;
    for (double a : x.angles) {
      const double r = reduce_centered(a);
      s += r * r;
    }
    return std::sqrt(s);
  }
  const double w = std::min(1.0, std::abs(x.quat[0]));
  return 2.0 * std::acos(w);
}

GroupPoint exp_direction(const GroupDescriptor& g, int axis, double t) {
  if (g.kind == GroupKind::torus) {
    if (axis < 0 || axis >= g.torus_dim) throw DimensionError("exp_direction: bad axis");
    std::vector<double> a(g.torus_dim, 0.0);
    a[axis] = t;
    return torus_point(std::move(a));
  }
  if (axis < 0 || axis > 2) throw DimensionError("exp_direction: bad axis");
  double v[3] = {0, 0, 0};
  v[axis] = std::sin(0.5 * t);
  return su2_point(std::cos(0.5 * t), v[0], v[1], v[2]);
}

std::string Irrep::label_string() const {
  if (kind == GroupKind::torus) {
    std::string s = "k=(";
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(k[i]);
    }
    return s + ")";
  }
  return "two_ell=" + std::to_string(two_ell);
}

Irrep torus_irrep(std::vector<int> k) {
  Irrep xi;
  xi.kind = GroupKind::torus;
  double n2 = 0.0;
  for (int c : k) n2 += double(c) * double(c);
  xi.k = std::move(k);
  xi.dim = 1;
  xi.casimir = n2;
  xi.weight = std::sqrt(1.0 + n2);
  return xi;
}

Irrep su2_irrep(int two_ell) {
  if (two_ell < 0) throw DimensionError("su2_irrep: two_ell must be >= 0");
  Irrep xi;
  xi.kind = GroupKind::su2;
  xi.two_ell = two_ell;
  xi.dim = two_ell + 1;
  const double l = 0.5 * two_ell;
  xi.casimir = l * (l + 1.0);
  xi.weight = std::sqrt(1.0 + xi.casimir);
  return xi;
}

Irrep trivial_irrep(const GroupDescriptor& g) {
  if (g.kind == GroupKind::torus) return torus_irrep(std::vector<int>(g.torus_dim, 0));
  return su2_irrep(0);
}

std::vector<Irrep> enumerate_dual(const GroupDescriptor& g, double lambda) {
  if (!(lambda >= 1.0)) {
    throw NumericError("enumerate_dual: weight cutoff below 1 gives an empty dual");
  }
  // Small relative slack so boundary irreps (1+λ² = Λ² exactly) are kept.
  const double cap = lambda * lambda * (1.0 + 1e-12) + 1e-12;
  std::vector<Irrep> dual;
  if (g.kind == GroupKind::torus) {
    const int n = g.torus_dim;
    const int kmax = static_cast<int>(std::floor(std::sqrt(std::max(0.0, cap - 1.0))));
    std::vector<int> k(n, -kmax);
    while (true) {
      double n2 = 0.0;
      for (int c : k) n2 += double(c) * double(c);
      if (1.0 + n2 <= cap) dual.push_back(torus_irrep(k));
      int i = n - 1;
      while (i >= 0 && k[i] == kmax) {
        k[i] = -kmax;
        --i;
      }
      if (i < 0) break;
      ++k[i];
    }
    std::sort(dual.begin(), dual.end(), [](const Irrep& a, const Irrep& b) {
      if (a.casimir != b.casimir) return a.casimir < b.casimir;
      return a.k < b.k;
    });
  } else {
    for (int t = 0;; ++t) {
      const double l = 0.5 * t;
      if (1.0 + l * (l + 1.0) > cap) break;
      dual.push_back(su2_irrep(t));
    }
  }
  if (dual.empty()) throw NumericError("enumerate_dual: empty dual");
  return dual;
}

ComplexMatrix evaluate_irrep(const Irrep& xi, const GroupPoint& x) {
  if (xi.kind != x.kind) throw GroupMismatchError("evaluate_irrep: group mismatch");
  if (xi.kind == GroupKind::torus) {
    if (xi.k.size() != x.angles.size()) {
      throw GroupMismatchError("evaluate_irrep: torus dimension mismatch");
    }
    double phase = 0.0;
    for (std::size_t i = 0; i < xi.k.size(); ++i) phase += xi.k[i] * x.angles[i];
    ComplexMatrix m(1, 1);
    m(0, 0) = std::polar(1.0, phase);
    return m;
  }
  const int t = xi.two_ell;
  const int d = t + 1;
  const Eigen::MatrixXd dm = little_d_matrix(t, x.euler[1]);
  const double alpha = x.euler[0], gamma = x.euler[2];
  ComplexMatrix D(d, d);
  for (int r = 0; r < d; ++r) {
    const double mp = 0.5 * (t - 2 * r);
    for (int c = 0; c < d; ++c) {
      const double m = 0.5 * (t - 2 * c);
      D(r, c) = std::polar(dm(r, c), -(mp * alpha + m * gamma));
    }
  }
  return D;
}

int degree(const Irrep& xi) {
  if (xi.kind == GroupKind::torus) {
    int d = 0;
    for (int c : xi.k) d = std::max(d, std::abs(c));
    return d;
  }
  return xi.two_ell;
}

namespace {

// Largest D such that the normalized equispaced sum of e^{i·d·step·t} over
// t = 0..count−1 vanishes for every d = 1..D (frequencies in step units).
int phase_scan_limit(int count, double step) {
  std::vector<Complex> pow(count, Complex(1.0, 0.0));
  std::vector<Complex> base(count);
  for (int t = 0; t < count; ++t) base[t] = std::polar(1.0, step * t);
  const int cap = 4 * count + 4;
  for (int d = 1; d <= cap; ++d) {
    Complex sum = 0.0;
    for (int t = 0; t < count; ++t) {
      pow[t] *= base[t];
      sum += pow[t];
    }
    if (std::abs(sum) / count > 1e-8) return d - 1;
  }
  return cap;
}

// Largest polynomial degree integrated exactly by the (x_j, w_j) rule against
// ∫_{-1}^{1}·dx/2, probed with Legendre products (residual at first failure
// is O(1/degree), far above rounding).
int legendre_scan_limit(const std::vector<double>& x, const std::vector<double>& w) {
  const int cap = 4 * static_cast<int>(x.size()) + 4;
  for (int p = 1; p <= cap; ++p) {
    const int a = (p + 1) / 2, b = p - (p + 1) / 2;
    double sum = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      sum += 0.5 * w[j] * legendre_value(a, x[j]) * legendre_value(b, x[j]);
    }
    const double exact = (a == b) ? 1.0 / (2 * a + 1) : 0.0;
    if (std::abs(sum - exact) > 1e-10) return p - 1;
  }
  return cap;
}

}  // namespace

QuadratureGrid quadrature_grid(const GroupDescriptor& g) {
  g.validate();
  QuadratureGrid grid;
  grid.group = g;
  if (g.kind == GroupKind::torus) {
    const int n = g.torus_dim, M = g.torus_points;
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(M);
    grid.points.reserve(total);
    grid.weights.assign(total, std::pow(double(M), -n));
    std::vector<int> t(n, 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::vector<double> angles(n);
      for (int i = 0; i < n; ++i) angles[i] = kTwoPi * t[i] / M;
      grid.points.push_back(torus_point(std::move(angles)));
      int i = n - 1;
      while (i >= 0 && ++t[i] == M) t[i--] = 0;
    }
    // Aliasing scan: per-component frequencies cancel up to |d| = M−1.
    const int single = phase_scan_limit(M, kTwoPi / M);
    grid.single_degree_limit = single;
    const int pairwise = single / 2;  // |k_i|,|l_i| ≤ K ⇒ |k_i−l_i| ≤ 2K
    grid.exactness_degree = pairwise + 1.0;  // ⟨ξ⟩ ≤ K+1 ⇒ |k|² ≤ (K+1)²−1 ⇒ |k|_∞ ≤ K
  } else {
    const int Ma = g.su2_alpha, Mb = g.su2_beta, Mg = g.su2_gamma;
    std::vector<double> xb, wb;
    gauss_legendre(Mb, xb, wb);
    grid.points.reserve(static_cast<std::size_t>(Ma) * Mb * Mg);
    grid.weights.reserve(grid.points.capacity());
    for (int ia = 0; ia < Ma; ++ia) {
      const double alpha = kTwoPi * ia / Ma;
      for (int jb = 0; jb < Mb; ++jb) {
        const double beta = std::acos(std::clamp(xb[jb], -1.0, 1.0));
        for (int kg = 0; kg < Mg; ++kg) {
          const double gamma = 2.0 * kTwoPi * kg / Mg;
          grid.points.push_back(su2_point_euler(alpha, beta, gamma));
          grid.weights.push_back((0.5 * wb[jb]) / (double(Ma) * double(Mg)));
        }
      }
    }
    // Factor-wise aliasing scans, combined: α carries e^{−iΔm·α} (Δm integer
    // for same-parity pairs), γ carries e^{−iΔn·γ} with 2Δn ∈ ℤ, β carries a
    // polynomial of degree ℓ+ℓ' in cos β.
    const int la = phase_scan_limit(Ma, kTwoPi / Ma);  // |Δm| ≤ la
    // e^{iΔn·γ_t} = e^{i(2Δn)·2πt/M_γ}: scan in 2Δn units.
    const int lg = phase_scan_limit(Mg, kTwoPi / Mg);  // |2Δn| ≤ lg
    const int lb = legendre_scan_limit(xb, wb);        // ℓ+ℓ' ≤ lb
    grid.single_degree_limit = std::min({2 * la, lg, 2 * lb});
    const int t = grid.single_degree_limit / 2;  // largest two_ell in an exact ball
    grid.exactness_degree = std::sqrt(1.0 + 0.25 * t * (t + 2.0));
  }
  return grid;
}

AdmissibleFamily admissible_family(const GroupDescriptor& g) {
  AdmissibleFamily fam;
  fam.group = g;
  if (g.kind == GroupKind::torus) {
    for (int j = 0; j < g.torus_dim; ++j) {
      AdmissibleFunction f;
      f.name = "exp(i*x" + std::to_string(j + 1) + ")-1";
      f.vanishing_order = 1;
      f.eval = [j](const GroupPoint& x) {
        return std::polar(1.0, x.angles.at(j)) - Complex(1.0, 0.0);
      };
      fam.functions.push_back(std::move(f));
    }
    return fam;
  }
  // Entries of D^{1/2}(x) − I in terms of the quaternion: a−1 = (w−1) − iz,
  // b = −y − ix. Re(a−1) has a second-order zero at e; the other three are
  // linear coordinates, so the joint gradient rank at e is 3.
  const char* names[4] = {"Re(a-1)", "Im(a)", "Re(b)", "Im(b)"};
  const int orders[4] = {2, 1, 1, 1};
  for (int j = 0; j < 4; ++j) {
    AdmissibleFunction f;
    f.name = names[j];
    f.vanishing_order = orders[j];
    f.eval = [j](const GroupPoint& x) -> Complex {
      switch (j) {
        case 0: return x.quat[0] - 1.0;
        case 1: return -x.quat[3];
        case 2: return -x.quat[2];
        default: return -x.quat[1];
      }
    };
    fam.functions.push_back(std::move(f));
  }
  return fam;
}

}  // namespace ncsg
