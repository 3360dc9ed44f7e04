/// Compact group models: finite groups by multiplication table, U(1) and
/// SU(2) by Haar quadrature, together with their Lie data (structure
/// constants and an Ad-invariant metric on the Lie algebra).
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace kks {

inline constexpr double kPi = std::numbers::pi;

/// Unit quaternion a + b*i + c*j + d*k, the double cover picture of SU(2).
struct Quat {
  double a = 1.0, b = 0.0, c = 0.0, d = 0.0;

  Quat() = default;
  Quat(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {}

  double norm() const { return std::sqrt(a * a + b * b + c * c + d * d); }

  Quat conj() const { return {a, -b, -c, -d}; }

  Quat normalized() const {
    const double n = norm();
    return {a / n, b / n, c / n, d / n};
  }

  friend Quat operator*(const Quat& p, const Quat& q) {
    return {p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
            p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
            p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
            p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a};
  }

  /// exp of the pure-imaginary quaternion (x1*i + x2*j + x3*k)/2, i.e. the
  /// group exponential in the basis e_alpha = u_alpha/2.
  static Quat exp_lie(const Eigen::Vector3d& x) {
    const double t = x.norm() / 2.0;
    if (t < 1e-300) return {1.0, x(0) / 2.0, x(1) / 2.0, x(2) / 2.0};
    const double s = std::sin(t) / (2.0 * t);
    return {std::cos(t), s * x(0), s * x(1), s * x(2)};
  }

  /// Inverse of exp_lie on the principal branch; throws near the cut locus
  /// (the antipode -1, where the logarithm is not unique).
  Eigen::Vector3d log_lie() const {
    const double va = std::clamp(a, -1.0, 1.0);
    const double vn = std::sqrt(b * b + c * c + d * d);
    const double t = std::atan2(vn, va);  // in [0, pi]
    if (t > kPi - 1e-9)
      throw std::runtime_error("quaternion log at cut locus");
    if (vn < 1e-300) return Eigen::Vector3d::Zero();
    const double s = 2.0 * t / vn;
    return {s * b, s * c, s * d};
  }

  /// Rotation matrix of the adjoint action on R^3 (quaternion conjugation).
  Eigen::Matrix3d rotation() const {
    Eigen::Matrix3d R;
    R << a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c),
        2 * (b * c + a * d), a * a - b * b + c * c - d * d, 2 * (c * d - a * b),
        2 * (b * d - a * c), 2 * (c * d + a * b), a * a - b * b - c * c + d * d;
    return R;
  }
};

/// A group element: index into a finite table, an angle for U(1), or a unit
/// quaternion for SU(2).
using GroupElement = std::variant<int, double, Quat>;

enum class GroupKind { finite, u1, su2 };

/// Nodes/weights of the n-point Gauss-Legendre rule on [-1,1].
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

/// Model of a compact group. Finite groups are exact (full multiplication
/// table, counting measure). U(1) carries m uniform nodes with trapezoid
/// weights, exact on Fourier modes |n| < m. SU(2) carries a product rule on
/// ZYZ Euler angles (uniform x Gauss-Legendre x uniform), exact on matrix
/// coefficients of spin <= j as long as 4j < min(n_alpha, n_gamma) and
/// 2*n_beta > 2j.
struct CompactGroupModel {
  GroupKind kind = GroupKind::finite;
  std::string name;

  // finite data
  std::vector<std::vector<int>> table;  // table[a][b] = a*b
  std::vector<int> inverse_table;
  int identity_index = 0;

  // Lie data (empty for finite groups)
  Eigen::MatrixXd sigma;                       // Ad-invariant metric on the basis e_alpha
  std::vector<Eigen::MatrixXd> structure;      // structure[g](a,b) = c^g_{ab}
  std::vector<GroupElement> elements;          // finite: all elements; Lie: quadrature nodes
  std::vector<double> haar_weights;            // sums to haar_mass()

  int lie_dim() const { return static_cast<int>(sigma.rows()); }
  std::size_t size() const { return elements.size(); }
  double haar_mass() const {
    double s = 0.0;
    for (double w : haar_weights) s += w;
    return s;
  }

  GroupElement identity() const {
    switch (kind) {
      case GroupKind::finite: return identity_index;
      case GroupKind::u1: return 0.0;
      case GroupKind::su2: return Quat{};
    }
    throw std::logic_error("bad kind");
  }

  GroupElement mul(const GroupElement& x, const GroupElement& y) const {
    switch (kind) {
      case GroupKind::finite:
        return table[std::get<int>(x)][std::get<int>(y)];
      case GroupKind::u1: {
        double t = std::get<double>(x) + std::get<double>(y);
        t = std::remainder(t, 2.0 * kPi);
        return t;
      }
      case GroupKind::su2:
        return (std::get<Quat>(x) * std::get<Quat>(y)).normalized();
    }
    throw std::logic_error("bad kind");
  }

  GroupElement inv(const GroupElement& x) const {
    switch (kind) {
      case GroupKind::finite: return inverse_table[std::get<int>(x)];
      case GroupKind::u1: return -std::get<double>(x);
      case GroupKind::su2: return std::get<Quat>(x).conj();
    }
    throw std::logic_error("bad kind");
  }

  /// Lie-algebra coordinates of the principal logarithm in the basis
  /// e_alpha. Throws "log at cut locus" when the element is antipodal.
  Eigen::VectorXd log(const GroupElement& x) const {
    switch (kind) {
      case GroupKind::u1: {
        Eigen::VectorXd v(1);
        const double t = std::remainder(std::get<double>(x), 2.0 * kPi);
        if (std::abs(t) > kPi - 1e-12)
          throw std::runtime_error("group log at cut locus");
        v(0) = t;
        return v;
      }
      case GroupKind::su2:
        return std::get<Quat>(x).log_lie();
      case GroupKind::finite:
        throw std::runtime_error("finite group has no Lie algebra");
    }
    throw std::logic_error("bad kind");
  }

  GroupElement exp(const Eigen::VectorXd& v) const {
    switch (kind) {
      case GroupKind::u1:
        return std::remainder(v(0), 2.0 * kPi);
      case GroupKind::su2:
        return Quat::exp_lie(Eigen::Vector3d(v));
      case GroupKind::finite:
        throw std::runtime_error("finite group has no Lie algebra");
    }
    throw std::logic_error("bad kind");
  }

  /// Bracket [x,y] in Lie-algebra coordinates via the structure constants.
  Eigen::VectorXd bracket(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    const int k = lie_dim();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(k);
    for (int g = 0; g < k; ++g)
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) out(g) += structure[g](a, b) * x(a) * y(b);
    return out;
  }

  /// Max violation of sigma([e_g,e_a],e_b) + sigma(e_a,[e_g,e_b]) over all
  /// basis triples (zero iff sigma is Ad-invariant at the algebra level).
  double ad_invariance_defect() const {
    const int k = lie_dim();
    double worst = 0.0;
    for (int g = 0; g < k; ++g)
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
          double s = 0.0;
          for (int c = 0; c < k; ++c)
            s += structure[c](g, a) * sigma(c, b) + structure[c](g, b) * sigma(a, c);
          worst = std::max(worst, std::abs(s));
        }
    return worst;
  }

  /// Max violation of antisymmetry and of the Jacobi identity on basis triples.
  double jacobi_defect() const {
    const int k = lie_dim();
    double worst = 0.0;
    for (int g = 0; g < k; ++g)
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
          worst = std::max(worst, std::abs(structure[g](a, b) + structure[g](b, a)));
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        for (int c = 0; c < k; ++c) {
          Eigen::VectorXd ea = Eigen::VectorXd::Zero(k), eb = Eigen::VectorXd::Zero(k),
                          ec = Eigen::VectorXd::Zero(k);
          ea(a) = eb(b) = ec(c) = 1.0;
          const Eigen::VectorXd j =
              bracket(ea, bracket(eb, ec)) + bracket(eb, bracket(ec, ea)) + bracket(ec, bracket(ea, eb));
          worst = std::max(worst, j.cwiseAbs().maxCoeff());
        }
    return worst;
  }

  void validate() const {
    if (kind == GroupKind::finite) {
      const int n = static_cast<int>(table.size());
      if (n == 0) throw std::invalid_argument("empty group table");
      for (const auto& row : table)
        if (static_cast<int>(row.size()) != n) throw std::invalid_argument("ragged group table");
      for (int a = 0; a < n; ++a) {
        if (table[identity_index][a] != a || table[a][identity_index] != a)
          throw std::invalid_argument("identity row/column mismatch");
        if (table[a][inverse_table[a]] != identity_index)
          throw std::invalid_argument("inverse table mismatch");
      }
      // associativity makes the table a Latin square in each row/column
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c)
            if (table[table[a][b]][c] != table[a][table[b][c]])
              throw std::invalid_argument("non-associative table");
    } else {
      if (jacobi_defect() > 1e-12) throw std::invalid_argument("Jacobi identity violated");
      if (ad_invariance_defect() > 1e-12)
        throw std::invalid_argument("sigma is not Ad-invariant");
    }
  }

  static CompactGroupModel finite_from_table(std::vector<std::vector<int>> t, std::string nm = "finite") {
    CompactGroupModel g;
    g.kind = GroupKind::finite;
    g.name = std::move(nm);
    g.table = std::move(t);
    const int n = static_cast<int>(g.table.size());
    for (int a = 0; a < n; ++a) {
      bool found = true;
      for (int b = 0; b < n; ++b) found = found && g.table[a][b] == b && g.table[b][a] == b;
      if (found) g.identity_index = a;
    }
    g.inverse_table.assign(n, -1);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (g.table[a][b] == g.identity_index) g.inverse_table[a] = b;
    g.sigma.resize(0, 0);
    g.elements.reserve(n);
    for (int a = 0; a < n; ++a) {
      g.elements.emplace_back(a);
      g.haar_weights.push_back(1.0);
    }
    g.validate();
    return g;
  }

  /// Cyclic group Z_m with elements 0..m-1 under addition.
  static CompactGroupModel cyclic(int m) {
    std::vector<std::vector<int>> t(m, std::vector<int>(m));
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) t[a][b] = (a + b) % m;
    return finite_from_table(std::move(t), "Z" + std::to_string(m));
  }

  /// Symmetric group S_3; elements enumerated as permutations of {0,1,2}:
  /// id, (01), (02), (12), (012), (021).
  static CompactGroupModel symmetric3() {
    const std::vector<std::array<int, 3>> perms = {
        {0, 1, 2}, {1, 0, 2}, {2, 1, 0}, {0, 2, 1}, {1, 2, 0}, {2, 0, 1}};
    auto compose = [&](int a, int b) {  // (a*b)(x) = a(b(x))
      std::array<int, 3> p{};
      for (int x = 0; x < 3; ++x) p[x] = perms[a][perms[b][x]];
      for (int i = 0; i < 6; ++i)
        if (perms[i] == p) return i;
      throw std::logic_error("S3 closure");
    };
    std::vector<std::vector<int>> t(6, std::vector<int>(6));
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) t[a][b] = compose(a, b);
    return finite_from_table(std::move(t), "S3");
  }

  static const std::array<int, 3>& s3_permutation(int element) {
    static const std::vector<std::array<int, 3>> perms = {
        {0, 1, 2}, {1, 0, 2}, {2, 1, 0}, {0, 2, 1}, {1, 2, 0}, {2, 0, 1}};
    return perms.at(element);
  }

  /// U(1) with m uniform quadrature nodes. sigma = (s): the generator e_1
  /// has length sqrt(s), so the fiber circumference (= Haar mass) is
  /// 2*pi*sqrt(s).
  static CompactGroupModel u1(int m, double sigma_scale = 1.0) {
    if (m < 1) throw std::invalid_argument("need at least one node");
    CompactGroupModel g;
    g.kind = GroupKind::u1;
    g.name = "U1";
    g.sigma = Eigen::MatrixXd::Constant(1, 1, sigma_scale);
    g.structure = {Eigen::MatrixXd::Zero(1, 1)};
    const double mass = 2.0 * kPi * std::sqrt(sigma_scale);
    for (int j = 0; j < m; ++j) {
      g.elements.emplace_back(2.0 * kPi * j / m);
      g.haar_weights.push_back(mass / m);
    }
    g.validate();
    return g;
  }

  /// SU(2) with the product Euler-angle rule described above. sigma = s*I
  /// in the basis e_alpha = u_alpha/2 with [e_1,e_2] = e_3; the Haar mass
  /// is the Riemannian volume 16*pi^2*s^{3/2} (the round 3-sphere of
  /// radius 2*sqrt(s)).
  static CompactGroupModel su2(int n_alpha = 8, int n_beta = 4, int n_gamma = 8,
                               double sigma_scale = 1.0) {
    CompactGroupModel g;
    g.kind = GroupKind::su2;
    g.name = "SU2";
    g.sigma = sigma_scale * Eigen::MatrixXd::Identity(3, 3);
    // c^g_{ab} = epsilon_{abg}
    g.structure.assign(3, Eigen::MatrixXd::Zero(3, 3));
    for (int c = 0; c < 3; ++c)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          if (a == b || a == c || b == c) continue;
          int sign = 1;
          int p[3] = {a, b, c};
          for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
              if (p[i] > p[j]) {
                std::swap(p[i], p[j]);
                sign = -sign;
              }
          g.structure[c](a, b) = sign;
        }

    std::vector<double> gl_nodes, gl_weights;
    gauss_legendre(n_beta, gl_nodes, gl_weights);
    const double mass = 16.0 * kPi * kPi * std::pow(sigma_scale, 1.5);
    double raw_total = 0.0;
    std::vector<double> raw;
    for (int ia = 0; ia < n_alpha; ++ia) {
      const double alpha = 2.0 * kPi * ia / n_alpha;
      for (int ib = 0; ib < n_beta; ++ib) {
        const double beta = std::acos(gl_nodes[ib]);
        for (int ic = 0; ic < n_gamma; ++ic) {
          const double gamma = 4.0 * kPi * ic / n_gamma;
          Eigen::Vector3d z1(0, 0, alpha), y(0, beta, 0), z2(0, 0, gamma);
          const Quat q = Quat::exp_lie(z1) * Quat::exp_lie(y) * Quat::exp_lie(z2);
          g.elements.emplace_back(q.normalized());
          const double w = (2.0 * kPi / n_alpha) * gl_weights[ib] * (4.0 * kPi / n_gamma);
          raw.push_back(w);
          raw_total += w;
        }
      }
    }
    for (double w : raw) g.haar_weights.push_back(w * mass / raw_total);
    g.validate();
    return g;
  }
};

/// Weighted Haar mean of scalar samples, normalized by the total mass.
inline double haar_average(const CompactGroupModel& g, const std::vector<double>& samples) {
  if (samples.size() != g.size()) throw std::invalid_argument("sample count mismatch");
  if (samples.empty()) throw std::invalid_argument("empty sample set");
  double s = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) s += g.haar_weights[i] * samples[i];
  return s / g.haar_mass();
}

/// Weighted Haar mean of matrix (or vector) samples.
inline Eigen::MatrixXd haar_average(const CompactGroupModel& g,
                                    const std::vector<Eigen::MatrixXd>& samples) {
  if (samples.size() != g.size()) throw std::invalid_argument("sample count mismatch");
  if (samples.empty()) throw std::invalid_argument("empty sample set");
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(samples[0].rows(), samples[0].cols());
  for (std::size_t i = 0; i < samples.size(); ++i) s += g.haar_weights[i] * samples[i];
  return s / g.haar_mass();
}

}  // namespace kks
