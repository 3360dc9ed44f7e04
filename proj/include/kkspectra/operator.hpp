/// Sparse symmetric operators in a measure-weighted inner product, and a
/// deterministic eigensolver: dense below dimension 2000, shift-invert
/// Lanczos with full reorthogonalization above.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace kks {

/// Operator A = M^{-1} S with S sparse symmetric (the stiffness form) and
/// M the diagonal mass matrix of the measure-weighted inner product; the
/// quadratic form is E(u) = u^T S u and <u,v> = u^T M v.
struct SymmetricOperator {
  int dim = 0;
  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd mass;  // positive weights
  std::string domain;

  static SymmetricOperator zero(int n, std::string dom = "") {
    SymmetricOperator op;
    op.dim = n;
    op.stiffness.resize(n, n);
    op.mass = Eigen::VectorXd::Ones(n);
    op.domain = std::move(dom);
    return op;
  }

  static SymmetricOperator from_triplets(int n, const std::vector<Eigen::Triplet<double>>& t,
                                         Eigen::VectorXd m, std::string dom = "") {
    SymmetricOperator op;
    op.dim = n;
    op.stiffness.resize(n, n);
    op.stiffness.setFromTriplets(t.begin(), t.end());
    op.mass = std::move(m);
    op.domain = std::move(dom);
    return op;
  }

  /// A u = M^{-1} S u.
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const {
    return (stiffness * u).cwiseQuotient(mass);
  }

  double quadratic_form(const Eigen::VectorXd& u) const { return u.dot(stiffness * u); }

  double inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    return u.dot(mass.cwiseProduct(v));
  }

  double norm(const Eigen::VectorXd& u) const { return std::sqrt(inner(u, u)); }

  double symmetry_defect() const {
    Eigen::SparseMatrix<double> diff = stiffness - Eigen::SparseMatrix<double>(stiffness.transpose());
    double m = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it)
        m = std::max(m, std::abs(it.value()));
    return m;
  }

  Eigen::MatrixXd dense() const {
    return mass.cwiseInverse().asDiagonal() * Eigen::MatrixXd(stiffness);
  }

  /// Scale estimate: max_i |S_ii| / M_ii + row sums, a cheap upper bound
  /// proxy for ||A||.
  double scale() const {
    Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(dim);
    for (int k = 0; k < stiffness.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(stiffness, k); it; ++it)
        rowsum(it.row()) += std::abs(it.value());
    return (rowsum.cwiseQuotient(mass)).maxCoeff();
  }
};

struct Spectrum {
  Eigen::VectorXd values;   // ascending with multiplicity
  Eigen::MatrixXd vectors;  // M-orthonormal columns (optional: 0 columns)
  std::string method;
  Eigen::VectorXd residuals;  // ||S v - lambda M v|| / (scale * ||v||_M)

  int count() const { return static_cast<int>(values.size()); }
};

namespace detail {

/// Dense path: symmetrize with M^{-1/2} and call the dense solver.
inline Spectrum eigs_dense(const SymmetricOperator& op, int count) {
  const Eigen::VectorXd sqrt_m = op.mass.cwiseSqrt();
  Eigen::MatrixXd a = Eigen::MatrixXd(op.stiffness);
  a = sqrt_m.cwiseInverse().asDiagonal() * a * sqrt_m.cwiseInverse().asDiagonal();
  a = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
  Spectrum s;
  s.method = "dense";
  s.values = es.eigenvalues().head(count);
  s.vectors = sqrt_m.cwiseInverse().asDiagonal() * es.eigenvectors().leftCols(count);
  return s;
}

/// Shift-invert Lanczos with full reorthogonalization in the M-inner
/// product: K = (S + shift M)^{-1} M is self-adjoint w.r.t. M and its top
/// eigenvalues map to the lowest eigenvalues of S v = lambda M v.
inline Spectrum eigs_lanczos(const SymmetricOperator& op, int count, std::uint64_t seed,
                             int max_iters) {
  const int n = op.dim;
  const double shift = std::max(1e-8, 1e-6 * op.scale());
  Eigen::SparseMatrix<double> shifted = op.stiffness;
  for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift * op.mass(i);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(shifted);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("factorization failed in shift-invert Lanczos");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd start(n);
  for (int i = 0; i < n; ++i) start(i) = gauss(rng);
  Eigen::MatrixXd basis(n, max_iters);
  std::vector<double> alpha, beta;

  Eigen::VectorXd q = start / op.norm(start);
  basis.col(0) = q;
  Eigen::VectorXd q_prev = Eigen::VectorXd::Zero(n);
  double beta_prev = 0.0;
  int iters = 0;
  for (int j = 0; j < max_iters; ++j) {
    Eigen::VectorXd w = solver.solve(op.mass.cwiseProduct(q));
    const double a = op.inner(q, w);
    alpha.push_back(a);
    w -= a * q + beta_prev * q_prev;
    // full reorthogonalization against the stored basis (twice)
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i <= j; ++i) w -= op.inner(basis.col(i), w) * basis.col(i);
    const double b = op.norm(w);
    iters = j + 1;
    if (b < 1e-13 || j + 1 == max_iters) break;
    beta.push_back(b);
    q_prev = q;
    beta_prev = b;
    q = w / b;
    basis.col(j + 1) = q;
  }

  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(iters, iters);
  for (int i = 0; i < iters; ++i) {
    tri(i, i) = alpha[i];
    if (i + 1 < iters) tri(i, i + 1) = tri(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
  if (iters < count) throw std::runtime_error("Krylov space exhausted before count");
  // largest theta of K <-> smallest lambda of the pencil
  Spectrum s;
  s.method = "lanczos";
  s.values.resize(count);
  s.vectors.resize(n, count);
  for (int i = 0; i < count; ++i) {
    const int col = iters - 1 - i;
    const double theta = es.eigenvalues()(col);
    if (theta <= 0.0) throw std::runtime_error("eigensolver did not converge (theta <= 0)");
    s.values(i) = 1.0 / theta - shift;
    s.vectors.col(i) = basis.leftCols(iters) * es.eigenvectors().col(col);
    s.vectors.col(i) /= op.norm(s.vectors.col(i));
  }
  // theta ordering gives ascending lambda; guard against rounding ties
  for (int i = 1; i < count; ++i)
    for (int j = i; j > 0 && s.values(j) < s.values(j - 1); --j) {
      std::swap(s.values(j), s.values(j - 1));
      s.vectors.col(j).swap(s.vectors.col(j - 1));
    }
  return s;
}

inline Eigen::VectorXd residuals_of(const SymmetricOperator& op, const Spectrum& s) {
  const double scale = std::max(op.scale(), 1e-300);
  Eigen::VectorXd res(s.count());
  for (int i = 0; i < s.count(); ++i) {
    const Eigen::VectorXd v = s.vectors.col(i);
    const Eigen::VectorXd r = op.stiffness * v - s.values(i) * op.mass.cwiseProduct(v);
    res(i) = std::sqrt(r.dot(r.cwiseQuotient(op.mass))) / scale;
  }
  return res;
}

}  // namespace detail

/// Lowest `count` eigenpairs of S v = lambda M v. Deterministic: the dense
/// path is direct, the Lanczos path uses a seeded start vector and a fixed
/// reduction order, growing the Krylov space until the per-pair residual
/// meets 1e-9 * scale (iteration cap documented in the error message).
inline Spectrum eigs(const SymmetricOperator& op, int count, std::uint64_t seed = 0,
                     bool want_vectors = true) {
  if (count > op.dim) throw std::invalid_argument("count exceeds dimension");
  if (count == 0) return {};
  Spectrum s;
  if (op.dim < 2000) {
    s = detail::eigs_dense(op, count);
    s.residuals = detail::residuals_of(op, s);
  } else {
    const std::uint64_t sd = seed == 0 ? 0x9e3779b9u : seed;
    int iters = std::min(op.dim, std::max(3 * count + 60, 100));
    for (;;) {
      s = detail::eigs_lanczos(op, count, sd, iters);
      s.residuals = detail::residuals_of(op, s);
      if (s.residuals.maxCoeff() <= 1e-9 || iters >= std::min(op.dim, 8 * count + 2000)) break;
      iters = std::min(op.dim, 2 * iters);
    }
  }
  if (s.residuals.maxCoeff() > 1e-9)
    throw std::runtime_error("eigensolver did not converge: residual " +
                             std::to_string(s.residuals.maxCoeff()));
  if (!want_vectors) s.vectors.resize(0, 0);
  return s;
}

/// Smallest Ritz value as a positive-semidefiniteness probe.
inline double smallest_ritz_value(const SymmetricOperator& op) {
  return eigs(op, 1, 0, false).values(0);
}

}  // namespace kks
