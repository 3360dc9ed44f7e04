/// Transfer maps Phi_i(f) = f o phi_i between function spaces, their
/// G-averaged equivariant replacements, and the convergence probes:
/// strong-convergence defects, Mosco items (1)-(2), eigenvalue and
/// eigenspace continuity along sequences, and empirical spectral lower
/// bounds across families.
#pragma once

#include "kkspectra/mm_space.hpp"
#include "kkspectra/operator.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace kks {

struct TransferMap {
  Eigen::SparseMatrix<double> matrix;  // (source dim) x (target dim)
  Eigen::VectorXd source_mass;
  Eigen::VectorXd target_mass;

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const { return matrix * f; }

  double source_norm(const Eigen::VectorXd& u) const {
    return std::sqrt(u.dot(source_mass.cwiseProduct(u)));
  }

  double target_norm(const Eigen::VectorXd& f) const {
    return std::sqrt(f.dot(target_mass.cwiseProduct(f)));
  }
};

inline TransferMap transfer_from_point_map(const PointMap& phi, Eigen::VectorXd source_mass,
                                           Eigen::VectorXd target_mass) {
  TransferMap t;
  std::vector<Eigen::Triplet<double>> trip;
  for (int u = 0; u < phi.n_source; ++u) trip.emplace_back(u, phi(u), 1.0);
  t.matrix.resize(phi.n_source, phi.n_target);
  t.matrix.setFromTriplets(trip.begin(), trip.end());
  t.source_mass = std::move(source_mass);
  t.target_mass = std::move(target_mass);
  return t;
}

/// Pointed/truncated variant: source points mapped to -1 lie outside the
/// domain ball and transfer to zero.
inline TransferMap transfer_from_partial_point_map(int n_source, int n_target,
                                                   const std::vector<int>& map,
                                                   Eigen::VectorXd source_mass,
                                                   Eigen::VectorXd target_mass) {
  TransferMap t;
  std::vector<Eigen::Triplet<double>> trip;
  for (int u = 0; u < n_source; ++u)
    if (map[u] >= 0) trip.emplace_back(u, map[u], 1.0);
  t.matrix.resize(n_source, n_target);
  t.matrix.setFromTriplets(trip.begin(), trip.end());
  t.source_mass = std::move(source_mass);
  t.target_mass = std::move(target_mass);
  return t;
}

/// Tensor with id_V: block transfer on V-valued functions.
inline TransferMap expand_transfer(const TransferMap& t, int d) {
  TransferMap out;
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < t.matrix.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(t.matrix, k); it; ++it)
      for (int a = 0; a < d; ++a)
        trip.emplace_back(static_cast<int>(it.row()) * d + a,
                          static_cast<int>(it.col()) * d + a, it.value());
  out.matrix.resize(t.matrix.rows() * d, t.matrix.cols() * d);
  out.matrix.setFromTriplets(trip.begin(), trip.end());
  out.source_mass.resize(t.source_mass.size() * d);
  for (int i = 0; i < t.source_mass.size(); ++i)
    out.source_mass.segment(i * d, d).setConstant(t.source_mass(i));
  out.target_mass.resize(t.target_mass.size() * d);
  for (int i = 0; i < t.target_mass.size(); ++i)
    out.target_mass.segment(i * d, d).setConstant(t.target_mass(i));
  return out;
}

/// Pullback permutation matrix of gamma on scalar functions:
/// (R(g) f)(u) = f(u g).
inline Eigen::SparseMatrix<double> pullback_matrix(const IsometricAction& act, int g, int n) {
  std::vector<Eigen::Triplet<double>> trip;
  for (int u = 0; u < n; ++u) trip.emplace_back(u, act.apply(u, g), 1.0);
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

/// Haar-averaged replacement Phi-hat = (1/mu) sum_g w_g R^s_{g^{-1}} Phi
/// R^t_g; exactly G-equivariant for finite groups.
inline TransferMap averaged_transfer(const TransferMap& phi, const IsometricAction& act_source,
                                     const IsometricAction& act_target) {
  const auto& group = act_source.group;
  if (group.size() != act_target.group.size())
    throw std::invalid_argument("actions must share the group");
  const int ns = static_cast<int>(phi.matrix.rows());
  const int nt = static_cast<int>(phi.matrix.cols());
  Eigen::SparseMatrix<double> acc(ns, nt);
  for (std::size_t g = 0; g < group.size(); ++g) {
    const int ginv = group.inverse_table[static_cast<int>(g)];
    const auto sp = pullback_matrix(act_source, ginv, ns);
    const auto tp = pullback_matrix(act_target, static_cast<int>(g), nt);
    acc = acc + Eigen::SparseMatrix<double>(group.haar_weights[g] * (sp * phi.matrix * tp));
  }
  TransferMap out = phi;
  out.matrix = acc / group.haar_mass();
  return out;
}

/// sup over group elements and test functions of the equivariance defect
/// ||R^s_g Phi f - Phi R^t_g f||_inf.
inline double transfer_equivariance_defect(const TransferMap& phi,
                                           const IsometricAction& act_source,
                                           const IsometricAction& act_target,
                                           const std::vector<Eigen::VectorXd>& tests) {
  const int ns = static_cast<int>(phi.matrix.rows());
  const int nt = static_cast<int>(phi.matrix.cols());
  double worst = 0.0;
  for (std::size_t g = 0; g < act_source.group.size(); ++g) {
    const auto sp = pullback_matrix(act_source, static_cast<int>(g), ns);
    const auto tp = pullback_matrix(act_target, static_cast<int>(g), nt);
    for (const auto& f : tests)
      worst = std::max(worst,
                       (sp * (phi.matrix * f) - phi.matrix * (tp * f)).cwiseAbs().maxCoeff());
  }
  return worst;
}

/// Max over tests of ||Phi f - Phi-hat f||_inf: how far the averaging
/// moved the map, bounded by Lip(f) times the equivariance defect of phi.
inline double averaging_defect(const TransferMap& phi, const TransferMap& phi_hat,
                               const std::vector<Eigen::VectorXd>& tests) {
  double worst = 0.0;
  for (const auto& f : tests)
    worst = std::max(worst, (phi.matrix * f - phi_hat.matrix * f).cwiseAbs().maxCoeff());
  return worst;
}

struct StrongConvergenceReport {
  Eigen::MatrixXd norms;     // (probe k, index i): ||Phi_i(u~_k) - u_i||_{H_i}
  Eigen::VectorXd tail_sup;  // per probe: sup over the tail half of the sequence
};

/// Strong-convergence surrogate: for each probe u~_k on the limit space
/// and each i, the H_i-norm of Phi_i(u~_k) - u_i; strong convergence shows
/// as tail_sup decreasing in k.
inline StrongConvergenceReport strong_convergence_defect(
    const std::vector<Eigen::VectorXd>& probes, const std::vector<Eigen::VectorXd>& us,
    const std::vector<TransferMap>& transfers) {
  if (us.size() != transfers.size()) throw std::invalid_argument("sequence length mismatch");
  StrongConvergenceReport out;
  const int nk = static_cast<int>(probes.size());
  const int ni = static_cast<int>(us.size());
  out.norms.resize(nk, ni);
  for (int k = 0; k < nk; ++k)
    for (int i = 0; i < ni; ++i)
      out.norms(k, i) = transfers[i].source_norm(transfers[i].apply(probes[k]) - us[i]);
  out.tail_sup.resize(nk);
  const int tail_start = ni / 2;
  for (int k = 0; k < nk; ++k)
    out.tail_sup(k) = out.norms.row(k).segment(tail_start, ni - tail_start).maxCoeff();
  return out;
}

struct MoscoReport {
  Eigen::VectorXd limit_energy;      // per test vector
  Eigen::MatrixXd recovery_energy;   // (test, i): E_i(Phi-hat_i u)
  Eigen::MatrixXd recovery_defect;   // |E_i(Phi-hat_i u) - E_inf(u)|
  Eigen::VectorXd liminf_margin;     // per weak family: min tail E_i - E_inf
};

/// Mosco items, numerically: (2) the default recovery sequence u_i =
/// Phi-hat_i(u) should carry energy E_i(u_i) -> E_inf(u); (1) for supplied
/// weakly-convergent families the tail energies must not undercut the
/// limit energy.
inline MoscoReport mosco_probe(
    const std::vector<SymmetricOperator>& ops, const std::vector<TransferMap>& transfers,
    const SymmetricOperator& limit_op, const std::vector<Eigen::VectorXd>& tests,
    const std::vector<std::pair<std::vector<Eigen::VectorXd>, Eigen::VectorXd>>& weak_families =
        {}) {
  if (ops.size() != transfers.size()) throw std::invalid_argument("sequence length mismatch");
  MoscoReport out;
  const int nt = static_cast<int>(tests.size());
  const int ni = static_cast<int>(ops.size());
  out.limit_energy.resize(nt);
  out.recovery_energy.resize(nt, ni);
  out.recovery_defect.resize(nt, ni);
  for (int t = 0; t < nt; ++t) {
    out.limit_energy(t) = limit_op.quadratic_form(tests[t]);
    for (int i = 0; i < ni; ++i) {
      out.recovery_energy(t, i) = ops[i].quadratic_form(transfers[i].apply(tests[t]));
      out.recovery_defect(t, i) = std::abs(out.recovery_energy(t, i) - out.limit_energy(t));
    }
  }
  out.liminf_margin.resize(static_cast<int>(weak_families.size()));
  for (std::size_t w = 0; w < weak_families.size(); ++w) {
    const auto& [family, limit_vec] = weak_families[w];
    if (family.size() != ops.size()) throw std::invalid_argument("weak family length mismatch");
    double tail_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = ops.size() / 2; i < ops.size(); ++i)
      tail_min = std::min(tail_min, ops[i].quadratic_form(family[i]));
    out.liminf_margin(static_cast<int>(w)) = tail_min - limit_op.quadratic_form(limit_vec);
  }
  return out;
}

/// Largest principal angle between span(u) and span(v) in the M-inner
/// product of op; invariant under orthonormal re-basing of either side.
inline double max_principal_angle(const SymmetricOperator& op, Eigen::MatrixXd u,
                                  const Eigen::MatrixXd& v) {
  for (int a = 0; a < u.cols(); ++a) {
    for (int pass = 0; pass < 2; ++pass)
      for (int b = 0; b < a; ++b) u.col(a) -= op.inner(u.col(b), u.col(a)) * u.col(b);
    const double n = op.norm(u.col(a));
    if (n < 1e-12) throw std::runtime_error("degenerate subspace basis");
    u.col(a) /= n;
  }
  Eigen::MatrixXd w = v;
  for (int a = 0; a < w.cols(); ++a) {
    for (int pass = 0; pass < 2; ++pass)
      for (int b = 0; b < a; ++b) w.col(a) -= op.inner(w.col(b), w.col(a)) * w.col(b);
    const double n = op.norm(w.col(a));
    if (n < 1e-12) throw std::runtime_error("degenerate subspace basis");
    w.col(a) /= n;
  }
  Eigen::MatrixXd cross(u.cols(), w.cols());
  for (int a = 0; a < u.cols(); ++a)
    for (int b = 0; b < w.cols(); ++b) cross(a, b) = op.inner(u.col(a), w.col(b));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross);
  return std::acos(std::clamp(svd.singularValues().minCoeff(), -1.0, 1.0));
}

struct EigenContinuityRow {
  int i = 0;
  int j = 0;
  double lambda = 0.0;
  double gap = 0.0;  // |lambda_{i,j} - lambda_{inf,j}|
};

struct EigenContinuityReport {
  std::vector<EigenContinuityRow> rows;
  Eigen::VectorXd limit_values;                  // first j_max limit eigenvalues
  std::vector<std::pair<int, int>> clusters;     // [begin,end) index ranges
  Eigen::MatrixXd angles;                        // (i, cluster): max principal angle
};

/// Spectral-continuity probe along a sequence of operators: eigenvalue
/// gaps per (i,j) and eigenspace transfer residuals measured as principal
/// angles between the transferred limit eigenspace and the computed
/// eigenspace, degeneracy clusters grouped at relative tolerance
/// cluster_rtol.
inline EigenContinuityReport eigen_continuity(const std::vector<SymmetricOperator>& ops,
                                              const std::vector<TransferMap>& transfers,
                                              const SymmetricOperator& limit_op, int j_max,
                                              std::uint64_t seed = 0,
                                              double cluster_rtol = 1e-6) {
  if (ops.size() != transfers.size()) throw std::invalid_argument("sequence length mismatch");
  const int buffered = std::min(limit_op.dim, j_max + 2);
  const Spectrum limit_spec = eigs(limit_op, buffered, seed);

  EigenContinuityReport out;
  out.limit_values = limit_spec.values.head(std::min(j_max, buffered));

  // degeneracy clusters within the first j_max limit eigenvalues
  int begin = 0;
  for (int j = 1; j <= out.limit_values.size(); ++j) {
    const bool split =
        j == out.limit_values.size() ||
        std::abs(out.limit_values(j) - out.limit_values(j - 1)) >
            cluster_rtol * std::max(1.0, std::abs(out.limit_values(j)));
    if (split) {
      out.clusters.emplace_back(begin, j);
      begin = j;
    }
  }

  const int ni = static_cast<int>(ops.size());
  out.angles.resize(ni, static_cast<int>(out.clusters.size()));
  for (int i = 0; i < ni; ++i) {
    const Spectrum spec_i = eigs(ops[i], buffered, seed);
    for (int j = 0; j < out.limit_values.size(); ++j)
      out.rows.push_back({i, j, spec_i.values(j),
                          std::abs(spec_i.values(j) - out.limit_values(j))});

    for (std::size_t c = 0; c < out.clusters.size(); ++c) {
      const auto [cb, ce] = out.clusters[c];
      Eigen::MatrixXd u(ops[i].dim, ce - cb);
      for (int j = cb; j < ce; ++j) u.col(j - cb) = transfers[i].apply(limit_spec.vectors.col(j));
      out.angles(i, static_cast<int>(c)) =
          max_principal_angle(ops[i], u, spec_i.vectors.middleCols(cb, ce - cb));
    }
  }
  return out;
}

struct LowerBoundRow {
  std::string label;
  double lambda_j = 0.0;
  double curvature_norm = 0.0;    // ||F||_inf of the member
  double codifferential_norm = 0.0;
};

struct LowerBoundReport {
  std::vector<LowerBoundRow> rows;
  double min_lambda_j = 0.0;
};

/// Empirical probe of the uniform lower bound: the min of the j-th
/// eigenvalue (j one-based) across a family whose curvature bounds are
/// declared by the caller. The uniform constants themselves are
/// non-constructive; this only tabulates.
inline LowerBoundReport lower_bound_probe(
    const std::vector<std::tuple<std::string, const SymmetricOperator*, double, double>>& family,
    int j) {
  if (family.empty()) throw std::invalid_argument("empty family");
  LowerBoundReport out;
  out.min_lambda_j = std::numeric_limits<double>::infinity();
  for (const auto& [label, op, fnorm, dnorm] : family) {
    if (j < 1 || j > op->dim) throw std::invalid_argument("eigenvalue index out of range");
    const Spectrum s = eigs(*op, j, 0, false);
    LowerBoundRow row;
    row.label = label;
    row.lambda_j = s.values(j - 1);
    row.curvature_norm = fnorm;
    row.codifferential_norm = dnorm;
    out.rows.push_back(row);
    out.min_lambda_j = std::min(out.min_lambda_j, row.lambda_j);
  }
  return out;
}

}  // namespace kks
