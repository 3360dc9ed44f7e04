/// Real unitary representations and their Casimir invariants.
#pragma once

#include "kkspectra/group.hpp"

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kks {

/// A real unitary representation rho: G -> O(V). Finite groups store one
/// matrix per table element; Lie groups evaluate rho on arbitrary elements
/// and carry the differentials rho_*(e_alpha).
struct RepresentationModel {
  enum class Kind { finite_table, u1_weight, su2_adjoint, trivial };

  Kind rep_kind = Kind::trivial;
  std::string name = "trivial";
  int dim_V = 1;
  bool irreducible = true;
  int weight = 0;                            // u1_weight
  std::vector<Eigen::MatrixXd> matrices;     // finite_table, aligned with group elements
  std::vector<Eigen::MatrixXd> rho_star;     // Lie kinds only

  Eigen::MatrixXd matrix(const GroupElement& x) const {
    switch (rep_kind) {
      case Kind::trivial:
        return Eigen::MatrixXd::Identity(dim_V, dim_V);
      case Kind::finite_table:
        return matrices.at(std::get<int>(x));
      case Kind::u1_weight: {
        const double t = weight * std::get<double>(x);
        Eigen::MatrixXd r(2, 2);
        r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
        return r;
      }
      case Kind::su2_adjoint:
        return std::get<Quat>(x).rotation();
    }
    throw std::logic_error("bad rep kind");
  }

  static RepresentationModel trivial_rep() { return RepresentationModel{}; }

  /// Nontrivial character n of U(1) realized as rotation by n*theta on R^2.
  static RepresentationModel u1_weight_rep(int n) {
    if (n == 0) {
      RepresentationModel r = trivial_rep();
      r.name = "rho_0";
      return r;
    }
    RepresentationModel r;
    r.rep_kind = Kind::u1_weight;
    r.name = "rho_" + std::to_string(n);
    r.dim_V = 2;
    r.weight = n;
    Eigen::MatrixXd J(2, 2);
    J << 0, -1, 1, 0;
    r.rho_star = {n * J};
    return r;
  }

  /// Adjoint representation of SU(2) on R^3; rho_*(e_alpha) = ad(e_alpha).
  static RepresentationModel su2_adjoint_rep() {
    RepresentationModel r;
    r.rep_kind = Kind::su2_adjoint;
    r.name = "adjoint";
    r.dim_V = 3;
    r.rho_star.assign(3, Eigen::MatrixXd::Zero(3, 3));
    // (ad e_a)_{cb} = c^c_{ab} = epsilon_{abc}
    CompactGroupModel su2 = CompactGroupModel::su2(2, 1, 2);
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < 3; ++c)
        for (int b = 0; b < 3; ++b) r.rho_star[a](c, b) = su2.structure[c](a, b);
    return r;
  }

  /// Representation of a finite group from explicit matrices (one per
  /// element, aligned with the group's element order).
  static RepresentationModel finite_rep(std::vector<Eigen::MatrixXd> mats, std::string nm,
                                        bool irred = true) {
    RepresentationModel r;
    r.rep_kind = Kind::finite_table;
    r.name = std::move(nm);
    r.dim_V = static_cast<int>(mats.at(0).rows());
    r.matrices = std::move(mats);
    r.irreducible = irred;
    return r;
  }

  /// Sign character of Z_m (m even): k -> (-1)^k.
  static RepresentationModel cyclic_sign_rep(int m) {
    if (m % 2 != 0) throw std::invalid_argument("sign rep needs even order");
    std::vector<Eigen::MatrixXd> mats;
    for (int k = 0; k < m; ++k)
      mats.push_back(Eigen::MatrixXd::Constant(1, 1, k % 2 == 0 ? 1.0 : -1.0));
    return finite_rep(std::move(mats), "sign");
  }

  /// Rotation representation of Z_m on R^2 with weight n.
  static RepresentationModel cyclic_rotation_rep(int m, int n) {
    std::vector<Eigen::MatrixXd> mats;
    for (int k = 0; k < m; ++k) {
      const double t = 2.0 * kPi * n * k / m;
      Eigen::MatrixXd r(2, 2);
      r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
      mats.push_back(r);
    }
    return finite_rep(std::move(mats), "rot_" + std::to_string(n));
  }

  /// Trivial character of a finite group as a finite_table rep.
  static RepresentationModel finite_trivial_rep(const CompactGroupModel& g) {
    std::vector<Eigen::MatrixXd> mats(g.size(), Eigen::MatrixXd::Identity(1, 1));
    return finite_rep(std::move(mats), "trivial");
  }

  /// Sign character of S_3.
  static RepresentationModel s3_sign_rep() {
    std::vector<Eigen::MatrixXd> mats;
    for (int e = 0; e < 6; ++e)
      mats.push_back(Eigen::MatrixXd::Constant(1, 1, e >= 1 && e <= 3 ? -1.0 : 1.0));
    return finite_rep(std::move(mats), "sign");
  }

  /// Standard 2-dimensional representation of S_3: permutation action on
  /// the plane x+y+z = 0 in the orthonormal basis (1,-1,0)/sqrt2,
  /// (1,1,-2)/sqrt6.
  static RepresentationModel s3_standard_rep() {
    Eigen::MatrixXd B(3, 2);
    B << 1 / std::sqrt(2.0), 1 / std::sqrt(6.0), -1 / std::sqrt(2.0), 1 / std::sqrt(6.0), 0,
        -2 / std::sqrt(6.0);
    std::vector<Eigen::MatrixXd> mats;
    for (int e = 0; e < 6; ++e) {
      const auto& p = CompactGroupModel::s3_permutation(e);
      Eigen::MatrixXd P = Eigen::MatrixXd::Zero(3, 3);
      for (int x = 0; x < 3; ++x) P(p[x], x) = 1.0;
      mats.push_back(B.transpose() * P * B);
    }
    return finite_rep(std::move(mats), "standard");
  }

  /// Homomorphism defect max over node pairs of |rho(xy) - rho(x)rho(y)|.
  double homomorphism_defect(const CompactGroupModel& g, std::size_t max_pairs = 400) const {
    double worst = 0.0;
    const std::size_t n = g.size();
    const std::size_t stride = std::max<std::size_t>(1, n * n / max_pairs);
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (c++ % stride != 0) continue;
        const Eigen::MatrixXd lhs = matrix(g.mul(g.elements[i], g.elements[j]));
        const Eigen::MatrixXd rhs = matrix(g.elements[i]) * matrix(g.elements[j]);
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
      }
    return worst;
  }

  /// Orthogonality defect max over nodes of |rho(x)^T rho(x) - I|.
  double orthogonality_defect(const CompactGroupModel& g) const {
    double worst = 0.0;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim_V, dim_V);
    for (const auto& x : g.elements) {
      const Eigen::MatrixXd r = matrix(x);
      worst = std::max(worst, (r.transpose() * r - id).cwiseAbs().maxCoeff());
    }
    return worst;
  }

  /// Defect of rho_*([e_a,e_b]) = [rho_*(e_a),rho_*(e_b)] over basis pairs.
  double differential_defect(const CompactGroupModel& g) const {
    if (rho_star.empty()) return 0.0;
    const int k = g.lie_dim();
    double worst = 0.0;
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(dim_V, dim_V);
        for (int c = 0; c < k; ++c) lhs += g.structure[c](a, b) * rho_star[c];
        const Eigen::MatrixXd rhs = rho_star[a] * rho_star[b] - rho_star[b] * rho_star[a];
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
      }
    return worst;
  }
};

struct CasimirResult {
  double chi = 0.0;       // sigma^{ab} rho_*(e_a) rho_*(e_b) = -chi * id
  double residual = 0.0;  // max-norm of the off-scalar part
  Eigen::MatrixXd casimir_matrix;
};

/// Casimir invariant chi_{sigma,rho} of an irreducible representation:
/// the scalar with sigma^{ab} rho_*(e_a) rho_*(e_b) = -chi * id. chi is
/// extracted as the negated mean diagonal, then residual-checked.
inline CasimirResult casimir(const RepresentationModel& rep, const CompactGroupModel& group,
                             double tol = 1e-8) {
  if (group.kind == GroupKind::finite)
    throw std::invalid_argument("casimir needs a Lie-kind group model");
  const int k = group.lie_dim();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(group.sigma);
  if (!lu.isInvertible()) throw std::invalid_argument("degenerate metric");
  const Eigen::MatrixXd sigma_inv = lu.inverse();

  CasimirResult out;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(rep.dim_V, rep.dim_V);
  if (!rep.rho_star.empty()) {
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        C += sigma_inv(a, b) * rep.rho_star[a] * rep.rho_star[b];
  }
  out.casimir_matrix = C;
  out.chi = -C.trace() / rep.dim_V;
  out.residual = (C + out.chi * Eigen::MatrixXd::Identity(rep.dim_V, rep.dim_V))
                     .cwiseAbs()
                     .maxCoeff();
  if (rep.irreducible && out.residual > tol)
    throw std::runtime_error(
        "not scalar: representation not (absolutely) irreducible or data inconsistent");
  return out;
}

/// Projector onto the G-invariant subspace of (functions on P) tensor V:
/// Pi = (1/mu(G)) sum_g w_g R(g) (x) rho(g), where R(g) is the pullback
/// action on functions. action(g) must return the n x n matrix of R(g).
inline Eigen::MatrixXd isotypic_projector(
    const CompactGroupModel& group, const RepresentationModel& rep,
    const std::function<Eigen::MatrixXd(std::size_t)>& action, int n_points) {
  const int d = rep.dim_V;
  const long dim = static_cast<long>(n_points) * d;
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t gi = 0; gi < group.size(); ++gi) {
    const Eigen::MatrixXd R = action(gi);
    if (R.rows() != n_points || R.cols() != n_points)
      throw std::invalid_argument("action matrix dimension mismatch");
    const Eigen::MatrixXd rho = rep.matrix(group.elements[gi]);
    for (int i = 0; i < n_points; ++i)
      for (int j = 0; j < n_points; ++j) {
        if (R(i, j) == 0.0) continue;
        pi.block(i * d, j * d, d, d) += group.haar_weights[gi] * R(i, j) * rho;
      }
  }
  return pi / group.haar_mass();
}

/// Same, with the action given by point permutations perm[g][i] = i*g.
inline Eigen::MatrixXd isotypic_projector(const CompactGroupModel& group,
                                          const RepresentationModel& rep,
                                          const std::vector<std::vector<int>>& perms) {
  const int n = static_cast<int>(perms.at(0).size());
  return isotypic_projector(
      group, rep,
      [&](std::size_t gi) {
        Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
        // pullback (R(g) f)(u) = f(u g)
        for (int u = 0; u < n; ++u) R(u, perms[gi][u]) = 1.0;
        return R;
      },
      n);
}

}  // namespace kks
