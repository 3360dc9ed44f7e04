/// Ricci curvature of the Kaluza-Klein metric: the closed-form blocks in
/// the frame (horizontal lifts, vertical basis), and an independent
/// finite-difference oracle evaluating Ricci from any closed-form chart
/// metric via centered differences of Christoffel symbols.
#pragma once

#include "kkspectra/connection.hpp"
#include "kkspectra/group.hpp"

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace kks {

struct RicciBlocks {
  int dims = 0, lie_dim = 0, n_vertices = 0;
  std::vector<Eigen::MatrixXd> hh;  // per vertex: dims x dims
  std::vector<Eigen::MatrixXd> hv;  // per vertex: dims x lie_dim
  std::vector<Eigen::MatrixXd> vv;  // per vertex: lie_dim x lie_dim
  double kappa_hat = 0.0;           // min eigenvalue of Ric relative to h

  Eigen::MatrixXd full_at(int v) const {
    Eigen::MatrixXd r(dims + lie_dim, dims + lie_dim);
    r.topLeftCorner(dims, dims) = hh[v];
    r.topRightCorner(dims, lie_dim) = hv[v];
    r.bottomLeftCorner(lie_dim, dims) = hv[v].transpose();
    r.bottomRightCorner(lie_dim, lie_dim) = vv[v];
    return r;
  }
};

/// Ricci blocks of h(g,A,sigma) on a flat base:
///   HH_jk = Ric_jk - (F*F)_jk^{ab} sigma_ab / 2
///   HV_jb = {(d^nabla)* F}_j^m sigma_bm / 2
///   VV_bm = g^{jk} (F*F)_jk^{ad} sigma_ab sigma_dm / 4
///           + sigma^{ad} sigma([e_a,e_b],[e_d,e_m]) / 4
/// with (F*F)_jk^{ab} = g^{il} F_ji^a F_kl^b. Nonabelian groups are
/// supported for constant F only (the vertical derivative of F has no
/// lattice counterpart otherwise).
inline RicciBlocks ricci_h(const BaseLattice& base, const CurvatureField& f,
                           const std::optional<CodifferentialF>& codiff,
                           const Eigen::MatrixXd& sigma, const CompactGroupModel& group) {
  const int n = f.dims;
  const int k = f.lie_dim;
  bool abelian = true;
  for (const auto& c : group.structure)
    if (c.cwiseAbs().maxCoeff() > 0) abelian = false;
  if (!abelian && f.max_deviation_from_constant() > 1e-12)
    throw std::invalid_argument(
        "unsupported: nonabelian Ricci needs constant F or a trivial connection");

  CodifferentialF dstar;
  if (codiff.has_value()) {
    dstar = *codiff;
  } else if (base.kind == BaseLattice::Kind::torus_grid) {
    dstar = codifferential_F(base, f);
  } else {
    throw std::invalid_argument("missing nabla F on a non-grid base");
  }

  // sigma([e_a,e_b],[e_d,e_m]) contracted with sigma^{ad}
  const Eigen::MatrixXd sigma_inv = sigma.inverse();
  Eigen::MatrixXd vv_alg = Eigen::MatrixXd::Zero(k, k);
  for (int b = 0; b < k; ++b)
    for (int m = 0; m < k; ++m) {
      double s = 0.0;
      for (int a = 0; a < k; ++a)
        for (int d = 0; d < k; ++d) {
          double inner = 0.0;
          for (int g1 = 0; g1 < k; ++g1)
            for (int g2 = 0; g2 < k; ++g2)
              inner += group.structure[g1](a, b) * group.structure[g2](d, m) * sigma(g1, g2);
          s += sigma_inv(a, d) * inner;
        }
      vv_alg(b, m) = s / 4.0;
    }

  RicciBlocks out;
  out.dims = n;
  out.lie_dim = k;
  out.n_vertices = f.n_vertices;
  out.kappa_hat = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd h_metric = Eigen::MatrixXd::Zero(n + k, n + k);
  h_metric.topLeftCorner(n, n).setIdentity();
  h_metric.bottomRightCorner(k, k) = sigma;

  for (int v = 0; v < f.n_vertices; ++v) {
    // (F*F)_jk^{ab} at v, flat metric g = identity
    std::vector<std::vector<Eigen::MatrixXd>> ff(n, std::vector<Eigen::MatrixXd>(n));
    for (int j = 0; j < n; ++j)
      for (int kk = 0; kk < n; ++kk) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < n; ++i) m += f.at(v, j, i) * f.at(v, kk, i).transpose();
        ff[j][kk] = m;
      }

    Eigen::MatrixXd hh(n, n), hv(n, k), vv(k, k);
    for (int j = 0; j < n; ++j)
      for (int kk = 0; kk < n; ++kk)
        hh(j, kk) = -0.5 * (ff[j][kk].cwiseProduct(sigma)).sum();  // flat base: Ric = 0
    for (int j = 0; j < n; ++j)
      hv.row(j) = 0.5 * (sigma * dstar.at(v, j)).transpose();
    Eigen::MatrixXd trace_ff = Eigen::MatrixXd::Zero(k, k);
    for (int j = 0; j < n; ++j) trace_ff += ff[j][j];
    vv = 0.25 * sigma * trace_ff.transpose() * sigma + vv_alg;
    // symmetrize away rounding noise
    vv = 0.5 * (vv + vv.transpose());

    out.hh.push_back(hh);
    out.hv.push_back(hv);
    out.vv.push_back(vv);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(out.full_at(v), h_metric);
    out.kappa_hat = std::min(out.kappa_hat, ges.eigenvalues().minCoeff());
  }
  return out;
}

/// A closed-form coordinate metric on a box, callable at any point.
using ChartMetric = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// Ricci tensor at a point from second-order centered differences of the
/// metric (first and second derivatives of g, then the exact Christoffel
/// algebra). O(step^2) error. Independent of ricci_h: it sees only metric
/// components.
inline Eigen::MatrixXd ricci_fd_oracle(const ChartMetric& metric, const Eigen::VectorXd& point,
                                       double step) {
  const int n = static_cast<int>(point.size());
  const Eigen::MatrixXd g0 = metric(point);
  {
    Eigen::LLT<Eigen::MatrixXd> llt(g0);
    if (llt.info() != Eigen::Success) throw std::invalid_argument("singular metric");
  }
  const Eigen::MatrixXd ginv = g0.inverse();

  auto shifted = [&](int k, double s) {
    Eigen::VectorXd x = point;
    x(k) += s;
    return metric(x);
  };

  std::vector<Eigen::MatrixXd> dg(n);  // dg[k](i,j) = d_k g_ij
  std::vector<std::vector<Eigen::MatrixXd>> ddg(n, std::vector<Eigen::MatrixXd>(n));
  for (int k = 0; k < n; ++k) {
    const Eigen::MatrixXd gp = shifted(k, step), gm = shifted(k, -step);
    dg[k] = (gp - gm) / (2.0 * step);
    ddg[k][k] = (gp - 2.0 * g0 + gm) / (step * step);
  }
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      Eigen::VectorXd xpp = point, xpm = point, xmp = point, xmm = point;
      xpp(k) += step;
      xpp(l) += step;
      xpm(k) += step;
      xpm(l) -= step;
      xmp(k) -= step;
      xmp(l) += step;
      xmm(k) -= step;
      xmm(l) -= step;
      ddg[k][l] = (metric(xpp) - metric(xpm) - metric(xmp) + metric(xmm)) / (4.0 * step * step);
      ddg[l][k] = ddg[k][l];
    }

  // Christoffel symbols of the first kind and their derivatives
  auto gamma1 = [&](int m, int i, int j) {  // Gamma_{mij}
    return 0.5 * (dg[i](j, m) + dg[j](i, m) - dg[m](i, j));
  };
  auto dgamma1 = [&](int l, int m, int i, int j) {  // d_l Gamma_{mij}
    return 0.5 * (ddg[l][i](j, m) + ddg[l][j](i, m) - ddg[l][m](i, j));
  };
  std::vector<Eigen::MatrixXd> dginv(n);  // d_k g^{ab}
  for (int k = 0; k < n; ++k) dginv[k] = -ginv * dg[k] * ginv;

  std::vector<Eigen::MatrixXd> gamma(n, Eigen::MatrixXd::Zero(n, n));  // Gamma^k_ij
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m) gamma[k](i, j) += ginv(k, m) * gamma1(m, i, j);

  auto dgamma = [&](int l, int k, int i, int j) {  // d_l Gamma^k_ij
    double s = 0.0;
    for (int m = 0; m < n; ++m)
      s += dginv[l](k, m) * gamma1(m, i, j) + ginv(k, m) * dgamma1(l, m, i, j);
    return s;
  };

  // Ric_ij = d_k Gamma^k_ij - d_i Gamma^k_kj + Gamma^k_kl Gamma^l_ij
  //          - Gamma^k_il Gamma^l_kj
  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) {
        s += dgamma(k, k, i, j) - dgamma(i, k, k, j);
        for (int l = 0; l < n; ++l)
          s += gamma[k](k, l) * gamma[l](i, j) - gamma[k](i, l) * gamma[l](k, j);
      }
      ric(i, j) = s;
    }
  return 0.5 * (ric + ric.transpose());
}

inline ChartMetric euclidean_chart(int n) {
  return [n](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(n, n); };
}

/// Round 2-sphere of radius r in polar coordinates (theta, phi).
inline ChartMetric sphere_chart(double r) {
  return [r](const Eigen::VectorXd& x) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
    g(0, 0) = r * r;
    g(1, 1) = r * r * std::sin(x(0)) * std::sin(x(0));
    return g;
  };
}

/// Heisenberg-type chart dx^2 + dy^2 + (dtheta - b x dy)^2: the KK metric
/// of the constant-curvature U(1) connection over the flat plane.
inline ChartMetric heisenberg_chart(double b) {
  return [b](const Eigen::VectorXd& x) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(3, 3);
    g(1, 1) = 1.0 + b * b * x(0) * x(0);
    g(1, 2) = g(2, 1) = -b * x(0);
    return g;
  };
}

/// Bi-invariant metric of a Lie-kind group model in exponential coordinates:
/// g_ij(x) = sigma(T(x)e_i, T(x)e_j) with T(x) = (1 - exp(-ad_x))/ad_x.
inline ChartMetric bi_invariant_chart(const CompactGroupModel& group) {
  if (group.kind == GroupKind::finite)
    throw std::invalid_argument("bi-invariant chart needs a Lie group");
  const int k = group.lie_dim();
  const Eigen::MatrixXd sigma = group.sigma;
  const auto structure = group.structure;
  return [k, sigma, structure](const Eigen::VectorXd& x) {
    Eigen::MatrixXd ad = Eigen::MatrixXd::Zero(k, k);
    for (int g = 0; g < k; ++g)
      for (int b = 0; b < k; ++b)
        for (int a = 0; a < k; ++a) ad(g, b) += structure[g](a, b) * x(a);
    // T = sum_{m>=0} (-ad)^m / (m+1)!
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(k, k);
    for (int m = 0; m < 30; ++m) {
      t += term / (m + 1.0);
      term = term * (-ad) / (m + 1.0);
    }
    return Eigen::MatrixXd(t.transpose() * sigma * t);
  };
}

}  // namespace kks
