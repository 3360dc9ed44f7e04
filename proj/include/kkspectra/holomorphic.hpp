/// Hermitian-Einstein line bundles over flat complex tori: the
/// constant-curvature (Landau) connection Laplacian, the Dolbeault
/// Laplacian through the Weitzenboeck identity nabla*nabla = 2 Delta_dbar
/// + Lambda_omega F, and the H^0 dimension read off the lowest eigenvalue
/// cluster. Complex scalars are realified: V = R^2 with the complex
/// structure as a fixed rotation, so every operator stays real symmetric
/// and complex multiplicities appear doubled.
#pragma once

#include "kkspectra/connection.hpp"
#include "kkspectra/laplacian.hpp"
#include "kkspectra/operator.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace kks {

struct EllipticCurveBundle {
  double period1 = 2 * kPi;  // lattice periods of the flat torus
  double period2 = 2 * kPi;
  int degree = 0;  // c_1(L)

  double area() const { return period1 * period2; }

  /// Hermitian-Einstein slope: mu = 2 pi k / area (n = 1, rank 1).
  double mu() const { return 2.0 * kPi * degree / area(); }
};

/// Constant-curvature U(1) connection Laplacian on the m x m grid in the
/// realified line bundle; degree 0 with optional flat holonomies gives the
/// plain (possibly twisted) Laplacian. Dimension 2 m^2.
inline SymmetricOperator landau_operator(const EllipticCurveBundle& bundle, int m,
                                         double holonomy1 = 0.0, double holonomy2 = 0.0) {
  auto base = BaseLattice::torus({m, m}, {bundle.period1, bundle.period2});
  auto u1 = CompactGroupModel::u1(4);
  DiscreteConnection conn = bundle.degree == 0
                                ? DiscreteConnection::trivial(base, u1)
                                : connection_from_flux(base, u1, bundle.degree);
  if (holonomy1 != 0.0 || holonomy2 != 0.0) {
    for (int v = 0; v < base.n_vertices(); ++v) {
      conn.grid_links[0][v] =
          u1.mul(conn.grid_links[0][v], GroupElement{holonomy1 / m});
      conn.grid_links[1][v] =
          u1.mul(conn.grid_links[1][v], GroupElement{holonomy2 / m});
    }
  }
  return connection_laplacian(conn, RepresentationModel::u1_weight_rep(1));
}

/// Dolbeault Laplacian assembled from the same link data through the
/// Weitzenboeck identity: Delta_dbar = (nabla*nabla - Lambda_omega F)/2,
/// with Lambda_omega F read pointwise from the plaquette logarithms (the
/// second, curvature route through the identical links).
inline SymmetricOperator dbar_laplacian(const EllipticCurveBundle& bundle, int m) {
  auto base = BaseLattice::torus({m, m}, {bundle.period1, bundle.period2});
  auto u1 = CompactGroupModel::u1(4);
  DiscreteConnection conn = bundle.degree == 0
                                ? DiscreteConnection::trivial(base, u1)
                                : connection_from_flux(base, u1, bundle.degree);
  SymmetricOperator op = connection_laplacian(conn, RepresentationModel::u1_weight_rep(1));
  const CurvatureField f = plaquette_curvature(conn);
  // stiffness S' = (S - M diag(F_12)) / 2 in vertex blocks
  Eigen::SparseMatrix<double> s = op.stiffness;
  for (int v = 0; v < base.n_vertices(); ++v) {
    const double lam = f.at(v, 0, 1)(0);
    for (int a = 0; a < 2; ++a) s.coeffRef(2 * v + a, 2 * v + a) -= op.mass(2 * v + a) * lam;
  }
  op.stiffness = 0.5 * s;
  op.domain = "dbar";
  return op;
}

struct H0Result {
  int dimension = 0;       // complex dimension: cluster size / 2
  bool at_mu = false;      // lowest cluster sits at mu within tolerance
  double cluster_center = 0.0;
  int cluster_size = 0;    // real multiplicity
  double first_gap = 0.0;
};

/// Multiplicity of the lowest eigenvalue cluster divided by 2 (real form
/// of a complex line), provided the cluster center lies within cluster_tol
/// of mu; 0 with at_mu = false otherwise. Throws "unresolved cluster" when
/// the spectral gap after the cluster is below 10x cluster_tol.
inline H0Result h0_dimension(const Spectrum& spec, double mu, double cluster_tol) {
  if (spec.count() < 2) throw std::invalid_argument("need a spectrum past the first gap");
  H0Result out;
  int end = 1;
  while (end < spec.count() && spec.values(end) - spec.values(0) <= cluster_tol) ++end;
  if (end == spec.count())
    throw std::runtime_error("unresolved cluster: spectrum does not extend past it");
  out.cluster_size = end;
  out.cluster_center = spec.values.head(end).mean();
  out.first_gap = spec.values(end) - spec.values(end - 1);
  if (out.first_gap < 10.0 * cluster_tol)
    throw std::runtime_error("unresolved cluster");
  out.at_mu = std::abs(out.cluster_center - mu) <= cluster_tol;
  out.dimension = out.at_mu ? out.cluster_size / 2 : 0;
  return out;
}

struct H0Row {
  int degree = 0;
  double area = 0.0;
  double curvature_norm = 0.0;  // ||F||_inf = |mu| for Hermitian-Einstein
  int h0 = 0;
};

/// Probe of the section bound at fixed slope mu: areas scale and the
/// degree k = mu * area / (2 pi) scales with them, so dim H^0 = k grows
/// with the allowed curvature budget; the table exhibits the growth.
inline std::vector<H0Row> h0_bound_table(double mu, const std::vector<double>& areas,
                                         int grid_per_unit_degree = 16) {
  std::vector<H0Row> rows;
  for (double area : areas) {
    const double kf = mu * area / (2.0 * kPi);
    const int k = static_cast<int>(std::lround(kf));
    if (std::abs(kf - k) > 1e-9)
      throw std::invalid_argument("area does not quantize the degree at this slope");
    EllipticCurveBundle bundle{std::sqrt(area), std::sqrt(area), k};
    H0Row row;
    row.degree = k;
    row.area = area;
    row.curvature_norm = std::abs(bundle.mu());
    if (k == 0) {
      row.h0 = 1;  // trivial bundle: constants
    } else {
      const int m = std::max(16, grid_per_unit_degree * std::abs(k));
      const Spectrum s = eigs(landau_operator(bundle, m), 2 * std::abs(k) + 4, 7, false);
      // for k < 0 the lowest cluster sits at |mu|, away from mu, so the
      // same call correctly reports 0
      row.h0 = h0_dimension(s, bundle.mu(), 0.1 * std::abs(bundle.mu())).dimension;
    }
    rows.push_back(row);
  }
  return rows;
}

/// Multiset gap between spec(nabla*nabla) and 2 spec(Delta_dbar) + mu on
/// the lowest `count` eigenvalues: the displayed identity of the
/// holomorphic section characterization.
inline double weitzenboeck_gap(const EllipticCurveBundle& bundle, int m, int count,
                               std::uint64_t seed = 0) {
  const Spectrum rough = eigs(landau_operator(bundle, m), count, seed, false);
  const Spectrum dbar = eigs(dbar_laplacian(bundle, m), count, seed, false);
  double gap = 0.0;
  for (int i = 0; i < count; ++i)
    gap = std::max(gap, std::abs(rough.values(i) - (2.0 * dbar.values(i) + bundle.mu())));
  return gap;
}

}  // namespace kks
