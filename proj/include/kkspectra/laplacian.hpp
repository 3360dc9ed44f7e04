/// Laplacians of the discrete bundle picture: base and connection
/// Laplacians, voltage-graph covers with their deck actions, the total
/// (horizontal + fiber Cayley) Laplacian, isotypic restriction to the
/// G-invariant subspace and the eigenvalue-shift verification.
#pragma once

#include "kkspectra/connection.hpp"
#include "kkspectra/group.hpp"
#include "kkspectra/lattice.hpp"
#include "kkspectra/mm_space.hpp"
#include "kkspectra/operator.hpp"
#include "kkspectra/representation.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

namespace kks {

/// Graph/grid Laplacian on scalar functions. Torus grids use the standard
/// second-order stencil: stiffness cellvol/mesh^2 per edge, mass = cell
/// volume, so eigenvalues approximate the continuum Laplace spectrum.
inline SymmetricOperator base_laplacian(const BaseLattice& base) {
  const int n = base.n_vertices();
  std::vector<Eigen::Triplet<double>> t;
  Eigen::VectorXd mass;
  if (base.kind == BaseLattice::Kind::torus_grid) {
    mass = Eigen::VectorXd::Constant(n, base.cell_volume());
    for (int v = 0; v < n; ++v)
      for (int d = 0; d < base.dims(); ++d) {
        if (base.sizes[d] < 2) continue;
        const int u = base.neighbor(v, d, +1);
        const double w = base.cell_volume() / (base.mesh(d) * base.mesh(d));
        t.emplace_back(v, v, w);
        t.emplace_back(u, u, w);
        t.emplace_back(v, u, -w);
        t.emplace_back(u, v, -w);
      }
  } else {
    mass = Eigen::VectorXd::Ones(n);
    for (const auto& e : base.edges) {
      t.emplace_back(e.u, e.u, e.w);
      t.emplace_back(e.v, e.v, e.w);
      t.emplace_back(e.u, e.v, -e.w);
      t.emplace_back(e.v, e.u, -e.w);
    }
  }
  return SymmetricOperator::from_triplets(n, t, mass, "base");
}

/// Connection (rough) Laplacian on V-valued vertex functions:
/// (Delta^A s)_x = sum_y w_xy (s_x - rho(U_xy) s_y).
inline SymmetricOperator connection_laplacian(const DiscreteConnection& conn,
                                              const RepresentationModel& rep) {
  const BaseLattice& base = conn.base;
  const int n = base.n_vertices();
  const int d = rep.dim_V;
  std::vector<Eigen::Triplet<double>> t;

  auto add_edge = [&](int u, int v, double w, const Eigen::MatrixXd& r) {
    for (int a = 0; a < d; ++a) {
      t.emplace_back(u * d + a, u * d + a, w);
      t.emplace_back(v * d + a, v * d + a, w);
      for (int b = 0; b < d; ++b) {
        t.emplace_back(u * d + a, v * d + b, -w * r(a, b));
        t.emplace_back(v * d + b, u * d + a, -w * r(a, b));
      }
    }
  };

  Eigen::VectorXd mass(n * d);
  if (base.kind == BaseLattice::Kind::torus_grid) {
    mass.setConstant(base.cell_volume());
    for (int v = 0; v < n; ++v)
      for (int dir = 0; dir < base.dims(); ++dir) {
        if (base.sizes[dir] < 2) continue;
        const int u = base.neighbor(v, dir, +1);
        const double w = base.cell_volume() / (base.mesh(dir) * base.mesh(dir));
        add_edge(v, u, w, rep.matrix(conn.grid_links[dir][v]));
      }
  } else {
    mass.setOnes();
    for (std::size_t e = 0; e < base.edges.size(); ++e) {
      const auto& edge = base.edges[e];
      add_edge(edge.u, edge.v, edge.w, rep.matrix(conn.edge_links[e]));
    }
  }
  return SymmetricOperator::from_triplets(n * d, t, mass, "connection:" + rep.name);
}

/// Voltage-graph cover: vertex set = base vertices x G, the edge (x,y,U)
/// lifts to (x,g) ~ (y, U^{-1} g), and G acts freely on the right by deck
/// transformations.
struct VoltageCover {
  BaseLattice cover;                    // graph with |base| * |G| vertices
  CompactGroupModel group;
  std::vector<std::vector<int>> deck;   // deck[g][(x,h)] = (x, h*g)
  PointMap projection;                  // (x,g) -> x
  int fiber_size = 0;

  int vertex(int base_vertex, int g) const { return base_vertex * fiber_size + g; }
};

inline VoltageCover voltage_cover(const BaseLattice& base, const CompactGroupModel& group,
                                  const std::vector<GroupElement>& links) {
  if (base.kind != BaseLattice::Kind::graph)
    throw std::invalid_argument("voltage cover needs a graph base");
  if (group.kind != GroupKind::finite)
    throw std::invalid_argument("voltage cover needs a finite group");
  if (links.size() != base.edges.size()) throw std::invalid_argument("one link per edge");

  const int m = static_cast<int>(group.size());
  const int nb = base.n_vertices();
  VoltageCover out;
  out.group = group;
  out.fiber_size = m;
  std::vector<BaseLattice::Edge> edges;
  for (std::size_t e = 0; e < base.edges.size(); ++e) {
    const int u = base.edges[e].u, v = base.edges[e].v;
    const int voltage_inv = group.inverse_table[std::get<int>(links[e])];
    for (int g = 0; g < m; ++g)
      edges.push_back({u * m + g, v * m + group.table[voltage_inv][g], base.edges[e].w});
  }
  out.cover = BaseLattice::graph(nb * m, std::move(edges));
  out.deck.assign(m, std::vector<int>(nb * m));
  for (int g = 0; g < m; ++g)
    for (int x = 0; x < nb; ++x)
      for (int h = 0; h < m; ++h) out.deck[g][x * m + h] = x * m + group.table[h][g];
  out.projection.n_source = nb * m;
  out.projection.n_target = nb;
  out.projection.map.resize(nb * m);
  for (int x = 0; x < nb; ++x)
    for (int h = 0; h < m; ++h) out.projection.map[x * m + h] = x;
  return out;
}

/// Symmetric generating set used for fiber Cayley graphs, fixed per group:
/// {+1,-1} for cyclic groups, the transpositions for S3, all non-identity
/// elements otherwise.
inline std::vector<int> default_generating_set(const CompactGroupModel& group) {
  const int m = static_cast<int>(group.size());
  if (group.name.rfind("Z", 0) == 0 && m >= 2) {
    std::set<int> s = {1 % m, (m - 1) % m};
    s.erase(group.identity_index);
    return {s.begin(), s.end()};
  }
  if (group.name == "S3") return {1, 2, 3};
  std::vector<int> s;
  for (int g = 0; g < m; ++g)
    if (g != group.identity_index) s.push_back(g);
  return s;
}

/// Total-space Laplacian on functions on the cover: horizontal cover edges
/// plus left-Cayley fiber edges of weight fiber_weight within each fiber.
/// Commutes with the deck action exactly.
inline SymmetricOperator total_laplacian(const VoltageCover& cover, double fiber_weight,
                                         const std::vector<int>& generating_set) {
  const int n = cover.cover.n_vertices();
  const int m = cover.fiber_size;
  std::vector<Eigen::Triplet<double>> t;
  for (const auto& e : cover.cover.edges) {
    t.emplace_back(e.u, e.u, e.w);
    t.emplace_back(e.v, e.v, e.w);
    t.emplace_back(e.u, e.v, -e.w);
    t.emplace_back(e.v, e.u, -e.w);
  }
  const int nb = n / m;
  for (int x = 0; x < nb; ++x)
    for (int g = 0; g < m; ++g)
      for (int s : generating_set) {
        const int u = cover.vertex(x, g);
        const int v = cover.vertex(x, cover.group.table[s][g]);  // left multiplication
        // every undirected fiber edge is visited once from each endpoint
        t.emplace_back(u, u, 0.5 * fiber_weight);
        t.emplace_back(v, v, 0.5 * fiber_weight);
        t.emplace_back(u, v, -0.5 * fiber_weight);
        t.emplace_back(v, u, -0.5 * fiber_weight);
      }
  return SymmetricOperator::from_triplets(n, t, Eigen::VectorXd::Ones(n), "total");
}

struct FiberCasimir {
  double chi = 0.0;
  double residual = 0.0;
};

/// Discrete Casimir shift: the scalar of fiber_weight * sum_s (I - rho(s))
/// on the representation, i.e. the fiber Cayley-Laplacian eigenvalue on the
/// rho-isotypic component of L^2(G).
inline FiberCasimir fiber_casimir(const CompactGroupModel& group, const RepresentationModel& rep,
                                  const std::vector<int>& generating_set, double fiber_weight) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rep.dim_V, rep.dim_V);
  for (int s : generating_set)
    m += Eigen::MatrixXd::Identity(rep.dim_V, rep.dim_V) - rep.matrix(group.elements[s]);
  m *= fiber_weight;
  FiberCasimir out;
  out.chi = m.trace() / rep.dim_V;
  out.residual =
      (m - out.chi * Eigen::MatrixXd::Identity(rep.dim_V, rep.dim_V)).cwiseAbs().maxCoeff();
  return out;
}

struct IsotypicOperator {
  SymmetricOperator op;     // restricted to an orthonormal basis of (L2 x V)^G
  Eigen::MatrixXd basis;    // (n * dim_V) x rank, M-orthonormal columns
  double commutation_defect = 0.0;
};

/// Restriction of op tensor id_V to the G-invariant subspace cut out by the
/// isotypic projector of (action, rep). Errors if op does not commute with
/// the action.
inline IsotypicOperator isotypic_restriction(const SymmetricOperator& op,
                                             const CompactGroupModel& group,
                                             const std::vector<std::vector<int>>& perms,
                                             const RepresentationModel& rep,
                                             double commute_tol = 1e-9) {
  const int n = op.dim;
  const int d = rep.dim_V;
  const Eigen::MatrixXd pi = isotypic_projector(group, rep, perms);

  // expanded operator on V-valued functions: stiffness kron(S, I_d)
  std::vector<Eigen::Triplet<double>> t;
  for (int k = 0; k < op.stiffness.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(op.stiffness, k); it; ++it)
      for (int a = 0; a < d; ++a)
        t.emplace_back(static_cast<int>(it.row()) * d + a, static_cast<int>(it.col()) * d + a,
                       it.value());
  Eigen::SparseMatrix<double> sv(n * d, n * d);
  sv.setFromTriplets(t.begin(), t.end());
  Eigen::VectorXd mv(n * d);
  for (int i = 0; i < n; ++i) mv.segment(i * d, d).setConstant(op.mass(i));

  const Eigen::MatrixXd av = mv.cwiseInverse().asDiagonal() * Eigen::MatrixXd(sv);
  IsotypicOperator out;
  out.commutation_defect = (pi * av - av * pi).cwiseAbs().maxCoeff();
  if (out.commutation_defect > commute_tol)
    throw std::runtime_error("operator does not commute with the action");

  // M-orthonormal basis of range(pi): pi is M-self-adjoint, so diagonalize
  // the plain-symmetric conjugate M^{1/2} pi M^{-1/2}
  const Eigen::VectorXd sqrt_m = mv.cwiseSqrt();
  Eigen::MatrixXd sym = sqrt_m.asDiagonal() * pi * sqrt_m.cwiseInverse().asDiagonal();
  sym = 0.5 * (sym + sym.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  int rank = 0;
  for (int i = 0; i < n * d; ++i)
    if (es.eigenvalues()(i) > 0.5) ++rank;
  Eigen::MatrixXd b(n * d, rank);
  int c = 0;
  for (int i = 0; i < n * d; ++i)
    if (es.eigenvalues()(i) > 0.5)
      b.col(c++) = sqrt_m.cwiseInverse().asDiagonal() * es.eigenvectors().col(i);
  out.basis = b;

  const Eigen::MatrixXd restricted = b.transpose() * sv * b;
  std::vector<Eigen::Triplet<double>> rt;
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < rank; ++j)
      if (restricted(i, j) != 0.0) rt.emplace_back(i, j, 0.5 * (restricted(i, j) + restricted(j, i)));
  out.op = SymmetricOperator::from_triplets(rank, rt, Eigen::VectorXd::Ones(rank),
                                            "isotypic:" + rep.name);
  return out;
}

/// Max gap between the isotypic spectrum and the shifted section spectrum
/// (both sorted ascending, same count).
inline double verify_shift(const Eigen::VectorXd& isotypic_values,
                           const Eigen::VectorXd& connection_values, double chi_discrete) {
  if (isotypic_values.size() != connection_values.size())
    throw std::invalid_argument("count mismatch");
  double gap = 0.0;
  for (int i = 0; i < isotypic_values.size(); ++i)
    gap = std::max(gap, std::abs(isotypic_values(i) - (connection_values(i) + chi_discrete)));
  return gap;
}

struct RealIrrep {
  RepresentationModel rep;
  int cover_multiplicity = 1;  // dim_R V / dim_R commutant
};

/// Multiplicity of the rho-sector in the cover decomposition: dim_R V
/// divided by the commutant dimension (1/|G|) sum_g chi(g)^2.
inline int cover_multiplicity(const CompactGroupModel& group, const RepresentationModel& rep) {
  double s = 0.0;
  for (std::size_t g = 0; g < group.size(); ++g) {
    const double chi = rep.matrix(group.elements[g]).trace();
    s += chi * chi;
  }
  const int commutant_dim = static_cast<int>(std::lround(s / static_cast<double>(group.size())));
  return rep.dim_V / commutant_dim;
}

/// The complete list of real irreducible representations for the finite
/// groups the workbench ships: Z_2..Z_n and S_3.
inline std::vector<RealIrrep> real_irreps(const CompactGroupModel& group) {
  std::vector<RealIrrep> out;
  auto push = [&](RepresentationModel r) {
    RealIrrep ir;
    ir.cover_multiplicity = cover_multiplicity(group, r);
    ir.rep = std::move(r);
    out.push_back(std::move(ir));
  };
  if (group.name == "S3") {
    push(RepresentationModel::finite_trivial_rep(group));
    push(RepresentationModel::s3_sign_rep());
    push(RepresentationModel::s3_standard_rep());
    return out;
  }
  if (group.name.rfind("Z", 0) == 0) {
    const int m = static_cast<int>(group.size());
    push(RepresentationModel::finite_trivial_rep(group));
    if (m % 2 == 0) push(RepresentationModel::cyclic_sign_rep(m));
    for (int n = 1; 2 * n < m; ++n) push(RepresentationModel::cyclic_rotation_rep(m, n));
    return out;
  }
  throw std::invalid_argument("no built-in irrep list for group " + group.name);
}

/// Multiset spectral decomposition check for a voltage cover: collects
/// spec(total) and the union over irreps of cover_multiplicity copies of
/// spec(connection_laplacian + chi_discrete), returns the max sorted gap.
struct CoverDecomposition {
  Eigen::VectorXd total_spectrum;
  Eigen::VectorXd assembled_spectrum;  // union of shifted sector spectra
  double max_gap = 0.0;
  std::vector<std::pair<std::string, double>> sector_chi;
};

inline CoverDecomposition cover_decomposition(const BaseLattice& base,
                                              const CompactGroupModel& group,
                                              const std::vector<GroupElement>& links,
                                              double fiber_weight) {
  const VoltageCover cover = voltage_cover(base, group, links);
  const auto genset = default_generating_set(group);
  const SymmetricOperator total = total_laplacian(cover, fiber_weight, genset);

  CoverDecomposition out;
  out.total_spectrum = eigs(total, total.dim, 0, false).values;

  DiscreteConnection conn;
  conn.base = base;
  conn.group = group;
  conn.edge_links = links;

  std::vector<double> assembled;
  for (const auto& ir : real_irreps(group)) {
    const FiberCasimir fc = fiber_casimir(group, ir.rep, genset, fiber_weight);
    if (fc.residual > 1e-10)
      throw std::runtime_error("fiber Casimir is not scalar on " + ir.rep.name);
    out.sector_chi.emplace_back(ir.rep.name, fc.chi);
    const SymmetricOperator sector = connection_laplacian(conn, ir.rep);
    const Eigen::VectorXd vals = eigs(sector, sector.dim, 0, false).values;
    for (int c = 0; c < ir.cover_multiplicity; ++c)
      for (int i = 0; i < vals.size(); ++i) assembled.push_back(vals(i) + fc.chi);
  }
  std::sort(assembled.begin(), assembled.end());
  out.assembled_spectrum = Eigen::Map<Eigen::VectorXd>(assembled.data(), assembled.size());
  if (out.assembled_spectrum.size() != out.total_spectrum.size())
    throw std::runtime_error("sector dimensions do not add up");
  out.max_gap =
      (out.assembled_spectrum - out.total_spectrum).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace kks
