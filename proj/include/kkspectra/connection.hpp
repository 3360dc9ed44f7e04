/// Discrete connections as link variables: constant-flux construction,
/// plaquette curvature via principal logarithms, gauge transformations,
/// the Kaluza-Klein block metric and lattice derivatives of the curvature.
#pragma once

#include "kkspectra/group.hpp"
#include "kkspectra/lattice.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace kks {

struct DiscreteConnection {
  BaseLattice base;
  CompactGroupModel group;
  // grid: grid_links[dir][vertex] = U on the +dir edge at that vertex
  std::vector<std::vector<GroupElement>> grid_links;
  // graph: one element per base edge, oriented edge.u -> edge.v
  std::vector<GroupElement> edge_links;

  /// Link along the edge leaving `vertex` in direction dir (step = +1/-1);
  /// the reversed link is the inverse, exactly.
  GroupElement link(int vertex, int dir, int step) const {
    if (step > 0) return grid_links[dir][vertex];
    return group.inv(grid_links[dir][base.neighbor(vertex, dir, -1)]);
  }

  static DiscreteConnection trivial(BaseLattice b, CompactGroupModel g) {
    DiscreteConnection c;
    c.base = std::move(b);
    c.group = std::move(g);
    if (c.base.kind == BaseLattice::Kind::torus_grid) {
      c.grid_links.assign(c.base.dims(),
                          std::vector<GroupElement>(c.base.n_vertices(), c.group.identity()));
    } else {
      c.edge_links.assign(c.base.edges.size(), c.group.identity());
    }
    return c;
  }
};

/// Uniform-flux U(1) connection on a 2D torus grid (Landau gauge with one
/// cocycle row): every plaquette holonomy equals exp(i 2 pi k / (m1 m2))
/// and the total flux is exactly 2 pi k.
inline DiscreteConnection connection_from_flux(const BaseLattice& base,
                                               const CompactGroupModel& u1, int k) {
  if (base.kind != BaseLattice::Kind::torus_grid || base.dims() != 2)
    throw std::invalid_argument("flux construction needs a 2D torus grid");
  if (u1.kind != GroupKind::u1) throw std::invalid_argument("flux construction needs U(1)");
  DiscreteConnection conn = DiscreteConnection::trivial(base, u1);
  const int m1 = base.sizes[0], m2 = base.sizes[1];
  for (int x1 = 0; x1 < m1; ++x1)
    for (int x2 = 0; x2 < m2; ++x2) {
      const int v = base.vertex_index({x1, x2});
      // A_2 = 2 pi k x1 / (m1 m2) per +2 link, with the closing cocycle on
      // the last row of +1 links
      conn.grid_links[1][v] = GroupElement{2.0 * kPi * k * x1 / (double(m1) * m2)};
      if (x1 == m1 - 1)
        conn.grid_links[0][v] = GroupElement{-2.0 * kPi * k * x2 / double(m2)};
    }
  return conn;
}

/// Lie-algebra valued plaquette curvature F_ij^a (antisymmetric in ij),
/// one value per vertex and unordered direction pair.
struct CurvatureField {
  int dims = 0;
  int lie_dim = 0;
  int n_vertices = 0;
  // comp[pair(i<j)] is n_vertices x lie_dim
  std::vector<Eigen::MatrixXd> comp;

  int pair_index(int i, int j) const {  // i < j
    int idx = 0;
    for (int a = 0; a < dims; ++a)
      for (int b = a + 1; b < dims; ++b) {
        if (a == i && b == j) return idx;
        ++idx;
      }
    throw std::logic_error("bad pair");
  }

  Eigen::VectorXd at(int vertex, int i, int j) const {
    if (i == j) return Eigen::VectorXd::Zero(lie_dim);
    const double sign = i < j ? 1.0 : -1.0;
    return sign * comp[pair_index(std::min(i, j), std::max(i, j))].row(vertex).transpose();
  }

  /// |F|^2 at a vertex: sum over i<j of sigma(F_ij, F_ij) (flat base metric).
  double norm2_at(int vertex, const Eigen::MatrixXd& sigma) const {
    double s = 0.0;
    for (int i = 0; i < dims; ++i)
      for (int j = i + 1; j < dims; ++j) {
        const Eigen::VectorXd f = at(vertex, i, j);
        s += f.dot(sigma * f);
      }
    return s;
  }

  double max_deviation_from_constant() const {
    double dev = 0.0;
    for (const auto& c : comp)
      for (int col = 0; col < c.cols(); ++col) {
        const double mean = c.col(col).mean();
        dev = std::max(dev, (c.col(col).array() - mean).abs().maxCoeff());
      }
    return dev;
  }

  static CurvatureField constant(const BaseLattice& base, int lie_dim,
                                 const std::vector<Eigen::VectorXd>& values) {
    CurvatureField f;
    f.dims = base.dims();
    f.lie_dim = lie_dim;
    f.n_vertices = base.n_vertices();
    int idx = 0;
    for (int i = 0; i < f.dims; ++i)
      for (int j = i + 1; j < f.dims; ++j) {
        f.comp.push_back(Eigen::MatrixXd::Zero(f.n_vertices, lie_dim));
        f.comp.back().rowwise() = values.at(idx).transpose();
        ++idx;
      }
    return f;
  }
};

/// Discrete curvature: principal log of each plaquette holonomy divided by
/// the plaquette area. Throws "plaquette too coarse" at the exp cut locus.
inline CurvatureField plaquette_curvature(const DiscreteConnection& conn) {
  const BaseLattice& base = conn.base;
  if (base.kind != BaseLattice::Kind::torus_grid)
    throw std::invalid_argument("plaquette curvature needs a grid base");
  CurvatureField f;
  f.dims = base.dims();
  f.lie_dim = conn.group.lie_dim();
  f.n_vertices = base.n_vertices();
  for (int i = 0; i < f.dims; ++i)
    for (int j = i + 1; j < f.dims; ++j) {
      Eigen::MatrixXd c(f.n_vertices, f.lie_dim);
      const double area = base.mesh(i) * base.mesh(j);
      for (int v = 0; v < f.n_vertices; ++v) {
        // holonomy around the (i,j)-plaquette based at v
        const int vi = base.neighbor(v, i, +1);
        const int vj = base.neighbor(v, j, +1);
        GroupElement h = conn.link(v, i, +1);
        h = conn.group.mul(h, conn.link(vi, j, +1));
        h = conn.group.mul(h, conn.group.inv(conn.link(vj, i, +1)));
        h = conn.group.mul(h, conn.group.inv(conn.link(v, j, +1)));
        Eigen::VectorXd logh;
        try {
          logh = conn.group.log(h);
        } catch (const std::runtime_error&) {
          throw std::runtime_error("plaquette too coarse");
        }
        c.row(v) = (logh / area).transpose();
      }
      f.comp.push_back(std::move(c));
    }
  return f;
}

/// U'_{xy} = gamma(x)^{-1} U_{xy} gamma(y).
inline DiscreteConnection gauge_transform(const DiscreteConnection& conn,
                                          const std::vector<GroupElement>& gamma) {
  if (static_cast<int>(gamma.size()) != conn.base.n_vertices())
    throw std::invalid_argument("gauge field size mismatch");
  DiscreteConnection out = conn;
  const auto& g = conn.group;
  if (conn.base.kind == BaseLattice::Kind::torus_grid) {
    for (int dir = 0; dir < conn.base.dims(); ++dir)
      for (int v = 0; v < conn.base.n_vertices(); ++v) {
        const int w = conn.base.neighbor(v, dir, +1);
        out.grid_links[dir][v] =
            g.mul(g.mul(g.inv(gamma[v]), conn.grid_links[dir][v]), gamma[w]);
      }
  } else {
    for (std::size_t e = 0; e < conn.base.edges.size(); ++e) {
      const auto& edge = conn.base.edges[e];
      out.edge_links[e] =
          g.mul(g.mul(g.inv(gamma[edge.u]), conn.edge_links[e]), gamma[edge.v]);
    }
  }
  return out;
}

/// Holonomy of a closed vertex loop on a graph base (consecutive vertices
/// must be joined by base edges).
inline GroupElement loop_holonomy(const DiscreteConnection& conn, const std::vector<int>& loop) {
  GroupElement h = conn.group.identity();
  for (std::size_t s = 0; s < loop.size(); ++s) {
    const int u = loop[s], v = loop[(s + 1) % loop.size()];
    bool found = false;
    for (std::size_t e = 0; e < conn.base.edges.size(); ++e) {
      if (conn.base.edges[e].u == u && conn.base.edges[e].v == v) {
        h = conn.group.mul(h, conn.edge_links[e]);
        found = true;
        break;
      }
      if (conn.base.edges[e].v == u && conn.base.edges[e].u == v) {
        h = conn.group.mul(h, conn.group.inv(conn.edge_links[e]));
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("loop step is not a base edge");
  }
  return h;
}

/// Kaluza-Klein block metric in the frame (horizontal lifts, e_alpha^sharp):
/// horizontal block g, mixed block zero, vertical block sigma.
struct KKMetricField {
  Eigen::MatrixXd g;      // flat base metric (identity in physical coordinates)
  Eigen::MatrixXd sigma;  // fiber metric
  int n_vertices = 0;

  Eigen::MatrixXd block_at(int) const {
    const int n = static_cast<int>(g.rows());
    const int k = static_cast<int>(sigma.rows());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n + k, n + k);
    h.topLeftCorner(n, n) = g;
    h.bottomRightCorner(k, k) = sigma;
    return h;
  }

  double det_at(int v) const { return g.determinant() * sigma.determinant(); }
};

inline KKMetricField kk_metric(const BaseLattice& base, const CompactGroupModel& group,
                               const Eigen::MatrixXd& sigma) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("fiber metric must be positive definite");
  KKMetricField f;
  f.g = Eigen::MatrixXd::Identity(base.dims(), base.dims());
  f.sigma = sigma;
  f.n_vertices = base.n_vertices();
  return f;
}

/// Discretized total-space volume sum over base cells and fiber quadrature
/// cells; equals (base volume) * mu_sigma(G) by the product structure.
inline double total_space_volume(const BaseLattice& base, const CompactGroupModel& group,
                                 const KKMetricField& h) {
  const double sqrt_det_sigma = std::sqrt(h.sigma.determinant());
  double fiber_coord_vol = 0.0;  // quadrature cells in fiber coordinates
  for (double w : group.haar_weights) fiber_coord_vol += w / sqrt_det_sigma;
  double total = 0.0;
  for (int v = 0; v < base.n_vertices(); ++v)
    total += std::sqrt(h.det_at(v)) * base.cell_volume() * fiber_coord_vol;
  return total;
}

/// Covariant derivative (nabla F)_{kij}^a = D_k F_ij^a by centered
/// differences on the grid (flat base, Christoffel symbols vanish).
struct NablaF {
  int dims = 0, lie_dim = 0, n_vertices = 0;
  // deriv[k][pair(i<j)]: n_vertices x lie_dim
  std::vector<std::vector<Eigen::MatrixXd>> deriv;

  Eigen::VectorXd at(int vertex, int k, int i, int j) const {
    if (i == j) return Eigen::VectorXd::Zero(lie_dim);
    const double sign = i < j ? 1.0 : -1.0;
    int idx = 0;
    for (int a = 0; a < dims; ++a)
      for (int b = a + 1; b < dims; ++b) {
        if (a == std::min(i, j) && b == std::max(i, j)) {
          return sign * deriv[k][idx].row(vertex).transpose();
        }
        ++idx;
      }
    throw std::logic_error("bad pair");
  }
};

inline NablaF nabla_F(const BaseLattice& base, const CurvatureField& f) {
  if (base.kind != BaseLattice::Kind::torus_grid)
    throw std::invalid_argument("nabla F needs a grid base");
  NablaF out;
  out.dims = f.dims;
  out.lie_dim = f.lie_dim;
  out.n_vertices = f.n_vertices;
  out.deriv.assign(f.dims, {});
  for (int k = 0; k < f.dims; ++k) {
    for (const auto& c : f.comp) {
      Eigen::MatrixXd d(f.n_vertices, f.lie_dim);
      for (int v = 0; v < f.n_vertices; ++v) {
        const int vp = base.neighbor(v, k, +1);
        const int vm = base.neighbor(v, k, -1);
        d.row(v) = (c.row(vp) - c.row(vm)) / (2.0 * base.mesh(k));
      }
      out.deriv[k].push_back(std::move(d));
    }
  }
  return out;
}

/// {(d^nabla)* F}_j^a = -g^{ih} (nabla F)_{hij}^a; exactly zero for
/// constant F on torus grids.
struct CodifferentialF {
  int dims = 0, lie_dim = 0, n_vertices = 0;
  std::vector<Eigen::MatrixXd> comp;  // comp[j]: n_vertices x lie_dim

  Eigen::VectorXd at(int vertex, int j) const { return comp[j].row(vertex).transpose(); }

  double max_norm() const {
    double m = 0.0;
    for (const auto& c : comp) m = std::max(m, c.cwiseAbs().maxCoeff());
    return m;
  }
};

inline CodifferentialF codifferential_F(const BaseLattice& base, const CurvatureField& f) {
  const NablaF nf = nabla_F(base, f);
  CodifferentialF out;
  out.dims = f.dims;
  out.lie_dim = f.lie_dim;
  out.n_vertices = f.n_vertices;
  for (int j = 0; j < f.dims; ++j) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(f.n_vertices, f.lie_dim);
    for (int v = 0; v < f.n_vertices; ++v) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.lie_dim);
      for (int i = 0; i < f.dims; ++i) acc -= nf.at(v, i, i, j);
      c.row(v) = acc.transpose();
    }
    out.comp.push_back(std::move(c));
  }
  return out;
}

/// Max over vertices and index triples of the cyclic sum
/// (nabla F)_{ijk} + (nabla F)_{jki} + (nabla F)_{kij} (second Bianchi).
/// Uses forward differences, the convention under which plaquette-log
/// curvature satisfies the identity exactly in the abelian case.
inline double bianchi_defect(const BaseLattice& base, const CurvatureField& f) {
  auto forward = [&](int v, int k, int i, int j) {
    const int vp = base.neighbor(v, k, +1);
    return Eigen::VectorXd((f.at(vp, i, j) - f.at(v, i, j)) / base.mesh(k));
  };
  double worst = 0.0;
  for (int v = 0; v < f.n_vertices; ++v)
    for (int i = 0; i < f.dims; ++i)
      for (int j = 0; j < f.dims; ++j)
        for (int k = 0; k < f.dims; ++k) {
          const Eigen::VectorXd s =
              forward(v, i, j, k) + forward(v, j, k, i) + forward(v, k, i, j);
          worst = std::max(worst, s.cwiseAbs().maxCoeff());
        }
  return worst;
}

}  // namespace kks
