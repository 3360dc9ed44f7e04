/// Finite metric measure spaces with isometric group actions: quotient
/// metrics, equivariant Hausdorff-approximation defects, vague-convergence
/// gaps, the delta_V invariant and the equivariant bump-section bound.
/// All quantities are exact maxima/minima over finite sets; the module
/// verifies supplied maps, it does not search for optimal ones.
#pragma once

#include "kkspectra/group.hpp"
#include "kkspectra/representation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace kks {

struct FiniteMMSpace {
  Eigen::MatrixXd dist;     // symmetric, zero diagonal
  Eigen::VectorXd measure;  // nonnegative weights
  std::vector<std::string> labels;

  int n() const { return static_cast<int>(dist.rows()); }

  double diameter() const { return dist.size() == 0 ? 0.0 : dist.maxCoeff(); }

  double total_mass() const { return measure.sum(); }

  void validate(double tol = 1e-12) const {
    const int m = n();
    if (measure.size() != m) throw std::invalid_argument("measure size mismatch");
    for (int i = 0; i < m; ++i) {
      if (dist(i, i) != 0.0) throw std::invalid_argument("nonzero diagonal");
      if (measure(i) < 0.0) throw std::invalid_argument("negative measure");
      for (int j = 0; j < m; ++j) {
        if (std::abs(dist(i, j) - dist(j, i)) > tol)
          throw std::invalid_argument("asymmetric distance matrix");
        if (i != j && dist(i, j) <= 0.0) throw std::invalid_argument("coincident points");
      }
    }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          if (dist(i, j) > dist(i, k) + dist(k, j) + tol)
            throw std::invalid_argument("triangle inequality violated");
  }

  /// Circle graph with m points and the given circumference (arc metric).
  static FiniteMMSpace circle(int m, double circumference = 0.0) {
    if (circumference <= 0.0) circumference = m;  // unit edges by default
    FiniteMMSpace s;
    s.dist.resize(m, m);
    const double step = circumference / m;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const int hop = std::min((i - j + m) % m, (j - i + m) % m);
        s.dist(i, j) = step * hop;
      }
    s.measure = Eigen::VectorXd::Ones(m);
    return s;
  }

  /// Shortest-path metric of a weighted graph (Floyd-Warshall), unit masses.
  static FiniteMMSpace from_graph(int n_vertices,
                                  const std::vector<std::tuple<int, int, double>>& edges) {
    FiniteMMSpace s;
    const double inf = std::numeric_limits<double>::infinity();
    s.dist = Eigen::MatrixXd::Constant(n_vertices, n_vertices, inf);
    for (int i = 0; i < n_vertices; ++i) s.dist(i, i) = 0.0;
    for (auto [u, v, w] : edges) {
      s.dist(u, v) = std::min(s.dist(u, v), w);
      s.dist(v, u) = s.dist(u, v);
    }
    for (int k = 0; k < n_vertices; ++k)
      for (int i = 0; i < n_vertices; ++i)
        for (int j = 0; j < n_vertices; ++j)
          s.dist(i, j) = std::min(s.dist(i, j), s.dist(i, k) + s.dist(k, j));
    if (!s.dist.allFinite()) throw std::invalid_argument("graph not connected");
    s.measure = Eigen::VectorXd::Ones(n_vertices);
    return s;
  }
};

/// Right action of a finite group by distance-preserving permutations,
/// perm[g][u] = u*g. Quadrature groups act only through a finite subgroup,
/// so the acting group here is always a finite model.
struct IsometricAction {
  CompactGroupModel group;
  std::vector<std::vector<int>> perm;

  int apply(int point, int g) const { return perm[g][point]; }

  static IsometricAction trivial(const CompactGroupModel& g, int n_points) {
    IsometricAction a;
    a.group = g;
    std::vector<int> id(n_points);
    for (int i = 0; i < n_points; ++i) id[i] = i;
    a.perm.assign(g.size(), id);
    return a;
  }

  /// Regular right action of a finite group on itself.
  static IsometricAction regular(const CompactGroupModel& g) {
    IsometricAction a;
    a.group = g;
    const int n = static_cast<int>(g.size());
    a.perm.assign(n, std::vector<int>(n));
    for (int gi = 0; gi < n; ++gi)
      for (int u = 0; u < n; ++u) a.perm[gi][u] = g.table[u][gi];
    return a;
  }

  /// Z_m rotating an m-point circle (or any space indexed mod m): u*g = u+g.
  static IsometricAction cyclic_rotation(const CompactGroupModel& zm, int n_points) {
    const int m = static_cast<int>(zm.size());
    if (n_points % m != 0) throw std::invalid_argument("point count not divisible");
    IsometricAction a;
    a.group = zm;
    a.perm.assign(m, std::vector<int>(n_points));
    const int stride = n_points / m;
    for (int g = 0; g < m; ++g)
      for (int u = 0; u < n_points; ++u) a.perm[g][u] = (u + stride * g) % n_points;
    return a;
  }

  void validate(const FiniteMMSpace& space, double tol = 1e-12) const {
    if (group.kind != GroupKind::finite)
      throw std::invalid_argument("actions on finite spaces must come from a finite group");
    const int n = space.n();
    const int m = static_cast<int>(group.size());
    if (static_cast<int>(perm.size()) != m) throw std::invalid_argument("perm count mismatch");
    for (int u = 0; u < n; ++u)
      if (perm[group.identity_index][u] != u)
        throw std::invalid_argument("identity does not act as identity");
    for (int a = 0; a < m; ++a) {
      std::vector<bool> seen(n, false);
      for (int u = 0; u < n; ++u) {
        const int v = perm[a][u];
        if (v < 0 || v >= n || seen[v]) throw std::invalid_argument("not a permutation");
        seen[v] = true;
      }
      for (int b = 0; b < m; ++b)
        for (int u = 0; u < n; ++u)
          if (perm[group.table[a][b]][u] != perm[b][perm[a][u]])
            throw std::invalid_argument("composition law violated");
      for (int u = 0; u < n; ++u) {
        if (std::abs(space.measure(perm[a][u]) - space.measure(u)) > tol)
          throw std::invalid_argument("measure not invariant");
        for (int v = 0; v < n; ++v)
          if (std::abs(space.dist(perm[a][u], perm[a][v]) - space.dist(u, v)) > tol)
            throw std::invalid_argument("action not isometric");
      }
    }
  }
};

struct PointMap {
  int n_source = 0;
  int n_target = 0;
  std::vector<int> map;  // total: one target index per source point

  int operator()(int u) const { return map[u]; }

  static PointMap identity(int n) {
    PointMap p;
    p.n_source = p.n_target = n;
    p.map.resize(n);
    for (int i = 0; i < n; ++i) p.map[i] = i;
    return p;
  }
};

struct QuotientResult {
  FiniteMMSpace space;            // orbit space with the inf metric
  PointMap projection;            // u -> orbit index
  std::vector<std::vector<int>> orbits;
};

/// Quotient metric d-bar(u0-bar, u1-bar) = inf_g d(u0, u1 g) with the
/// pushforward measure (orbit weight = sum of member weights).
inline QuotientResult quotient(const FiniteMMSpace& space, const IsometricAction& act) {
  const int n = space.n();
  std::vector<int> orbit_of(n, -1);
  std::vector<std::vector<int>> orbits;
  for (int u = 0; u < n; ++u) {
    if (orbit_of[u] >= 0) continue;
    const int id = static_cast<int>(orbits.size());
    orbits.push_back({});
    // orbit closure under all group elements
    std::vector<int> stack = {u};
    orbit_of[u] = id;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      orbits[id].push_back(v);
      for (std::size_t g = 0; g < act.group.size(); ++g) {
        const int w = act.apply(v, static_cast<int>(g));
        if (orbit_of[w] < 0) {
          orbit_of[w] = id;
          stack.push_back(w);
        }
      }
    }
    std::sort(orbits[id].begin(), orbits[id].end());
  }

  const int q = static_cast<int>(orbits.size());
  QuotientResult out;
  out.orbits = orbits;
  out.space.dist.setZero(q, q);
  out.space.measure.setZero(q);
  for (int a = 0; a < q; ++a) {
    for (int v : orbits[a]) out.space.measure(a) += space.measure(v);
    for (int b = 0; b < q; ++b) {
      if (a == b) continue;
      double best = std::numeric_limits<double>::infinity();
      const int rep = orbits[a].front();
      for (int v : orbits[b]) best = std::min(best, space.dist(rep, v));
      out.space.dist(a, b) = best;
    }
  }
  // the inf over the orbit is representative-independent; symmetrize exactly
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < a; ++b) {
      const double d = std::min(out.space.dist(a, b), out.space.dist(b, a));
      out.space.dist(a, b) = out.space.dist(b, a) = d;
    }
  out.projection.n_source = n;
  out.projection.n_target = q;
  out.projection.map.assign(orbit_of.begin(), orbit_of.end());
  return out;
}

struct SubmetryReport {
  bool ok = true;
  int center = -1;
  double radius = 0.0;
  int witness_orbit = -1;  // orbit in exactly one of pi(D(u,r)), D(u-bar,r)
};

/// Exhaustive check that pi(D(u,r)) = D(u-bar,r) for every center and every
/// realized radius (closed balls).
inline SubmetryReport check_submetry(const FiniteMMSpace& space, const IsometricAction& act,
                                     const QuotientResult& quot) {
  const int n = space.n();
  const int q = quot.space.n();
  std::set<double> radii;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) radii.insert(space.dist(i, j));
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) radii.insert(quot.space.dist(a, b));

  for (int u = 0; u < n; ++u) {
    const int ubar = quot.projection(u);
    for (double r : radii) {
      std::vector<bool> image(q, false), ball(q, false);
      for (int v = 0; v < n; ++v)
        if (space.dist(u, v) <= r) image[quot.projection(v)] = true;
      for (int b = 0; b < q; ++b)
        if (quot.space.dist(ubar, b) <= r) ball[b] = true;
      for (int b = 0; b < q; ++b)
        if (image[b] != ball[b]) return {false, u, r, b};
    }
  }
  return {};
}

inline SubmetryReport check_submetry(const FiniteMMSpace& space, const IsometricAction& act) {
  return check_submetry(space, act, quotient(space, act));
}

/// Distortion-plus-covering defect of a point map; phi is an eps-isometry in
/// the sense of the strict definition for any eps greater than this value.
inline double isometry_defect(const FiniteMMSpace& source, const FiniteMMSpace& target,
                              const PointMap& phi) {
  double distortion = 0.0;
  for (int u = 0; u < source.n(); ++u)
    for (int v = 0; v < source.n(); ++v)
      distortion =
          std::max(distortion, std::abs(source.dist(u, v) - target.dist(phi(u), phi(v))));
  double covering = 0.0;
  for (int p = 0; p < target.n(); ++p) {
    double nearest = std::numeric_limits<double>::infinity();
    for (int u = 0; u < source.n(); ++u) nearest = std::min(nearest, target.dist(p, phi(u)));
    covering = std::max(covering, nearest);
  }
  return std::max(distortion, covering);
}

/// sup over (u,g) of d(phi(u g), phi(u) g) -- the extra term making phi an
/// equivariant Hausdorff approximation.
inline double equivariance_defect(const FiniteMMSpace& target, const PointMap& phi,
                                  const IsometricAction& act_source,
                                  const IsometricAction& act_target) {
  if (act_source.group.size() != act_target.group.size())
    throw std::invalid_argument("actions must share the group");
  double worst = 0.0;
  for (int u = 0; u < phi.n_source; ++u)
    for (std::size_t g = 0; g < act_source.group.size(); ++g) {
      const int lhs = phi(act_source.apply(u, static_cast<int>(g)));
      const int rhs = act_target.apply(phi(u), static_cast<int>(g));
      worst = std::max(worst, target.dist(lhs, rhs));
    }
  return worst;
}

struct MeasureGapRow {
  double quotient_gap = 0.0;  // |int f d(phibar_* nubar') - int f d nubar|
  double bound = 0.0;         // nu'(P') eps' + |int f.pi d(phi_* nu') - int f.pi d nu|
};

struct InducedQuotientMap {
  PointMap map;            // between the quotients
  double defect = 0.0;     // isometry defect of the induced map
  double bound = 0.0;      // 2 * max(isometry defect, equivariance defect) of phi
  std::vector<MeasureGapRow> measure_report;
};

/// The induced map phibar(x) = pi(phi(s'(x))) between quotients, with its
/// 2*eps bound and the measure-comparison report for the supplied test
/// functions (value vectors on the target quotient).
inline InducedQuotientMap induced_quotient_map(
    const FiniteMMSpace& source, const FiniteMMSpace& target, const PointMap& phi,
    const IsometricAction& act_source, const IsometricAction& act_target,
    const std::vector<int>& section,  // quotient index -> source point
    const std::vector<Eigen::VectorXd>& test_functions = {}) {
  const QuotientResult qs = quotient(source, act_source);
  const QuotientResult qt = quotient(target, act_target);
  if (static_cast<int>(section.size()) != qs.space.n())
    throw std::invalid_argument("invalid section: size mismatch");
  for (int x = 0; x < qs.space.n(); ++x)
    if (x < 0 || section[x] >= source.n() || qs.projection(section[x]) != x)
      throw std::invalid_argument("invalid section: not a right inverse of the projection");

  InducedQuotientMap out;
  out.map.n_source = qs.space.n();
  out.map.n_target = qt.space.n();
  out.map.map.resize(qs.space.n());
  for (int x = 0; x < qs.space.n(); ++x) out.map.map[x] = qt.projection(phi(section[x]));

  const double e0 = isometry_defect(source, target, phi);
  const double e1 = equivariance_defect(target, phi, act_source, act_target);
  const double eps = std::max(e0, e1);
  out.bound = 2.0 * eps;
  out.defect = isometry_defect(qs.space, qt.space, out.map);

  for (const auto& f : test_functions) {
    if (f.size() != qt.space.n()) throw std::invalid_argument("test function size mismatch");
    MeasureGapRow row;
    double push = 0.0, base = 0.0;
    for (int x = 0; x < qs.space.n(); ++x) push += f(out.map(x)) * qs.space.measure(x);
    for (int y = 0; y < qt.space.n(); ++y) base += f(y) * qt.space.measure(y);
    row.quotient_gap = std::abs(push - base);

    // modulus of continuity of f at scale 2*eps on the target quotient
    double eps_prime = 0.0;
    for (int a = 0; a < qt.space.n(); ++a)
      for (int b = 0; b < qt.space.n(); ++b)
        if (qt.space.dist(a, b) <= 2.0 * eps + 1e-15)
          eps_prime = std::max(eps_prime, std::abs(f(a) - f(b)));
    double lift_push = 0.0, lift_base = 0.0;
    for (int u = 0; u < source.n(); ++u)
      lift_push += f(qt.projection(phi(u))) * source.measure(u);
    for (int p = 0; p < target.n(); ++p) lift_base += f(qt.projection(p)) * target.measure(p);
    row.bound = source.total_mass() * eps_prime + std::abs(lift_push - lift_base);
    out.measure_report.push_back(row);
  }
  return out;
}

/// Max over test functions of |int f d(phi_* nu') - int f d nu|, the finite
/// surrogate for vague convergence of pushforward measures.
inline double vague_gap(const FiniteMMSpace& source, const FiniteMMSpace& target,
                        const PointMap& phi, const std::vector<Eigen::VectorXd>& tests) {
  double worst = 0.0;
  for (const auto& f : tests) {
    if (f.size() != target.n()) throw std::invalid_argument("test function size mismatch");
    double push = 0.0, base = 0.0;
    for (int u = 0; u < source.n(); ++u) push += f(phi(u)) * source.measure(u);
    for (int p = 0; p < target.n(); ++p) base += f(p) * target.measure(p);
    worst = std::max(worst, std::abs(push - base));
  }
  return worst;
}

/// A closed subgroup supplied as the list of its element indices in the
/// acting group.
struct SubgroupModel {
  std::string name;
  std::vector<int> elements;
};

/// The complete subgroup list of a cyclic group: one divisor subgroup per
/// divisor of m. For actions of Z_m in U(1) this is exact; truncating the
/// tower of circle subgroups is never needed once the action factors
/// through Z_m.
inline std::vector<SubgroupModel> cyclic_subgroups(const CompactGroupModel& zm) {
  const int m = static_cast<int>(zm.size());
  std::vector<SubgroupModel> out;
  for (int d = 1; d <= m; ++d) {
    if (m % d != 0) continue;
    SubgroupModel h;
    h.name = "Z" + std::to_string(d);
    for (int j = 0; j < d; ++j) h.elements.push_back(j * (m / d));
    out.push_back(std::move(h));
  }
  return out;
}

/// V^H = {0} iff the Haar average of rho over H vanishes (the average is
/// the orthogonal projector onto the fixed space).
inline bool fixed_space_is_zero(const CompactGroupModel& g, const RepresentationModel& rep,
                                const SubgroupModel& h, double tol = 1e-10) {
  Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(rep.dim_V, rep.dim_V);
  for (int e : h.elements) avg += rep.matrix(g.elements.at(e));
  avg /= static_cast<double>(h.elements.size());
  return avg.cwiseAbs().maxCoeff() < tol;
}

/// delta_V(u) = inf over subgroups H with V^H = 0 of sup_{h in H} d(u, uh).
/// Returns +infinity when no supplied subgroup qualifies.
inline Eigen::VectorXd delta_V(const FiniteMMSpace& space, const IsometricAction& act,
                               const RepresentationModel& rep,
                               const std::vector<SubgroupModel>& subgroups) {
  std::vector<const SubgroupModel*> qualifying;
  for (const auto& h : subgroups)
    if (fixed_space_is_zero(act.group, rep, h)) qualifying.push_back(&h);

  Eigen::VectorXd out =
      Eigen::VectorXd::Constant(space.n(), std::numeric_limits<double>::infinity());
  if (qualifying.empty()) return out;
  for (int u = 0; u < space.n(); ++u) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto* h : qualifying) {
      double sweep = 0.0;
      for (int e : h->elements) sweep = std::max(sweep, space.dist(u, act.apply(u, e)));
      best = std::min(best, sweep);
    }
    out(u) = best;
  }
  return out;
}

struct BumpSections {
  int count = 0;                // verified number of independent sections
  Eigen::MatrixXd sections;     // (n * dim_V) x q, column per orbit
  Eigen::MatrixXd gram;
};

/// Cut-off bump construction: for each chosen orbit representative u_i, the
/// function f_i(u) = d(u, B(u_i,2delta)^c) / (d(u, clB(u_i,delta)) +
/// d(u, B(u_i,2delta)^c)) is averaged against rho to the equivariant
/// section fhat_i(u) = sum_g w_g f_i(u g) rho(g) v_i. The Gram rank of the
/// fhat_i certifies dim (C_0(P) tensor V)^G >= #orbits.
inline BumpSections bump_sections(const FiniteMMSpace& space, const IsometricAction& act,
                                  const RepresentationModel& rep,
                                  const std::vector<int>& orbit_reps, double delta,
                                  std::vector<Eigen::VectorXd> fixed_vectors = {}) {
  const int n = space.n();
  const int d = rep.dim_V;
  const int q = static_cast<int>(orbit_reps.size());
  const QuotientResult quot = quotient(space, act);

  for (int i = 0; i < q; ++i)
    for (int j = 0; j < i; ++j) {
      const double sep =
          quot.space.dist(quot.projection(orbit_reps[i]), quot.projection(orbit_reps[j]));
      if (sep < 4.0 * delta) throw std::runtime_error("orbits not 4delta-separated");
    }

  // stabilizer-fixed unit vectors v_i
  if (fixed_vectors.empty()) {
    for (int i = 0; i < q; ++i) {
      SubgroupModel stab{"stab", {}};
      for (std::size_t g = 0; g < act.group.size(); ++g)
        if (act.apply(orbit_reps[i], static_cast<int>(g)) == orbit_reps[i])
          stab.elements.push_back(static_cast<int>(g));
      Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(d, d);
      for (int e : stab.elements) avg += rep.matrix(act.group.elements[e]);
      avg /= static_cast<double>(stab.elements.size());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(avg);
      if (es.eigenvalues().maxCoeff() < 0.5)
        throw std::runtime_error("stabilizer fixes no nonzero vector");
      fixed_vectors.push_back(es.eigenvectors().col(d - 1));
    }
  }
  for (int i = 0; i < q; ++i) {
    for (std::size_t g = 0; g < act.group.size(); ++g) {
      if (act.apply(orbit_reps[i], static_cast<int>(g)) != orbit_reps[i]) continue;
      const Eigen::VectorXd moved = rep.matrix(act.group.elements[g]) * fixed_vectors[i];
      if ((moved - fixed_vectors[i]).norm() > 1e-10)
        throw std::runtime_error("supplied vector not fixed by the stabilizer");
    }
  }

  auto dist_to_set = [&](int u, const std::vector<int>& set) {
    double best = std::numeric_limits<double>::infinity();
    for (int v : set) best = std::min(best, space.dist(u, v));
    return best;
  };

  BumpSections out;
  out.sections.setZero(static_cast<long>(n) * d, q);
  for (int i = 0; i < q; ++i) {
    const int ui = orbit_reps[i];
    std::vector<int> outer_complement, inner_closure;
    for (int v = 0; v < n; ++v) {
      if (space.dist(ui, v) >= 2.0 * delta) outer_complement.push_back(v);
      if (space.dist(ui, v) <= delta) inner_closure.push_back(v);
    }
    Eigen::VectorXd f(n);
    for (int v = 0; v < n; ++v) {
      if (outer_complement.empty()) {
        f(v) = 1.0;
        continue;
      }
      const double num = dist_to_set(v, outer_complement);
      const double den = dist_to_set(v, inner_closure) + num;
      f(v) = den == 0.0 ? 0.0 : num / den;
    }
    for (int u = 0; u < n; ++u) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
      for (std::size_t g = 0; g < act.group.size(); ++g)
        acc += act.group.haar_weights[g] * f(act.apply(u, static_cast<int>(g))) *
               rep.matrix(act.group.elements[g]) * fixed_vectors[i];
      out.sections.block(static_cast<long>(u) * d, i, d, 1) = acc;
    }
  }

  out.gram.setZero(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      for (int u = 0; u < n; ++u)
        out.gram(i, j) += space.measure(u) *
                          out.sections.block(static_cast<long>(u) * d, i, d, 1)
                              .col(0)
                              .dot(out.sections.block(static_cast<long>(u) * d, j, d, 1).col(0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.gram);
  const double scale = std::max(1e-300, es.eigenvalues().cwiseAbs().maxCoeff());
  out.count = 0;
  for (int i = 0; i < q; ++i)
    if (es.eigenvalues()(i) > 1e-10 * scale) ++out.count;
  return out;
}

/// Equivariance defect of a V-valued function on the space:
/// max |fhat(u g) - rho(g^{-1}) fhat(u)|.
inline double section_equivariance_defect(const FiniteMMSpace& space, const IsometricAction& act,
                                          const RepresentationModel& rep,
                                          const Eigen::VectorXd& section) {
  const int n = space.n();
  const int d = rep.dim_V;
  double worst = 0.0;
  for (int u = 0; u < n; ++u)
    for (std::size_t g = 0; g < act.group.size(); ++g) {
      const Eigen::VectorXd lhs = section.segment(static_cast<long>(act.apply(u, g)) * d, d);
      const Eigen::VectorXd rhs =
          rep.matrix(act.group.elements[act.group.inverse_table[g]]) *
          section.segment(static_cast<long>(u) * d, d);
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  return worst;
}

}  // namespace kks
