/// Built-in scenario catalog: named experiments binding the group, bundle,
/// spectral, mm-space and holomorphic modules, each writing CSV (and some
/// SVG) artifacts and checking a subset of the workbench's acceptance
/// assertions. Scenarios are pure functions of (out_dir, seed).
#pragma once

#include "kkspectra/holomorphic.hpp"
#include "kkspectra/io.hpp"
#include "kkspectra/laplacian.hpp"
#include "kkspectra/mm_space.hpp"
#include "kkspectra/ricci.hpp"
#include "kkspectra/svg.hpp"
#include "kkspectra/transfer.hpp"

#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace kks {

struct ScenarioContext {
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 1;
};

struct ScenarioResult {
  std::string name;
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "pass: " : "FAIL: ") + what);
  }
};

struct Scenario {
  std::string name;
  std::string doc;
  std::vector<std::string> tags;
  std::function<ScenarioResult(const ScenarioContext&)> run;
};

namespace scenario_detail {

inline std::filesystem::path artifact(const ScenarioContext& ctx, const std::string& scenario,
                                      const std::string& file) {
  return ctx.out_dir / scenario / file;
}

/// Random connected base graph with <= max_vertices vertices.
inline BaseLattice random_base_graph(std::mt19937_64& rng, int min_vertices, int max_vertices) {
  const int nb = std::uniform_int_distribution<int>(min_vertices, max_vertices)(rng);
  std::vector<BaseLattice::Edge> edges;
  for (int v = 1; v < nb; ++v)
    edges.push_back({std::uniform_int_distribution<int>(0, v - 1)(rng), v, 1.0});
  const int extra = std::uniform_int_distribution<int>(1, std::max(2, nb / 2))(rng);
  for (int e = 0; e < extra; ++e) {
    const int u = std::uniform_int_distribution<int>(0, nb - 1)(rng);
    const int v = std::uniform_int_distribution<int>(0, nb - 1)(rng);
    if (u != v) edges.push_back({u, v, 1.0});
  }
  return BaseLattice::graph(nb, std::move(edges));
}

/// Random free Z_m action: blocks of m points with invariant block metric.
struct RandomGSpace {
  FiniteMMSpace space;
  IsometricAction action;
};

inline RandomGSpace random_free_cyclic_space(std::mt19937_64& rng, int m, int blocks) {
  const int n = m * blocks;
  std::uniform_real_distribution<double> len(1.0, 2.0);
  std::uniform_int_distribution<int> volt(0, m - 1);
  std::vector<std::tuple<int, int, double>> edges;
  auto vid = [&](int block, int fiber) { return block * m + ((fiber % m) + m) % m; };
  for (int b = 0; b < blocks; ++b) {
    const double w = len(rng);
    for (int f = 0; f < m; ++f) edges.emplace_back(vid(b, f), vid(b, f + 1), w);
    if (b > 0) {
      const int v = volt(rng);
      const double wb = len(rng);
      for (int f = 0; f < m; ++f) edges.emplace_back(vid(b - 1, f), vid(b, f + v), wb);
    }
  }
  RandomGSpace out;
  out.space = FiniteMMSpace::from_graph(n, edges);
  out.action.group = CompactGroupModel::cyclic(m);
  out.action.perm.assign(m, std::vector<int>(n));
  for (int g = 0; g < m; ++g)
    for (int b = 0; b < blocks; ++b)
      for (int f = 0; f < m; ++f) out.action.perm[g][vid(b, f)] = vid(b, f + g);
  return out;
}

// ----------------------------------------------------------- scenarios

inline ScenarioResult run_voltage_c6(const ScenarioContext& ctx) {
  ScenarioResult res{"voltage-c6"};
  auto base = BaseLattice::cycle(3);
  auto z2 = CompactGroupModel::cyclic(2);
  std::vector<GroupElement> links = {GroupElement{0}, GroupElement{0}, GroupElement{1}};
  const double w = 0.8;
  auto dec = cover_decomposition(base, z2, links, w);
  res.check(dec.max_gap <= 1e-10, "C3/Z2 cover decomposition gap <= 1e-10 (gap=" +
                                      format_number(dec.max_gap) + ")");

  std::ostringstream csv;
  csv << "sector,chi,j,lambda_total,lambda_assembled\n";
  for (int j = 0; j < dec.total_spectrum.size(); ++j)
    csv << "all,," << j << ',' << format_number(dec.total_spectrum(j)) << ','
        << format_number(dec.assembled_spectrum(j)) << '\n';
  for (const auto& [name, chi] : dec.sector_chi) csv << name << ',' << format_number(chi) << ",,,\n";
  atomic_write(artifact(ctx, res.name, "decomposition.csv"), csv.str());
  return res;
}

inline ScenarioResult run_cover_random(const ScenarioContext& ctx) {
  ScenarioResult res{"cover-random"};
  std::mt19937_64 rng(ctx.seed);
  std::ostringstream csv;
  csv << "instance,group,base_vertices,fiber_weight,max_gap\n";
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    auto base = random_base_graph(rng, 3, 10);
    CompactGroupModel g;
    const int pick = std::uniform_int_distribution<int>(0, 5)(rng);
    if (pick == 5) {
      g = CompactGroupModel::symmetric3();
    } else {
      g = CompactGroupModel::cyclic(pick + 2);
    }
    std::uniform_int_distribution<int> el(0, static_cast<int>(g.size()) - 1);
    std::vector<GroupElement> links;
    for (std::size_t e = 0; e < base.edges.size(); ++e) links.push_back(GroupElement{el(rng)});
    const double w = std::uniform_real_distribution<double>(0.5, 2.0)(rng);
    auto dec = cover_decomposition(base, g, links, w);
    worst = std::max(worst, dec.max_gap);
    csv << inst << ',' << g.name << ',' << base.n_vertices() << ',' << format_number(w) << ','
        << format_number(dec.max_gap) << '\n';
  }
  res.check(worst <= 1e-10,
            "20 randomized cover decompositions, max gap <= 1e-10 (worst=" +
                format_number(worst) + ")");
  atomic_write(artifact(ctx, res.name, "instances.csv"), csv.str());
  return res;
}

inline ScenarioResult run_casimir_table(const ScenarioContext& ctx) {
  ScenarioResult res{"casimir-table"};
  std::ostringstream csv;
  csv << "group,rep,sigma_scale,chi,expected,abs_err\n";
  double worst = 0.0;
  for (int n = 1; n <= 6; ++n) {
    auto u1 = CompactGroupModel::u1(16);
    auto c = casimir(RepresentationModel::u1_weight_rep(n), u1);
    const double err = std::abs(c.chi - double(n) * n);
    worst = std::max(worst, err);
    csv << "U1,rho_" << n << ",1," << format_number(c.chi) << ',' << format_number(double(n) * n)
        << ',' << format_number(err) << '\n';
  }
  res.check(worst <= 1e-12, "chi(U(1), rho_n) = n^2 for n <= 6 (worst err=" +
                                format_number(worst) + ")");

  auto su2 = CompactGroupModel::su2(2, 1, 2);
  auto ca = casimir(RepresentationModel::su2_adjoint_rep(), su2);
  const double adj_err = std::abs(ca.chi - 2.0);
  csv << "SU2,adjoint,1," << format_number(ca.chi) << ",2," << format_number(adj_err) << '\n';
  res.check(adj_err <= 1e-12, "chi(SU(2), adjoint) = 2");

  double worst_scaling = 0.0;
  for (double scale : {0.5, 2.0, 4.0}) {
    auto u1s = CompactGroupModel::u1(16, scale);
    auto cs = casimir(RepresentationModel::u1_weight_rep(3), u1s);
    const double err = std::abs(cs.chi - 9.0 / scale);
    worst_scaling = std::max(worst_scaling, err);
    csv << "U1,rho_3," << format_number(scale) << ',' << format_number(cs.chi) << ','
        << format_number(9.0 / scale) << ',' << format_number(err) << '\n';
  }
  res.check(worst_scaling <= 1e-12, "scaling law chi(c sigma) = chi(sigma)/c");
  atomic_write(artifact(ctx, res.name, "casimir.csv"), csv.str());
  return res;
}

inline ScenarioResult run_fiber_refine(const ScenarioContext& ctx) {
  ScenarioResult res{"fiber-refine"};
  std::ostringstream csv;
  csv << "n,m,chi_discrete,chi_continuum,abs_err\n";
  bool ratios_ok = true, envelope_ok = true;
  for (int n : {1, 2, 3}) {
    double prev = -1.0;
    for (int m : {8, 16, 32, 64}) {
      auto zm = CompactGroupModel::cyclic(m);
      const double c = 2 * kPi;  // sigma = 1
      const double wf = (m / c) * (m / c);
      auto fc = fiber_casimir(zm, RepresentationModel::cyclic_rotation_rep(m, n),
                              default_generating_set(zm), wf);
      const double err = std::abs(fc.chi - double(n) * n);
      csv << n << ',' << m << ',' << format_number(fc.chi) << ',' << format_number(double(n) * n)
          << ',' << format_number(err) << '\n';
      if (prev > 0 && err > 0) ratios_ok = ratios_ok && (prev / err >= 3.4);
      envelope_ok = envelope_ok && err <= 4.0 * std::pow(double(n), 4) / (double(m) * m);
      prev = err;
    }
  }
  res.check(ratios_ok, "chi_discrete(n,m) -> n^2 at second order, halving ratio >= 3.4");
  res.check(envelope_ok, "error envelope |chi_discrete - n^2| <= 4 n^4 / m^2");
  atomic_write(artifact(ctx, res.name, "fiber_casimir.csv"), csv.str());
  return res;
}

inline ScenarioResult run_landau(const ScenarioContext& ctx) {
  ScenarioResult res{"landau-k3"};
  std::ostringstream csv;
  csv << "k,m,j,lambda,mu\n";
  std::vector<SvgSeries> series;
  std::vector<std::pair<int, Spectrum>> spectra;
  const int m = 64;
  for (int k : {1, 2, 3}) {
    EllipticCurveBundle b{2 * kPi, 2 * kPi, k};
    const double mu = b.mu();
    const int count = 2 * k + 4;
    auto s = eigs(landau_operator(b, m), count, ctx.seed, false);
    spectra.emplace_back(k, s);
    for (int j = 0; j < count; ++j)
      csv << k << ',' << m << ',' << j << ',' << format_number(s.values(j)) << ','
          << format_number(mu) << '\n';
    SvgSeries sr;
    sr.label = "k=" + std::to_string(k);
    sr.color = k == 1 ? "#1f77b4" : (k == 2 ? "#d62728" : "#2ca02c");
    for (int j = 0; j < count; ++j) {
      sr.x.push_back(j);
      sr.y.push_back(s.values(j));
    }
    series.push_back(sr);

    res.check(std::abs(s.values(0) - mu) / mu < 0.02,
              "k=" + std::to_string(k) + ": lowest eigenvalue within 2% of mu");
    auto h = h0_dimension(s, mu, 0.1 * mu);
    res.check(h.cluster_size == 2 * k && h.dimension == k,
              "k=" + std::to_string(k) + ": lowest-cluster multiplicity exactly k");
    const double gap = s.values(2 * k) - s.values(0);
    res.check(std::abs(gap - 2 * mu) / (2 * mu) < 0.05,
              "k=" + std::to_string(k) + ": first gap within 5% of 2 mu");
  }
  atomic_write(artifact(ctx, res.name, "landau.csv"), csv.str());
  atomic_write(artifact(ctx, res.name, "spectra.csv"), spectrum_csv(res.name, spectra));
  atomic_write(artifact(ctx, res.name, "landau.svg"),
               svg_plot("Landau levels on the (2pi)^2 torus, 64x64", series));
  return res;
}

inline ScenarioResult run_h0_table(const ScenarioContext& ctx) {
  ScenarioResult res{"h0-table"};
  std::ostringstream csv;
  csv << "degree,area,f_norm,h0\n";
  bool all = true;
  for (int k = 1; k <= 5; ++k) {
    EllipticCurveBundle b{2 * kPi, 2 * kPi, k};
    const int m = 16 * k;
    auto s = eigs(landau_operator(b, m), 2 * k + 4, ctx.seed, false);
    const int h0 = h0_dimension(s, b.mu(), 0.1 * b.mu()).dimension;
    all = all && h0 == k;
    csv << k << ',' << format_number(b.area()) << ',' << format_number(b.mu()) << ',' << h0
        << '\n';
  }
  res.check(all, "h0_dimension(k) = k for k <= 5 (Riemann-Roch oracle)");

  // fixed slope, growing area: the section count grows with the budget
  const double mu = 1.0 / (2 * kPi);
  auto rows = h0_bound_table(mu, {4 * kPi * kPi, 8 * kPi * kPi, 16 * kPi * kPi}, 12);
  bool grows = rows[0].h0 == 1 && rows[1].h0 == 2 && rows[2].h0 == 4;
  res.check(grows, "fixed slope, areas x{1,2,4}: dim H^0 = k grows with the area");
  for (const auto& r : rows)
    csv << r.degree << ',' << format_number(r.area) << ',' << format_number(r.curvature_norm)
        << ',' << r.h0 << '\n';

  // negative degree has no sections
  EllipticCurveBundle neg{2 * kPi, 2 * kPi, -1};
  auto sneg = eigs(landau_operator(neg, 16), 6, ctx.seed, false);
  const auto hneg = h0_dimension(sneg, neg.mu(), 0.1 * std::abs(neg.mu()));
  res.check(hneg.dimension == 0, "k = -1: dim H^0 = 0");
  csv << "-1," << format_number(neg.area()) << ',' << format_number(std::abs(neg.mu())) << ','
      << hneg.dimension << '\n';
  atomic_write(artifact(ctx, res.name, "h0.csv"), csv.str());
  return res;
}

inline ScenarioResult run_ricci_crosscheck(const ScenarioContext& ctx) {
  ScenarioResult res{"ricci-crosscheck"};
  std::ostringstream csv;
  csv << "chart,b,max_component_diff,hh_eig_err,vv_err\n";
  auto base = BaseLattice::torus({4, 4}, {2 * kPi, 2 * kPi});
  auto u1 = CompactGroupModel::u1(4);
  for (double b : {0.5, 1.0, 2.0}) {
    auto f = CurvatureField::constant(base, 1, {Eigen::VectorXd::Constant(1, b)});
    auto ric = ricci_h(base, f, std::nullopt, u1.sigma, u1);
    const double x0 = 0.3;
    auto coord = ricci_fd_oracle(heisenberg_chart(b), Eigen::Vector3d(x0, 0.1, 0.2), 1e-3);
    Eigen::Matrix3d frame = Eigen::Matrix3d::Identity();
    frame(2, 1) = b * x0;
    const Eigen::Matrix3d in_frame = frame.transpose() * coord * frame;
    const double diff = (in_frame - ric.full_at(0)).cwiseAbs().maxCoeff();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ric.hh[0]);
    const double hh_err = (es.eigenvalues().array() + b * b / 2).abs().maxCoeff();
    const double vv_err = std::abs(ric.vv[0](0, 0) - b * b / 2);
    csv << "heisenberg," << format_number(b) << ',' << format_number(diff) << ','
        << format_number(hh_err) << ',' << format_number(vv_err) << '\n';
    res.check(diff <= 1e-5, "b=" + format_number(b) + ": ricci_h vs fd oracle <= 1e-5");
    res.check(hh_err <= 1e-6 && vv_err <= 1e-6,
              "b=" + format_number(b) + ": HH = -b^2/2, VV = b^2/2 to 1e-6");
  }

  // trivial SU(2) fiber chart
  auto su2 = CompactGroupModel::su2(2, 1, 2);
  auto f0 = CurvatureField::constant(base, 3, {Eigen::VectorXd::Zero(3)});
  auto ric = ricci_h(base, f0, std::nullopt, su2.sigma, su2);
  auto coord = ricci_fd_oracle(bi_invariant_chart(su2), Eigen::Vector3d::Zero(), 1e-3);
  const double diff = (coord - ric.vv[0]).cwiseAbs().maxCoeff();
  csv << "su2-trivial,0," << format_number(diff) << ",,\n";
  res.check(diff <= 1e-5, "SU(2) trivial connection: VV vs bi-invariant oracle <= 1e-5");
  atomic_write(artifact(ctx, res.name, "ricci.csv"), csv.str());
  return res;
}

inline ScenarioResult run_gauge_invariance(const ScenarioContext& ctx) {
  ScenarioResult res{"gauge-invariance"};
  std::mt19937_64 rng(ctx.seed);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  auto base = BaseLattice::torus({10, 10}, {2 * kPi, 2 * kPi});
  auto u1 = CompactGroupModel::u1(8);
  auto rep = RepresentationModel::u1_weight_rep(1);
  auto conn = connection_from_flux(base, u1, 2);
  const Eigen::VectorXd ref = eigs(connection_laplacian(conn, rep), 12, ctx.seed, false).values;
  double worst = 0.0;
  std::ostringstream csv;
  csv << "trial,max_eigenvalue_shift\n";
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<GroupElement> gamma;
    for (int v = 0; v < base.n_vertices(); ++v) gamma.push_back(GroupElement{ang(rng)});
    const Eigen::VectorXd moved =
        eigs(connection_laplacian(gauge_transform(conn, gamma), rep), 12, ctx.seed, false).values;
    const double shift = (moved - ref).cwiseAbs().maxCoeff();
    worst = std::max(worst, shift);
    csv << trial << ',' << format_number(shift) << '\n';
  }
  res.check(worst <= 1e-10, "50 random gauge transforms shift eigenvalues by <= 1e-10 (worst=" +
                                format_number(worst) + ")");
  atomic_write(artifact(ctx, res.name, "gauge.csv"), csv.str());
  return res;
}

inline ScenarioResult run_quotient_submetry(const ScenarioContext& ctx) {
  ScenarioResult res{"quotient-submetry"};
  std::mt19937_64 rng(ctx.seed);
  bool all_submetry = true, all_bound = true;
  std::ostringstream csv;
  csv << "trial,m,n,submetry,induced_defect,bound\n";
  for (int trial = 0; trial < 100; ++trial) {
    const int m = std::uniform_int_distribution<int>(2, 4)(rng);
    const int blocks = std::uniform_int_distribution<int>(2, 3)(rng);
    auto src = random_free_cyclic_space(rng, m, blocks);
    all_submetry = all_submetry && check_submetry(src.space, src.action).ok;

    auto dst = random_free_cyclic_space(rng, m, blocks);
    PointMap phi;
    phi.n_source = src.space.n();
    phi.n_target = dst.space.n();
    phi.map.resize(phi.n_source);
    std::uniform_int_distribution<int> shift(0, m - 1);
    for (int b = 0; b < blocks; ++b) {
      const int sh = shift(rng);
      for (int f = 0; f < m; ++f) phi.map[b * m + f] = b * m + (f + sh) % m;
    }
    auto q = quotient(src.space, src.action);
    std::vector<int> section(q.space.n());
    for (int x = 0; x < q.space.n(); ++x) section[x] = q.orbits[x].front();
    auto ind =
        induced_quotient_map(src.space, dst.space, phi, src.action, dst.action, section);
    all_bound = all_bound && ind.defect <= ind.bound;
    csv << trial << ',' << m << ',' << src.space.n() << ',' << 1 << ','
        << format_number(ind.defect) << ',' << format_number(ind.bound) << '\n';
  }
  res.check(all_submetry, "check_submetry passes on 100 randomized finite G-spaces");
  res.check(all_bound, "induced quotient defect <= 2x input defect with zero tolerance");
  atomic_write(artifact(ctx, res.name, "quotient.csv"), csv.str());
  return res;
}

inline ScenarioResult run_equivariant_averaging(const ScenarioContext& ctx) {
  ScenarioResult res{"equivariant-averaging"};
  std::mt19937_64 rng(ctx.seed);
  bool exact = true, bounded = true;
  std::ostringstream csv;
  csv << "trial,equivariance_defect_phi,averaging_defect,bound\n";
  for (int trial = 0; trial < 40; ++trial) {
    const int m = std::uniform_int_distribution<int>(2, 4)(rng);
    auto src = random_free_cyclic_space(rng, m, 3);
    auto dst = random_free_cyclic_space(rng, m, 3);
    PointMap phi;
    phi.n_source = src.space.n();
    phi.n_target = dst.space.n();
    phi.map.resize(phi.n_source);
    for (int i = 0; i < phi.n_source; ++i) phi.map[i] = i;
    // non-equivariant perturbation: redirect a random point
    phi.map[std::uniform_int_distribution<int>(0, phi.n_source - 1)(rng)] =
        std::uniform_int_distribution<int>(0, phi.n_target - 1)(rng);

    auto t = transfer_from_point_map(phi, src.space.measure, dst.space.measure);
    auto that = averaged_transfer(t, src.action, dst.action);

    std::vector<Eigen::VectorXd> tests;
    Eigen::VectorXd d0(dst.space.n());
    for (int i = 0; i < dst.space.n(); ++i) d0(i) = dst.space.dist(0, i);  // 1-Lipschitz
    tests.push_back(d0);

    const double te = transfer_equivariance_defect(that, src.action, dst.action, tests);
    exact = exact && te < 1e-12;
    const double eps1 = equivariance_defect(dst.space, phi, src.action, dst.action);
    const double ad = averaging_defect(t, that, tests);
    bounded = bounded && ad <= 2.0 * eps1 + 1e-12;
    csv << trial << ',' << format_number(eps1) << ',' << format_number(ad) << ','
        << format_number(2.0 * eps1) << '\n';
  }
  res.check(exact, "averaged transfer is exactly G-equivariant (finite G)");
  res.check(bounded, "||Phi - Phi-hat|| <= 2x equivariance defect on 1-Lipschitz tests");
  atomic_write(artifact(ctx, res.name, "averaging.csv"), csv.str());
  return res;
}

inline ScenarioResult run_holonomy_continuity(const ScenarioContext& ctx) {
  ScenarioResult res{"holonomy-continuity"};
  const int m = 12;
  const double alpha = 0.7;
  auto u1 = CompactGroupModel::u1(4);
  auto rep1 = RepresentationModel::u1_weight_rep(1);
  auto base = BaseLattice::cycle(m);
  auto op_for = [&](double a) {
    auto conn = DiscreteConnection::trivial(base, u1);
    for (int e = 0; e < m; ++e) conn.edge_links[e] = GroupElement{a / m};
    return connection_laplacian(conn, rep1);
  };
  const int levels = 8;
  std::vector<SymmetricOperator> ops;
  std::vector<TransferMap> transfers;
  for (int i = 0; i < levels; ++i) {
    ops.push_back(op_for(alpha + std::pow(2.0, -i)));
    transfers.push_back(transfer_from_point_map(
        PointMap::identity(2 * m), Eigen::VectorXd::Ones(2 * m), Eigen::VectorXd::Ones(2 * m)));
  }
  auto limit_op = op_for(alpha);
  auto report = eigen_continuity(ops, transfers, limit_op, 8, ctx.seed);

  bool ratios_ok = true;
  for (int j = 0; j < 8; ++j) {
    std::vector<double> gaps(levels, 0.0);
    for (const auto& row : report.rows)
      if (row.j == j) gaps[row.i] = row.gap;
    for (int i = 0; i + 1 < levels; ++i) {
      if (gaps[i] < 1e-12) continue;
      ratios_ok = ratios_ok && gaps[i] / std::max(gaps[i + 1], 1e-300) >= 1.8;
    }
  }
  res.check(ratios_ok, "|lambda_{i,j} - lambda_{inf,j}| halves with the holonomy gap (ratio >= 1.8)");

  bool angles_ok = true;
  for (int c = 0; c < report.angles.cols(); ++c)
    for (int i = 3; i + 1 < levels; ++i)
      angles_ok = angles_ok && (report.angles(i + 1, c) <= report.angles(i, c) + 1e-12 ||
                                report.angles(i + 1, c) < 1e-6);
  res.check(angles_ok, "eigenspace principal angles decrease beyond i = 3");

  std::ostringstream csv;
  csv << "i,j,lambda,gap\n";
  for (const auto& row : report.rows)
    csv << row.i << ',' << row.j << ',' << format_number(row.lambda) << ','
        << format_number(row.gap) << '\n';
  atomic_write(artifact(ctx, res.name, "continuity.csv"), csv.str());

  SvgSeries gap_series;
  gap_series.label = "max_j gap(i)";
  for (int i = 0; i < levels; ++i) {
    double g = 0.0;
    for (const auto& row : report.rows)
      if (row.i == i) g = std::max(g, row.gap);
    gap_series.x.push_back(i);
    gap_series.y.push_back(std::log10(std::max(g, 1e-18)));
  }
  atomic_write(artifact(ctx, res.name, "gaps.svg"),
               svg_plot("log10 eigenvalue gap vs level", {gap_series}));
  return res;
}

inline ScenarioResult run_collapse_sigma(const ScenarioContext& ctx) {
  ScenarioResult res{"collapse-sigma"};
  const int fiber_m = 8;
  auto zm = CompactGroupModel::cyclic(fiber_m);
  auto base = BaseLattice::cycle(6);
  std::vector<GroupElement> links(6, GroupElement{0});
  links[3] = GroupElement{1};  // a nontrivial voltage
  auto cover = voltage_cover(base, zm, links);
  auto genset = default_generating_set(zm);
  const Eigen::VectorXd base_spec = eigs(base_laplacian(base), 6, ctx.seed, false).values;

  std::ostringstream csv;
  csv << "sigma,rep,lambda_min,chi_discrete,chi_over_sigma\n";
  bool trivial_ok = true, nontrivial_ok = true, diverges = true;
  double prev_min = -1.0;
  for (int i = 0; i <= 4; ++i) {
    const double sigma = std::pow(4.0, -i);
    const double c = 2 * kPi * std::sqrt(sigma);
    const double wf = (fiber_m / c) * (fiber_m / c);
    auto total = total_laplacian(cover, wf, genset);

    auto triv = isotypic_restriction(total, zm, cover.deck,
                                     RepresentationModel::finite_trivial_rep(zm));
    const Eigen::VectorXd tspec = eigs(triv.op, 6, ctx.seed, false).values;
    trivial_ok = trivial_ok && (tspec - base_spec).cwiseAbs().maxCoeff() <= 1e-10;
    csv << format_number(sigma) << ",trivial," << format_number(tspec(0)) << ",0,\n";

    double min_nontrivial = std::numeric_limits<double>::infinity();
    for (const auto& ir : real_irreps(zm)) {
      if (ir.rep.name == "trivial") continue;
      auto fc = fiber_casimir(zm, ir.rep, genset, wf);
      auto iso = isotypic_restriction(total, zm, cover.deck, ir.rep);
      const Eigen::VectorXd vals = eigs(iso.op, 1, ctx.seed, false).values;
      nontrivial_ok = nontrivial_ok && vals(0) >= fc.chi - 1e-10;
      min_nontrivial = std::min(min_nontrivial, vals(0));
      const int n = ir.rep.name == "sign" ? fiber_m / 2 : ir.rep.name.back() - '0';
      csv << format_number(sigma) << ',' << ir.rep.name << ',' << format_number(vals(0)) << ','
          << format_number(fc.chi) << ',' << format_number(double(n) * n / sigma) << '\n';
    }
    if (prev_min > 0) diverges = diverges && min_nontrivial >= 3.0 * prev_min;
    prev_min = min_nontrivial;
  }
  res.check(trivial_ok, "trivial-rep spectrum stays within 1e-10 of the base spectrum");
  res.check(nontrivial_ok,
            "every nontrivial-rep eigenvalue >= fiber Casimir shift chi_discrete(sigma)");
  res.check(diverges, "nontrivial eigenvalues diverge like 1/sigma along the schedule");
  atomic_write(artifact(ctx, res.name, "collapse.csv"), csv.str());
  return res;
}

inline ScenarioResult run_deltav_bump(const ScenarioContext& ctx) {
  ScenarioResult res{"deltav-bump"};
  std::ostringstream csv;
  csv << "experiment,value\n";

  // delta_V on the Z_4 Cayley circle with rho_1, over the full (exact)
  // divisor-subgroup list
  auto z4 = CompactGroupModel::cyclic(4);
  auto circle4 = FiniteMMSpace::circle(4);
  auto act4 = IsometricAction::cyclic_rotation(z4, 4);
  auto subgroups = cyclic_subgroups(z4);
  auto dv = delta_V(circle4, act4, RepresentationModel::cyclic_rotation_rep(4, 1), subgroups);
  res.check((dv.array() == 2.0).all(), "delta_V = 2 on the free Z_4 Cayley circle with rho_1");
  csv << "delta_V(rho_1)," << format_number(dv(0)) << '\n';
  auto dv_triv =
      delta_V(circle4, act4, RepresentationModel::finite_trivial_rep(z4), subgroups);
  res.check(std::isinf(dv_triv(0)), "trivial rep: S(G,V) empty, delta_V = +inf sentinel");

  // bump sections: free Z_k actions with q separated orbits, q <= 6
  bool ranks_ok = true;
  for (int k : {2, 3}) {
    for (int q : {2, 4, 6}) {
      std::vector<std::tuple<int, int, double>> edges;
      for (int b = 0; b < q; ++b)
        for (int f = 0; f < k; ++f) {
          if (k > 1) edges.emplace_back(b * k + f, b * k + (f + 1) % k, 1.0);
          edges.emplace_back(b * k + f, ((b + 1) % q) * k + f, 10.0);
        }
      auto space = FiniteMMSpace::from_graph(q * k, edges);
      IsometricAction act;
      act.group = CompactGroupModel::cyclic(k);
      act.perm.assign(k, std::vector<int>(q * k));
      for (int g = 0; g < k; ++g)
        for (int b = 0; b < q; ++b)
          for (int f = 0; f < k; ++f) act.perm[g][b * k + f] = b * k + (f + g) % k;
      std::vector<int> reps;
      for (int b = 0; b < q; ++b) reps.push_back(b * k);
      auto bumps =
          bump_sections(space, act, RepresentationModel::finite_trivial_rep(act.group), reps, 0.5);
      ranks_ok = ranks_ok && bumps.count == q;
      csv << "bump_rank(Z" << k << ",q=" << q << ")," << bumps.count << '\n';
    }
  }
  res.check(ranks_ok, "bump sections have Gram rank exactly q on free Z_k actions");
  atomic_write(artifact(ctx, res.name, "deltav_bump.csv"), csv.str());
  return res;
}

inline ScenarioResult run_mosco_circle(const ScenarioContext& ctx) {
  ScenarioResult res{"mosco-circle"};
  const int m_ref = 512;
  auto circle_op = [](int m) {
    auto op = base_laplacian(BaseLattice::cycle(m, 1.0));
    const double mesh = 2 * kPi / m;
    op.stiffness = op.stiffness * (1.0 / mesh);
    op.mass = Eigen::VectorXd::Constant(m, mesh);
    return op;
  };
  auto inclusion = [&](int m) {
    PointMap phi;
    phi.n_source = m;
    phi.n_target = m_ref;
    phi.map.resize(m);
    for (int i = 0; i < m; ++i) phi.map[i] = i * (m_ref / m);
    return transfer_from_point_map(phi, Eigen::VectorXd::Constant(m, 2 * kPi / m),
                                   Eigen::VectorXd::Constant(m_ref, 2 * kPi / m_ref));
  };
  Eigen::VectorXd mode(m_ref);
  for (int i = 0; i < m_ref; ++i) mode(i) = std::cos(2 * kPi * i / m_ref);

  auto limit_op = circle_op(m_ref);
  std::ostringstream csv;
  csv << "m,recovery_energy,limit_energy,defect\n";
  bool decreasing = true;
  double prev = -1.0;
  for (int m : {8, 16, 32, 64}) {
    auto rep = mosco_probe({circle_op(m)}, {inclusion(m)}, limit_op, {mode});
    const double defect = rep.recovery_defect(0, 0);
    csv << m << ',' << format_number(rep.recovery_energy(0, 0)) << ','
        << format_number(rep.limit_energy(0)) << ',' << format_number(defect) << '\n';
    if (prev > 0) decreasing = decreasing && defect < 0.3 * prev;
    prev = defect;
  }
  res.check(decreasing, "Mosco recovery defect decays at second order under refinement");
  atomic_write(artifact(ctx, res.name, "mosco.csv"), csv.str());
  return res;
}

}  // namespace scenario_detail

inline const std::vector<Scenario>& scenario_catalog() {
  static const std::vector<Scenario> catalog = {
      {"voltage-c6", "C3 base with one Z2 voltage: exact cover spectral decomposition",
       {"cover", "exact"}, scenario_detail::run_voltage_c6},
      {"cover-random", "randomized voltage covers over Z2..Z6 and S3: decomposition gaps",
       {"cover", "random"}, scenario_detail::run_cover_random},
      {"casimir-table", "Casimir invariants of U(1) characters and the SU(2) adjoint",
       {"casimir", "exact"}, scenario_detail::run_casimir_table},
      {"fiber-refine", "discrete fiber Casimir vs the continuum value under refinement",
       {"casimir", "convergence"}, scenario_detail::run_fiber_refine},
      {"landau-k3", "Landau levels of flux k = 1..3 on the (2pi)^2 torus at 64x64",
       {"landau", "holomorphic"}, scenario_detail::run_landau},
      {"h0-table", "holomorphic section counts h0 = k and the fixed-slope area table",
       {"landau", "holomorphic"}, scenario_detail::run_h0_table},
      {"ricci-crosscheck", "closed-form Ricci blocks vs the finite-difference chart oracle",
       {"ricci"}, scenario_detail::run_ricci_crosscheck},
      {"gauge-invariance", "random gauge transforms leave connection spectra fixed",
       {"gauge", "random"}, scenario_detail::run_gauge_invariance},
      {"quotient-submetry", "quotient metrics are submetries; induced maps obey the 2x bound",
       {"quotient", "random"}, scenario_detail::run_quotient_submetry},
      {"equivariant-averaging", "Haar-averaged transfer maps: exact equivariance and defect bound",
       {"quotient", "convergence"}, scenario_detail::run_equivariant_averaging},
      {"holonomy-continuity", "circle-bundle holonomy schedule: eigenvalue/eigenspace continuity",
       {"convergence"}, scenario_detail::run_holonomy_continuity},
      {"collapse-sigma", "fiber collapse: trivial sector pinned, nontrivial sectors diverge",
       {"convergence"}, scenario_detail::run_collapse_sigma},
      {"deltav-bump", "delta_V sweeps and the equivariant bump-section dimension bound",
       {"bump"}, scenario_detail::run_deltav_bump},
      {"mosco-circle", "Mosco recovery energies along refining circle discretizations",
       {"convergence"}, scenario_detail::run_mosco_circle},
  };
  return catalog;
}

}  // namespace kks
