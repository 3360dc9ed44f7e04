#include <catch2/catch_amalgamated.hpp>

#include "kkspectra/connection.hpp"
#include "kkspectra/lattice.hpp"

#include <random>

using namespace kks;

TEST_CASE("torus grid indexing round trips") {
  auto base = BaseLattice::torus({4, 6}, {2 * kPi, 2 * kPi});
  REQUIRE(base.n_vertices() == 24);
  for (int v = 0; v < 24; ++v) REQUIRE(base.vertex_index(base.coords(v)) == v);
  REQUIRE(base.neighbor(base.vertex_index({3, 5}), 0, 1) == base.vertex_index({0, 5}));
  REQUIRE(base.neighbor(base.vertex_index({0, 0}), 1, -1) == base.vertex_index({0, 5}));
  REQUIRE(base.mesh(0) == Catch::Approx(2 * kPi / 4));
}

TEST_CASE("graph base connectivity probe") {
  REQUIRE_FALSE(BaseLattice::graph(3, {{0, 1, 1.0}}).is_connected());
  REQUIRE(BaseLattice::cycle(5).is_connected());
  REQUIRE_THROWS(BaseLattice::graph(2, {{0, 5, 1.0}}));
}

TEST_CASE("flux connection: plaquette phases and total flux") {
  auto u1 = CompactGroupModel::u1(8);

  SECTION("k = 0 gives identity links") {
    auto base = BaseLattice::torus({4, 4}, {2 * kPi, 2 * kPi});
    auto conn = connection_from_flux(base, u1, 0);
    for (int d = 0; d < 2; ++d)
      for (int v = 0; v < 16; ++v)
        REQUIRE(std::get<double>(conn.grid_links[d][v]) == 0.0);
  }

  SECTION("k = 1 on a 4x4 grid: every plaquette phase is 2pi/16") {
    auto base = BaseLattice::torus({4, 4}, {2 * kPi, 2 * kPi});
    auto conn = connection_from_flux(base, u1, 1);
    auto f = plaquette_curvature(conn);
    const double area = base.mesh(0) * base.mesh(1);
    double total = 0.0;
    for (int v = 0; v < 16; ++v) {
      REQUIRE(f.at(v, 0, 1)(0) * area == Catch::Approx(2 * kPi / 16).margin(1e-13));
      total += f.at(v, 0, 1)(0) * area;
    }
    REQUIRE(total == Catch::Approx(2 * kPi).margin(1e-12));
  }

  SECTION("k and -k are conjugate") {
    auto base = BaseLattice::torus({4, 4}, {2 * kPi, 2 * kPi});
    auto cp = plaquette_curvature(connection_from_flux(base, u1, 2));
    auto cm = plaquette_curvature(connection_from_flux(base, u1, -2));
    for (int v = 0; v < 16; ++v)
      REQUIRE(cp.at(v, 0, 1)(0) == Catch::Approx(-cm.at(v, 0, 1)(0)).margin(1e-13));
  }

  SECTION("non-2D bases are rejected") {
    REQUIRE_THROWS(connection_from_flux(BaseLattice::torus({4}, {1.0}), u1, 1));
    REQUIRE_THROWS(connection_from_flux(BaseLattice::cycle(4), u1, 1));
  }
}

TEST_CASE("bulk curvature value matches the flux density") {
  // flux k = 3 on the (2pi)^2 torus: F_12 = 3/(2pi) at every vertex
  auto u1 = CompactGroupModel::u1(8);
  for (int m : {4, 8}) {
    auto base = BaseLattice::torus({m, m}, {2 * kPi, 2 * kPi});
    auto f = plaquette_curvature(connection_from_flux(base, u1, 3));
    for (int v = 0; v < m * m; ++v)
      REQUIRE(f.at(v, 0, 1)(0) == Catch::Approx(3.0 / (2 * kPi)).margin(1e-12));
  }
}

TEST_CASE("identity links give zero curvature") {
  auto base = BaseLattice::torus({4, 4}, {2 * kPi, 2 * kPi});
  auto conn = DiscreteConnection::trivial(base, CompactGroupModel::u1(4));
  auto f = plaquette_curvature(conn);
  REQUIRE(f.comp[0].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("plaquette at the exp cut locus is rejected") {
  auto base = BaseLattice::torus({2, 2}, {2 * kPi, 2 * kPi});
  auto u1 = CompactGroupModel::u1(4);
  auto conn = DiscreteConnection::trivial(base, u1);
  conn.grid_links[0][0] = GroupElement{kPi};  // holonomy lands at the antipode
  conn.grid_links[1][0] = GroupElement{0.0};
  REQUIRE_THROWS_WITH(plaquette_curvature(conn),
                      Catch::Matchers::ContainsSubstring("plaquette too coarse"));
}

TEST_CASE("random small links: curvature bounded by link norms over area") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> small(-0.05, 0.05);
  auto base = BaseLattice::torus({4, 4}, {2 * kPi, 2 * kPi});
  auto u1 = CompactGroupModel::u1(4);
  auto conn = DiscreteConnection::trivial(base, u1);
  for (int d = 0; d < 2; ++d)
    for (int v = 0; v < 16; ++v) conn.grid_links[d][v] = GroupElement{small(rng)};
  auto f = plaquette_curvature(conn);
  const double area = base.mesh(0) * base.mesh(1);
  for (int v = 0; v < 16; ++v)
    REQUIRE(std::abs(f.at(v, 0, 1)(0)) <= 4 * 0.05 / area + 1e-12);
}

TEST_CASE("gauge transformations") {
  auto base = BaseLattice::torus({4, 4}, {2 * kPi, 2 * kPi});
  auto u1 = CompactGroupModel::u1(4);
  auto conn = connection_from_flux(base, u1, 2);

  SECTION("constant gauge on an abelian group fixes the links") {
    std::vector<GroupElement> gamma(16, GroupElement{0.73});
    auto moved = gauge_transform(conn, gamma);
    for (int d = 0; d < 2; ++d)
      for (int v = 0; v < 16; ++v)
        REQUIRE(std::remainder(std::get<double>(moved.grid_links[d][v]) -
                                   std::get<double>(conn.grid_links[d][v]),
                               2 * kPi) == Catch::Approx(0.0).margin(1e-12));
  }

  SECTION("any U(1) gauge field preserves plaquette phases exactly") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    std::vector<GroupElement> gamma;
    for (int v = 0; v < 16; ++v) gamma.push_back(GroupElement{ang(rng)});
    auto f0 = plaquette_curvature(conn);
    auto f1 = plaquette_curvature(gauge_transform(conn, gamma));
    REQUIRE((f0.comp[0] - f1.comp[0]).cwiseAbs().maxCoeff() < 1e-12);
  }

  SECTION("finite nonabelian gauge conjugates loop holonomies") {
    auto s3 = CompactGroupModel::symmetric3();
    auto cycle = BaseLattice::cycle(4);
    auto conn3 = DiscreteConnection::trivial(cycle, s3);
    conn3.edge_links = {GroupElement{1}, GroupElement{4}, GroupElement{2}, GroupElement{0}};
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> el(0, 5);
    std::vector<GroupElement> gamma;
    for (int v = 0; v < 4; ++v) gamma.push_back(GroupElement{el(rng)});
    const int before = std::get<int>(loop_holonomy(conn3, {0, 1, 2, 3}));
    const int after =
        std::get<int>(loop_holonomy(gauge_transform(conn3, gamma), {0, 1, 2, 3}));
    // conjugacy class is preserved: search for a conjugator
    bool conjugate = false;
    for (int g = 0; g < 6 && !conjugate; ++g)
      conjugate = s3.table[s3.table[s3.inverse_table[g]][before]][g] == after;
    REQUIRE(conjugate);
  }
}

TEST_CASE("kk metric blocks and volume multiplicativity") {
  auto base = BaseLattice::torus({6, 6}, {2 * kPi, 4 * kPi});
  const double s = 2.5;
  auto u1 = CompactGroupModel::u1(8, s);
  auto h = kk_metric(base, u1, u1.sigma);
  auto block = h.block_at(0);
  REQUIRE(block(0, 0) == 1.0);
  REQUIRE(block(1, 1) == 1.0);
  REQUIRE(block(2, 2) == s);
  REQUIRE(block(0, 2) == 0.0);  // mixed block vanishes identically
  REQUIRE(h.det_at(0) == Catch::Approx(s));

  const double vol = total_space_volume(base, u1, h);
  const double base_vol = 2 * kPi * 4 * kPi;
  REQUIRE(vol == Catch::Approx(base_vol * u1.haar_mass()).epsilon(1e-12));

  Eigen::MatrixXd bad = -Eigen::MatrixXd::Identity(1, 1);
  REQUIRE_THROWS(kk_metric(base, u1, bad));
}

TEST_CASE("codifferential: constant, sine and Fourier-synthesized fields") {
  auto base = [](int m) { return BaseLattice::torus({m, m}, {2 * kPi, 2 * kPi}); };

  SECTION("constant F has exactly zero codifferential") {
    auto b = base(8);
    auto f = CurvatureField::constant(b, 1, {Eigen::VectorXd::Constant(1, 0.7)});
    REQUIRE(codifferential_F(b, f).max_norm() == 0.0);
  }

  SECTION("F_12 = sin(x1) gives -cos(x1) to O(mesh^2)") {
    double prev_err = -1.0;
    for (int m : {8, 16, 32}) {
      auto b = base(m);
      CurvatureField f;
      f.dims = 2;
      f.lie_dim = 1;
      f.n_vertices = b.n_vertices();
      Eigen::MatrixXd c(f.n_vertices, 1);
      for (int v = 0; v < f.n_vertices; ++v)
        c(v, 0) = std::sin(b.coords(v)[0] * b.mesh(0));
      f.comp = {c};
      auto d = codifferential_F(b, f);
      double err = 0.0;
      for (int v = 0; v < f.n_vertices; ++v) {
        const double x1 = b.coords(v)[0] * b.mesh(0);
        err = std::max(err, std::abs(d.at(v, 1)(0) - (-std::cos(x1))));
        REQUIRE(std::abs(d.at(v, 0)(0)) < 1e-14);
      }
      if (prev_err > 0) REQUIRE(err < 0.3 * prev_err);
      prev_err = err;
      REQUIRE(err < 2.0 * std::pow(b.mesh(0), 2));
    }
  }

  SECTION("random trig polynomial matches the analytic derivative oracle") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> coef(-1, 1);
    const double a1 = coef(rng), a2 = coef(rng), b2 = coef(rng);
    auto value = [&](double x1, double x2) {
      return a1 * std::sin(x1) + a2 * std::cos(2 * x2) + b2 * std::sin(x1) * std::cos(x2);
    };
    auto d1 = [&](double x1, double x2) {
      return a1 * std::cos(x1) + b2 * std::cos(x1) * std::cos(x2);
    };
    auto d2 = [&](double x1, double x2) {
      return -2 * a2 * std::sin(2 * x2) - b2 * std::sin(x1) * std::sin(x2);
    };
    for (int m : {16, 32}) {
      auto b = base(m);
      CurvatureField f;
      f.dims = 2;
      f.lie_dim = 1;
      f.n_vertices = b.n_vertices();
      Eigen::MatrixXd c(f.n_vertices, 1);
      for (int v = 0; v < f.n_vertices; ++v) {
        auto cc = b.coords(v);
        c(v, 0) = value(cc[0] * b.mesh(0), cc[1] * b.mesh(1));
      }
      f.comp = {c};
      auto d = codifferential_F(b, f);
      double err = 0.0;
      for (int v = 0; v < f.n_vertices; ++v) {
        auto cc = b.coords(v);
        const double x1 = cc[0] * b.mesh(0), x2 = cc[1] * b.mesh(1);
        // {(d*F)}_1 = -d2 F_21 = +d2 F_12, {(d*F)}_2 = -d1 F_12
        err = std::max(err, std::abs(d.at(v, 0)(0) - d2(x1, x2)));
        err = std::max(err, std::abs(d.at(v, 1)(0) + d1(x1, x2)));
      }
      REQUIRE(err < 6.0 * std::pow(b.mesh(0), 2));
    }
  }
}

TEST_CASE("second Bianchi identity is exact for abelian plaquette curvature") {
  // 3D torus, link angles sampled from a smooth gauge potential; the
  // forward-difference cyclic sum telescopes to zero exactly
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> coef(-0.1, 0.1);
  const double c1 = coef(rng), c2 = coef(rng), c3 = coef(rng);
  auto u1 = CompactGroupModel::u1(4);
  for (int m : {6, 12}) {
    auto b = BaseLattice::torus({m, m, m}, {2 * kPi, 2 * kPi, 2 * kPi});
    auto conn = DiscreteConnection::trivial(b, u1);
    for (int v = 0; v < b.n_vertices(); ++v) {
      auto c = b.coords(v);
      const double x1 = c[0] * b.mesh(0), x2 = c[1] * b.mesh(1), x3 = c[2] * b.mesh(2);
      conn.grid_links[0][v] = GroupElement{b.mesh(0) * c1 * std::sin(x2 + x3)};
      conn.grid_links[1][v] = GroupElement{b.mesh(1) * c2 * std::cos(x1) * std::sin(x3)};
      conn.grid_links[2][v] = GroupElement{b.mesh(2) * c3 * std::sin(x1 + 2 * x2)};
    }
    REQUIRE(bianchi_defect(b, plaquette_curvature(conn)) < 1e-12);
  }
}
