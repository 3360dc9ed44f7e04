#include <catch2/catch_amalgamated.hpp>

#include "kkspectra/holomorphic.hpp"

using namespace kks;

TEST_CASE("bundle slope quantization") {
  EllipticCurveBundle b{2 * kPi, 2 * kPi, 3};
  REQUIRE(b.area() == Catch::Approx(4 * kPi * kPi));
  REQUIRE(b.mu() == Catch::Approx(3.0 / (2 * kPi)));
}

TEST_CASE("degree zero: plain Laplacian with a 2-dimensional kernel") {
  EllipticCurveBundle b{2 * kPi, 2 * kPi, 0};
  auto op = landau_operator(b, 8);
  REQUIRE(op.dim == 2 * 64);
  auto s = eigs(op, 4, 0, false);
  REQUIRE(s.values(0) == Catch::Approx(0.0).margin(1e-10));
  REQUIRE(s.values(1) == Catch::Approx(0.0).margin(1e-10));
  REQUIRE(s.values(2) > 0.5);  // next mode near 1 on the (2pi)^2 torus
}

TEST_CASE("lowest Landau level approaches mu with multiplicity 2k") {
  // modest grid for unit-test speed; the acceptance suite runs 64^2
  EllipticCurveBundle b{2 * kPi, 2 * kPi, 1};
  auto s = eigs(landau_operator(b, 24), 6, 0, false);
  const double mu = b.mu();
  REQUIRE(std::abs(s.values(0) - mu) / mu < 0.02);
  REQUIRE(std::abs(s.values(1) - mu) / mu < 0.02);
  REQUIRE(s.values(2) > 2.0 * mu);  // next level near 3 mu

  // refinement improves the approach to mu
  double prev = -1.0;
  for (int m : {12, 24, 48}) {
    auto sp = eigs(landau_operator(b, m), 2, 0, false);
    const double err = std::abs(sp.values(0) - mu);
    if (prev > 0) REQUIRE(err < 0.3 * prev);
    prev = err;
  }
}

TEST_CASE("k and -k give identical spectra") {
  EllipticCurveBundle bp{2 * kPi, 2 * kPi, 2};
  EllipticCurveBundle bm{2 * kPi, 2 * kPi, -2};
  auto sp = eigs(landau_operator(bp, 16), 10, 0, false);
  auto sm = eigs(landau_operator(bm, 16), 10, 0, false);
  REQUIRE((sp.values - sm.values).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("weitzenboeck identity: spec(rough) = 2 spec(dbar) + mu") {
  for (int k : {1, 2, -1}) {
    EllipticCurveBundle b{2 * kPi, 2 * kPi, k};
    REQUIRE(weitzenboeck_gap(b, 16, 12) < 1e-10);
  }
}

TEST_CASE("h0 dimension: Riemann-Roch values, flat twists, error paths") {
  SECTION("h0 = k for small degrees") {
    for (int k : {1, 2}) {
      EllipticCurveBundle b{2 * kPi, 2 * kPi, k};
      auto s = eigs(landau_operator(b, 16 * k), 2 * k + 4, 0, false);
      auto h = h0_dimension(s, b.mu(), 0.1 * b.mu());
      REQUIRE(h.at_mu);
      REQUIRE(h.cluster_size == 2 * k);
      REQUIRE(h.dimension == k);
    }
  }

  SECTION("flat bundle with nontrivial holonomy has no sections") {
    EllipticCurveBundle b{2 * kPi, 2 * kPi, 0};
    auto s = eigs(landau_operator(b, 16, 2.0, 1.2), 4, 0, false);
    // lowest eigenvalue bounded away from mu = 0
    REQUIRE(s.values(0) > 0.01);
    auto h = h0_dimension(s, 0.0, 0.02);
    REQUIRE_FALSE(h.at_mu);
    REQUIRE(h.dimension == 0);
  }

  SECTION("negative degree reports zero") {
    EllipticCurveBundle b{2 * kPi, 2 * kPi, -1};
    auto s = eigs(landau_operator(b, 16), 6, 0, false);
    // spectrum is that of k=1 but mu is negative: cluster not at mu
    auto h = h0_dimension(s, b.mu(), 0.1 * std::abs(b.mu()));
    REQUIRE(h.dimension == 0);
  }

  SECTION("unresolved cluster throws") {
    EllipticCurveBundle b{2 * kPi, 2 * kPi, 1};
    auto s = eigs(landau_operator(b, 16), 6, 0, false);
    REQUIRE_THROWS_WITH(h0_dimension(s, b.mu(), 0.2),  // gap ~2mu ~ 0.32 < 10*0.2
                        Catch::Matchers::ContainsSubstring("unresolved cluster"));
    Spectrum tiny;
    tiny.values = Eigen::VectorXd::Ones(1);
    REQUIRE_THROWS(h0_dimension(tiny, 1.0, 0.01));
  }
}

TEST_CASE("h0 bound table grows with the area at fixed slope") {
  const double mu = 1.0 / (2 * kPi);  // degree k = area/(4 pi^2)
  auto rows = h0_bound_table(mu, {4 * kPi * kPi, 8 * kPi * kPi}, 12);
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0].degree == 1);
  REQUIRE(rows[0].h0 == 1);
  REQUIRE(rows[1].degree == 2);
  REQUIRE(rows[1].h0 == 2);
  REQUIRE(rows[0].curvature_norm == Catch::Approx(rows[1].curvature_norm));
  REQUIRE_THROWS(h0_bound_table(mu, {5.0}));  // non-integer degree
}

TEST_CASE("weitzenboeck identity at production resolution") {
  EllipticCurveBundle b{2 * kPi, 2 * kPi, 1};
  REQUIRE(weitzenboeck_gap(b, 64, 8, 5) <= 1e-8);
}
