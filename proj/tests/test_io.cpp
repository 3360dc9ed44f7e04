#include <catch2/catch_amalgamated.hpp>

#include "kkspectra/io.hpp"
#include "kkspectra/laplacian.hpp"

#include <filesystem>
#include <random>

using namespace kks;

TEST_CASE("group json round trip") {
  for (auto g : {CompactGroupModel::cyclic(4), CompactGroupModel::symmetric3()}) {
    auto back = group_from_json(group_to_json(g));
    REQUIRE(back.table == g.table);
    REQUIRE(back.name == g.name);
  }
  auto u1 = CompactGroupModel::u1(12, 1.5);
  auto back = group_from_json(group_to_json(u1));
  REQUIRE(back.size() == 12);
  REQUIRE(back.sigma(0, 0) == 1.5);
  REQUIRE_THROWS(group_from_json(json{{"kind", "so17"}}));
}

TEST_CASE("representation json round trip preserves matrices") {
  std::mt19937_64 rng(3);
  auto z4 = CompactGroupModel::cyclic(4);
  for (auto rep : {RepresentationModel::cyclic_rotation_rep(4, 1),
                   RepresentationModel::cyclic_sign_rep(4)}) {
    auto back = rep_from_json(rep_to_json(rep));
    REQUIRE(back.dim_V == rep.dim_V);
    for (std::size_t e = 0; e < z4.size(); ++e)
      REQUIRE((back.matrix(z4.elements[e]) - rep.matrix(z4.elements[e])).cwiseAbs().maxCoeff() <
              1e-15);
  }
  auto w = rep_from_json(rep_to_json(RepresentationModel::u1_weight_rep(3)));
  REQUIRE(w.weight == 3);
}

TEST_CASE("mm space json and csv round trips") {
  auto s = FiniteMMSpace::circle(5, 2 * kPi);
  s.measure(2) = 3.0;
  auto z5 = CompactGroupModel::cyclic(5);
  s.measure.setOnes();  // actions need invariant measure
  auto act = IsometricAction::cyclic_rotation(z5, 5);
  auto j = mm_space_to_json(s, &act);
  auto back = mm_space_from_json(j);
  REQUIRE((back.dist - s.dist).cwiseAbs().maxCoeff() == 0.0);
  auto act_back = action_from_json(j.at("action"), back);
  REQUIRE(act_back.perm == act.perm);

  std::string csv = "0,1,2\n1,0,1\n2,1,0\n";
  auto from_csv = mm_space_from_csv(csv);
  REQUIRE(from_csv.n() == 3);
  REQUIRE(from_csv.dist(0, 2) == 2.0);
  REQUIRE_THROWS(mm_space_from_csv("0,1\n1,0,3\n"));
}

TEST_CASE("connection json round trip: grid and graph, all group kinds") {
  std::mt19937_64 rng(9);

  SECTION("u1 flux grid") {
    auto base = BaseLattice::torus({4, 4}, {2 * kPi, 2 * kPi});
    auto conn = connection_from_flux(base, CompactGroupModel::u1(8), 2);
    auto back = connection_from_json(connection_to_json(conn));
    auto f0 = plaquette_curvature(conn);
    auto f1 = plaquette_curvature(back);
    REQUIRE((f0.comp[0] - f1.comp[0]).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("finite group voltage graph") {
    auto base = BaseLattice::cycle(4);
    auto s3 = CompactGroupModel::symmetric3();
    auto conn = DiscreteConnection::trivial(base, s3);
    std::uniform_int_distribution<int> el(0, 5);
    for (auto& l : conn.edge_links) l = GroupElement{el(rng)};
    auto back = connection_from_json(connection_to_json(conn));
    const int h0 = std::get<int>(loop_holonomy(conn, {0, 1, 2, 3}));
    const int h1 = std::get<int>(loop_holonomy(back, {0, 1, 2, 3}));
    REQUIRE(h0 == h1);
  }

  SECTION("su2 quaternion links") {
    auto base = BaseLattice::cycle(3);
    auto su2 = CompactGroupModel::su2(2, 1, 2);
    auto conn = DiscreteConnection::trivial(base, su2);
    conn.edge_links[0] = Quat::exp_lie({0.2, -0.3, 0.5});
    auto back = connection_from_json(connection_to_json(conn));
    const Quat q0 = std::get<Quat>(conn.edge_links[0]);
    const Quat q1 = std::get<Quat>(back.edge_links[0]);
    REQUIRE(std::abs(q0.a - q1.a) + std::abs(q0.b - q1.b) + std::abs(q0.c - q1.c) +
                std::abs(q0.d - q1.d) <
            1e-15);
  }
}

TEST_CASE("spectrum csv and operator coo formats are stable") {
  auto op = base_laplacian(BaseLattice::cycle(3));
  auto s = eigs(op, 3);
  const std::string csv = spectrum_csv("demo", {{0, s}});
  REQUIRE(csv.rfind("scenario,i,j,lambda,residual\n", 0) == 0);
  REQUIRE(csv.find("demo,0,0,") != std::string::npos);
  // deterministic: a second render is byte-identical
  REQUIRE(csv == spectrum_csv("demo", {{0, s}}));

  const std::string coo = operator_coo(op);
  REQUIRE(coo.find("# symmetric operator: dim 3") != std::string::npos);
  REQUIRE(coo.find("# mass") != std::string::npos);
}

TEST_CASE("atomic write creates parents and never leaves tmp files") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "kks_io_test";
  fs::remove_all(dir);
  const fs::path target = dir / "a" / "b.csv";
  atomic_write(target, "x,y\n1,2\n");
  REQUIRE(read_file(target) == "x,y\n1,2\n");
  REQUIRE_FALSE(fs::exists(target.string() + ".tmp"));
  fs::remove_all(dir);
}

TEST_CASE("curvature csv is keyed by vertex multi-index") {
  auto base = BaseLattice::torus({2, 2}, {1.0, 1.0});
  auto f = CurvatureField::constant(base, 1, {Eigen::VectorXd::Constant(1, 0.5)});
  const std::string csv = curvature_csv(base, f);
  REQUIRE(csv.rfind("vertex,x0,x1,F01_0\n", 0) == 0);
  REQUIRE(csv.find("\n3,1,1,0.5") != std::string::npos);
}

TEST_CASE("group documents can bundle representations") {
  auto z4 = CompactGroupModel::cyclic(4);
  std::vector<RepresentationModel> reps = {RepresentationModel::cyclic_rotation_rep(4, 1),
                                           RepresentationModel::cyclic_sign_rep(4)};
  auto doc = group_with_reps_to_json(z4, reps);
  auto back = group_with_reps_from_json(doc);
  REQUIRE(back.group.table == z4.table);
  REQUIRE(back.reps.size() == 2);
  REQUIRE(back.reps[0].dim_V == 2);
  REQUIRE(back.reps[1].dim_V == 1);
}

TEST_CASE("spectra export to json rows") {
  auto op = base_laplacian(BaseLattice::cycle(3));
  auto s = eigs(op, 2);
  auto rows = spectrum_to_json("demo", {{0, s}});
  REQUIRE(rows.size() == 2);
  REQUIRE(rows.at(0).at("scenario") == "demo");
  REQUIRE(rows.at(1).at("j") == 1);
}
