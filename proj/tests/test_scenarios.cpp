#include <catch2/catch_amalgamated.hpp>

#include "kkspectra/io.hpp"
#include "kkspectra/scenarios.hpp"

#include <filesystem>

using namespace kks;

namespace {

ScenarioContext temp_ctx(const std::string& leaf, std::uint64_t seed = 1) {
  ScenarioContext ctx;
  ctx.out_dir = std::filesystem::temp_directory_path() / "kks_scenarios" / leaf;
  ctx.seed = seed;
  std::filesystem::remove_all(ctx.out_dir);
  return ctx;
}

const Scenario& by_name(const std::string& name) {
  for (const auto& s : scenario_catalog())
    if (s.name == name) return s;
  throw std::runtime_error("missing scenario " + name);
}

}  // namespace

TEST_CASE("catalog lists at least eight scenarios with docs and tags") {
  const auto& catalog = scenario_catalog();
  REQUIRE(catalog.size() >= 8);
  for (const auto& s : catalog) {
    REQUIRE_FALSE(s.name.empty());
    REQUIRE_FALSE(s.doc.empty());
    REQUIRE_FALSE(s.tags.empty());
  }
}

TEST_CASE("fast scenarios pass and write their artifacts") {
  for (const std::string name :
       {"voltage-c6", "casimir-table", "fiber-refine", "ricci-crosscheck", "deltav-bump",
        "mosco-circle"}) {
    auto ctx = temp_ctx(name);
    auto res = by_name(name).run(ctx);
    INFO(name);
    for (const auto& line : res.lines) INFO(line);
    REQUIRE(res.pass);
    REQUIRE(std::filesystem::exists(ctx.out_dir / name));
    bool has_csv = false;
    for (const auto& entry : std::filesystem::directory_iterator(ctx.out_dir / name))
      has_csv = has_csv || entry.path().extension() == ".csv";
    REQUIRE(has_csv);
    std::filesystem::remove_all(ctx.out_dir);
  }
}

TEST_CASE("scenario reruns with the same seed produce identical bytes") {
  const std::string name = "voltage-c6";
  auto ctx1 = temp_ctx("det1", 7);
  auto ctx2 = temp_ctx("det2", 7);
  by_name(name).run(ctx1);
  by_name(name).run(ctx2);
  const auto f1 = read_file(ctx1.out_dir / name / "decomposition.csv");
  const auto f2 = read_file(ctx2.out_dir / name / "decomposition.csv");
  REQUIRE(f1 == f2);
  std::filesystem::remove_all(ctx1.out_dir);
  std::filesystem::remove_all(ctx2.out_dir);
}
