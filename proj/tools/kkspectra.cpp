// Scenario runner for the spectral workbench. Runs built-in experiments
// (optionally filtered by tag or driven by a JSON config file), writes CSV
// and SVG artifacts, and exits nonzero when an in-scenario assertion fails.
//
// Exit codes: 0 all assertions pass, 2 config/schema error, 3 assertion
// failure, 1 unexpected error.

#include "kkspectra/io.hpp"
#include "kkspectra/scenarios.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <thread>

namespace {

const kks::Scenario* find_scenario(const std::string& name) {
  for (const auto& s : kks::scenario_catalog())
    if (s.name == name) return &s;
  return nullptr;
}

bool has_tag(const kks::Scenario& s, const std::string& tag) {
  return std::find(s.tags.begin(), s.tags.end(), tag) != s.tags.end();
}

struct Config {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

Config parse_config(const kks::json& j) {
  static const std::set<std::string> allowed = {"scenario", "seed", "out"};
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw std::invalid_argument("unknown config key: " + key);
  Config c;
  c.scenario = j.at("scenario").get<std::string>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("out")) c.out = j.at("out").get<std::string>();
  if (find_scenario(c.scenario) == nullptr)
    throw std::invalid_argument("unknown scenario: " + c.scenario);
  return c;
}

int run_scenarios(const std::vector<const kks::Scenario*>& todo, const kks::ScenarioContext& ctx,
                  int jobs) {
  std::mutex out_mutex;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> all_pass{true};
  std::atomic<bool> errored{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= todo.size()) return;
      try {
        const kks::ScenarioResult res = todo[i]->run(ctx);
        std::lock_guard<std::mutex> lock(out_mutex);
        std::cout << "[" << (res.pass ? "PASS" : "FAIL") << "] " << res.name << "\n";
        for (const auto& line : res.lines) std::cout << "    " << line << "\n";
        if (!res.pass) all_pass = false;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(out_mutex);
        std::cout << "[ERROR] " << todo[i]->name << ": " << e.what() << "\n";
        errored = true;
      }
    }
  };

  const int nthreads = std::max(1, std::min<int>(jobs, static_cast<int>(todo.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (errored) return 1;
  return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kkspectra: spectral workbench for connections on discrete bundles"};
  std::string config_path;
  std::string out_dir = "out";
  std::string tag;
  std::uint64_t seed = 1;
  int jobs = 1;
  bool list = false;
  app.add_option("--config", config_path, "JSON config file: {scenario, seed?, out?}");
  app.add_option("--out", out_dir, "output directory for artifacts");
  app.add_option("--jobs", jobs, "parallel scenarios")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "base RNG seed");
  app.add_option("--tag", tag, "filter scenarios by tag");
  app.add_flag("--list", list, "list scenarios and exit");
  CLI11_PARSE(app, argc, argv);

  if (const char* env = std::getenv("KK_SPECTRA_OUT")) out_dir = env;

  if (list) {
    for (const auto& s : kks::scenario_catalog()) {
      if (!tag.empty() && !has_tag(s, tag)) continue;
      std::cout << s.name << " - " << s.doc << " [";
      for (std::size_t i = 0; i < s.tags.size(); ++i)
        std::cout << s.tags[i] << (i + 1 < s.tags.size() ? "," : "");
      std::cout << "]\n";
    }
    return 0;
  }

  kks::ScenarioContext ctx;
  ctx.out_dir = out_dir;
  ctx.seed = seed;

  std::vector<const kks::Scenario*> todo;
  if (!config_path.empty()) {
    Config cfg;
    try {
      cfg = parse_config(kks::json::parse(kks::read_file(config_path)));
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    }
    if (cfg.seed) ctx.seed = *cfg.seed;
    if (cfg.out) ctx.out_dir = *cfg.out;
    todo.push_back(find_scenario(cfg.scenario));
  } else {
    for (const auto& s : kks::scenario_catalog())
      if (tag.empty() || has_tag(s, tag)) todo.push_back(&s);
  }

  try {
    return run_scenarios(todo, ctx, jobs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
