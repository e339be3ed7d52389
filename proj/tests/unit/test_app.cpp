#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mixhom/app.hpp"

using namespace mixhom;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mixhom_app_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig small_config() {
  return parse_config(nlohmann::json::parse(R"({
    "domain": {"dim": 1, "m": 32},
    "partition": {"family": "alternating1d", "n": 2, "k": 0.5},
    "time": {"T": 0.5, "snapshot_count": 3},
    "initial": {"name": "cosine-bump"},
    "particles": {"N": 20000, "events": true}
  })"));
}

std::vector<ManifestEntry> run(std::string_view cmd, const ExperimentConfig& c, const fs::path& dir) {
  std::ostringstream log;
  return run_command(cmd, c, dir, log);
}

}  // namespace

TEST_CASE("exit codes are distinct") {
  std::vector<int> codes;
  for (auto k : {ErrorKind::config, ErrorKind::alignment, ErrorKind::stability, ErrorKind::normalization,
                 ErrorKind::io, ErrorKind::mismatch, ErrorKind::precondition, ErrorKind::diagnostic}) {
    const int c = exit_code(k);
    CHECK(c > 1);
    CHECK(std::find(codes.begin(), codes.end(), c) == codes.end());
    codes.push_back(c);
  }
  CHECK(exit_code(ErrorKind::config) == 2);
}

TEST_CASE("partition command") {
  auto c = small_config();
  c.m = 64;
  c.partition.n = 4;
  const fs::path dir = scratch("partition");
  const auto m = run("partition", c, dir);
  CHECK(m.size() == 3);
  std::ifstream in(dir / "partition.json");
  const auto j = nlohmann::json::parse(in);
  CHECK(j["max_diam"].get<double>() == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(j["component_count"].get<int>() == 4);
}

TEST_CASE("commands are deterministic") {
  const auto c = small_config();
  for (const char* cmd : {"solve-coupled", "solve-limit", "simulate-n", "simulate-limit"}) {
    const auto a = run(cmd, c, scratch(std::string(cmd) + "_a"));
    const auto b = run(cmd, c, scratch(std::string(cmd) + "_b"));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].filename == b[i].filename);
      CHECK(a[i].digest == b[i].digest);
    }
  }
  auto other = c;
  other.particles.seed += 1;
  const auto a = run("simulate-n", c, scratch("seed_a"));
  const auto b = run("simulate-n", other, scratch("seed_b"));
  CHECK(a.front().digest != b.front().digest);
}

TEST_CASE("compare reads the other commands' output") {
  auto c = small_config();
  c.time.horizon = 1.0;
  c.time.snapshots = {0.0, 0.5, 1.0};
  const fs::path solve = scratch("cmp_solve"), sim = scratch("cmp_sim"), out = scratch("cmp_out");
  run("solve-coupled", c, solve);
  run("simulate-n", c, sim);
  c.compare.density = (solve / "coupled.csv").string();
  c.compare.ensemble = (sim / "ensemble.csv").string();
  const auto m = run("compare", c, out);
  CHECK(m.size() == 2);
  std::ifstream in(out / "compare.json");
  const auto j = nlohmann::json::parse(in);
  CHECK(j["per_time"].size() == 3);
  CHECK(j["max_abs_z"].get<double>() <= 4.0);
  for (const auto& t : j["per_time"]) CHECK(std::abs(t["label2_z"].get<double>()) <= 3.0);
}

TEST_CASE("failures surface as typed errors") {
  auto c = small_config();
  CHECK_THROWS_AS(run("bogus", c, scratch("bogus")), Error);
  c.partition.n = 3;
  try {
    run("partition", c, scratch("misaligned"));
    FAIL("expected an alignment error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::alignment);
  }
  auto d = small_config();
  d.compare.density = "/nonexistent/coupled.csv";
  d.compare.ensemble = "/nonexistent/ensemble.csv";
  try {
    run("compare", d, scratch("missing"));
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
  }
}
