#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pipeline.hpp"
#include "toda/error.hpp"
#include "toda/io.hpp"

using namespace toda;
using namespace toda::pipeline;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("toda_pipe_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Stage config_stage(const json& j) {
  try {
    parse_config(j);
  } catch (const Error& e) {
    return e.stage();
  }
  return Stage::io;
}

// small window so the whole pipeline runs quickly
RunConfig small() {
  RunConfig c;
  c.profile.n_min = -30;
  c.profile.n_max = 20;
  c.profile.left_decay_rate = 1.0;
  c.profile.right_decay_rate = 1.5;
  c.M = 512;
  c.times = {0.5};
  c.left_from = -15;
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW(parse_config(json::object()));
  auto d = to_json(RunConfig{});
  CHECK_NOTHROW(parse_config(d));
  CHECK(config_stage({{"mode", "dance"}}) == Stage::config);
  CHECK(config_stage({{"unknown_key", 1}}) == Stage::config);
  CHECK(config_stage({{"grid", {{"M", -3}}}}) == Stage::config);
  CHECK(config_stage({{"times", {0.5, -1.0}}}) == Stage::config);
  CHECK(config_stage({{"dt", "fast"}}) == Stage::config);
  CHECK(config_stage({{"profile", {{"background", "tilted"}}}}) == Stage::config);
  CHECK(config_stage({{"tolerances", {{"delta_pole", 0.5}}}}) == Stage::config);

  auto back = parse_config(d);
  CHECK(to_json(back) == d);
  auto p = fs::temp_directory_path() / "toda_pipe_bad.json";
  std::ofstream(p) << "{ not json";
  CHECK_THROWS_AS(load_config(p), Error);
}

TEST_CASE("simulate keeps a constant state constant") {
  auto c = small();
  c.mode = "simulate";
  c.profile.background = "free";
  c.profile.amp_left = 0.0;
  c.profile.amp_right = 0.0;
  c.profile.bump = 0.0;
  c.times = {0.1, 0.2, 0.3};
  c.output = scratch("sim");
  run(c);
  auto s0 = io::read_state_csv(c.output / "state.csv");
  for (int k = 0; k < 3; ++k) {
    auto s = io::read_state_csv(c.output / ("t" + std::to_string(k)) / "state.csv");
    CHECK(s.a == s0.a);
    CHECK(s.b == s0.b);
    CHECK(s.t == doctest::Approx(c.times[static_cast<size_t>(k)]));
  }
  CHECK(fs::exists(c.output / "manifest.json"));
  CHECK(fs::exists(c.output / "trajectory.json"));
  auto m = json::parse(slurp(c.output / "manifest.json"));
  CHECK(m["config"]["mode"] == "simulate");
}

TEST_CASE("roundtrip and reconstruct agree at t = 0") {
  auto c = small();
  c.mode = "roundtrip";
  c.output = scratch("rt");
  run(c);
  auto c2 = small();
  c2.mode = "reconstruct";
  c2.times = {0.0};
  c2.output = scratch("rc");
  run(c2);
  auto a = slurp(c.output / "roundtrip" / "state.csv");
  CHECK(!a.empty());
  CHECK(a == slurp(c2.output / "t0" / "state.csv"));
  auto rep = json::parse(slurp(c.output / "roundtrip.json"));
  CHECK(rep["left_error"].get<double>() < 1e-6);

  // same bytes on a second run
  auto c3 = c;
  c3.output = scratch("rt2");
  run(c3);
  CHECK(a == slurp(c3.output / "roundtrip" / "state.csv"));
  CHECK(slurp(c.output / "reflection.csv") == slurp(c3.output / "reflection.csv"));
}

TEST_CASE("compare writes one entry per time") {
  auto c = small();
  c.mode = "compare";
  c.times = {0.25, 0.5};
  c.output = scratch("cmp");
  run(c);
  auto j = json::parse(slurp(c.output / "compare.json"));
  REQUIRE(j["entries"].size() == 2);
  for (size_t k = 0; k < 2; ++k) {
    CHECK(j["entries"][k]["t"].get<double>() == c.times[k]);
    CHECK(fs::exists(c.output / ("t" + std::to_string(k)) / "oracle_state.csv"));
  }
  auto report = compare(c);
  for (const auto& e : report.entries) {
    CHECK(e.errors.left < 1e-6);
    CHECK(e.conservation.spectrum_drift < 1e-8);
  }
}

TEST_CASE("scatter and evolve file layout") {
  auto c = small();
  c.mode = "evolve";
  c.times = {0.5, 1.0};
  c.output = scratch("ev");
  run(c);
  for (const char* f : {"state.csv", "reflection.csv", "bound_states.csv", "contour.csv", "t0/reflection.csv",
                        "t1/bound_states.csv", "manifest.json"})
    CHECK_MESSAGE(fs::exists(c.output / f), f);
  auto d = io::read_scattering(c.output / "t1");
  CHECK(d.t == 1.0);
}
