#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "toda/error.hpp"
#include "toda/io.hpp"

using namespace toda;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("toda_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Stage io_stage(const fs::path& p) {
  try {
    io::read_state_csv(p);
  } catch (const Error& e) {
    return e.stage();
  }
  return Stage::config;
}

}  // namespace

TEST_CASE("state csv round trip is exact") {
  auto dir = scratch("state");
  lattice::LatticeState s(-4, 3, 0.75, lattice::BoundaryModel::free());
  for (int n = -4; n <= 3; ++n) s.a_ref(n) = 1.0 / (3.0 + n * n), s.b_ref(n) = std::sqrt(2.0) * n;
  io::write_state_csv(dir / "s.csv", s);
  auto r = io::read_state_csv(dir / "s.csv");
  CHECK(r.t == 0.75);
  CHECK(r.n_min == -4);
  CHECK(r.n_max == 3);
  CHECK(r.boundary.right_a == 1.0);
  CHECK(r.a == s.a);
  CHECK(r.b == s.b);
}

TEST_CASE("scattering and measure files") {
  auto dir = scratch("scat");
  forward::ScatteringData d;
  d.t = 0.25;
  d.grid = forward::make_cut_grid(64, {}, 1e-3);
  for (size_t i = 0; i < d.grid.size(); ++i) d.R.push_back(std::polar(1.0, 0.1 * static_cast<double>(i)));
  forward::BoundState b;
  b.z = 0.4, b.mu = 2.9, b.M_inv_sq = 0.3, b.jost_norm_sq = 1 / 0.3;
  d.bound_states.push_back(b);
  d.contour.rho = 0.9;
  d.contour.theta = {0.0, 3.0};
  d.contour.R = {{0.1, 0.2}, {-0.3, 0.0}};
  io::write_scattering(dir, d);

  int rows = 0;
  std::ifstream is(dir / "reflection.csv");
  for (std::string line; std::getline(is, line);)
    if (!line.empty() && line[0] != '#' && line[0] != 't') ++rows;
  CHECK(rows == 64);

  auto r = io::read_scattering(dir);
  CHECK(r.t == 0.25);
  CHECK(r.grid.theta == d.grid.theta);
  CHECK(r.R == d.R);
  REQUIRE(r.bound_states.size() == 1);
  CHECK(r.bound_states[0].M_inv_sq == 0.3);
  CHECK(r.bound_states[0].jost_norm_sq == doctest::Approx(1 / 0.3));
  CHECK(r.contour.rho == 0.9);
  CHECK(r.contour.R == d.contour.R);

  forward::SpectralMeasure m{{-0.5, 0.0, 1.25}, {0.2, 0.3, 0.5}};
  io::write_measure_csv(dir / "m.csv", m);
  auto mr = io::read_measure_csv(dir / "m.csv");
  CHECK(mr.lambda == m.lambda);
  CHECK(mr.w == m.w);
}

TEST_CASE("read failures are io errors") {
  auto dir = scratch("bad");
  CHECK(io_stage(dir / "missing.csv") == Stage::io);
  std::ofstream(dir / "junk.csv") << "# t=0 n_min=-1 n_max=1 boundary=1,0,0,0\nn,a,b\n-1,1,zero\n";
  CHECK(io_stage(dir / "junk.csv") == Stage::io);
  std::ofstream(dir / "short.csv") << "# t=0 n_min=-1 n_max=1 boundary=1,0,0,0\nn,a,b\n-1,1,0\n";
  CHECK(io_stage(dir / "short.csv") == Stage::io);
  CHECK_THROWS_AS(io::read_scattering(dir), Error);
}
