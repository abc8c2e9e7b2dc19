#include <cmath>

#include "doctest.h"
#include "toda/direct.hpp"
#include "toda/flow.hpp"

using namespace toda;
using namespace toda::forward;

namespace {

constexpr double kPi = 3.14159265358979323846;

ScatteringData toy() {
  ScatteringData d;
  d.grid.theta = {0.4, kPi / 2, 2.5};
  d.R = {std::polar(1.0, 0.3), cplx(1.0, 0.0), std::polar(1.0, -1.2)};
  BoundState b;
  b.mu = 2.5;
  b.z = 0.5;
  b.M_inv_sq = 0.8;
  b.jost_norm_sq = 1.25;
  d.bound_states.push_back(b);
  d.contour.rho = 0.9;
  d.contour.theta = {0.1, 3.0};
  d.contour.R = {cplx(0.3, 0.1), cplx(-0.2, 0.4)};
  return d;
}

}  // namespace

TEST_CASE("zero time is the identity") {
  auto d = toy();
  auto e = flow::evolve(d, 0.0);
  for (size_t i = 0; i < d.R.size(); ++i) CHECK(e.R[i] == d.R[i]);
  for (size_t i = 0; i < d.contour.R.size(); ++i) CHECK(e.contour.R[i] == d.contour.R[i]);
  CHECK(e.bound_states[0].M_inv_sq == d.bound_states[0].M_inv_sq);
  CHECK(e.t == 0.0);
}

TEST_CASE("reflection phase on the cut") {
  auto d = toy();
  const double t = 0.7;
  auto e = flow::evolve_reflection(d, t);
  // theta = pi/2: factor e^{-2it}
  CHECK(std::abs(e.R[1] - d.R[1] * std::polar(1.0, -2 * t)) < 1e-15);
  auto f = flow::evolve_reflection(d, kPi);
  CHECK(std::abs(f.R[1] - d.R[1]) < 1e-14);
  for (size_t i = 0; i < d.R.size(); ++i) CHECK(std::abs(e.R[i]) == doctest::Approx(std::abs(d.R[i])).epsilon(1e-15));
  // interior circle: (1/z - z) t with z = rho e^{i th}
  cplx z = std::polar(0.9, 0.1);
  CHECK(std::abs(e.contour.R[0] - d.contour.R[0] * std::exp((1.0 / z - z) * t)) < 1e-15);
}

TEST_CASE("norming constant growth") {
  auto d = toy();
  auto e = flow::evolve_bound_states(d, 2.0);
  CHECK(e.bound_states[0].M_inv_sq == doctest::Approx(0.8 * std::exp(1.5 * 2.0)).epsilon(1e-15));
  CHECK(e.bound_states[0].mu == 2.5);
  CHECK(e.bound_states[0].M_inv_sq * e.bound_states[0].jost_norm_sq == doctest::Approx(1.0));
}

TEST_CASE("flow is a semigroup and accumulates time") {
  auto d = toy();
  auto a = flow::evolve(flow::evolve(d, 0.3), 0.45);
  auto b = flow::evolve(d, 0.75);
  CHECK(a.t == doctest::Approx(0.75));
  for (size_t i = 0; i < d.R.size(); ++i) CHECK(std::abs(a.R[i] - b.R[i]) < 1e-14);
  CHECK(a.bound_states[0].M_inv_sq == doctest::Approx(b.bound_states[0].M_inv_sq).epsilon(1e-14));
}

TEST_CASE("evolved data match forward scattering of the evolved lattice") {
  auto s0 = lattice::make_step_profile({});
  auto d0 = full_forward(s0);
  const double t = 0.5;
  auto st = direct::integrate_rk4(s0, t, 1e-3).states.back();
  auto e = flow::evolve(d0, t);
  auto bt = norming_constants(st, bound_states(st).at(0));
  CHECK(std::abs(e.bound_states[0].M_inv_sq - bt.M_inv_sq) <= 1e-3 * bt.M_inv_sq);
  CHECK(e.bound_states[0].mu == doctest::Approx(bt.mu).epsilon(1e-9));
  // a handful of nodes well away from the half-line eigenvalues
  for (size_t i : {50u, 200u, 700u, 1000u}) {
    auto T = transition_coefficient(st, e.grid.theta[i]);
    CHECK(std::abs(T.R - e.R[i]) < 1e-3);
  }
}
