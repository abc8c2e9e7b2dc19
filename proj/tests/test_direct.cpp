#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "toda/direct.hpp"
#include "toda/error.hpp"

using namespace toda;
using namespace toda::direct;
using lattice::LatticeState;

namespace {

LatticeState pure_step(int nmin = -20, int nmax = 20) {
  LatticeState s(nmin, nmax);
  for (int n = nmin; n < 0; ++n) s.a_ref(n) = 1.0;
  for (int n = 0; n <= nmax; ++n) s.a_ref(n) = 1e-12;
  return s;
}

LatticeState free_background(int nmin = -20, int nmax = 20) {
  LatticeState s(nmin, nmax, 0.0, lattice::BoundaryModel::free());
  for (int n = nmin; n <= nmax; ++n) s.a_ref(n) = 1.0;
  return s;
}

double sup_diff(const LatticeState& x, const LatticeState& y) {
  double d = 0.0;
  for (size_t i = 0; i < x.a.size(); ++i)
    d = std::max({d, std::abs(x.a[i] - y.a[i]), std::abs(x.b[i] - y.b[i])});
  return d;
}

}  // namespace

TEST_CASE("toda_rhs on backgrounds") {
  auto f = free_background();
  auto [da, db] = toda_rhs(f);
  for (size_t i = 0; i < da.size(); ++i) {
    CHECK(da[i] == 0.0);
    CHECK(db[i] == 0.0);
  }
  // exact step a = 1 | a = 0: only db_0 = 0 - 1 moves
  LatticeState s(-10, 10);
  for (int n = -10; n < 0; ++n) s.a_ref(n) = 1.0;
  auto [sa, sb] = toda_rhs(s);
  for (int n = -10; n <= 10; ++n) {
    CHECK(sa[static_cast<size_t>(s.idx(n))] == 0.0);
    CHECK(sb[static_cast<size_t>(s.idx(n))] == (n == 0 ? -1.0 : 0.0));
  }
}

TEST_CASE("substituted system is the change of variables of the lattice") {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  for (int rep = 0; rep < 5; ++rep) {
    auto s = pure_step(-15, 15);
    for (int n = s.n_min; n <= s.n_max; ++n) {
      s.a_ref(n) += std::abs(u(gen));
      s.b_ref(n) = u(gen);
    }
    auto [da, db] = toda_rhs(s);
    std::vector<double> x1, x2;
    lattice::to_substituted(s, x1, x2);
    auto [d1, d2] = substituted_rhs(s.n_min, x1, x2);
    for (size_t i = 0; i < da.size(); ++i) {
      CHECK(d1[i] == doctest::Approx(da[i]).epsilon(1e-14).scale(1.0));
      CHECK(d2[i] == doctest::Approx(db[i]).epsilon(1e-14).scale(1.0));
    }
  }
}

TEST_CASE("substituted system at the background") {
  std::vector<double> z(21, 0.0);
  auto [p1, p2] = substituted_rhs_printed(-10, z, z);
  for (size_t i = 0; i < z.size(); ++i) CHECK((p1[i] == 0.0 && p2[i] == 0.0));
  // the consistent form keeps the step's own flux at n = 0
  auto [c1, c2] = substituted_rhs(-10, z, z);
  for (int n = -10; n <= 10; ++n) {
    CHECK(c1[static_cast<size_t>(n + 10)] == 0.0);
    CHECK(c2[static_cast<size_t>(n + 10)] == (n == 0 ? -1.0 : 0.0));
  }
}

TEST_CASE("substituted first equation with a single impulse in x2") {
  const double c = 0.37;
  std::vector<double> x1(21, 0.0), x2(21, 0.0);
  x2[10] = c;  // n = 0
  for (auto f : {substituted_rhs, substituted_rhs_printed}) {
    auto [d1, d2] = f(-10, x1, x2);
    CHECK(d1[10] == 0.0);                          // n = 0: the affine term is off
    CHECK(d1[9] == doctest::Approx(c / 2));        // n = -1
  }
}

TEST_CASE("RK4 keeps the background fixed and has fourth-order accuracy") {
  auto f = free_background();
  auto tr = integrate_rk4(f, 1.0, 0.01);
  CHECK(sup_diff(tr.states.back(), f) == 0.0);
  CHECK(tr.states.back().t == doctest::Approx(1.0));
  CHECK(tr.scheme == "rk4");

  auto s = lattice::make_step_profile({});
  const double T = 1.0;
  auto ref = integrate_rk4(s, T, 0.1 / 8).states.back();
  double e1 = sup_diff(integrate_rk4(s, T, 0.1).states.back(), ref);
  double e2 = sup_diff(integrate_rk4(s, T, 0.05).states.back(), ref);
  double order = std::log2(e1 / e2);
  MESSAGE("observed order " << order);
  CHECK(order >= 3.8);
}

TEST_CASE("RK4 rejects bad steps") {
  auto s = lattice::make_step_profile({});
  CHECK_THROWS_AS(integrate_rk4(s, -1.0, 1e-3), Error);
  try {
    integrate_rk4(s, 5.0, 2.0);
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.stage() == Stage::integrate);
  }
}

TEST_CASE("sum of b telescopes for the pure step") {
  auto s = pure_step(-40, 40);
  auto tr = integrate_rk4(s, 1.0, 1e-3);
  CHECK(sum_b(tr.states.back()) - sum_b(s) == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("conservation report") {
  SUBCASE("constant background") {
    auto f = free_background();
    auto rep = conservation_report(integrate_rk4(f, 0.5, 1e-2));
    CHECK(rep.sum_b_drift == 0.0);
    CHECK(rep.h_reg_drift == 0.0);
    CHECK(rep.spectrum_drift == 0.0);
    CHECK(rep.gronwall_margin >= 0.0);
  }
  SUBCASE("perturbed step to T = 1") {
    auto s = lattice::make_step_profile({});
    auto rep = conservation_report(integrate_rk4(s, 1.0, 1e-3));
    CHECK(std::abs(rep.sum_b_drift) <= 1e-6);
    CHECK(std::abs(rep.h_reg_drift) <= 1e-6);
    CHECK(rep.tracked_eigenvalues == 1);
    CHECK(rep.spectrum_drift <= 1e-8);
    CHECK(rep.gronwall_margin >= 0.0);
  }
}

TEST_CASE("discrete spectrum against a Sturm bisection") {
  auto s = lattice::make_step_profile({});
  auto mu = discrete_spectrum(s);
  REQUIRE(mu.size() == 1);
  std::vector<double> e(s.a.begin(), s.a.end() - 1);
  CHECK(mu[0] == doctest::Approx(oracle::largest_eigenvalue(s.b, e)).epsilon(1e-12));
}

TEST_CASE("Picard iteration") {
  SUBCASE("background is a fixed point") {
    auto f = free_background();
    auto res = integrate_picard(f, 0.25, 3, 1e-2);
    for (const auto& st : res.trajectory.states) CHECK(sup_diff(st, f) == 0.0);
    CHECK(res.last_distance == 0.0);
  }
  SUBCASE("small perturbation agrees with RK4") {
    auto s = pure_step(-30, 30);
    for (int n = -30; n <= 30; ++n) s.b_ref(n) = 0.1 * std::exp(-std::abs(n));
    auto p = integrate_picard(s, 0.25, 40, 1e-3);
    auto r = integrate_rk4(s, 0.25, 1e-3);
    REQUIRE(p.trajectory.states.size() == r.states.size());
    double d = 0.0;
    for (size_t k = 0; k < r.states.size(); ++k) d = std::max(d, sup_diff(p.trajectory.states[k], r.states[k]));
    CHECK(d <= 1e-6);
    // contraction: distances shrink by a steady factor once small
    REQUIRE(p.distances.size() >= 6);
    for (size_t k = 2; k + 1 < std::min<size_t>(p.distances.size(), 8); ++k)
      CHECK(p.distances[k + 1] < 0.5 * p.distances[k]);
  }
}
