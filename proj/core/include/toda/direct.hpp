#pragma once

#include <string>
#include <utility>
#include <vector>

#include "toda/lattice.hpp"

namespace toda::direct {

using lattice::LatticeState;
using Seq = std::vector<double>;

struct Trajectory {
  std::vector<LatticeState> states;
  double dt = 0.0;
  std::string scheme;
};

struct ConservationReport {
  double sum_b_drift = 0.0;
  double h_reg_drift = 0.0;
  double spectrum_drift = 0.0;
  double gronwall_margin = 0.0;
  int tracked_eigenvalues = 0;
  double gronwall_C = 0.0;
};

// da_n = (a_n/2)(b_{n+1} - b_n), db_n = a_n^2 - a_{n-1}^2 with ghost values
// taken from the state's boundary model.
std::pair<Seq, Seq> toda_rhs(const LatticeState& state);

// Substituted system for x1 = a - s, x2 = b (s_n = 1 for n < 0, 0 otherwise).
// The second equation is the one obtained by differentiating the change of
// variables; this includes the -1 - 2 x1_{-1} term at n = 0.
std::pair<Seq, Seq> substituted_rhs(int n_min, const Seq& x1, const Seq& x2);

// Literal transcription of the printed system, kept for comparison only:
// second equation uses (x1_n - x2_{n-1}) and the (1 - delta) factor.
std::pair<Seq, Seq> substituted_rhs_printed(int n_min, const Seq& x1, const Seq& x2);

Trajectory integrate_rk4(const LatticeState& state, double T, double dt);

struct PicardResult {
  Trajectory trajectory;
  double last_distance = 0.0;           // B-norm sup over time between last two iterates
  std::vector<double> distances;        // per iteration
  int iterations = 0;
};

// Fixed-point iteration of x(t) = x(0) + int_0^t F(x) on a trapezoidal grid.
// Stops after n_iter iterations or when the distance drops below stop_tol.
PicardResult integrate_picard(const LatticeState& state, double T, int n_iter, double quad_dt,
                              double stop_tol = 1e-14);

double sum_b(const LatticeState& s);
// Sum b^2/2 + sum_{n<0}(a^2 - aL^2) + sum_{n>=0}(a^2 - aR^2)
double regularized_energy(const LatticeState& s);
// d/dt sum b = a_R^2 - a_L^2 for the frozen ghosts
double sum_b_flux(const LatticeState& s);

// Eigenvalues of the window matrix outside [-2 - delta_edge, 2 + delta_edge],
// localized away from both edges.
std::vector<double> discrete_spectrum(const LatticeState& s, double delta_edge = 1e-6, double eps_loc = 1e-8);

ConservationReport conservation_report(const Trajectory& traj, double delta_edge = 1e-6, double eps_loc = 1e-8);

}  // namespace toda::direct
