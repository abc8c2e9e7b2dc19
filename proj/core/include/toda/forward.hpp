#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "toda/lattice.hpp"

namespace toda::forward {

using cplx = std::complex<double>;
using lattice::LatticeState;

// Nodes on the open cut: lambda = 2 cos theta, z = e^{i theta}, theta in (0, pi).
struct CutGrid {
  std::vector<double> theta;

  size_t size() const { return theta.size(); }
  double lambda(size_t i) const { return 2.0 * std::cos(theta[i]); }
  cplx z(size_t i) const { return std::polar(1.0, theta[i]); }
};

struct BoundState {
  double mu = 0.0;
  double z = 0.0;
  // Weight of the bound state in the Marchenko kernel, 1 / sum_n f_n(mu)^2
  // with f normalised as z^{-n} on the deep left.
  double M_inv_sq = 0.0;
  // sum_n f_n(mu)^2, i.e. the squared scale c^2 of the unit eigenvector
  double jost_norm_sq = 0.0;
  double fit_residual = 0.0;
};

// R sampled on the circle |z| = rho (full circle, theta in (0, 2 pi)).
struct ContourSamples {
  double rho = 0.0;
  std::vector<double> theta;
  std::vector<cplx> R;

  bool empty() const { return theta.empty(); }
  cplx z(size_t i) const { return std::polar(rho, theta[i]); }
};

struct ScatteringData {
  CutGrid grid;
  std::vector<cplx> R;
  std::vector<BoundState> bound_states;
  double t = 0.0;
  ContourSamples contour;
};

struct SpectralMeasure {
  std::vector<double> lambda;  // sorted ascending
  std::vector<double> w;

  size_t size() const { return lambda.size(); }
  double total() const;
};

struct JostValues {
  int n_min = 0;
  std::vector<cplx> f;  // n_min..0
  int ref_begin = 0;    // deep-left reference range [ref_begin, ref_end]
  int ref_end = 0;

  cplx at(int n) const { return f[static_cast<size_t>(n - n_min)]; }
  int n_last() const { return n_min + static_cast<int>(f.size()) - 1; }
};

struct WeylSolution {
  int n_lo = 0;
  std::vector<cplx> psi;  // n_lo..n_max, arbitrary positive scale

  cplx at(int n) const { return psi[static_cast<size_t>(n - n_lo)]; }
};

struct PolynomialSolutions {
  std::vector<double> P;  // n = 0..count-1
  std::vector<double> Q;
};

struct Transition {
  cplx a;
  cplx abar;
  cplx R;
  double conj_residual = 0.0;
};

struct ForwardOptions {
  int grid_size = 1024;
  double delta_pole = 1e-3;
  double delta_edge = 1e-6;
  double eps_loc = 1e-8;
  double eps_trunc = 1e-10;
  int ref_cells = 10;
  double fit_tol = 1e-6;
  double unimodular_tol = 1e-8;
  // interior circle used by the kernel quadrature; 0 disables it
  double contour_rho = 0.95;
  int contour_nodes = 2048;
};

// Root of z^2 - lambda z + 1 = 0 with |z| <= 1; on the open cut z = e^{i theta}.
cplx z_of_lambda(cplx lambda);

CutGrid make_cut_grid(int M, const std::vector<double>& avoid_lambda, double delta_pole);

PolynomialSolutions polynomial_solutions(const LatticeState& state, double lambda);

// Left Jost solution seeded as z^{-n} at n_min, n_min+1; any z != 0.
JostValues jost_from_left(const LatticeState& state, cplx z, int ref_cells = 10);

// Backward recurrence from psi_{n_max+1} = 0, psi_{n_max} = 1, down to n_lo.
// pole_tol > 0 rejects lambda where psi_{-1} nearly vanishes (a pole of m).
WeylSolution weyl_solution_right(const LatticeState& state, cplx lambda, double pole_tol = 1e-12,
                                 int n_lo = -1);

// Cut node z = e^{i theta}: solves psi = a f-bar + a-bar f at n = -1, 0.
Transition transition_coefficient(const LatticeState& state, double theta, double unimodular_tol = 1e-8);

// R(z) = -W(f(1/z), psi) / W(f(z), psi) for z off the unit circle.
cplx reflection_at(const LatticeState& state, cplx z);

std::vector<BoundState> bound_states(const LatticeState& state, double delta_edge = 1e-6, double eps_loc = 1e-8);

BoundState norming_constants(const LatticeState& state, const BoundState& bound, int ref_cells = 10,
                             double fit_tol = 1e-6);

SpectralMeasure l0_spectrum(const LatticeState& state);

cplx weyl_m_from_measure(const SpectralMeasure& measure, cplx lambda, double pole_tol = 1e-14);

ScatteringData full_forward(const LatticeState& state, const ForwardOptions& opts = {});

}  // namespace toda::forward
