#pragma once

#include <complex>
#include <vector>

#include "toda/kernel.hpp"

namespace toda::inverse {

using cplx = std::complex<double>;

struct MarchenkoOptions {
  double max_condition = 1e12;
  double residual_tol = 1e-10;
};

struct MarchenkoRow {
  int n = 0;
  std::vector<double> A;  // A[l-1] = A_{n,-l}, l = 1..K
  double alpha = 0.0;
  double alpha_inv_sq = 0.0;
  double residual = 0.0;   // max-norm residual of the linear system
  double condition = 0.0;  // estimate from the LU factorisation
};

struct MarchenkoSolution {
  int n_min = 0;
  int K = 0;
  std::vector<MarchenkoRow> rows;  // n_min..0

  const MarchenkoRow& row(int n) const;
};

// A_{n,-j} + F_{2n-j} + sum_l A_{n,-l} F_{2n-j-l} = 0, j = 1..K
MarchenkoRow solve_marchenko_row(const MarchenkoKernel& F, int n, int K, const MarchenkoOptions& opts = {});

MarchenkoSolution solve_marchenko(const MarchenkoKernel& F, int n_min, int K, const MarchenkoOptions& opts = {});

struct LeftCoefficients {
  int n_min = 0;
  std::vector<double> a;  // n_min..-1
  std::vector<double> b;
};

// a_n = alpha_n / alpha_{n+1}, b_n = A_{n,-1} - A_{n+1,-1}
LeftCoefficients left_coefficients(const MarchenkoSolution& sol);

// f_n(z) = alpha_n z^{-n} (1 + sum_l A_{n,-l} z^l)
cplx reconstruct_jost(const MarchenkoSolution& sol, cplx z, int n);

// Half-line Weyl function on the cut from R and the reconstructed Jost values.
cplx weyl_from_scattering(const MarchenkoSolution& sol, cplx z, cplx R);

}  // namespace toda::inverse
