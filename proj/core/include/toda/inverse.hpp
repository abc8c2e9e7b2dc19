#pragma once

#include <vector>

#include "toda/kernel.hpp"
#include "toda/lattice.hpp"
#include "toda/marchenko.hpp"
#include "toda/measure.hpp"

namespace toda::inverse {

struct InverseOptions {
  int n_min = -60;
  int n_max = 40;
  int K_trunc = 0;   // 0: 2 |n_min| + 40
  int N_right = 20;  // cap on recovered right-half coefficients
  double resolution_tol = 1e-3;
  double eps_trunc = 1e-10;
  ScanOptions scan;
  MarchenkoOptions marchenko;
};

struct InverseResult {
  lattice::LatticeState state;
  MarchenkoKernel kernel;
  MarchenkoSolution marchenko;
  ScanResult scan;
  JacobiCoefficients right;
  int right_depth = 0;
  std::vector<double> m_nodes;  // Re m at the cut nodes
  double m_imag_max = 0.0;
};

// m at every cut node of the data (real up to rounding).
std::vector<cplx> weyl_on_grid(const MarchenkoSolution& sol, const ScatteringData& data);

InverseResult full_inverse(const ScatteringData& data, const InverseOptions& opts = {});

}  // namespace toda::inverse
