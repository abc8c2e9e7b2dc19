#pragma once

#include <vector>

#include "toda/forward.hpp"

namespace toda::inverse {

using forward::SpectralMeasure;

struct ScanOptions {
  double fit_tol = 1e-13;
  int max_terms = 200;
  int refine = 8;          // scan points per data node
  double bisect_tol = 1e-12;
  double eps_w = 1e-10;    // atoms lighter than this are dropped
  double richardson_h = 1e-5;
  double min_captured = 0.9;
};

struct ScanResult {
  SpectralMeasure measure;     // resolved atoms plus the balancing atom
  int balancing_index = -1;    // -1 when the resolved atoms already carry the mass
  double captured_mass = 0.0;  // before balancing
  double fit_error = 0.0;
  int model_terms = 0;
  std::vector<double> dropped_lambda;  // sign changes with weight below eps_w
};

// Atoms of the half-line measure from Re m at the cut nodes. m is continued
// by a rational fit; atoms sit where 1/m changes sign from + to - in
// increasing lambda, weights come from (lambda_n - lambda) m(lambda).
ScanResult pole_scan(const std::vector<double>& lambda_nodes, const std::vector<double>& m_nodes,
                     const ScanOptions& opts = {});

struct JacobiCoefficients {
  std::vector<double> a;  // n = 0..N-1
  std::vector<double> b;
  double b_tail = 0.0;  // b_N from the last polynomial; exact when the measure has N + 1 atoms
};

// Discrete Stieltjes procedure; needs N <= atoms - 1.
JacobiCoefficients jacobi_from_measure(const SpectralMeasure& measure, int N);

// Largest N the measure supports before the positivity floor is hit.
int supported_depth(const SpectralMeasure& measure, int N_cap);

// Coefficients that do not move (beyond tol) when the lightest resolved atom
// is folded into the balancing atom. Returns the count, at most N_cap.
int resolved_depth(const ScanResult& scan, int N_cap, double tol = 1e-3);

}  // namespace toda::inverse
