#pragma once

#include <vector>

#include "toda/forward.hpp"

namespace toda::inverse {

using forward::ScatteringData;

// F_x for x_min <= x <= x_max.
struct MarchenkoKernel {
  int x_min = 0;
  int x_max = 0;
  std::vector<double> F;
  double max_imag = 0.0;  // contour path only: largest |Im| of the quadrature
  bool contour = false;

  double at(int x) const;
};

// Largest |x| the samples resolve: M/4 on the cut, N/4 on the interior circle.
int kernel_limit(const ScatteringData& data);

// Sum of gamma_k z_k^{-x} plus the continuous part. With contour samples the
// continuous part is rho^{-x} times the mean of R(rho e^{i th}) e^{-i x th};
// otherwise the cut rule (1/M) sum Re(R_j e^{-i x theta_j}).
double kernel_F(const ScatteringData& data, int x, double* imag = nullptr);

MarchenkoKernel build_kernel(const ScatteringData& data, int x_min, int x_max = 0);

}  // namespace toda::inverse
