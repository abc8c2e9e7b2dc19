#pragma once

#include <complex>
#include <vector>

namespace toda::inverse {

// Barycentric rational r(x) = sum w_j f_j/(x - x_j) / sum w_j/(x - x_j).
struct RationalModel {
  std::vector<double> support;
  std::vector<double> values;
  std::vector<double> weights;
  double max_error = 0.0;  // on the fitted samples

  double operator()(double x) const;
  std::complex<double> operator()(std::complex<double> x) const;
  std::vector<std::complex<double>> poles() const;
  std::complex<double> residue(std::complex<double> pole) const;
  size_t terms() const { return support.size(); }
};

// Greedy AAA fit of real samples; stops at rel_tol * max|f| or max_terms.
RationalModel aaa_fit(const std::vector<double>& x, const std::vector<double>& f, double rel_tol = 1e-13,
                      int max_terms = 200);

}  // namespace toda::inverse
