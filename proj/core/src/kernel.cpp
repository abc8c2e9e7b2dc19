#include "toda/kernel.hpp"

#include <cmath>
#include <sstream>

#include "toda/error.hpp"

namespace toda::inverse {

using forward::cplx;

double MarchenkoKernel::at(int x) const {
  if (x < x_min || x > x_max) {
    std::ostringstream os;
    os << "kernel requested at x = " << x << " outside [" << x_min << ", " << x_max << "]";
    throw Error(Stage::kernel, os.str());
  }
  return F[static_cast<size_t>(x - x_min)];
}

int kernel_limit(const ScatteringData& d) {
  if (!d.contour.empty()) return static_cast<int>(d.contour.theta.size()) / 4;
  return static_cast<int>(d.grid.size()) / 4;
}

namespace {

double discrete_part(const ScatteringData& d, int x) {
  double s = 0.0;
  for (const auto& b : d.bound_states) s += b.M_inv_sq * std::pow(b.z, -x);
  return s;
}

}  // namespace

double kernel_F(const ScatteringData& d, int x, double* imag) {
  if (std::abs(x) > kernel_limit(d)) {
    std::ostringstream os;
    os << "|x| = " << std::abs(x) << " exceeds the resolution limit " << kernel_limit(d)
       << " of the sampled reflection coefficient; refine the grid";
    throw Error(Stage::kernel, os.str());
  }
  double F = discrete_part(d, x);
  if (!d.contour.empty()) {
    const auto& c = d.contour;
    cplx acc = 0.0;
    for (size_t j = 0; j < c.theta.size(); ++j) acc += c.R[j] * std::polar(1.0, -x * c.theta[j]);
    acc *= std::pow(c.rho, -x) / static_cast<double>(c.theta.size());
    if (imag) *imag = acc.imag();
    return F + acc.real();
  }
  if (d.R.size() != d.grid.size()) throw Error(Stage::kernel, "reflection samples do not match the grid");
  double acc = 0.0;
  for (size_t j = 0; j < d.R.size(); ++j) acc += (d.R[j] * std::polar(1.0, -x * d.grid.theta[j])).real();
  if (imag) *imag = 0.0;
  return F + acc / static_cast<double>(d.R.size());
}

MarchenkoKernel build_kernel(const ScatteringData& d, int x_min, int x_max) {
  if (x_max < x_min) throw Error(Stage::kernel, "empty kernel range");
  MarchenkoKernel K;
  K.x_min = x_min;
  K.x_max = x_max;
  K.contour = !d.contour.empty();
  K.F.resize(static_cast<size_t>(x_max - x_min + 1));
  for (int x = x_min; x <= x_max; ++x) {
    double im = 0.0;
    double v = kernel_F(d, x, &im);
    if (!std::isfinite(v)) throw Error(Stage::kernel, "kernel value is not finite");
    K.F[static_cast<size_t>(x - x_min)] = v;
    K.max_imag = std::max(K.max_imag, std::abs(im));
  }
  return K;
}

}  // namespace toda::inverse
