#include "toda/flow.hpp"

#include <cmath>

#include "toda/error.hpp"

namespace toda::flow {

using forward::cplx;

namespace {

void check(const ScatteringData& d, double dt) {
  if (!std::isfinite(dt)) throw Error(Stage::flow, "time step is not finite");
  if (d.R.size() != d.grid.size()) throw Error(Stage::flow, "reflection samples do not match the grid");
  if (d.contour.R.size() != d.contour.theta.size())
    throw Error(Stage::flow, "contour samples do not match their angles");
}

}  // namespace

ScatteringData evolve_reflection(const ScatteringData& data, double dt) {
  check(data, dt);
  ScatteringData out = data;
  for (size_t i = 0; i < out.R.size(); ++i) {
    // on |z| = 1, 1/z - z = -2i sin(theta)
    out.R[i] *= std::polar(1.0, -2.0 * std::sin(out.grid.theta[i]) * dt);
  }
  for (size_t i = 0; i < out.contour.R.size(); ++i) {
    cplx z = out.contour.z(i);
    out.contour.R[i] *= std::exp((1.0 / z - z) * dt);
  }
  return out;
}

ScatteringData evolve_bound_states(const ScatteringData& data, double dt) {
  check(data, dt);
  ScatteringData out = data;
  for (auto& b : out.bound_states) {
    double g = std::exp((1.0 / b.z - b.z) * dt);
    if (!std::isfinite(g) || g == 0.0) throw Error(Stage::flow, "norming constant left the double range");
    b.M_inv_sq *= g;
    b.jost_norm_sq /= g;
  }
  return out;
}

ScatteringData evolve(const ScatteringData& data, double dt) {
  auto out = evolve_bound_states(evolve_reflection(data, dt), dt);
  out.t = data.t + dt;
  return out;
}

}  // namespace toda::flow
