#pragma once

#include "toda/forward.hpp"

namespace toda::flow {

using forward::ScatteringData;

// R(z) e^{(1/z - z) dt} on the cut and on the interior circle.
ScatteringData evolve_reflection(const ScatteringData& data, double dt);

// M_k^{-2} e^{(1/z_k - z_k) dt}; the bound states themselves do not move.
ScatteringData evolve_bound_states(const ScatteringData& data, double dt);

// Both of the above; the result carries t + dt.
ScatteringData evolve(const ScatteringData& data, double dt);

}  // namespace toda::flow
