#pragma once

#include <filesystem>
#include <string>

#include "toda/forward.hpp"
#include "toda/kernel.hpp"
#include "toda/lattice.hpp"

namespace toda::io {

namespace fs = std::filesystem;

// "# t=... n_min=... n_max=... boundary=la,lb,ra,rb" then n,a,b rows.
void write_state_csv(const fs::path& path, const lattice::LatticeState& s);
lattice::LatticeState read_state_csv(const fs::path& path);

// reflection.csv, bound_states.csv and (when present) contour.csv in dir.
void write_scattering(const fs::path& dir, const forward::ScatteringData& d);
forward::ScatteringData read_scattering(const fs::path& dir);

void write_measure_csv(const fs::path& path, const forward::SpectralMeasure& m);
forward::SpectralMeasure read_measure_csv(const fs::path& path);

void write_kernel_csv(const fs::path& path, const inverse::MarchenkoKernel& k);

// shortest round-trip decimal form
std::string fmt(double v);

}  // namespace toda::io
