#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "toda/direct.hpp"
#include "toda/forward.hpp"
#include "toda/inverse.hpp"
#include "toda/lattice.hpp"

#include "json.hpp"

namespace toda::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunConfig {
  std::string mode = "roundtrip";
  fs::path output = "out";
  lattice::SteplikeProfileSpec profile;
  int M = 1024;
  double contour_rho = 0.95;
  int contour_nodes = 2048;
  int K_trunc = 0;
  int N_right = 20;
  double resolution_tol = 1e-3;
  std::vector<double> times{0.5, 1.0};
  double dt = 1e-3;
  double eps_trunc = 1e-10;
  double delta_pole = 1e-3;
  double delta_edge = 1e-6;
  double eps_w = 1e-10;
  double eps_loc = 1e-8;
  // comparison windows
  int left_from = -30;
  int right_depth = 10;
  bool debug = false;

  forward::ForwardOptions forward_options() const;
  inverse::InverseOptions inverse_options() const;
};

// Throws Error(Stage::config) on schema violations.
RunConfig parse_config(const json& j);
RunConfig load_config(const fs::path& path);
json to_json(const RunConfig& c);

// Left: max (|da| + |db|) over [left_from, -1]. Right: max(|da|, |db|) over
// 0..right_depth-1, per coefficient.
struct StateErrors {
  double left = 0.0;
  double right = 0.0;
  std::vector<double> right_per_n;
};
StateErrors state_errors(const lattice::LatticeState& rec, const lattice::LatticeState& ref, int left_from,
                         int right_depth);

struct EvolutionErrors {
  double R_max = 0.0;
  int R_nodes = 0;
  int R_excluded = 0;
  double M_rel = 0.0;
};

// Evolved data against forward scattering of the evolved lattice, on the
// original nodes away from half-line eigenvalues at both times.
EvolutionErrors evolution_errors(const forward::ScatteringData& evolved, const lattice::LatticeState& state_t,
                                 const lattice::LatticeState& state_0, const RunConfig& cfg);

struct RoundtripReport {
  StateErrors errors;
  inverse::InverseResult inverse;
  forward::ScatteringData data;
  lattice::LatticeState input;
};
RoundtripReport roundtrip(const RunConfig& cfg);

struct CompareEntry {
  double t = 0.0;
  StateErrors errors;
  direct::ConservationReport conservation;
  EvolutionErrors evolution;
  int right_depth_resolved = 0;
};
struct CompareReport {
  std::vector<CompareEntry> entries;
};
json to_json(const CompareReport& r);

// Sequential RK4 from the initial state through every requested time.
// Returns the full trajectory and the index of each requested time in it.
direct::Trajectory simulate(const lattice::LatticeState& s0, const std::vector<double>& times, double dt,
                            std::vector<size_t>& snapshot_index);

CompareReport compare(const RunConfig& cfg);

using Progress = std::function<void(const std::string&)>;

// Dispatch on cfg.mode and write files under cfg.output.
void run(const RunConfig& cfg, const Progress& progress = {});

}  // namespace toda::pipeline
