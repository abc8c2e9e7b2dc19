#include "pipeline.hpp"

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "toda/error.hpp"
#include "toda/flow.hpp"
#include "toda/io.hpp"

namespace toda::pipeline {

namespace {

const std::set<std::string> kModes{"simulate", "scatter", "evolve", "reconstruct", "roundtrip", "compare"};

[[noreturn]] void bad(const std::string& what) { throw Error(Stage::config, what); }

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) bad(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) bad("unknown key '" + it.key() + "' in " + where);
}

template <class T>
void get(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(where + "." + key + " has the wrong type");
  }
}

void positive(double v, const char* name) {
  if (!(v > 0) || !std::isfinite(v)) bad(std::string(name) + " must be positive");
}

std::string tdir(size_t k) { return "t" + std::to_string(k); }

void write_json(const fs::path& p, const json& j) {
  std::ofstream os(p);
  if (!os) throw Error(Stage::io, "cannot open " + p.string() + " for writing");
  os << j.dump(2) << "\n";
  if (!os) throw Error(Stage::io, "write to " + p.string() + " failed");
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(Stage::io, "cannot create output directory " + p.string() + ": " + ec.message());
}

json conservation_json(const direct::ConservationReport& r) {
  return {{"sum_b_drift", r.sum_b_drift},
          {"h_reg_drift", r.h_reg_drift},
          {"spectrum_drift", r.spectrum_drift},
          {"tracked_eigenvalues", r.tracked_eigenvalues},
          {"gronwall_margin", r.gronwall_margin},
          {"gronwall_C", r.gronwall_C}};
}

class Timer {
 public:
  explicit Timer(std::map<std::string, double>& sink) : sink_(sink) {}
  template <class F>
  auto operator()(const std::string& name, F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    struct Add {
      std::map<std::string, double>& s;
      std::string n;
      std::chrono::steady_clock::time_point t0;
      ~Add() { s[n] += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
    } add{sink_, name, t0};
    return f();
  }

 private:
  std::map<std::string, double>& sink_;
};

}  // namespace

forward::ForwardOptions RunConfig::forward_options() const {
  forward::ForwardOptions o;
  o.grid_size = M;
  o.delta_pole = delta_pole;
  o.delta_edge = delta_edge;
  o.eps_loc = eps_loc;
  o.eps_trunc = eps_trunc;
  o.contour_rho = contour_rho;
  o.contour_nodes = contour_nodes;
  return o;
}

inverse::InverseOptions RunConfig::inverse_options() const {
  inverse::InverseOptions o;
  o.n_min = profile.n_min;
  o.n_max = profile.n_max;
  o.K_trunc = K_trunc;
  o.N_right = N_right;
  o.resolution_tol = resolution_tol;
  o.eps_trunc = eps_trunc;
  o.scan.eps_w = eps_w;
  return o;
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  check_keys(j, "config", {"mode", "output", "profile", "grid", "inverse", "times", "dt", "tolerances", "compare", "debug"});
  get(j, "mode", c.mode, "config");
  std::string out = c.output.string();
  get(j, "output", out, "config");
  c.output = out;
  get(j, "dt", c.dt, "config");
  get(j, "debug", c.debug, "config");
  get(j, "times", c.times, "config");
  if (j.contains("profile")) {
    const auto& p = j["profile"];
    check_keys(p, "profile", {"n_min", "n_max", "left_decay_rate", "amp_left", "right_decay_rate", "amp_right", "bump",
                              "bump_decay", "background"});
    auto& s = c.profile;
    get(p, "n_min", s.n_min, "profile");
    get(p, "n_max", s.n_max, "profile");
    get(p, "left_decay_rate", s.left_decay_rate, "profile");
    get(p, "amp_left", s.amp_left, "profile");
    get(p, "right_decay_rate", s.right_decay_rate, "profile");
    get(p, "amp_right", s.amp_right, "profile");
    get(p, "bump", s.bump, "profile");
    get(p, "bump_decay", s.bump_decay, "profile");
    get(p, "background", s.background, "profile");
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    check_keys(g, "grid", {"M", "contour_rho", "contour_nodes"});
    get(g, "M", c.M, "grid");
    get(g, "contour_rho", c.contour_rho, "grid");
    get(g, "contour_nodes", c.contour_nodes, "grid");
  }
  if (j.contains("inverse")) {
    const auto& v = j["inverse"];
    check_keys(v, "inverse", {"K_trunc", "N_right", "resolution_tol"});
    get(v, "K_trunc", c.K_trunc, "inverse");
    get(v, "N_right", c.N_right, "inverse");
    get(v, "resolution_tol", c.resolution_tol, "inverse");
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    check_keys(t, "tolerances", {"eps_trunc", "delta_pole", "delta_edge", "eps_w", "eps_loc"});
    get(t, "eps_trunc", c.eps_trunc, "tolerances");
    get(t, "delta_pole", c.delta_pole, "tolerances");
    get(t, "delta_edge", c.delta_edge, "tolerances");
    get(t, "eps_w", c.eps_w, "tolerances");
    get(t, "eps_loc", c.eps_loc, "tolerances");
  }
  if (j.contains("compare")) {
    const auto& v = j["compare"];
    check_keys(v, "compare", {"left_from", "right_depth"});
    get(v, "left_from", c.left_from, "compare");
    get(v, "right_depth", c.right_depth, "compare");
  }

  if (!kModes.count(c.mode)) bad("unknown mode '" + c.mode + "'");
  positive(c.dt, "dt");
  positive(c.eps_trunc, "eps_trunc");
  positive(c.delta_pole, "delta_pole");
  if (c.delta_pole >= 0.1) bad("tolerances.delta_pole must be below 0.1");
  if (c.profile.background != "steplike" && c.profile.background != "free")
    bad("profile.background must be \"steplike\" or \"free\"");
  positive(c.delta_edge, "delta_edge");
  positive(c.eps_w, "eps_w");
  positive(c.eps_loc, "eps_loc");
  positive(c.resolution_tol, "resolution_tol");
  if (c.M < 8) bad("grid.M must be at least 8");
  if (c.contour_nodes < 0) bad("grid.contour_nodes must be nonnegative");
  if (c.contour_nodes > 0 && !(c.contour_rho > 0 && c.contour_rho < 1)) bad("grid.contour_rho must lie in (0, 1)");
  if (c.K_trunc < 0) bad("inverse.K_trunc must be nonnegative (0 selects the default rule)");
  if (c.N_right < 1) bad("inverse.N_right must be positive");
  for (size_t i = 0; i < c.times.size(); ++i) {
    if (!(c.times[i] >= 0) || !std::isfinite(c.times[i])) bad("times must be nonnegative");
    if (i && c.times[i] < c.times[i - 1]) bad("times must be sorted");
  }
  if (!(c.profile.n_min < 0 && c.profile.n_max > 0)) bad("profile window must satisfy n_min < 0 < n_max");
  if (c.left_from >= 0 || c.left_from < c.profile.n_min) bad("compare.left_from must lie in [n_min, -1]");
  if (c.right_depth < 0 || c.right_depth > c.profile.n_max + 1) bad("compare.right_depth out of range");
  c.profile.eps_trunc = c.eps_trunc;
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(Stage::config, "cannot read config " + path.string());
  json j;
  try {
    j = json::parse(is, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw Error(Stage::config, "config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  const auto& p = c.profile;
  return {{"mode", c.mode},
          {"output", c.output.string()},
          {"profile",
           {{"n_min", p.n_min},
            {"n_max", p.n_max},
            {"left_decay_rate", p.left_decay_rate},
            {"amp_left", p.amp_left},
            {"right_decay_rate", p.right_decay_rate},
            {"amp_right", p.amp_right},
            {"bump", p.bump},
            {"bump_decay", p.bump_decay},
            {"background", p.background}}},
          {"grid", {{"M", c.M}, {"contour_rho", c.contour_rho}, {"contour_nodes", c.contour_nodes}}},
          {"inverse", {{"K_trunc", c.K_trunc}, {"N_right", c.N_right}, {"resolution_tol", c.resolution_tol}}},
          {"times", c.times},
          {"dt", c.dt},
          {"tolerances",
           {{"eps_trunc", c.eps_trunc},
            {"delta_pole", c.delta_pole},
            {"delta_edge", c.delta_edge},
            {"eps_w", c.eps_w},
            {"eps_loc", c.eps_loc}}},
          {"compare", {{"left_from", c.left_from}, {"right_depth", c.right_depth}}},
          {"debug", c.debug}};
}

StateErrors state_errors(const lattice::LatticeState& rec, const lattice::LatticeState& ref, int left_from,
                         int right_depth) {
  StateErrors e;
  for (int n = left_from; n < 0; ++n)
    e.left = std::max(e.left, std::abs(rec.a_at(n) - ref.a_at(n)) + std::abs(rec.b_at(n) - ref.b_at(n)));
  for (int n = 0; n < right_depth; ++n) {
    double d = std::max(std::abs(rec.a_at(n) - ref.a_at(n)), std::abs(rec.b_at(n) - ref.b_at(n)));
    e.right_per_n.push_back(d);
    e.right = std::max(e.right, d);
  }
  return e;
}

EvolutionErrors evolution_errors(const forward::ScatteringData& evolved, const lattice::LatticeState& state_t,
                                 const lattice::LatticeState& state_0, const RunConfig& cfg) {
  EvolutionErrors e;
  std::vector<double> phi;
  for (const auto* s : {&state_0, &state_t})
    for (double l : forward::l0_spectrum(*s).lambda)
      if (std::abs(l) < 2.0) phi.push_back(std::acos(l / 2.0));
  const double guard = 10.0 * cfg.delta_pole;
  for (size_t i = 0; i < evolved.grid.size(); ++i) {
    double th = evolved.grid.theta[i];
    bool skip = false;
    for (double p : phi) skip = skip || std::abs(th - p) < guard;
    if (skip) {
      ++e.R_excluded;
      continue;
    }
    auto T = forward::transition_coefficient(state_t, th);
    e.R_max = std::max(e.R_max, std::abs(T.R - evolved.R[i]));
    ++e.R_nodes;
  }
  auto fo = cfg.forward_options();
  auto bs = forward::bound_states(state_t, fo.delta_edge, fo.eps_loc);
  if (bs.size() != evolved.bound_states.size())
    throw Error(Stage::flow, "number of bound states changed along the trajectory");
  for (const auto& b : bs) {
    auto nb = forward::norming_constants(state_t, b, fo.ref_cells, fo.fit_tol);
    const forward::BoundState* best = nullptr;
    for (const auto& x : evolved.bound_states)
      if (!best || std::abs(x.mu - nb.mu) < std::abs(best->mu - nb.mu)) best = &x;
    e.M_rel = std::max(e.M_rel, std::abs(best->M_inv_sq - nb.M_inv_sq) / nb.M_inv_sq);
  }
  return e;
}

RoundtripReport roundtrip(const RunConfig& cfg) {
  RoundtripReport r;
  r.input = lattice::make_step_profile(cfg.profile);
  r.data = forward::full_forward(r.input, cfg.forward_options());
  r.inverse = inverse::full_inverse(r.data, cfg.inverse_options());
  r.errors = state_errors(r.inverse.state, r.input, cfg.left_from, cfg.right_depth);
  return r;
}

direct::Trajectory simulate(const lattice::LatticeState& s0, const std::vector<double>& times, double dt,
                            std::vector<size_t>& snapshot_index) {
  direct::Trajectory traj;
  traj.dt = dt;
  traj.scheme = "rk4";
  traj.states.push_back(s0);
  snapshot_index.clear();
  for (double t : times) {
    const auto& last = traj.states.back();
    double span = t - last.t;
    if (span > 0) {
      auto seg = direct::integrate_rk4(last, span, dt);
      traj.states.insert(traj.states.end(), seg.states.begin() + 1, seg.states.end());
      traj.states.back().t = t;
    }
    snapshot_index.push_back(traj.states.size() - 1);
  }
  return traj;
}

namespace {

struct CompareRun {
  CompareReport report;
  direct::Trajectory traj;
  std::vector<size_t> idx;
  forward::ScatteringData data0;
  std::vector<forward::ScatteringData> evolved;
  std::vector<inverse::InverseResult> inverse;
};

CompareRun compare_impl(const RunConfig& cfg, std::map<std::string, double>* timings) {
  std::map<std::string, double> local;
  Timer time(timings ? *timings : local);
  CompareRun run;
  auto s0 = time("profile", [&] { return lattice::make_step_profile(cfg.profile); });
  run.traj = time("simulate", [&] { return simulate(s0, cfg.times, cfg.dt, run.idx); });
  run.data0 = time("scatter", [&] { return forward::full_forward(s0, cfg.forward_options()); });
  for (size_t k = 0; k < cfg.times.size(); ++k) {
    double t = cfg.times[k];
    run.evolved.push_back(time("evolve", [&] { return flow::evolve(run.data0, t); }));
    run.inverse.push_back(
        time("reconstruct", [&] { return inverse::full_inverse(run.evolved.back(), cfg.inverse_options()); }));
    const auto& oracle = run.traj.states[run.idx[k]];
    CompareEntry e;
    e.t = t;
    e.errors = state_errors(run.inverse.back().state, oracle, cfg.left_from, cfg.right_depth);
    e.right_depth_resolved = run.inverse.back().right_depth;
    if (run.idx[k] > 0) {
      direct::Trajectory part;
      part.dt = cfg.dt;
      part.scheme = run.traj.scheme;
      part.states.assign(run.traj.states.begin(), run.traj.states.begin() + static_cast<long>(run.idx[k]) + 1);
      e.conservation = time("conservation", [&] { return direct::conservation_report(part, cfg.delta_edge, cfg.eps_loc); });
    }
    e.evolution = time("evolution_check", [&] { return evolution_errors(run.evolved.back(), oracle, s0, cfg); });
    run.report.entries.push_back(e);
  }
  return run;
}

}  // namespace

CompareReport compare(const RunConfig& cfg) { return compare_impl(cfg, nullptr).report; }

json to_json(const CompareReport& r) {
  json arr = json::array();
  for (const auto& e : r.entries) {
    arr.push_back({{"t", e.t},
                   {"left_error", e.errors.left},
                   {"right_error", e.errors.right},
                   {"right_error_per_n", e.errors.right_per_n},
                   {"right_depth_resolved", e.right_depth_resolved},
                   {"conservation", conservation_json(e.conservation)},
                   {"R_evolution_error", e.evolution.R_max},
                   {"R_nodes_compared", e.evolution.R_nodes},
                   {"R_nodes_excluded", e.evolution.R_excluded},
                   {"M_evolution_rel_error", e.evolution.M_rel}});
  }
  return {{"entries", arr}};
}

void run(const RunConfig& cfg, const Progress& progress) {
  auto say = [&](const std::string& s) {
    if (progress) progress(s);
  };
  std::map<std::string, double> timings;
  Timer time(timings);
  const fs::path out = cfg.output;
  ensure_dir(out);
  std::vector<std::string> files;
  auto rel = [&](const fs::path& p) {
    files.push_back(fs::relative(p, out).generic_string());
    return p;
  };

  if (cfg.mode == "compare") {
    say("compare: simulate, scatter, evolve and reconstruct at " + std::to_string(cfg.times.size()) + " times");
    auto r = compare_impl(cfg, &timings);
    io::write_state_csv(rel(out / "state.csv"), r.traj.states.front());
    io::write_scattering(out, r.data0);
    files.insert(files.end(), {"reflection.csv", "bound_states.csv"});
    if (!r.data0.contour.empty()) files.push_back("contour.csv");
    for (size_t k = 0; k < cfg.times.size(); ++k) {
      auto d = out / tdir(k);
      io::write_state_csv(rel(d / "state.csv"), r.inverse[k].state);
      io::write_state_csv(rel(d / "oracle_state.csv"), r.traj.states[r.idx[k]]);
      io::write_measure_csv(rel(d / "measure.csv"), r.inverse[k].scan.measure);
      if (cfg.debug) io::write_kernel_csv(rel(d / "kernel.csv"), r.inverse[k].kernel);
    }
    write_json(rel(out / "compare.json"), to_json(r.report));
  } else {
    auto s0 = time("profile", [&] { return lattice::make_step_profile(cfg.profile); });
    io::write_state_csv(rel(out / "state.csv"), s0);

    if (cfg.mode == "simulate") {
      say("simulate: RK4 with dt = " + io::fmt(cfg.dt));
      std::vector<size_t> idx;
      auto traj = time("simulate", [&] { return simulate(s0, cfg.times, cfg.dt, idx); });
      json snaps = json::array();
      for (size_t k = 0; k < idx.size(); ++k) {
        auto p = out / tdir(k) / "state.csv";
        io::write_state_csv(rel(p), traj.states[idx[k]]);
        snaps.push_back({{"t", cfg.times[k]}, {"file", fs::relative(p, out).generic_string()}});
      }
      write_json(rel(out / "trajectory.json"), {{"scheme", traj.scheme}, {"dt", traj.dt}, {"snapshots", snaps}});
      if (traj.states.size() > 1) {
        auto rep = time("conservation", [&] { return direct::conservation_report(traj, cfg.delta_edge, cfg.eps_loc); });
        write_json(rel(out / "conservation.json"), conservation_json(rep));
      }
    } else {
      say("scatter: M = " + std::to_string(cfg.M));
      auto d0 = time("scatter", [&] { return forward::full_forward(s0, cfg.forward_options()); });
      io::write_scattering(out, d0);
      files.insert(files.end(), {"reflection.csv", "bound_states.csv"});
      if (!d0.contour.empty()) files.push_back("contour.csv");

      if (cfg.mode == "roundtrip") {
        say("roundtrip: reconstruct at t = 0");
        auto inv = time("reconstruct", [&] { return inverse::full_inverse(d0, cfg.inverse_options()); });
        auto err = state_errors(inv.state, s0, cfg.left_from, cfg.right_depth);
        io::write_state_csv(rel(out / "roundtrip" / "state.csv"), inv.state);
        io::write_measure_csv(rel(out / "roundtrip" / "measure.csv"), inv.scan.measure);
        if (cfg.debug) io::write_kernel_csv(rel(out / "roundtrip" / "kernel.csv"), inv.kernel);
        write_json(rel(out / "roundtrip.json"), {{"left_error", err.left},
                                                 {"left_range", {cfg.left_from, -1}},
                                                 {"right_error", err.right},
                                                 {"right_error_per_n", err.right_per_n},
                                                 {"right_depth_resolved", inv.right_depth},
                                                 {"atoms", inv.scan.measure.size()},
                                                 {"kernel_max_imag", inv.kernel.max_imag}});
      } else if (cfg.mode == "evolve" || cfg.mode == "reconstruct") {
        for (size_t k = 0; k < cfg.times.size(); ++k) {
          double t = cfg.times[k];
          say(cfg.mode + ": t = " + io::fmt(t));
          auto d = out / tdir(k);
          auto dt = time("evolve", [&] { return flow::evolve(d0, t); });
          io::write_scattering(d, dt);
          for (const char* f : {"reflection.csv", "bound_states.csv"}) files.push_back(tdir(k) + "/" + f);
          if (!dt.contour.empty()) files.push_back(tdir(k) + "/contour.csv");
          if (cfg.mode == "reconstruct") {
            auto inv = time("reconstruct", [&] { return inverse::full_inverse(dt, cfg.inverse_options()); });
            io::write_state_csv(rel(d / "state.csv"), inv.state);
            io::write_measure_csv(rel(d / "measure.csv"), inv.scan.measure);
            if (cfg.debug) io::write_kernel_csv(rel(d / "kernel.csv"), inv.kernel);
          }
        }
      }
    }
  }

  json manifest{{"config", to_json(cfg)},
                {"versions",
                 {{"toda_ist", "0.1.0"},
                  {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)},
                  {"compiler", __VERSION__}}},
                {"timings_s", timings},
                {"files", files}};
  write_json(out / "manifest.json", manifest);
  say("wrote " + std::to_string(files.size() + 1) + " files to " + out.string());
}

}  // namespace toda::pipeline
