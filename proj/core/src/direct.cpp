#include "toda/direct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "toda/error.hpp"
#include "tridiag.hpp"

namespace toda::direct {

namespace {

// rhs on raw storage; aL, bL, aR, bR are the ghosts
void rhs_raw(const Seq& a, const Seq& b, const lattice::BoundaryModel& bm, Seq& da, Seq& db) {
  const size_t N = a.size();
  da.resize(N);
  db.resize(N);
  for (size_t i = 0; i < N; ++i) {
    double bnext = i + 1 < N ? b[i + 1] : bm.right_b;
    double aprev = i > 0 ? a[i - 1] : bm.left_a;
    da[i] = 0.5 * a[i] * (bnext - b[i]);
    db[i] = a[i] * a[i] - aprev * aprev;
  }
}

void check_state(const Seq& a, const Seq& b, int n_min, double t) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
      std::ostringstream os;
      os << "non-finite value at n=" << n_min + static_cast<int>(i) << ", t=" << t;
      throw Error(Stage::integrate, os.str());
    }
    if (!(a[i] > 0)) {
      std::ostringstream os;
      os << "a_n <= 0 at n=" << n_min + static_cast<int>(i) << ", t=" << t << "; retry with a smaller dt";
      throw Error(Stage::integrate, os.str());
    }
  }
}

}  // namespace

std::pair<Seq, Seq> toda_rhs(const LatticeState& state) {
  Seq da, db;
  rhs_raw(state.a, state.b, state.boundary, da, db);
  return {da, db};
}

std::pair<Seq, Seq> substituted_rhs(int n_min, const Seq& x1, const Seq& x2) {
  if (x1.size() != x2.size()) throw std::invalid_argument("substituted_rhs: window mismatch");
  const size_t N = x1.size();
  Seq d1(N), d2(N);
  auto s = [](int n) { return n < 0 ? 1.0 : 0.0; };
  for (size_t i = 0; i < N; ++i) {
    int n = n_min + static_cast<int>(i);
    double x2next = i + 1 < N ? x2[i + 1] : 0.0;
    double x1prev = i > 0 ? x1[i - 1] : 0.0;  // ghost a = s on both sides
    double delta = n >= 0 ? 1.0 : 0.0;
    d1[i] = 0.5 * x1[i] * (x2next - x2[i]) + 0.5 * (1.0 - delta) * (x2next - x2[i]);
    double cur = x1[i] + s(n), prev = x1prev + s(n - 1);
    d2[i] = cur * cur - prev * prev;
  }
  return {d1, d2};
}

std::pair<Seq, Seq> substituted_rhs_printed(int n_min, const Seq& x1, const Seq& x2) {
  if (x1.size() != x2.size()) throw std::invalid_argument("substituted_rhs_printed: window mismatch");
  const size_t N = x1.size();
  Seq d1(N), d2(N);
  for (size_t i = 0; i < N; ++i) {
    int n = n_min + static_cast<int>(i);
    double x2next = i + 1 < N ? x2[i + 1] : 0.0;
    double x1prev = i > 0 ? x1[i - 1] : 0.0;
    double x2prev = i > 0 ? x2[i - 1] : 0.0;
    double delta = n >= 0 ? 1.0 : 0.0;
    d1[i] = 0.5 * x1[i] * (x2next - x2[i]) + 0.5 * (1.0 - delta) * (x2next - x2[i]);
    d2[i] = x1[i] * x1[i] - x1prev * x1prev + 2.0 * (1.0 - delta) * (x1[i] - x2prev);
  }
  return {d1, d2};
}

Trajectory integrate_rk4(const LatticeState& state, double T, double dt) {
  if (!(dt > 0) || !(T > 0)) throw Error(Stage::integrate, "integrate_rk4 needs T > 0 and dt > 0");
  check_state(state.a, state.b, state.n_min, state.t);
  Trajectory tr;
  tr.dt = dt;
  tr.scheme = "rk4";
  const auto& bm = state.boundary;
  Seq a = state.a, b = state.b;
  const size_t N = a.size();
  Seq k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b, ta(N), tb(N);
  double t = 0.0;
  tr.states.push_back(state);
  tr.states.back().t = state.t;
  const auto steps = static_cast<long>(std::ceil(T / dt - 1e-9));
  tr.states.reserve(static_cast<size_t>(steps) + 1);
  for (long k = 0; k < steps; ++k) {
    double h = std::min(dt, T - t);
    if (k == steps - 1) h = T - t;
    rhs_raw(a, b, bm, k1a, k1b);
    for (size_t i = 0; i < N; ++i) ta[i] = a[i] + 0.5 * h * k1a[i], tb[i] = b[i] + 0.5 * h * k1b[i];
    rhs_raw(ta, tb, bm, k2a, k2b);
    for (size_t i = 0; i < N; ++i) ta[i] = a[i] + 0.5 * h * k2a[i], tb[i] = b[i] + 0.5 * h * k2b[i];
    rhs_raw(ta, tb, bm, k3a, k3b);
    for (size_t i = 0; i < N; ++i) ta[i] = a[i] + h * k3a[i], tb[i] = b[i] + h * k3b[i];
    rhs_raw(ta, tb, bm, k4a, k4b);
    for (size_t i = 0; i < N; ++i) {
      a[i] += h / 6.0 * (k1a[i] + 2.0 * k2a[i] + 2.0 * k3a[i] + k4a[i]);
      b[i] += h / 6.0 * (k1b[i] + 2.0 * k2b[i] + 2.0 * k3b[i] + k4b[i]);
    }
    t = (k == steps - 1) ? T : t + h;
    check_state(a, b, state.n_min, state.t + t);
    LatticeState s(state.n_min, state.n_max, state.t + t, bm);
    s.a = a;
    s.b = b;
    tr.states.push_back(std::move(s));
  }
  return tr;
}

namespace {

// rhs of the substituted system for a general boundary model
void subst_rhs_raw(const Seq& x1, const Seq& x2, int n_min, const lattice::BoundaryModel& bm, Seq& d1, Seq& d2) {
  const size_t N = x1.size();
  d1.resize(N);
  d2.resize(N);
  for (size_t i = 0; i < N; ++i) {
    int n = n_min + static_cast<int>(i);
    double s = n < 0 ? bm.left_a : bm.right_a;
    double sp = n - 1 < 0 ? bm.left_a : bm.right_a;
    double x2next = i + 1 < N ? x2[i + 1] : bm.right_b;
    double aprev = i > 0 ? x1[i - 1] + sp : bm.left_a;
    double acur = x1[i] + s;
    d1[i] = 0.5 * acur * (x2next - x2[i]);
    d2[i] = acur * acur - aprev * aprev;
  }
}

double bdist(int n_min, const Seq& u1, const Seq& u2, const Seq& v1, const Seq& v2) {
  Seq d1(u1.size()), d2(u2.size());
  for (size_t i = 0; i < u1.size(); ++i) d1[i] = u1[i] - v1[i], d2[i] = u2[i] - v2[i];
  return lattice::b_norm(n_min, d1, d2).value;
}

}  // namespace

PicardResult integrate_picard(const LatticeState& state, double T, int n_iter, double quad_dt, double stop_tol) {
  if (n_iter < 1) throw Error(Stage::picard, "n_iter must be >= 1");
  if (!(T > 0) || !(quad_dt > 0)) throw Error(Stage::picard, "integrate_picard needs T > 0 and quad_dt > 0");
  const auto K = static_cast<size_t>(std::ceil(T / quad_dt - 1e-9));
  std::vector<double> times(K + 1);
  for (size_t k = 0; k <= K; ++k) times[k] = std::min(T, static_cast<double>(k) * quad_dt);
  times[K] = T;

  Seq x01, x02;
  lattice::to_substituted(state, x01, x02);
  std::vector<Seq> X1(K + 1, x01), X2(K + 1, x02);
  std::vector<Seq> G1(K + 1), G2(K + 1);

  PicardResult res;
  int growing = 0;
  for (int it = 0; it < n_iter; ++it) {
    for (size_t k = 0; k <= K; ++k) subst_rhs_raw(X1[k], X2[k], state.n_min, state.boundary, G1[k], G2[k]);
    std::vector<Seq> Y1(K + 1, x01), Y2(K + 1, x02);
    const size_t N = x01.size();
    Seq acc1(N, 0.0), acc2(N, 0.0);
    double dist = 0.0;
    for (size_t k = 1; k <= K; ++k) {
      double h = times[k] - times[k - 1];
      for (size_t i = 0; i < N; ++i) {
        acc1[i] += 0.5 * h * (G1[k - 1][i] + G1[k][i]);
        acc2[i] += 0.5 * h * (G2[k - 1][i] + G2[k][i]);
        Y1[k][i] = x01[i] + acc1[i];
        Y2[k][i] = x02[i] + acc2[i];
      }
      dist = std::max(dist, bdist(state.n_min, Y1[k], Y2[k], X1[k], X2[k]));
    }
    if (!std::isfinite(dist)) throw Error(Stage::picard, "Picard iterates became non-finite; use a smaller T");
    if (!res.distances.empty() && dist > res.distances.back()) {
      if (++growing >= 3) {
        std::ostringstream os;
        os << "Picard iteration not contracting (distance " << dist << " after " << it + 1
           << " iterations); use a smaller T";
        throw Error(Stage::picard, os.str());
      }
    } else {
      growing = 0;
    }
    res.distances.push_back(dist);
    X1.swap(Y1);
    X2.swap(Y2);
    res.iterations = it + 1;
    if (dist < stop_tol) break;
  }
  res.last_distance = res.distances.back();
  res.trajectory.dt = quad_dt;
  res.trajectory.scheme = "picard-trapezoid";
  for (size_t k = 0; k <= K; ++k)
    res.trajectory.states.push_back(lattice::from_substituted(state, X1[k], X2[k], state.t + times[k]));
  return res;
}

double sum_b(const LatticeState& s) {
  double acc = 0.0;
  for (double v : s.b) acc += v;
  return acc;
}

double regularized_energy(const LatticeState& s) {
  const auto& bm = s.boundary;
  double h = 0.0;
  for (int n = s.n_min; n <= s.n_max; ++n) {
    double a = s.a_at(n), b = s.b_at(n);
    double bg = n < 0 ? bm.left_a : bm.right_a;
    h += 0.5 * b * b + (a * a - bg * bg);
  }
  return h;
}

double sum_b_flux(const LatticeState& s) {
  return s.boundary.right_a * s.boundary.right_a - s.boundary.left_a * s.boundary.left_a;
}

std::vector<double> discrete_spectrum(const LatticeState& s, double delta_edge, double eps_loc) {
  std::vector<double> d = s.b, e(s.a.begin(), s.a.end() - 1);
  auto eig = detail::tridiag_eigen(d, e, true);
  std::vector<double> out;
  const size_t N = d.size();
  const size_t edge = std::min<size_t>(5, N);
  for (size_t k = 0; k < N; ++k) {
    double mu = eig.values[k];
    if (std::abs(mu) <= 2.0 + delta_edge) continue;
    const auto& v = eig.vectors[k];
    double left = 0.0, right = 0.0;
    for (size_t i = 0; i < edge; ++i) left += v[i] * v[i], right += v[N - 1 - i] * v[N - 1 - i];
    if (left < eps_loc && right < eps_loc) out.push_back(mu);
  }
  return out;
}

ConservationReport conservation_report(const Trajectory& traj, double delta_edge, double eps_loc) {
  if (traj.states.size() < 2) throw std::invalid_argument("conservation_report needs at least two states");
  const auto& s0 = traj.states.front();
  const auto& s1 = traj.states.back();
  ConservationReport rep;
  double T = s1.t - s0.t;
  rep.sum_b_drift = sum_b(s1) - sum_b(s0) - sum_b_flux(s0) * T;
  rep.h_reg_drift = regularized_energy(s1) - regularized_energy(s0);

  auto e0 = discrete_spectrum(s0, delta_edge, eps_loc);
  auto e1 = discrete_spectrum(s1, delta_edge, eps_loc);
  rep.tracked_eigenvalues = static_cast<int>(e0.size());
  // symmetric nearest-neighbour distance; an eigenvalue with no partner
  // counts as having drifted to the band edge
  auto one_way = [](const std::vector<double>& from, const std::vector<double>& to) {
    double d = 0.0;
    for (double mu : from) {
      double best = std::numeric_limits<double>::infinity();
      for (double nu : to) best = std::min(best, std::abs(mu - nu));
      if (!std::isfinite(best)) best = std::abs(mu) - 2.0;
      d = std::max(d, best);
    }
    return d;
  };
  rep.spectrum_drift = std::max(one_way(e0, e1), one_way(e1, e0));

  // Gronwall monitor with C taken as the observed sup over the trajectory
  double C = 0.0;
  std::vector<double> x1, x2;
  std::vector<double> norms;
  norms.reserve(traj.states.size());
  for (const auto& s : traj.states) {
    lattice::to_substituted(s, x1, x2);
    for (size_t i = 0; i < x1.size(); ++i) C = std::max(C, std::abs(x1[i]) + std::abs(x2[i]));
    norms.push_back(lattice::b_norm(s.n_min, x1, x2).value);
  }
  rep.gronwall_C = C;
  double margin = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < traj.states.size(); ++k) {
    double t = traj.states[k].t - s0.t;
    margin = std::min(margin, 2.0 * norms.front() * std::exp((4.0 * C + 4.0) * t) - norms[k]);
  }
  rep.gronwall_margin = margin;
  return rep;
}

}  // namespace toda::direct
