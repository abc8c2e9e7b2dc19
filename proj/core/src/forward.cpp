#include "toda/forward.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

#include "toda/direct.hpp"
#include "toda/error.hpp"
#include "tridiag.hpp"

namespace toda::forward {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kRescale = 1e100;

void require_window(const LatticeState& s) {
  if (!(s.n_min <= -2 && s.n_max >= 0))
    throw Error(Stage::forward, "window must contain n = -2..0 for forward scattering");
  if (s.a.size() != static_cast<size_t>(s.size()) || s.b.size() != s.a.size())
    throw Error(Stage::forward, "state storage does not match its window");
}

}  // namespace

double SpectralMeasure::total() const { return std::accumulate(w.begin(), w.end(), 0.0); }

cplx z_of_lambda(cplx lambda) {
  if (lambda.imag() == 0.0 && std::abs(std::abs(lambda.real()) - 2.0) == 0.0)
    throw Error(Stage::forward, "z(lambda) is singular at the band edges lambda = +-2");
  if (lambda.imag() == 0.0 && std::abs(lambda.real()) < 2.0) {
    // lower-side limit of the cut, matching the grid convention z = e^{i theta}
    return std::polar(1.0, std::acos(lambda.real() / 2.0));
  }
  cplx s = std::sqrt(lambda * lambda / 4.0 - 1.0);
  cplx z1 = lambda / 2.0 - s, z2 = lambda / 2.0 + s;
  // the smaller root, computed stably from z1 z2 = 1
  cplx big = std::abs(z1) > std::abs(z2) ? z1 : z2;
  return 1.0 / big;
}

CutGrid make_cut_grid(int M, const std::vector<double>& avoid_lambda, double delta_pole) {
  if (M < 4) throw Error(Stage::config, "cut grid needs at least 4 nodes");
  if (!(delta_pole > 0) || delta_pole >= 0.1)
    throw Error(Stage::config, "delta_pole must be positive and small");
  CutGrid g;
  g.theta.resize(static_cast<size_t>(M));
  for (int j = 1; j <= M; ++j) g.theta[static_cast<size_t>(j - 1)] = kPi * (j - 0.5) / M;

  std::vector<double> phi;
  for (double l : avoid_lambda)
    if (std::abs(l) < 2.0) phi.push_back(std::acos(std::clamp(l / 2.0, -1.0, 1.0)));
  if (phi.empty()) return g;
  std::sort(phi.begin(), phi.end());

  // merged forbidden intervals (phi - delta, phi + delta)
  std::vector<std::pair<double, double>> bad;
  for (double p : phi) {
    if (!bad.empty() && p - delta_pole <= bad.back().second)
      bad.back().second = p + delta_pole;
    else
      bad.emplace_back(p - delta_pole, p + delta_pole);
  }

  // each node inside an interval goes to the nearer end; collisions are
  // spread outward in small steps so nodes stay distinct
  const double step = delta_pole / 16.0;
  for (const auto& [lo, hi] : bad) {
    std::vector<size_t> inside;
    for (size_t i = 0; i < g.theta.size(); ++i)
      if (g.theta[i] > lo && g.theta[i] < hi) inside.push_back(i);
    if (inside.empty()) continue;
    double mid = 0.5 * (lo + hi);
    std::vector<size_t> left, right;
    for (size_t i : inside) (g.theta[i] < mid ? left : right).push_back(i);
    if (lo <= 0.0) right.insert(right.begin(), left.begin(), left.end()), left.clear();
    if (hi >= kPi) left.insert(left.end(), right.begin(), right.end()), right.clear();
    // left movers pile below lo in order, right movers above hi
    for (size_t k = 0; k < left.size(); ++k)
      g.theta[left[left.size() - 1 - k]] = lo - step * static_cast<double>(k);
    for (size_t k = 0; k < right.size(); ++k) g.theta[right[k]] = hi + step * static_cast<double>(k);
  }
  std::sort(g.theta.begin(), g.theta.end());
  for (size_t i = 0; i < g.theta.size(); ++i) {
    double t = g.theta[i];
    bool ok = t > 0.0 && t < kPi && (i == 0 || t > g.theta[i - 1]);
    for (double p : phi) ok = ok && std::abs(t - p) >= delta_pole * (1.0 - 1e-9);
    if (!ok)
      throw Error(Stage::forward,
                  "cannot place cut nodes away from the half-line eigenvalues; lower delta_pole or raise M");
  }
  return g;
}

PolynomialSolutions polynomial_solutions(const LatticeState& s, double lambda) {
  require_window(s);
  PolynomialSolutions out;
  // P_0 = 1, P_1 = (lambda - b_0)/a_0; Q_0 = 0, Q_1 = 1/a_0
  double p_prev = 0.0, p = 1.0, q_prev = -1.0, q = 0.0;
  double a_prev = 1.0;  // the a_{-1} = 1 convention of the half-line recurrence
  for (int n = 0; n <= s.n_max; ++n) {
    out.P.push_back(p);
    out.Q.push_back(q);
    if (n == s.n_max) break;
    double an = s.a_at(n);
    double pn = ((lambda - s.b_at(n)) * p - (n == 0 ? 0.0 : a_prev) * p_prev) / an;
    double qn = ((lambda - s.b_at(n)) * q - a_prev * q_prev) / an;
    if (!std::isfinite(pn) || !std::isfinite(qn) || std::abs(pn) > 1e250 || std::abs(qn) > 1e250) break;
    p_prev = p, p = pn, q_prev = q, q = qn, a_prev = an;
  }
  return out;
}

JostValues jost_from_left(const LatticeState& s, cplx z, int ref_cells) {
  require_window(s);
  if (z == 0.0) throw Error(Stage::forward, "Jost solution requested at z = 0");
  cplx lambda = z + 1.0 / z;
  JostValues J;
  J.n_min = s.n_min;
  J.ref_begin = s.n_min;
  J.ref_end = std::min(s.n_min + std::max(ref_cells, 2) - 1, -1);
  J.f.resize(static_cast<size_t>(1 - s.n_min));
  J.f[0] = std::pow(z, -s.n_min);
  J.f[1] = std::pow(z, -(s.n_min + 1));
  for (int n = s.n_min + 1; n < 0; ++n) {
    size_t i = static_cast<size_t>(n - s.n_min);
    J.f[i + 1] = ((lambda - s.b_at(n)) * J.f[i] - s.a_at(n - 1) * J.f[i - 1]) / s.a_at(n);
  }
  return J;
}

WeylSolution weyl_solution_right(const LatticeState& s, cplx lambda, double pole_tol, int n_lo) {
  require_window(s);
  n_lo = std::max(n_lo, s.n_min);
  if (n_lo > -1) n_lo = -1;
  WeylSolution W;
  W.n_lo = n_lo;
  W.psi.assign(static_cast<size_t>(s.n_max - n_lo + 1), cplx(0.0));
  auto P = [&](int n) -> cplx& { return W.psi[static_cast<size_t>(n - n_lo)]; };
  P(s.n_max) = 1.0;
  cplx next = 0.0;  // psi_{n_max+1}
  for (int n = s.n_max; n > n_lo; --n) {
    cplx v = ((lambda - s.b_at(n)) * P(n) - s.a_at(n) * next) / s.a_at(n - 1);
    next = P(n);
    P(n - 1) = v;
    double m = std::abs(v);
    if (!std::isfinite(m)) throw Error(Stage::forward, "Weyl solution overflowed");
    if (m > kRescale) {
      for (int k = n - 1; k <= s.n_max; ++k) P(k) /= m;
      next /= m;
    }
  }
  if (pole_tol > 0.0) {
    double lhs = s.a_at(-1) * std::abs(P(-1));
    if (lhs <= pole_tol * std::abs(P(0))) {
      std::ostringstream os;
      os << "lambda = " << lambda << " is within tolerance of a pole of the half-line Weyl function";
      throw Error(Stage::forward, os.str());
    }
  }
  return W;
}

Transition transition_coefficient(const LatticeState& s, double theta, double unimodular_tol) {
  if (!(theta > 0.0 && theta < kPi)) throw Error(Stage::forward, "cut node must satisfy 0 < theta < pi");
  cplx z = std::polar(1.0, theta);
  auto J = jost_from_left(s, z);
  auto W = weyl_solution_right(s, cplx(2.0 * std::cos(theta), 0.0));
  cplx fm = J.at(-1), f0 = J.at(0);
  cplx gm = std::conj(fm), g0 = std::conj(f0);
  cplx pm = W.at(-1), p0 = W.at(0);
  // [[gm, fm], [g0, f0]] (a, abar) = (pm, p0)
  cplx det = gm * f0 - fm * g0;
  if (std::abs(det) <= 1e-14 * std::abs(fm) * std::abs(f0))
    throw Error(Stage::forward, "Jost solutions are linearly dependent at this node");
  Transition T;
  T.a = (pm * f0 - fm * p0) / det;
  T.abar = (gm * p0 - g0 * pm) / det;
  T.R = T.abar / T.a;
  T.conj_residual = std::abs(T.abar - std::conj(T.a)) / std::abs(T.a);
  if (!std::isfinite(std::abs(T.R)) || std::abs(std::abs(T.R) - 1.0) > unimodular_tol) {
    std::ostringstream os;
    os << "|R| - 1 = " << std::abs(T.R) - 1.0 << " at theta = " << theta;
    throw Error(Stage::forward, os.str());
  }
  return T;
}

cplx reflection_at(const LatticeState& s, cplx z) {
  if (std::abs(std::abs(z) - 1.0) < 1e-12)
    throw Error(Stage::forward, "reflection_at is for points off the unit circle; use the cut solver");
  cplx lambda = z + 1.0 / z;
  auto f = jost_from_left(s, z);
  auto g = jost_from_left(s, 1.0 / z);
  auto psi = weyl_solution_right(s, lambda, 0.0);
  auto wr = [&](const JostValues& u) { return u.at(-1) * psi.at(0) - u.at(0) * psi.at(-1); };
  cplx den = wr(f);
  if (den == 0.0) throw Error(Stage::forward, "reflection_at hit a zero of the transmission denominator");
  return -wr(g) / den;
}

std::vector<BoundState> bound_states(const LatticeState& s, double delta_edge, double eps_loc) {
  require_window(s);
  std::vector<BoundState> out;
  for (double mu : direct::discrete_spectrum(s, delta_edge, eps_loc)) {
    BoundState b;
    b.mu = mu;
    b.z = z_of_lambda(cplx(mu, 0.0)).real();
    out.push_back(b);
  }
  return out;
}

BoundState norming_constants(const LatticeState& s, const BoundState& bound, int ref_cells, double fit_tol) {
  require_window(s);
  // the eigenvector is f for n <= 0 and a multiple of psi for n >= 0; they
  // match at n = -1 only at the true eigenvalue
  auto mismatch = [&](double mu) {
    double z = z_of_lambda(cplx(mu, 0.0)).real();
    auto J = jost_from_left(s, z, ref_cells);
    auto W = weyl_solution_right(s, mu, 0.0);
    double r = W.at(-1).real() / W.at(0).real();
    return J.at(-1).real() - J.at(0).real() * r;
  };

  double mu = bound.mu;
  {
    // a few secant steps; the matrix eigenvalue is already close
    double x0 = mu, x1 = mu * (1.0 + 1e-9);
    double g0 = mismatch(x0), g1 = mismatch(x1);
    for (int it = 0; it < 8 && g1 != g0; ++it) {
      double x2 = x1 - g1 * (x1 - x0) / (g1 - g0);
      if (!std::isfinite(x2) || std::abs(x2 - bound.mu) > 1e-6 || std::abs(x2) <= 2.0) break;
      x0 = x1, g0 = g1, x1 = x2, g1 = mismatch(x1);
      if (std::abs(x1 - x0) < 1e-15 * std::abs(x1)) break;
    }
    if (std::abs(g1) < std::abs(mismatch(mu))) mu = x1;
  }

  BoundState out = bound;
  out.mu = mu;
  out.z = z_of_lambda(cplx(mu, 0.0)).real();
  auto J = jost_from_left(s, out.z, ref_cells);
  auto W = weyl_solution_right(s, mu, 0.0);

  std::vector<double> v(static_cast<size_t>(s.size()));
  double f0 = J.at(0).real(), p0 = W.at(0).real();
  for (int n = s.n_min; n <= s.n_max; ++n)
    v[static_cast<size_t>(n - s.n_min)] = n <= 0 ? J.at(n).real() : f0 * W.at(n).real() / p0;
  double fm = J.at(-1).real();
  out.fit_residual = std::abs(fm - f0 * W.at(-1).real() / p0) / std::max(std::abs(fm), 1e-300);
  if (!(out.fit_residual <= fit_tol)) {
    std::ostringstream os;
    os << "eigenvector at mu = " << mu << " does not match the left Jost solution (residual "
       << out.fit_residual << ")";
    throw Error(Stage::forward, os.str());
  }

  // unit eigenvector, then the scale c that fits c v_n ~ z^{-n} on the deep left
  double nrm = 0.0;
  for (double x : v) nrm += x * x;
  nrm = std::sqrt(nrm);
  double num = 0.0, den = 0.0;
  for (int n = J.ref_begin; n <= J.ref_end; ++n) {
    double vn = v[static_cast<size_t>(n - s.n_min)] / nrm;
    num += vn * std::pow(out.z, -n);
    den += vn * vn;
  }
  double c = num / den;
  out.jost_norm_sq = c * c;
  out.M_inv_sq = 1.0 / out.jost_norm_sq;
  return out;
}

SpectralMeasure l0_spectrum(const LatticeState& s) {
  require_window(s);
  std::vector<double> d(s.b.begin() + s.idx(0), s.b.end());
  std::vector<double> e(s.a.begin() + s.idx(0), s.a.end() - 1);
  auto eig = detail::tridiag_eigen(d, e, true);
  SpectralMeasure m;
  m.lambda = eig.values;
  m.w.resize(eig.values.size());
  for (size_t k = 0; k < eig.values.size(); ++k) m.w[k] = eig.vectors[k][0] * eig.vectors[k][0];
  return m;
}

cplx weyl_m_from_measure(const SpectralMeasure& measure, cplx lambda, double pole_tol) {
  cplx m = 0.0;
  for (size_t k = 0; k < measure.size(); ++k) {
    cplx d = measure.lambda[k] - lambda;
    if (std::abs(d) <= pole_tol) throw Error(Stage::forward, "lambda coincides with an atom of the measure");
    m += measure.w[k] / d;
  }
  return m;
}

ScatteringData full_forward(const LatticeState& s, const ForwardOptions& opts) {
  require_window(s);
  if (!s.boundary.is_steplike())
    throw Error(Stage::forward, "forward scattering needs the steplike background (1,0) | (0,0)");
  auto rep = lattice::validate(s, opts.eps_trunc);
  if (!rep.ok()) throw Error(Stage::forward, "invalid state: " + rep.summary());

  ScatteringData out;
  out.t = s.t;
  auto l0 = l0_spectrum(s);
  out.grid = make_cut_grid(opts.grid_size, l0.lambda, opts.delta_pole);
  out.R.resize(out.grid.size());
  for (size_t i = 0; i < out.grid.size(); ++i)
    out.R[i] = transition_coefficient(s, out.grid.theta[i], opts.unimodular_tol).R;

  double zmax = 0.0;
  for (auto b : bound_states(s, opts.delta_edge, opts.eps_loc)) {
    out.bound_states.push_back(norming_constants(s, b, opts.ref_cells, opts.fit_tol));
    zmax = std::max(zmax, std::abs(out.bound_states.back().z));
  }

  if (opts.contour_rho > 0.0 && opts.contour_nodes > 0) {
    if (!(opts.contour_rho < 1.0)) throw Error(Stage::config, "contour radius must lie in (0, 1)");
    // keep the circle strictly between the bound-state z and the unit circle
    double rho = std::max(opts.contour_rho, 0.5 * (1.0 + zmax));
    out.contour.rho = rho;
    const int N = opts.contour_nodes;
    out.contour.theta.resize(static_cast<size_t>(N));
    out.contour.R.resize(static_cast<size_t>(N));
    for (int j = 0; j < N; ++j) {
      double th = 2.0 * kPi * (j + 0.5) / N;
      out.contour.theta[static_cast<size_t>(j)] = th;
      out.contour.R[static_cast<size_t>(j)] = reflection_at(s, std::polar(rho, th));
    }
  }
  return out;
}

}  // namespace toda::forward
