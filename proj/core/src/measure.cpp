#include "toda/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "toda/error.hpp"
#include "toda/rational.hpp"

namespace toda::inverse {

namespace {

// Stieltjes with full reorthogonalisation; stops early when the next
// off-diagonal would fall under the floor. Returns the number of (a, b) pairs.
int stieltjes(const SpectralMeasure& mu, int N, JacobiCoefficients& out) {
  const size_t P = mu.size();
  out.a.clear();
  out.b.clear();
  if (P == 0) return 0;
  double mass = mu.total();
  if (!(mass > 0)) throw Error(Stage::stieltjes, "measure has no positive mass");
  double scale = 0.0;
  for (double l : mu.lambda) scale = std::max(scale, std::abs(l));
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1.0);

  auto dot = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (size_t i = 0; i < P; ++i) s += mu.w[i] / mass * u[i] * v[i];
    return s;
  };
  std::vector<std::vector<double>> p;
  p.emplace_back(P, 1.0);
  std::vector<double> prev(P, 0.0);
  double a_prev = 0.0;
  for (int n = 0; n < N; ++n) {
    const auto& pn = p.back();
    std::vector<double> lp(P);
    for (size_t i = 0; i < P; ++i) lp[i] = mu.lambda[i] * pn[i];
    double bn = dot(lp, pn);
    std::vector<double> q(P);
    const auto& pm = n > 0 ? p[p.size() - 2] : prev;
    for (size_t i = 0; i < P; ++i) q[i] = lp[i] - bn * pn[i] - a_prev * pm[i];
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& pk : p) {
        double c = dot(q, pk);
        for (size_t i = 0; i < P; ++i) q[i] -= c * pk[i];
      }
    double an = std::sqrt(std::max(dot(q, q), 0.0));
    if (!(an > floor) || !std::isfinite(an)) break;
    out.b.push_back(bn);
    out.a.push_back(an);
    for (double& v : q) v /= an;
    p.push_back(std::move(q));
    a_prev = an;
  }
  {
    const auto& pn = p.back();
    double s = 0.0;
    for (size_t i = 0; i < P; ++i) s += mu.w[i] / mass * mu.lambda[i] * pn[i] * pn[i];
    out.b_tail = s;
  }
  return static_cast<int>(out.a.size());
}

SpectralMeasure fold_lightest(const ScanResult& scan, bool& ok) {
  const auto& m = scan.measure;
  ok = false;
  int k = -1;
  for (int i = 0; i < static_cast<int>(m.size()); ++i) {
    if (i == scan.balancing_index) continue;
    if (k < 0 || m.w[static_cast<size_t>(i)] < m.w[static_cast<size_t>(k)]) k = i;
  }
  SpectralMeasure out;
  if (k < 0) return out;
  double moved = m.w[static_cast<size_t>(k)];
  bool placed = false;
  for (int i = 0; i < static_cast<int>(m.size()); ++i) {
    if (i == k) continue;
    double w = m.w[static_cast<size_t>(i)];
    if (i == scan.balancing_index) w += moved, placed = true;
    out.lambda.push_back(m.lambda[static_cast<size_t>(i)]);
    out.w.push_back(w);
  }
  if (!placed) {
    // no balancing atom yet: it appears at 0 with the folded weight
    auto it = std::lower_bound(out.lambda.begin(), out.lambda.end(), 0.0);
    size_t at = static_cast<size_t>(it - out.lambda.begin());
    out.lambda.insert(it, 0.0);
    out.w.insert(out.w.begin() + static_cast<long>(at), moved);
  }
  ok = true;
  return out;
}

}  // namespace

ScanResult pole_scan(const std::vector<double>& lambda_nodes, const std::vector<double>& m_nodes,
                     const ScanOptions& opts) {
  if (lambda_nodes.size() != m_nodes.size() || lambda_nodes.size() < 8)
    throw Error(Stage::measure, "pole scan needs matching node and m samples");
  auto model = aaa_fit(lambda_nodes, m_nodes, opts.fit_tol, opts.max_terms);
  ScanResult res;
  res.fit_error = model.max_error;
  res.model_terms = static_cast<int>(model.terms());

  auto poles = model.poles();
  double lo = *std::min_element(lambda_nodes.begin(), lambda_nodes.end());
  double hi = *std::max_element(lambda_nodes.begin(), lambda_nodes.end());

  // scan points: refined cosine grid over the sampled range plus pairs
  // straddling every nearly real model pole
  std::vector<double> pts;
  const int S = opts.refine * static_cast<int>(lambda_nodes.size());
  double th_lo = std::acos(std::clamp(hi / 2.0, -1.0, 1.0));
  double th_hi = std::acos(std::clamp(lo / 2.0, -1.0, 1.0));
  for (int k = 0; k <= S; ++k) pts.push_back(2.0 * std::cos(th_hi - (th_hi - th_lo) * k / S));
  for (const auto& p : poles) {
    if (std::abs(p.imag()) > 1e-8 || p.real() <= lo || p.real() >= hi) continue;
    double h = 1e-10 * std::max(1.0, std::abs(p.real()));
    pts.push_back(p.real() - h);
    pts.push_back(p.real() + h);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  auto g = [&](double l) { return 1.0 / model(l); };
  std::vector<double> gv(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) gv[i] = g(pts[i]);

  auto near_gap = [&](double l) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& p : poles)
      if (std::abs(p - l) > 1e-9) d = std::min(d, std::abs(p - l));
    return d;
  };
  auto weight = [&](double l) {
    // symmetric average of (l - x) r(x) at x = l -+ h, Richardson in h^2
    double h = std::min(opts.richardson_h, 0.1 * near_gap(l));
    auto S1 = [&](double hh) { return 0.5 * hh * (model(l - hh) - model(l + hh)); };
    double s0 = S1(h), s1 = S1(h / 2), s2 = S1(h / 4);
    double r1 = (4 * s1 - s0) / 3, r2 = (4 * s2 - s1) / 3;
    return (16 * r2 - r1) / 15;
  };

  std::vector<double> lam, w;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!(gv[i] > 0 && gv[i + 1] < 0)) continue;
    double a = pts[i], b = pts[i + 1];
    while (b - a > opts.bisect_tol) {
      double c = 0.5 * (a + b);
      double gc = g(c);
      if (gc > 0)
        a = c;
      else if (gc < 0)
        b = c;
      else {
        a = b = c;
        break;
      }
    }
    double l = 0.5 * (a + b);
    double wl = weight(l);
    if (std::isfinite(wl) && wl >= opts.eps_w) {
      lam.push_back(l);
      w.push_back(wl);
    } else {
      res.dropped_lambda.push_back(l);
    }
  }

  double captured = std::accumulate(w.begin(), w.end(), 0.0);
  res.captured_mass = captured;
  if (captured < opts.min_captured) {
    std::ostringstream os;
    os << "pole scan captured mass " << captured << " < " << opts.min_captured
       << "; the reflection data do not resolve the half-line measure";
    throw Error(Stage::measure, os.str());
  }
  double deficit = 1.0 - captured;
  SpectralMeasure& mu = res.measure;
  if (deficit > opts.eps_w) {
    // remaining mass goes to one atom at 0 (merged with a resolved one there)
    bool merged = false;
    for (size_t i = 0; i < lam.size(); ++i)
      if (std::abs(lam[i]) < 1e-14) w[i] += deficit, merged = true, res.balancing_index = static_cast<int>(i);
    if (!merged) {
      auto it = std::lower_bound(lam.begin(), lam.end(), 0.0);
      size_t at = static_cast<size_t>(it - lam.begin());
      lam.insert(it, 0.0);
      w.insert(w.begin() + static_cast<long>(at), deficit);
      res.balancing_index = static_cast<int>(at);
    }
  } else {
    if (deficit < -1e-6) {
      std::ostringstream os;
      os << "pole scan weights sum to " << captured << " > 1";
      throw Error(Stage::measure, os.str());
    }
    for (double& x : w) x /= captured;
  }
  mu.lambda = std::move(lam);
  mu.w = std::move(w);
  return res;
}

JacobiCoefficients jacobi_from_measure(const SpectralMeasure& measure, int N) {
  if (N < 0) throw Error(Stage::stieltjes, "negative coefficient count");
  if (static_cast<size_t>(N) + 1 > measure.size()) {
    std::ostringstream os;
    os << "measure with " << measure.size() << " atoms cannot support " << N << " coefficients";
    throw Error(Stage::stieltjes, os.str());
  }
  for (size_t i = 0; i < measure.size(); ++i)
    if (!(measure.w[i] > 0) || !std::isfinite(measure.lambda[i]))
      throw Error(Stage::stieltjes, "measure atoms must have positive weight and finite location");
  JacobiCoefficients c;
  int got = stieltjes(measure, N, c);
  if (got < N) {
    std::ostringstream os;
    os << "off-diagonal a_" << got << " fell below the positivity floor; the measure cannot support " << N
       << " coefficients (degenerate or duplicated atoms)";
    throw Error(Stage::stieltjes, os.str());
  }
  return c;
}

int supported_depth(const SpectralMeasure& measure, int N_cap) {
  int N = std::min<int>(N_cap, static_cast<int>(measure.size()) - 1);
  if (N <= 0) return 0;
  JacobiCoefficients c;
  return stieltjes(measure, N, c);
}

int resolved_depth(const ScanResult& scan, int N_cap, double tol) {
  int N = supported_depth(scan.measure, N_cap);
  if (N <= 0) return 0;
  bool ok = false;
  auto folded = fold_lightest(scan, ok);
  if (!ok) return 0;
  int N2 = std::min(N, supported_depth(folded, N));
  auto c1 = jacobi_from_measure(scan.measure, N);
  auto c2 = jacobi_from_measure(folded, N2);
  for (int n = 0; n < N2; ++n) {
    size_t k = static_cast<size_t>(n);
    if (std::max(std::abs(c1.a[k] - c2.a[k]), std::abs(c1.b[k] - c2.b[k])) > tol) return n;
  }
  return N2;
}

}  // namespace toda::inverse
