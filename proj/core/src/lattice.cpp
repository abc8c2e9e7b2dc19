#include "toda/lattice.hpp"

#include <cmath>
#include <sstream>

#include "toda/error.hpp"

namespace toda::lattice {

LatticeState::LatticeState(int nmin, int nmax, double time, BoundaryModel bm)
    : t(time), n_min(nmin), n_max(nmax), boundary(bm) {
  if (nmax < nmin) throw std::invalid_argument("LatticeState: n_max < n_min");
  a.assign(static_cast<size_t>(size()), 0.0);
  b.assign(static_cast<size_t>(size()), 0.0);
}

double LatticeState::a_at(int n) const {
  if (n < n_min) return boundary.left_a;
  if (n > n_max) return boundary.right_a;
  return a[static_cast<size_t>(n - n_min)];
}

double LatticeState::b_at(int n) const {
  if (n < n_min) return boundary.left_b;
  if (n > n_max) return boundary.right_b;
  return b[static_cast<size_t>(n - n_min)];
}

std::string DiagnosticReport::summary() const {
  if (items.empty()) return "valid";
  std::ostringstream os;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) os << "; ";
    os << items[i].message;
  }
  return os.str();
}

namespace {

double expo(double amp, double rate, double m) {
  // amp * e^{-rate m} for m >= 0, with rate = inf meaning a Kronecker at m = 0
  if (amp == 0.0) return 0.0;
  if (std::isinf(rate)) return m == 0.0 ? amp : 0.0;
  return amp * std::exp(-rate * m);
}

}  // namespace

LatticeState make_step_profile(const SteplikeProfileSpec& spec) {
  if (!(spec.n_min < 0 && spec.n_max > 0))
    throw Error(Stage::profile, "window must satisfy n_min < 0 < n_max");
  if (!(spec.left_decay_rate > 0) || !(spec.right_decay_rate > 0) || !(spec.bump_decay > 0))
    throw Error(Stage::profile, "decay rates must be positive");
  if (!(spec.eps_trunc > 0)) throw Error(Stage::profile, "eps_trunc must be positive");

  BoundaryModel bm;
  if (spec.background == "steplike") {
    bm = BoundaryModel::steplike();
  } else if (spec.background == "free") {
    bm = BoundaryModel::free();
  } else {
    throw Error(Stage::profile, "unknown background '" + spec.background + "'");
  }

  LatticeState s(spec.n_min, spec.n_max, 0.0, bm);
  for (int n = spec.n_min; n <= spec.n_max; ++n) {
    double m = std::abs(static_cast<double>(n));
    double a;
    if (n < 0) {
      // left: the a->1 term, but with inf rate the bump vanishes for n < 0
      a = 1.0 + (std::isinf(spec.left_decay_rate) ? 0.0 : expo(spec.amp_left, spec.left_decay_rate, m));
    } else {
      a = bm.right_a + expo(spec.amp_right, spec.right_decay_rate, m);
    }
    s.a_ref(n) = a;
    s.b_ref(n) = expo(spec.bump, spec.bump_decay, m);
  }

  for (int n = spec.n_min; n <= spec.n_max; ++n) {
    if (!(s.a_at(n) > 0)) {
      std::ostringstream os;
      os << "profile produces a_" << n << " = " << s.a_at(n) << " <= 0";
      throw Error(Stage::profile, os.str());
    }
  }
  double left = std::abs(s.a_at(s.n_min) - bm.left_a) + std::abs(s.b_at(s.n_min) - bm.left_b);
  if (left >= spec.eps_trunc) {
    std::ostringstream os;
    os << "left boundary n_min=" << s.n_min << " not within eps_trunc (" << left
       << " >= " << spec.eps_trunc << "); widen the window or raise the left decay rates";
    throw Error(Stage::profile, os.str());
  }
  double right = std::abs(s.a_at(s.n_max) - bm.right_a) + std::abs(s.b_at(s.n_max) - bm.right_b);
  if (right >= spec.eps_trunc) {
    std::ostringstream os;
    os << "right boundary n_max=" << s.n_max << " not within eps_trunc (" << right
       << " >= " << spec.eps_trunc << "); widen the window or raise the right decay rates";
    throw Error(Stage::profile, os.str());
  }
  return s;
}

double weighted_norm_Q(const LatticeState& state) {
  double q = 0.0;
  for (int n = state.n_min; n < 0 && n <= state.n_max; ++n)
    q += std::abs(static_cast<double>(n)) *
         (std::abs(state.a_at(n) - state.boundary.left_a) + std::abs(state.b_at(n) - state.boundary.left_b));
  return q;
}

BNorm b_norm(int n_min, const std::vector<double>& x1, const std::vector<double>& x2) {
  if (x1.size() != x2.size()) throw std::invalid_argument("b_norm: sequences on different windows");
  double sup = 0.0, sum = 0.0;
  for (size_t i = 0; i < x1.size(); ++i) {
    int n = n_min + static_cast<int>(i);
    double v = std::abs(x1[i]) + std::abs(x2[i]);
    if (n >= 0)
      sup = std::max(sup, v);
    else
      sum += static_cast<double>(-n) * v;
  }
  return {sup + sum};
}

DiagnosticReport validate(const LatticeState& state, double eps_trunc) {
  DiagnosticReport rep;
  auto add = [&](Violation k, int n, double v, const std::string& what) {
    std::ostringstream os;
    os << what << " at n=" << n << " (value " << v << ")";
    rep.items.push_back({k, n, v, os.str()});
  };
  if (state.a.size() != static_cast<size_t>(state.size()) || state.b.size() != state.a.size()) {
    rep.items.push_back({Violation::non_finite, state.n_min, 0.0, "storage size does not match window"});
    return rep;
  }
  for (int n = state.n_min; n <= state.n_max; ++n) {
    double a = state.a_at(n), b = state.b_at(n);
    if (!std::isfinite(a) || !std::isfinite(b))
      add(Violation::non_finite, n, std::isfinite(a) ? b : a, "non-finite coefficient");
    else if (!(a > 0))
      add(Violation::nonpositive_a, n, a, "positivity violation a_n <= 0");
  }
  const auto& bm = state.boundary;
  double left = std::abs(state.a_at(state.n_min) - bm.left_a) + std::abs(state.b_at(state.n_min) - bm.left_b);
  if (!(left < eps_trunc)) add(Violation::left_boundary, state.n_min, left, "left-boundary closeness violated");
  double right = std::abs(state.a_at(state.n_max) - bm.right_a) + std::abs(state.b_at(state.n_max) - bm.right_b);
  if (!(right < eps_trunc)) add(Violation::right_boundary, state.n_max, right, "right-boundary closeness violated");
  return rep;
}

void to_substituted(const LatticeState& state, std::vector<double>& x1, std::vector<double>& x2) {
  x1.resize(state.a.size());
  x2 = state.b;
  for (int n = state.n_min; n <= state.n_max; ++n) {
    double s = n < 0 ? state.boundary.left_a : state.boundary.right_a;
    x1[static_cast<size_t>(state.idx(n))] = state.a_at(n) - s;
  }
}

LatticeState from_substituted(const LatticeState& like, const std::vector<double>& x1,
                              const std::vector<double>& x2, double t) {
  LatticeState s(like.n_min, like.n_max, t, like.boundary);
  for (int n = like.n_min; n <= like.n_max; ++n) {
    double shift = n < 0 ? like.boundary.left_a : like.boundary.right_a;
    s.a_ref(n) = x1[static_cast<size_t>(like.idx(n))] + shift;
    s.b_ref(n) = x2[static_cast<size_t>(like.idx(n))];
  }
  return s;
}

double profile_left_tail_bound(const SteplikeProfileSpec& spec, int n_cut) {
  // sum_{m >= m0} m q^m = q^m0 (m0 - (m0 - 1) q) / (1 - q)^2
  double m0 = static_cast<double>(1 - std::min(n_cut, 0));
  auto geo = [m0](double amp, double rate) {
    if (amp == 0.0 || std::isinf(rate)) return 0.0;
    double q = std::exp(-rate);
    return std::abs(amp) * std::pow(q, m0) * (m0 - (m0 - 1.0) * q) / ((1.0 - q) * (1.0 - q));
  };
  return geo(spec.amp_left, spec.left_decay_rate) + geo(spec.bump, spec.bump_decay);
}

}  // namespace toda::lattice
