#pragma once

#include <string>
#include <vector>

namespace toda::lattice {

// Frozen ghost values outside the window. Steplike: a -> 1, b -> 0 on the
// left, a -> 0, b -> 0 on the right.
struct BoundaryModel {
  double left_a = 1.0;
  double left_b = 0.0;
  double right_a = 0.0;
  double right_b = 0.0;

  static BoundaryModel steplike() { return {}; }
  static BoundaryModel free() { return {1.0, 0.0, 1.0, 0.0}; }
  bool is_steplike() const { return left_a == 1.0 && left_b == 0.0 && right_a == 0.0 && right_b == 0.0; }
};

struct LatticeState {
  double t = 0.0;
  int n_min = -1;
  int n_max = 1;
  std::vector<double> a;  // n_min..n_max
  std::vector<double> b;
  BoundaryModel boundary;

  LatticeState() = default;
  LatticeState(int nmin, int nmax, double time = 0.0, BoundaryModel bm = {});

  int size() const { return n_max - n_min + 1; }
  int idx(int n) const { return n - n_min; }
  bool contains(int n) const { return n >= n_min && n <= n_max; }

  // ghost-aware accessors, valid for any n
  double a_at(int n) const;
  double b_at(int n) const;
  double& a_ref(int n) { return a[static_cast<size_t>(n - n_min)]; }
  double& b_ref(int n) { return b[static_cast<size_t>(n - n_min)]; }
};

struct SteplikeProfileSpec {
  int n_min = -60;
  int n_max = 40;
  // a_n = 1 + amp_left e^{left_decay_rate n} for n < 0
  double left_decay_rate = 0.5;
  double amp_left = -0.3;
  // a_n = amp_right e^{-right_decay_rate n} for n >= 0 (steplike background)
  double right_decay_rate = 1.0;
  double amp_right = 0.5;
  // b_n = bump e^{-bump_decay |n|}
  double bump = 1.5;
  double bump_decay = 2.0;
  // "steplike" or "free"; free adds the right perturbation to a = 1
  std::string background = "steplike";
  double eps_trunc = 1e-10;
};

struct BNorm {
  double value = 0.0;
};

enum class Violation { nonpositive_a, non_finite, left_boundary, right_boundary };

struct Diagnostic {
  Violation kind;
  int index;
  double value;
  std::string message;
};

struct DiagnosticReport {
  std::vector<Diagnostic> items;
  bool ok() const { return items.empty(); }
  std::string summary() const;
};

LatticeState make_step_profile(const SteplikeProfileSpec& spec);

// sum over n_min <= n < 0 of |n| (|a_n - 1| + |b_n|)
double weighted_norm_Q(const LatticeState& state);

// sup_{n>=0}(|x1|+|x2|) + sum_{n<0} |n| (|x1|+|x2|); window starts at n_min
BNorm b_norm(int n_min, const std::vector<double>& x1, const std::vector<double>& x2);

DiagnosticReport validate(const LatticeState& state, double eps_trunc = 1e-10);

// Change of variables used by the integral formulation: x1 = a - s, x2 = b
// with s_n = left background for n < 0 and right background for n >= 0.
void to_substituted(const LatticeState& state, std::vector<double>& x1, std::vector<double>& x2);
LatticeState from_substituted(const LatticeState& like, const std::vector<double>& x1,
                              const std::vector<double>& x2, double t);

// Closed-form bound on sum_{n<n_cut} |n|(|a_n-1|+|b_n|) for the exponential
// family on the infinite left half-line (n_cut <= 0).
double profile_left_tail_bound(const SteplikeProfileSpec& spec, int n_cut);

}  // namespace toda::lattice
