#include "toda/marchenko.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>

#include "toda/error.hpp"

namespace toda::inverse {

const MarchenkoRow& MarchenkoSolution::row(int n) const {
  if (n < n_min || n > 0) throw Error(Stage::marchenko, "Marchenko row outside the solved range");
  return rows[static_cast<size_t>(n - n_min)];
}

MarchenkoRow solve_marchenko_row(const MarchenkoKernel& F, int n, int K, const MarchenkoOptions& opts) {
  if (K < 1) throw Error(Stage::marchenko, "truncation K must be positive");
  Eigen::MatrixXd M(K, K);
  Eigen::VectorXd rhs(K);
  for (int j = 1; j <= K; ++j) {
    rhs(j - 1) = -F.at(2 * n - j);
    for (int l = 1; l <= K; ++l) M(j - 1, l - 1) = (j == l ? 1.0 : 0.0) + F.at(2 * n - j - l);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  double rc = lu.rcond();
  MarchenkoRow r;
  r.n = n;
  r.condition = rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  if (!(r.condition <= opts.max_condition)) {
    std::ostringstream os;
    os << "Marchenko system at n = " << n << " is ill-conditioned (estimate " << r.condition
       << "); the kernel is not trustworthy";
    throw Error(Stage::kernel, os.str());
  }
  Eigen::VectorXd A = lu.solve(rhs);
  r.residual = (M * A - rhs).lpNorm<Eigen::Infinity>();
  if (!(r.residual <= opts.residual_tol * std::max(1.0, rhs.lpNorm<Eigen::Infinity>()))) {
    std::ostringstream os;
    os << "Marchenko residual " << r.residual << " at n = " << n << " above tolerance";
    throw Error(Stage::marchenko, os.str());
  }
  r.A.assign(A.data(), A.data() + K);
  double s = 1.0 + F.at(2 * n);
  for (int l = 1; l <= K; ++l) s += r.A[static_cast<size_t>(l - 1)] * F.at(2 * n - l);
  r.alpha_inv_sq = s;
  if (!(s > 0.0)) {
    std::ostringstream os;
    os << "reconstruction failure: alpha^-2 = " << s << " <= 0 at n = " << n;
    throw Error(Stage::marchenko, os.str());
  }
  r.alpha = 1.0 / std::sqrt(s);
  return r;
}

MarchenkoSolution solve_marchenko(const MarchenkoKernel& F, int n_min, int K, const MarchenkoOptions& opts) {
  if (n_min > -1) throw Error(Stage::marchenko, "left window must reach n = -1");
  if (F.x_min > 2 * n_min - 2 * K || F.x_max < 0) {
    std::ostringstream os;
    os << "kernel covers [" << F.x_min << ", " << F.x_max << "] but rows need [" << 2 * n_min - 2 * K << ", 0]";
    throw Error(Stage::kernel, os.str());
  }
  MarchenkoSolution s;
  s.n_min = n_min;
  s.K = K;
  for (int n = n_min; n <= 0; ++n) s.rows.push_back(solve_marchenko_row(F, n, K, opts));
  return s;
}

LeftCoefficients left_coefficients(const MarchenkoSolution& sol) {
  LeftCoefficients c;
  c.n_min = sol.n_min;
  for (int n = sol.n_min; n < 0; ++n) {
    const auto& r0 = sol.row(n);
    const auto& r1 = sol.row(n + 1);
    c.a.push_back(r0.alpha / r1.alpha);
    c.b.push_back(r0.A[0] - r1.A[0]);
  }
  return c;
}

cplx reconstruct_jost(const MarchenkoSolution& sol, cplx z, int n) {
  const auto& r = sol.row(n);
  // Horner in z for 1 + sum_l A_l z^l
  cplx p = 0.0;
  for (size_t l = r.A.size(); l-- > 0;) p = (p + r.A[l]) * z;
  return r.alpha * std::pow(z, -n) * (1.0 + p);
}

cplx weyl_from_scattering(const MarchenkoSolution& sol, cplx z, cplx R) {
  double am1 = sol.row(-1).alpha / sol.row(0).alpha;
  cplx zb = 1.0 / z;
  cplx f0 = reconstruct_jost(sol, z, 0), fm = reconstruct_jost(sol, z, -1);
  cplx g0 = reconstruct_jost(sol, zb, 0), gm = reconstruct_jost(sol, zb, -1);
  cplx den = gm + R * fm;
  if (den == 0.0) throw Error(Stage::measure, "Weyl function denominator vanished");
  return -(g0 + R * f0) / (am1 * den);
}

}  // namespace toda::inverse
