#include "toda/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "toda/error.hpp"

namespace toda::inverse {

std::vector<cplx> weyl_on_grid(const MarchenkoSolution& sol, const ScatteringData& data) {
  if (data.R.size() != data.grid.size()) throw Error(Stage::measure, "reflection samples do not match the grid");
  std::vector<cplx> m(data.grid.size());
  for (size_t i = 0; i < m.size(); ++i) m[i] = weyl_from_scattering(sol, data.grid.z(i), data.R[i]);
  return m;
}

InverseResult full_inverse(const ScatteringData& data, const InverseOptions& opts) {
  if (!(opts.n_min < 0 && opts.n_max >= 0)) throw Error(Stage::config, "inverse window must satisfy n_min < 0 <= n_max");
  const int K = opts.K_trunc > 0 ? opts.K_trunc : 2 * std::abs(opts.n_min) + 40;
  InverseResult out;

  out.kernel = build_kernel(data, 2 * opts.n_min - 2 * K, 0);
  out.marchenko = solve_marchenko(out.kernel, opts.n_min, K, opts.marchenko);
  auto left = left_coefficients(out.marchenko);

  auto m = weyl_on_grid(out.marchenko, data);
  std::vector<double> lam(m.size());
  out.m_nodes.resize(m.size());
  for (size_t i = 0; i < m.size(); ++i) {
    lam[i] = data.grid.lambda(i);
    out.m_nodes[i] = m[i].real();
    out.m_imag_max = std::max(out.m_imag_max, std::abs(m[i].imag()) / std::max(1.0, std::abs(m[i].real())));
  }
  // the fit wants increasing lambda
  std::vector<size_t> order(lam.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t x, size_t y) { return lam[x] < lam[y]; });
  std::vector<double> ls, ms;
  for (size_t i : order) ls.push_back(lam[i]), ms.push_back(out.m_nodes[i]);
  out.scan = pole_scan(ls, ms, opts.scan);

  const int cap = std::min(opts.N_right, opts.n_max + 1);
  out.right_depth = std::min(resolved_depth(out.scan, cap, opts.resolution_tol), cap);
  out.right = jacobi_from_measure(out.scan.measure, out.right_depth);
  // a measure made only of resolved atoms, one more than the depth, is a
  // finite Jacobi matrix: its last diagonal entry is known too
  const bool exhausted = out.scan.balancing_index < 0 &&
                         out.scan.measure.size() == static_cast<size_t>(out.right_depth) + 1 &&
                         out.right_depth <= opts.n_max;

  lattice::LatticeState s(opts.n_min, opts.n_max, data.t, lattice::BoundaryModel::steplike());
  for (int n = opts.n_min; n < 0; ++n) {
    s.a_ref(n) = left.a[static_cast<size_t>(n - opts.n_min)];
    s.b_ref(n) = left.b[static_cast<size_t>(n - opts.n_min)];
  }
  // past the resolved depth the right half is filled with the background
  // plus a coupling small enough to respect the truncation closeness
  const double fill = 1e-2 * opts.eps_trunc;
  for (int n = 0; n <= opts.n_max; ++n) {
    bool known = n < out.right_depth;
    s.a_ref(n) = known ? out.right.a[static_cast<size_t>(n)] : fill;
    s.b_ref(n) = known ? out.right.b[static_cast<size_t>(n)] : 0.0;
    if (exhausted && n == out.right_depth) s.b_ref(n) = out.right.b_tail;
  }
  auto rep = lattice::validate(s, opts.eps_trunc);
  if (!rep.ok()) throw Error(Stage::assemble, "reconstructed state is invalid: " + rep.summary());
  out.state = std::move(s);
  return out;
}

}  // namespace toda::inverse
