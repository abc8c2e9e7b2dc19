#include "toda/rational.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "toda/error.hpp"

namespace toda::inverse {

using cplx = std::complex<double>;

double RationalModel::operator()(double x) const {
  double num = 0.0, den = 0.0;
  for (size_t j = 0; j < support.size(); ++j) {
    double d = x - support[j];
    if (d == 0.0) return values[j];
    num += weights[j] * values[j] / d;
    den += weights[j] / d;
  }
  return num / den;
}

cplx RationalModel::operator()(cplx x) const {
  cplx num = 0.0, den = 0.0;
  for (size_t j = 0; j < support.size(); ++j) {
    cplx d = x - support[j];
    if (d == 0.0) return values[j];
    num += weights[j] * values[j] / d;
    den += weights[j] / d;
  }
  return num / den;
}

std::vector<cplx> RationalModel::poles() const {
  // generalized eigenproblem of the arrowhead pencil; two eigenvalues are infinite
  const int m = static_cast<int>(support.size());
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(m + 1, m + 1), B = Eigen::MatrixXd::Identity(m + 1, m + 1);
  B(0, 0) = 0.0;
  for (int j = 0; j < m; ++j) {
    E(0, j + 1) = weights[static_cast<size_t>(j)];
    E(j + 1, 0) = 1.0;
    E(j + 1, j + 1) = support[static_cast<size_t>(j)];
  }
  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges(E, B, false);
  std::vector<cplx> out;
  const auto& al = ges.alphas();
  const auto& be = ges.betas();
  double scale = 1.0;
  for (double s : support) scale = std::max(scale, std::abs(s));
  for (int k = 0; k <= m; ++k) {
    if (std::abs(be(k)) <= 1e-13 * std::abs(al(k))) continue;
    cplx p = al(k) / be(k);
    if (std::isfinite(p.real()) && std::isfinite(p.imag()) && std::abs(p) < 1e8 * scale) out.push_back(p);
  }
  return out;
}

cplx RationalModel::residue(cplx p) const {
  cplx num = 0.0, dder = 0.0;
  for (size_t j = 0; j < support.size(); ++j) {
    cplx d = p - support[j];
    num += weights[j] * values[j] / d;
    dder -= weights[j] / (d * d);
  }
  return num / dder;
}

RationalModel aaa_fit(const std::vector<double>& x, const std::vector<double>& f, double rel_tol, int max_terms) {
  if (x.size() != f.size() || x.size() < 2) throw Error(Stage::measure, "rational fit needs matching samples");
  const size_t M = x.size();
  double fmax = 0.0, fmean = 0.0;
  for (double v : f) {
    if (!std::isfinite(v)) throw Error(Stage::measure, "non-finite sample passed to the rational fit");
    fmax = std::max(fmax, std::abs(v));
    fmean += v;
  }
  fmean /= static_cast<double>(M);

  RationalModel r;
  std::vector<char> free(M, 1);
  std::vector<double> approx(M, fmean);
  const int cap = std::min<int>(max_terms, static_cast<int>(M) - 1);
  for (int it = 0; it < cap; ++it) {
    size_t jmax = 0;
    double emax = -1.0;
    for (size_t i = 0; i < M; ++i)
      if (free[i] && std::abs(f[i] - approx[i]) > emax) emax = std::abs(f[i] - approx[i]), jmax = i;
    free[jmax] = 0;
    r.support.push_back(x[jmax]);
    r.values.push_back(f[jmax]);

    const int m = static_cast<int>(r.support.size());
    std::vector<size_t> rows;
    for (size_t i = 0; i < M; ++i)
      if (free[i]) rows.push_back(i);
    Eigen::MatrixXd C(rows.size(), m), L(rows.size(), m);
    for (size_t k = 0; k < rows.size(); ++k)
      for (int j = 0; j < m; ++j) {
        double c = 1.0 / (x[rows[k]] - r.support[static_cast<size_t>(j)]);
        C(k, j) = c;
        L(k, j) = (f[rows[k]] - r.values[static_cast<size_t>(j)]) * c;
      }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(L, Eigen::ComputeThinV);
    Eigen::VectorXd w = svd.matrixV().col(m - 1);
    r.weights.assign(w.data(), w.data() + m);

    Eigen::VectorXd fv(m);
    for (int j = 0; j < m; ++j) fv(j) = r.values[static_cast<size_t>(j)] * w(j);
    Eigen::VectorXd num = C * fv, den = C * w;
    approx = f;
    for (size_t k = 0; k < rows.size(); ++k) approx[rows[k]] = num(k) / den(k);
    double err = 0.0;
    for (size_t i = 0; i < M; ++i) err = std::max(err, std::abs(f[i] - approx[i]));
    r.max_error = err;
    if (err <= rel_tol * fmax) break;
  }
  return r;
}

}  // namespace toda::inverse
