#include "tridiag.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace toda::detail {

TridiagEigen tridiag_eigen(const std::vector<double>& d, const std::vector<double>& e, bool vectors) {
  const auto n = static_cast<Eigen::Index>(d.size());
  if (n == 0) return {};
  if (static_cast<Eigen::Index>(e.size()) + 1 != n) throw std::invalid_argument("tridiag_eigen: size mismatch");
  TridiagEigen out;
  if (n == 1) {
    out.values = {d[0]};
    if (vectors) out.vectors = {{1.0}};
    return out;
  }
  Eigen::VectorXd dd = Eigen::Map<const Eigen::VectorXd>(d.data(), n);
  Eigen::VectorXd ee = Eigen::Map<const Eigen::VectorXd>(e.data(), n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(dd, ee, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("tridiagonal eigensolver did not converge");
  out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  if (vectors) {
    out.vectors.resize(static_cast<size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto col = es.eigenvectors().col(k);
      out.vectors[static_cast<size_t>(k)].assign(col.data(), col.data() + n);
    }
  }
  return out;
}

}  // namespace toda::detail
