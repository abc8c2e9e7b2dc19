#pragma once

#include <vector>

namespace toda::detail {

struct TridiagEigen {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // vectors[k] is the unit eigenvector of values[k]
};

// Symmetric tridiagonal matrix with diagonal d (size N) and off-diagonal e (size N-1).
TridiagEigen tridiag_eigen(const std::vector<double>& d, const std::vector<double>& e, bool vectors = true);

}  // namespace toda::detail
