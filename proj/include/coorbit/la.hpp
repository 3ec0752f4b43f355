#pragma once

// Small-matrix linear algebra used by the group machinery: eigenvalues,
// matrix exponential, operator norms. Dimensions are 1..3 at desk scale,
// so dense dynamic Eigen types are plenty.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <vector>

#include "coorbit/common.hpp"

namespace coorbit {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline Mat identity(int d) { return Mat::Identity(d, d); }

inline void check_square(const Mat& m) {
  require(m.rows() == m.cols() && m.rows() >= 1, "matrix must be square and nonempty");
}

inline void check_dim(const Mat& m, int d) {
  check_square(m);
  require(m.rows() == d, "matrix dimension mismatch");
}

inline bool is_invertible(const Mat& m) {
  check_square(m);
  // Relative threshold against the largest entry keeps the test scale-free.
  const double scale = m.cwiseAbs().maxCoeff();
  return scale > 0.0 && std::abs(m.determinant()) > 1e-12 * std::pow(scale, m.rows());
}

inline std::vector<cplx> eigenvalues(const Mat& m) {
  check_square(m);
  Eigen::EigenSolver<Mat> solver(m, /*computeEigenvectors=*/false);
  require(solver.info() == Eigen::Success, "eigenvalue solver failed");
  std::vector<cplx> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  return out;
}

inline Mat mat_exp(const Mat& m) {
  check_square(m);
  return m.exp();
}

// Max absolute row sum, the operator norm induced by the sup norm on vectors.
inline double op_norm_inf(const Mat& m) {
  check_square(m);
  double best = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) best = std::max(best, m.row(i).cwiseAbs().sum());
  return best;
}

inline Mat inverse(const Mat& m) {
  require(is_invertible(m), "matrix not invertible");
  return m.inverse();
}

// h^{-T}, the matrix carrying a frequency set along the inverse dual action.
inline Mat inv_transpose(const Mat& m) { return inverse(m).transpose(); }

}  // namespace coorbit
