#include "fermibose/dense.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <stdexcept>

namespace fermibose {

Eigen::MatrixXcd skew_transpose(const Eigen::MatrixXcd& mat) {
  if (mat.rows() != mat.cols()) throw std::domain_error("skew transpose needs a square matrix");
  // S A^T S: transpose, then reverse both row and column order.
  return mat.transpose().reverse();
}

Eigen::MatrixXcd skew_hermitian_transpose(const Eigen::MatrixXcd& mat) {
  return skew_transpose(mat).conjugate();
}

Eigen::MatrixXcd dense_expm(const Eigen::MatrixXcd& mat) {
  if (mat.rows() != mat.cols()) throw std::domain_error("matrix exponential needs a square matrix");
  return mat.exp();
}

BlockIdentityResiduals block_identity_residuals(const Eigen::MatrixXcd& mat, int q) {
  if (mat.rows() != mat.cols() || mat.rows() % 2 != 0) {
    throw std::domain_error("block identities need an even-sized square matrix");
  }
  const Eigen::Index n = mat.rows() / 2;
  const Eigen::MatrixXcd b11 = mat.topLeftCorner(n, n);
  const Eigen::MatrixXcd b12 = mat.topRightCorner(n, n);
  const Eigen::MatrixXcd b21 = mat.bottomLeftCorner(n, n);
  const Eigen::MatrixXcd b22 = mat.bottomRightCorner(n, n);
  const double qd = q;
  auto maxabs = [](const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; };

  BlockIdentityResiduals r;
  r.conjugation = std::max(maxabs(b11 - b22.conjugate()), maxabs(b12 - qd * b21.conjugate()));
  r.skew = std::max({maxabs(b11 - skew_transpose(b11)), maxabs(b22 - skew_transpose(b22)),
                     maxabs(b12 - qd * skew_transpose(b21))});
  r.hermitian = std::max({maxabs(b11 - b22.adjoint()), maxabs(b12 - b12.adjoint()),
                          maxabs(b21 - b21.adjoint())});
  return r;
}

}  // namespace fermibose
