#pragma once

#include <Eigen/Dense>

namespace fermibose {

/// Skew-diagonal transpose: result(i, j) = mat(N-1-j, N-1-i), i.e. S mat^T S.
/// Throws std::domain_error for non-square input.
Eigen::MatrixXcd skew_transpose(const Eigen::MatrixXcd& mat);

/// Skew-diagonal transpose combined with complex conjugation.
Eigen::MatrixXcd skew_hermitian_transpose(const Eigen::MatrixXcd& mat);

/// Dense matrix exponential exp(mat) (Pade approximant with scaling and squaring).
Eigen::MatrixXcd dense_expm(const Eigen::MatrixXcd& mat);

/// Max-abs residuals of the three block identity sets for a 2n x 2n matrix
/// [[B11, B12], [B21, B22]] and statistics sign q:
///   conjugation:  B11 = conj(B22), B12 = q conj(B21)
///   skew:         B11 = B11^SDT, B22 = B22^SDT, B12 = q B21^SDT
///   hermitian:    B11 = B22^H, B12 = B12^H, B21 = B21^H
struct BlockIdentityResiduals {
  double conjugation = 0.0;
  double skew = 0.0;
  double hermitian = 0.0;
};

BlockIdentityResiduals block_identity_residuals(const Eigen::MatrixXcd& mat, int q);

}  // namespace fermibose
