#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include <cstddef>

#include "fermibose/system_operator.hpp"

namespace fermibose {

struct KrylovConfig {
  int subspace_dim = 30;     ///< Arnoldi dimension m, capped at the operator dimension
  double tol = 1e-10;        ///< target error relative to ||v|| over the whole interval
  int max_substeps = 100000; ///< cap on accepted time substeps per call
  int max_rejections = 20;   ///< cap on step-size reductions within one substep
  double norm_est = 0.0;     ///< ||A|| estimate for step sizing; <= 0 means estimate at setup

  /// Throws ConfigError on out-of-range values; `dimension` is 2n.
  void validate(std::size_t dimension) const;
};

/// Work counters of one or more expv calls.
struct ExpvStats {
  long substeps = 0;
  long rejections = 0;
  long matvecs = 0;
  double error_estimate = 0.0;  ///< accumulated local error estimates

  ExpvStats& operator+=(const ExpvStats& o) {
    substeps += o.substeps;
    rejections += o.rejections;
    matvecs += o.matvecs;
    error_estimate += o.error_estimate;
    return *this;
  }
};

/// Adaptive Arnoldi approximation of exp(A t) v with Expokit-style step control.
/// Holds the Krylov basis and operator scratch, so one instance per thread.
class KrylovPropagator {
public:
  KrylovPropagator(const SystemOperator& op, KrylovConfig cfg);

  const KrylovConfig& config() const noexcept { return cfg_; }
  double norm_estimate() const noexcept { return anorm_; }

  /// exp(A t) v, or exp(A^T t) v when `transpose` is set. t is dimensionless (t/t0).
  /// Throws NumericalError when the step control gives up.
  Eigen::VectorXcd expv(const Eigen::VectorXcd& v, double t, bool transpose,
                        ExpvStats* stats = nullptr);

  /// exp(A t_i) v for non-decreasing times t_i >= 0 in one sweep. Output
  /// times that fall inside an accepted step reuse its Krylov basis, and the
  /// tolerance applies over [0, max t_i].
  std::vector<Eigen::VectorXcd> expv_times(const Eigen::VectorXcd& v, std::span<const double> times,
                                           bool transpose, ExpvStats* stats = nullptr);

private:
  void matvec(const Complex* x, Complex* y, bool transpose);

  const SystemOperator* op_;
  KrylovConfig cfg_;
  double anorm_ = 1.0;
  SystemOperator::Workspace ws_;
  Eigen::MatrixXcd basis_;
  Eigen::VectorXcd scratch_;
};

/// One-shot convenience wrapper around KrylovPropagator.
Eigen::VectorXcd expv(const SystemOperator& op, const Eigen::VectorXcd& v, double t,
                      const KrylovConfig& cfg, bool transpose = false,
                      ExpvStats* stats = nullptr);

}  // namespace fermibose
