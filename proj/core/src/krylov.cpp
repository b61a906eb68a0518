#include "fermibose/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fermibose/dense.hpp"
#include "fermibose/errors.hpp"

namespace fermibose {

void KrylovConfig::validate(std::size_t /*dimension*/) const {
  if (subspace_dim < 2) throw ConfigError("krylov.subspace_dim must be >= 2");
  if (!(tol > 0.0)) throw ConfigError("krylov.tol must be positive");
  if (max_substeps < 1) throw ConfigError("krylov.max_substeps must be >= 1");
  if (max_rejections < 0) throw ConfigError("krylov.max_rejections must be >= 0");
}

namespace {

// Expokit rounds step sizes to two significant digits.
double round_step(double step) {
  const double s = std::pow(10.0, std::floor(std::log10(step)) - 1.0);
  return std::ceil(step / s) * s;
}

}  // namespace

KrylovPropagator::KrylovPropagator(const SystemOperator& op, KrylovConfig cfg)
    : op_(&op), cfg_(cfg), ws_(op.make_workspace()) {
  if (cfg_.subspace_dim < 2) throw ConfigError("krylov.subspace_dim must be >= 2");
  if (!(cfg_.tol > 0.0)) throw ConfigError("krylov.tol must be positive");
  cfg_.subspace_dim = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(cfg_.subspace_dim), op.dimension()));
  anorm_ = cfg_.norm_est > 0.0 ? cfg_.norm_est : op.norm_estimate();
  if (!(anorm_ > 0.0)) anorm_ = 1.0;
  const auto n2 = static_cast<Eigen::Index>(op.dimension());
  basis_.resize(n2, cfg_.subspace_dim + 1);
  scratch_.resize(n2);
}

void KrylovPropagator::matvec(const Complex* x, Complex* y, bool transpose) {
  const std::size_t n2 = op_->dimension();
  op_->apply(std::span<const Complex>(x, n2), std::span<Complex>(y, n2), transpose, ws_);
}

Eigen::VectorXcd KrylovPropagator::expv(const Eigen::VectorXcd& v, double t, bool transpose,
                                        ExpvStats* stats) {
  const double times[] = {t};
  return std::move(expv_times(v, times, transpose, stats).front());
}

std::vector<Eigen::VectorXcd> KrylovPropagator::expv_times(const Eigen::VectorXcd& v,
                                                           std::span<const double> times,
                                                           bool transpose, ExpvStats* stats) {
  if (static_cast<std::size_t>(v.size()) != op_->dimension()) {
    throw std::domain_error("expv: vector length " + std::to_string(v.size()) +
                            " does not match operator dimension " +
                            std::to_string(op_->dimension()));
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || !std::isfinite(times[i]) || (i > 0 && times[i] < times[i - 1])) {
      throw std::domain_error("expv: times must be finite, >= 0 and non-decreasing");
    }
  }
  if (!v.allFinite()) throw std::domain_error("expv: input vector is not finite");

  std::vector<Eigen::VectorXcd> out;
  out.reserve(times.size());
  ExpvStats local;
  const double t = times.empty() ? 0.0 : times.back();
  double beta = v.norm();
  if (t == 0.0 || beta == 0.0) {
    for (std::size_t i = 0; i < times.size(); ++i) out.push_back(v);
    if (stats) *stats += local;
    return out;
  }
  std::size_t next_out = 0;
  while (next_out < times.size() && times[next_out] == 0.0) {
    out.push_back(v);
    ++next_out;
  }

  const int m = cfg_.subspace_dim;
  const auto n2 = static_cast<Eigen::Index>(op_->dimension());
  constexpr double kGamma = 0.9;   // step safety factor
  constexpr double kDelta = 1.2;   // local error acceptance slack
  const double eps = std::numeric_limits<double>::epsilon();
  // The caller's tolerance is for the whole interval; spread it over time.
  const double tol_rate = cfg_.tol * beta / t;
  const double btol = std::max(1e-3 * cfg_.tol, 16.0 * eps);  // happy breakdown
  const double rndoff = anorm_ * eps;

  const double fact = std::pow((m + 1) / std::numbers::e, m + 1) *
                      std::sqrt(2.0 * std::numbers::pi * (m + 1));
  double t_new = (1.0 / anorm_) * std::pow((fact * tol_rate) / (4.0 * beta * anorm_), 1.0 / m);
  t_new = round_step(t_new);

  Eigen::VectorXcd w = v;
  Eigen::MatrixXcd hess(m + 2, m + 2);
  Eigen::MatrixXcd f;
  double t_now = 0.0;
  double err_loc = 0.0;

  while (t - t_now > 4.0 * eps * t) {
    if (++local.substeps > cfg_.max_substeps) {
      std::ostringstream msg;
      msg << "expv: exceeded " << cfg_.max_substeps << " substeps at t = " << t_now << " of "
          << t << " (last local error estimate " << err_loc << ")";
      throw NumericalError(msg.str());
    }
    double tau = std::min(t - t_now, t_new);
    hess.setZero();
    basis_.col(0) = w / beta;

    int k1 = 2;
    int mb = m;
    for (int j = 0; j < m; ++j) {
      matvec(basis_.col(j).data(), scratch_.data(), transpose);
      ++local.matvecs;
      for (int i = 0; i <= j; ++i) {
        hess(i, j) = basis_.col(i).dot(scratch_);
        scratch_.noalias() -= hess(i, j) * basis_.col(i);
      }
      const double s = scratch_.norm();
      if (s <= btol || j + 1 == n2) {
        // Invariant subspace: the projection is exact up to s.
        k1 = 0;
        mb = j + 1;
        tau = t - t_now;
        break;
      }
      hess(j + 1, j) = s;
      basis_.col(j + 1) = scratch_ / s;
    }
    double avnorm = 0.0;
    if (k1 != 0) {
      hess(m + 1, m) = 1.0;
      matvec(basis_.col(m).data(), scratch_.data(), transpose);
      ++local.matvecs;
      avnorm = scratch_.norm();
    }

    double xm = 1.0 / m;
    int rejections = 0;
    for (;;) {
      const int mx = mb + k1;
      f = dense_expm(tau * hess.topLeftCorner(mx, mx));
      if (k1 == 0) {
        err_loc = btol;
        break;
      }
      const double phi1 = std::abs(beta * f(m, 0));
      const double phi2 = std::abs(beta * f(m + 1, 0) * avnorm);
      if (phi1 > 10.0 * phi2) {
        err_loc = phi2;
        xm = 1.0 / m;
      } else if (phi1 > phi2) {
        err_loc = (phi1 * phi2) / (phi1 - phi2);
        xm = 1.0 / m;
      } else {
        err_loc = phi1;
        xm = 1.0 / (m - 1);
      }
      if (err_loc <= kDelta * tau * tol_rate) break;
      if (rejections++ >= cfg_.max_rejections) {
        std::ostringstream msg;
        msg << "expv: step size control failed at t = " << t_now << " (tau = " << tau
            << ", local error estimate " << err_loc << ")";
        throw NumericalError(msg.str());
      }
      ++local.rejections;
      tau = round_step(kGamma * tau * std::pow(tau * tol_rate / err_loc, xm));
    }

    const int mx = mb + std::max(0, k1 - 1);
    // Output times inside this step come from the same basis.
    const double t_step_end = t_now + tau;
    while (next_out < times.size() && times[next_out] < t_step_end && times[next_out] < t) {
      const Eigen::MatrixXcd fo =
          dense_expm((times[next_out] - t_now) * hess.topLeftCorner(mb + k1, mb + k1));
      out.push_back(basis_.leftCols(mx) * (beta * fo.col(0).head(mx)));
      ++next_out;
    }
    w.noalias() = basis_.leftCols(mx) * (beta * f.col(0).head(mx));
    beta = w.norm();
    if (!std::isfinite(beta)) throw NumericalError("expv: solution overflowed");

    t_now = t_step_end;
    const bool done = !(t - t_now > 4.0 * eps * t);
    while (next_out < times.size() && (done || times[next_out] <= t_now)) {
      out.push_back(w);
      ++next_out;
    }
    if (err_loc > 0.0) {
      t_new = round_step(kGamma * tau * std::pow(tau * tol_rate / err_loc, xm));
    } else {
      t_new = 2.0 * tau;
    }
    local.error_estimate += std::max(err_loc, rndoff);
    if (beta == 0.0) break;
  }
  while (next_out < times.size()) {
    out.push_back(w);
    ++next_out;
  }

  if (stats) *stats += local;
  return out;
}

Eigen::VectorXcd expv(const SystemOperator& op, const Eigen::VectorXcd& v, double t,
                      const KrylovConfig& cfg, bool transpose, ExpvStats* stats) {
  KrylovPropagator prop(op, cfg);
  return prop.expv(v, t, transpose, stats);
}

}  // namespace fermibose
