#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>

#include "fermibose/lattice.hpp"
#include "fermibose/system_operator.hpp"

namespace fermibose {

/// Closed-form reference solutions for the uniform condensate and related
/// asymptotes. All times are dimensionless (t/t0) unless stated otherwise.

struct UniformSolution {
  double gamma0 = 0.0;   ///< g0 t0 = t0 chi sqrt(rho0)
  double delta_k = 0.0;  ///< t0 Delta_k
  int q = -1;
};

struct UniformMoments {
  double n = 0.0;  ///< occupation n_k
  Complex m;       ///< anomalous moment m_k = <a_{k,1} a_{-k,2}>
};

/// cos(w t) and sin(w t)/w for the root w of w^2 = omega2 given by `root`.
/// Both are even in w, so either square root gives the same values.
struct UniformTrig {
  Complex cos_wt;
  Complex sinc_wt;
};
UniformTrig uniform_trig(Complex root, double t);

/// n_k and m_k for a uniform molecular field with vacuum initial state.
/// Covers the oscillating (delta^2 > q gamma0^2) and growing (bosons,
/// delta^2 < gamma0^2) branches as well as the degenerate limit.
UniformMoments uniform_moments(const UniformSolution& sol, double t);

/// Dense blocks of M for the uniform case: M11 diagonal and M12 anti-diagonal
/// (M12(m, -m) = gamma0 sin(w t)/w).
struct UniformBlocks {
  Eigen::MatrixXcd m11;
  Eigen::MatrixXcd m12;
};
UniformBlocks uniform_blocks(double gamma0, std::span<const double> delta, int q, double t,
                             const GridSpec& grid);

/// Fermi golden rule atom production rate per molecule (1/s), three dimensions.
double golden_rule_rate(const PhysicalParams& params);

/// N_j(t) = N0 lambda t with t in seconds. Refuses dimension != 3.
double golden_rule_number(double n0, const PhysicalParams& params, double t_seconds,
                          int dimension = 3);

/// Resonance momentum k0 = sqrt(2 m_a |Omega| / hbar), 1/m.
double resonance_momentum(const PhysicalParams& params);

/// Spherical-type Bessel function J_{5/2}(x).
double bessel_j52(double x);

/// Short-time collinear same-spin correlation
///   1 + q (225 pi / 2) J_{5/2}(x)^2 / x^5,  x = displacement * radius.
double cl_asymptote(double displacement, double radius, int q);

/// |m|^2 - n (1 + q n); zero for a uniform field, <= 0 otherwise.
double pair_identity_residual(double n, Complex m, int q);

}  // namespace fermibose
