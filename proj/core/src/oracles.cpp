#include "fermibose/oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fermibose/errors.hpp"

namespace fermibose {

UniformTrig uniform_trig(Complex root, double t) {
  const Complex wt = root * t;
  UniformTrig out;
  out.cos_wt = std::cos(wt);
  if (std::abs(wt) < 1e-4) {
    // sin(wt)/w = t (1 - (wt)^2/6 + (wt)^4/120 - ...)
    const Complex z = wt * wt;
    out.sinc_wt = t * (1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0);
  } else {
    out.sinc_wt = std::sin(wt) / root;
  }
  return out;
}

UniformMoments uniform_moments(const UniformSolution& sol, double t) {
  if (!(t >= 0.0)) throw std::domain_error("uniform_moments: t must be >= 0");
  const double omega2 = sol.delta_k * sol.delta_k - sol.q * sol.gamma0 * sol.gamma0;
  const auto trig = uniform_trig(std::sqrt(Complex(omega2, 0.0)), t);
  const double c = trig.cos_wt.real();
  const double s = trig.sinc_wt.real();
  UniformMoments out;
  out.n = sol.gamma0 * sol.gamma0 * s * s;
  out.m = Complex(sol.gamma0 * c * s, -sol.gamma0 * sol.delta_k * s * s);
  return out;
}

UniformBlocks uniform_blocks(double gamma0, std::span<const double> delta, int q, double t,
                             const GridSpec& grid) {
  if (delta.size() != grid.size()) throw std::domain_error("uniform_blocks: delta size mismatch");
  const auto n = static_cast<Eigen::Index>(grid.size());
  UniformBlocks out{Eigen::MatrixXcd::Zero(n, n), Eigen::MatrixXcd::Zero(n, n)};
  const Complex i{0.0, 1.0};
  for (std::size_t m = 0; m < grid.size(); ++m) {
    const double omega2 = delta[m] * delta[m] - q * gamma0 * gamma0;
    const auto trig = uniform_trig(std::sqrt(Complex(omega2, 0.0)), t);
    const auto mi = static_cast<Eigen::Index>(m);
    out.m11(mi, mi) = trig.cos_wt.real() - i * delta[m] * trig.sinc_wt.real();
    out.m12(mi, static_cast<Eigen::Index>(grid.negate(m))) = gamma0 * trig.sinc_wt.real();
  }
  return out;
}

double golden_rule_rate(const PhysicalParams& params) {
  return 1.0 / (std::numbers::sqrt2 * std::numbers::pi) *
         std::pow(params.atom_mass / params.hbar, 1.5) * params.coupling * params.coupling *
         std::sqrt(std::abs(params.detuning));
}

double golden_rule_number(double n0, const PhysicalParams& params, double t_seconds,
                          int dimension) {
  if (dimension != 3) {
    throw ConfigError("the golden-rule estimate is three-dimensional; got D = " +
                      std::to_string(dimension));
  }
  return n0 * golden_rule_rate(params) * t_seconds;
}

double resonance_momentum(const PhysicalParams& params) {
  return std::sqrt(2.0 * params.atom_mass * std::abs(params.detuning) / params.hbar);
}

double bessel_j52(double x) {
  if (x == 0.0) return 0.0;
  const double ax = std::abs(x);
  double value;
  if (ax < 1.0) {
    // J_{5/2}(x) = (x/2)^{5/2} sum_k (-x^2/4)^k / (k! Gamma(k + 7/2)); the closed
    // form below cancels catastrophically for small x (about 45 eps / x^4 relative).
    const double z = -0.25 * ax * ax;
    double term = 1.0 / std::tgamma(3.5);
    double sum = term;
    for (int k = 1; k < 8; ++k) {
      term *= z / (k * (k + 2.5));
      sum += term;
    }
    value = std::pow(0.5 * ax, 2.5) * sum;
  } else {
    value = std::sqrt(2.0 / (std::numbers::pi * ax)) *
            ((3.0 / (ax * ax) - 1.0) * std::sin(ax) - (3.0 / ax) * std::cos(ax));
  }
  // J_{5/2}(-x) is not real; callers only need |x|.
  return value;
}

double cl_asymptote(double displacement, double radius, int q) {
  if (!(radius > 0.0)) throw std::domain_error("cl_asymptote: radius must be positive");
  const double x = std::abs(displacement) * radius;
  double ratio;  // (225 pi / 2) J_{5/2}(x)^2 / x^5
  if (x < 1.0) {
    // J_{5/2}(x) / x^{5/2} as a series avoids the cancellation of the closed form.
    const double z = -0.25 * x * x;
    double term = 1.0 / (std::pow(2.0, 2.5) * std::tgamma(3.5));
    double sum = term;
    for (int k = 1; k < 8; ++k) {
      term *= z / (k * (k + 2.5));
      sum += term;
    }
    ratio = 112.5 * std::numbers::pi * sum * sum;
  } else {
    const double j = bessel_j52(x);
    ratio = 112.5 * std::numbers::pi * j * j / std::pow(x, 5);
  }
  return 1.0 + q * ratio;
}

double pair_identity_residual(double n, Complex m, int q) { return std::norm(m) - n * (1.0 + q * n); }

}  // namespace fermibose
