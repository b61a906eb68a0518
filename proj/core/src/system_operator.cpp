#include "fermibose/system_operator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "fermibose/errors.hpp"
#include "fft.hpp"

namespace fermibose {

void PhysicalParams::validate() const {
  if (q != -1 && q != 1) throw ConfigError("q must be -1 (fermions) or +1 (bosons)");
  if (!(atom_mass > 0.0)) throw ConfigError("atom mass must be positive");
  if (!(coupling >= 0.0)) throw ConfigError("coupling chi must be non-negative");
  if (!(hbar > 0.0)) throw ConfigError("hbar must be positive");
  if (!(t0 > 0.0)) throw ConfigError("t0 must be positive");
  if (!std::isfinite(detuning)) throw ConfigError("detuning must be finite");
}

namespace detail {

// Smallest 2^a 3^b 5^c 7^d >= n.
int good_fft_size(int n) {
  // Powers of two and three times powers of two; FFTW is markedly slower on
  // extents with factors 5 or 7 at these sizes.
  int best = 1;
  while (best < n) best *= 2;
  for (int c = 3; c < best; c *= 2) {
    if (c >= n) {
      best = c;
      break;
    }
  }
  return best;
}

// The Hankel product H v (r) = sum_c gamma_{r+c} v_c is the linear convolution of
// gamma with the reversed vector. It is embedded in a circular convolution of
// extent P_j >= B + S_j per axis, S_j = max |f_j| over stored coefficients, which
// leaves the outputs on [-K, K] free of wrap-around.
struct FftKernel {
  std::vector<int> extents;
  std::size_t total = 1;
  FftPlan forward;
  FftPlan backward;
  FftBuffer gamma_hat;
  FftBuffer gamma_conj_hat;
  std::vector<std::size_t> out_pos;  // r -> position of r
  std::vector<std::size_t> in_pos;   // c -> position of -c
};

}  // namespace detail

struct SystemOperator::Workspace::Impl {
  detail::FftBuffer buffer;
  std::vector<Complex> scratch;
};

SystemOperator::Workspace::Workspace() : impl_(std::make_unique<Impl>()) {}
SystemOperator::Workspace::Workspace(Workspace&&) noexcept = default;
SystemOperator::Workspace& SystemOperator::Workspace::operator=(Workspace&&) noexcept = default;
SystemOperator::Workspace::~Workspace() = default;

SystemOperator SystemOperator::build(const FourierTensor& tensor, const PhysicalParams& params,
                                     const GridSpec& grid, MatvecMode mode) {
  params.validate();
  if (!(tensor.grid() == grid)) throw std::domain_error("tensor was built on a different grid");

  std::vector<double> delta(grid.size());
  for (std::size_t m = 0; m < grid.size(); ++m) {
    delta[m] = params.t0 * (params.detuning +
                            params.hbar * grid.momentum_squared(m) / (2.0 * params.atom_mass));
  }
  // kappa = chi / L^{D/2}
  const double kappa = params.coupling * std::pow(grid.box_length(), -0.5 * grid.dimension());
  std::vector<FourierEntry> coupling;
  coupling.reserve(tensor.nonzeros());
  for (const auto& e : tensor.entries()) coupling.push_back({e.index, params.t0 * kappa * e.value});
  return from_dimensionless(grid, params.q, std::move(delta), std::move(coupling),
                            tensor.symmetry(), mode);
}

SystemOperator SystemOperator::from_dimensionless(const GridSpec& grid, int q,
                                                  std::vector<double> delta,
                                                  std::vector<FourierEntry> coupling,
                                                  Symmetry symmetry, MatvecMode mode) {
  if (q != -1 && q != 1) throw ConfigError("q must be -1 or +1");
  if (delta.size() != grid.size()) {
    throw std::domain_error("delta has " + std::to_string(delta.size()) + " entries, grid has " +
                            std::to_string(grid.size()));
  }
  std::sort(coupling.begin(), coupling.end(),
            [](const FourierEntry& a, const FourierEntry& b) { return a.index < b.index; });
  std::erase_if(coupling, [](const FourierEntry& e) { return e.value == Complex{}; });
  for (const auto& e : coupling) {
    if (e.index >= grid.size()) throw std::domain_error("coupling index outside lattice");
  }

  SystemOperator op;
  op.grid_ = grid;
  op.q_ = q;
  op.delta_ = std::move(delta);
  op.coupling_ = std::move(coupling);
  op.symmetry_ = symmetry;
  const auto d = static_cast<std::size_t>(grid.dimension());
  op.coupling_offsets_.resize(op.coupling_.size() * d);
  for (std::size_t i = 0; i < op.coupling_.size(); ++i) {
    grid.unflatten_into(op.coupling_[i].index,
                        std::span<int>(op.coupling_offsets_).subspan(i * d, d));
  }
  op.finalize(mode);
  return op;
}

void SystemOperator::finalize(MatvecMode mode) {
  if (mode == MatvecMode::automatic) {
    mode = coupling_.size() * 8 > grid_.size() ? MatvecMode::fft : MatvecMode::direct;
  }
  mode_ = mode;
  if (mode_ != MatvecMode::fft || fft_) return;

  const int d = grid_.dimension();
  auto kernel = std::make_shared<detail::FftKernel>();
  kernel->extents.resize(static_cast<std::size_t>(d));
  for (int axis = 0; axis < d; ++axis) {
    int reach = 0;
    for (std::size_t i = 0; i < coupling_.size(); ++i) {
      reach = std::max(reach, std::abs(coupling_offsets_[i * static_cast<std::size_t>(d) +
                                                         static_cast<std::size_t>(axis)]));
    }
    kernel->extents[static_cast<std::size_t>(axis)] =
        detail::good_fft_size(grid_.points_per_axis() + reach);
    kernel->total *= static_cast<std::size_t>(kernel->extents[static_cast<std::size_t>(axis)]);
  }
  auto wrap = [&](std::span<const int> n, int sign) {
    std::size_t p = 0;
    for (int axis = 0; axis < d; ++axis) {
      const int ext = kernel->extents[static_cast<std::size_t>(axis)];
      p = p * static_cast<std::size_t>(ext) +
          static_cast<std::size_t>(((sign * n[static_cast<std::size_t>(axis)]) % ext + ext) % ext);
    }
    return p;
  };

  kernel->forward = detail::FftPlan(kernel->extents, FFTW_FORWARD);
  kernel->backward = detail::FftPlan(kernel->extents, FFTW_BACKWARD);
  kernel->gamma_hat = detail::FftBuffer(kernel->total);
  kernel->gamma_conj_hat = detail::FftBuffer(kernel->total);
  for (std::size_t i = 0; i < kernel->total; ++i) {
    kernel->gamma_hat[i] = Complex{};
    kernel->gamma_conj_hat[i] = Complex{};
  }
  const auto du = static_cast<std::size_t>(d);
  for (std::size_t i = 0; i < coupling_.size(); ++i) {
    const std::size_t p = wrap(std::span<const int>(coupling_offsets_).subspan(i * du, du), 1);
    kernel->gamma_hat[p] = coupling_[i].value;
    kernel->gamma_conj_hat[p] = std::conj(coupling_[i].value);
  }
  kernel->forward.execute(kernel->gamma_hat);
  kernel->forward.execute(kernel->gamma_conj_hat);
  // Fold the inverse-transform normalization into the kernels.
  const double norm = 1.0 / static_cast<double>(kernel->total);
  for (std::size_t i = 0; i < kernel->total; ++i) {
    kernel->gamma_hat[i] *= norm;
    kernel->gamma_conj_hat[i] *= norm;
  }

  kernel->out_pos.resize(grid_.size());
  kernel->in_pos.resize(grid_.size());
  MultiIndex n(du);
  for (std::size_t m = 0; m < grid_.size(); ++m) {
    grid_.unflatten_into(m, n);
    kernel->out_pos[m] = wrap(n, 1);
    kernel->in_pos[m] = wrap(n, -1);
  }
  fft_ = std::move(kernel);
}

SystemOperator SystemOperator::with_mode(MatvecMode mode) const {
  SystemOperator op = *this;
  op.fft_.reset();
  op.finalize(mode);
  return op;
}

SystemOperator::Workspace SystemOperator::make_workspace() const {
  Workspace ws;
  if (fft_) ws.impl_->buffer = detail::FftBuffer(fft_->total);
  ws.impl_->scratch.resize(grid_.size());
  return ws;
}

void SystemOperator::hankel_direct(std::span<const Complex> v, std::span<Complex> out,
                                   bool conjugate) const {
  std::fill(out.begin(), out.end(), Complex{});
  const int d = grid_.dimension();
  const int k = grid_.half_width();
  const auto du = static_cast<std::size_t>(d);
  std::vector<int> lo(du), hi(du), r(du);

  for (std::size_t i = 0; i < coupling_.size(); ++i) {
    const int* f = coupling_offsets_.data() + i * du;
    const Complex g = conjugate ? std::conj(coupling_[i].value) : coupling_[i].value;
    bool empty = false;
    for (std::size_t a = 0; a < du; ++a) {
      // rows r with c = f - r inside [-K, K]
      lo[a] = std::max(-k, f[a] - k);
      hi[a] = std::min(k, f[a] + k);
      if (lo[a] > hi[a]) empty = true;
      r[a] = lo[a];
    }
    if (empty) continue;
    // Odometer over all but the last axis; the last axis is a contiguous run.
    const std::size_t last = du - 1;
    const int run = hi[last] - lo[last] + 1;
    for (;;) {
      std::size_t row = 0;
      std::size_t col = 0;
      for (std::size_t a = 0; a < du; ++a) {
        row += static_cast<std::size_t>(r[a] + k) * grid_.stride(static_cast<int>(a));
        col += static_cast<std::size_t>(f[a] - r[a] + k) * grid_.stride(static_cast<int>(a));
      }
      Complex* o = out.data() + row;
      const Complex* src = v.data() + col;
      for (int j = 0; j < run; ++j) o[j] += g * src[-j];

      std::size_t a = last;
      bool done = true;
      while (a-- > 0) {
        if (++r[a] <= hi[a]) {
          done = false;
          break;
        }
        r[a] = lo[a];
      }
      if (done) break;
    }
  }
}

void SystemOperator::hankel_fft(std::span<const Complex> v, std::span<Complex> out, bool conjugate,
                                Workspace& ws) const {
  const auto& kernel = *fft_;
  auto& buf = ws.impl_->buffer;
  if (buf.size() != kernel.total) buf = detail::FftBuffer(kernel.total);
  std::fill(buf.data(), buf.data() + kernel.total, Complex{});
  for (std::size_t c = 0; c < v.size(); ++c) buf[kernel.in_pos[c]] = v[c];
  kernel.forward.execute(buf);
  const Complex* g = conjugate ? kernel.gamma_conj_hat.data() : kernel.gamma_hat.data();
  for (std::size_t i = 0; i < kernel.total; ++i) buf[i] *= g[i];
  kernel.backward.execute(buf);
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = buf[kernel.out_pos[r]];
}

void SystemOperator::hankel(std::span<const Complex> v, std::span<Complex> out, bool conjugate,
                            Workspace& ws) const {
  if (v.size() != grid_.size() || out.size() != grid_.size()) {
    throw std::domain_error("Hankel product expects vectors of length " +
                            std::to_string(grid_.size()));
  }
  if (mode_ == MatvecMode::fft) {
    hankel_fft(v, out, conjugate, ws);
  } else {
    hankel_direct(v, out, conjugate);
  }
}

void SystemOperator::apply(std::span<const Complex> v, std::span<Complex> out, bool transpose,
                           Workspace& ws) const {
  const std::size_t n = grid_.size();
  if (v.size() != 2 * n || out.size() != 2 * n) {
    throw std::domain_error("apply expects vectors of length " + std::to_string(2 * n) + ", got " +
                            std::to_string(v.size()) + " and " + std::to_string(out.size()));
  }
  const auto v1 = v.first(n);
  const auto v2 = v.subspan(n, n);
  auto upper = out.first(n);
  auto lower = out.subspan(n, n);
  const Complex i{0.0, 1.0};
  const double qd = q_;

  // A   : upper = -i d v1 + q H v2,      lower = conj(H) v1 + i d v2
  // A^T : upper = -i d v1 + conj(H) v2,  lower = q H v1 + i d v2
  // (H^T = H, so the transpose only exchanges the off-diagonal blocks.)
  hankel(v2, upper, transpose, ws);
  const double upper_scale = transpose ? 1.0 : qd;
  for (std::size_t m = 0; m < n; ++m) upper[m] = upper_scale * upper[m] - i * delta_[m] * v1[m];

  hankel(v1, lower, !transpose, ws);
  const double lower_scale = transpose ? qd : 1.0;
  for (std::size_t m = 0; m < n; ++m) lower[m] = lower_scale * lower[m] + i * delta_[m] * v2[m];
}

Eigen::VectorXcd SystemOperator::apply(const Eigen::VectorXcd& v, bool transpose) const {
  Eigen::VectorXcd out(v.size());
  auto ws = make_workspace();
  apply(std::span<const Complex>(v.data(), static_cast<std::size_t>(v.size())),
        std::span<Complex>(out.data(), static_cast<std::size_t>(out.size())), transpose, ws);
  return out;
}

double SystemOperator::norm_estimate(int iterations) const {
  const auto n2 = static_cast<Eigen::Index>(dimension());
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> dist;
  Eigen::VectorXcd x(n2);
  for (Eigen::Index i = 0; i < n2; ++i) x[i] = Complex(dist(rng), dist(rng));
  x.normalize();
  double sigma = 0.0;
  auto ws = make_workspace();
  Eigen::VectorXcd y(n2), z(n2);
  auto as_span = [](Eigen::VectorXcd& e) {
    return std::span<Complex>(e.data(), static_cast<std::size_t>(e.size()));
  };
  for (int it = 0; it < iterations; ++it) {
    apply(as_span(x), as_span(y), false, ws);
    sigma = y.norm();
    if (sigma == 0.0) return 0.0;
    // A^H y = conj(A^T conj(y))
    Eigen::VectorXcd yc = y.conjugate();
    apply(as_span(yc), as_span(z), true, ws);
    x = z.conjugate();
    const double nx = x.norm();
    if (nx == 0.0) break;
    x /= nx;
  }
  return sigma;
}

Eigen::MatrixXcd materialize_dense(const SystemOperator& op, std::size_t cap) {
  const std::size_t n = op.block_size();
  if (n > cap) {
    throw std::length_error("refusing to materialize a dense operator with n = " +
                            std::to_string(n) + " > cap " + std::to_string(cap));
  }
  const GridSpec& grid = op.grid();
  const int k = grid.half_width();
  const auto d = static_cast<std::size_t>(grid.dimension());

  // Dense gamma on [-K, K]^D for lookup of gamma_{n(r) + n(c)}.
  std::vector<Complex> gamma(grid.size(), Complex{});
  for (const auto& e : op.coupling()) gamma[e.index] = e.value;

  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2 * ni, 2 * ni);
  const Complex i{0.0, 1.0};
  for (std::size_t m = 0; m < n; ++m) {
    const auto mi = static_cast<Eigen::Index>(m);
    a(mi, mi) = -i * op.delta()[m];
    a(ni + mi, ni + mi) = i * op.delta()[m];
  }
  MultiIndex nr(d), nc(d), nf(d);
  for (std::size_t r = 0; r < n; ++r) {
    grid.unflatten_into(r, nr);
    for (std::size_t c = 0; c < n; ++c) {
      grid.unflatten_into(c, nc);
      bool inside = true;
      for (std::size_t ax = 0; ax < d; ++ax) {
        nf[ax] = nr[ax] + nc[ax];
        if (nf[ax] < -k || nf[ax] > k) inside = false;
      }
      if (!inside) continue;
      const Complex g = gamma[grid.flatten(nf)];
      const auto ri = static_cast<Eigen::Index>(r);
      const auto ci = static_cast<Eigen::Index>(c);
      a(ri, ni + ci) = static_cast<double>(op.q()) * g;
      a(ni + ri, ci) = std::conj(g);
    }
  }
  return a;
}

void write_operator(std::ostream& out, const SystemOperator& op) {
  const auto old_precision = out.precision(17);
  const GridSpec& grid = op.grid();
  MultiIndex n(static_cast<std::size_t>(grid.dimension()));
  for (std::size_t m = 0; m < grid.size(); ++m) {
    grid.unflatten_into(m, n);
    out << "delta " << m + 1;
    for (int c : n) out << ' ' << c;
    out << ' ' << op.delta()[m] << '\n';
  }
  for (const auto& e : op.coupling()) {
    grid.unflatten_into(e.index, n);
    out << "gamma";
    for (int c : n) out << ' ' << c;
    out << ' ' << e.value.real() << ' ' << e.value.imag() << '\n';
  }
  out.precision(old_precision);
}

}  // namespace fermibose
