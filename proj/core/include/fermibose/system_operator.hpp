#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "fermibose/condensate.hpp"
#include "fermibose/lattice.hpp"
#include "fermibose/symmetry.hpp"

namespace fermibose {

/// CODATA 2018 reduced Planck constant, J s.
inline constexpr double kHbar = 1.054571817e-34;

/// Physical parameters of the Fermi-Bose model, SI units.
struct PhysicalParams {
  int q = -1;                ///< statistics sign: -1 fermions, +1 bosons
  double atom_mass = 0.0;    ///< m_a, kg
  double detuning = 0.0;     ///< Omega, 1/s
  double coupling = 0.0;     ///< chi, m^{D/2}/s
  double hbar = kHbar;       ///< J s
  double t0 = 1e-3;          ///< characteristic time, s

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

enum class MatvecMode { automatic, direct, fft };

namespace detail {
struct FftKernel;
}

/// The 2n x 2n system matrix
///
///     A = [ -i diag(delta)      q H       ]
///         [  conj(H)         i diag(delta) ]
///
/// in dimensionless time units t/t0, with H(r, c) = gamma_{n(r) + n(c)} the
/// D-block-Hankel coupling. A is never stored; apply() evaluates A v or A^T v.
/// Immutable after construction and safe to share between threads; every
/// concurrent caller needs its own Workspace.
class SystemOperator {
public:
  /// Per-caller scratch for apply().
  class Workspace {
  public:
    Workspace();
    Workspace(Workspace&&) noexcept;
    Workspace& operator=(Workspace&&) noexcept;
    ~Workspace();

  private:
    friend class SystemOperator;
    struct Impl;
    std::unique_ptr<Impl> impl_;
  };

  /// delta_k = t0 (Omega + hbar |k|^2 / (2 m_a)), gamma_k = t0 chi L^{-D/2} g_k.
  static SystemOperator build(const FourierTensor& tensor, const PhysicalParams& params,
                              const GridSpec& grid, MatvecMode mode = MatvecMode::automatic);

  /// Operator from already dimensionless detunings and couplings.
  static SystemOperator from_dimensionless(const GridSpec& grid, int q, std::vector<double> delta,
                                           std::vector<FourierEntry> coupling, Symmetry symmetry,
                                           MatvecMode mode = MatvecMode::automatic);

  const GridSpec& grid() const noexcept { return grid_; }
  int q() const noexcept { return q_; }
  /// n = B^D; the operator acts on vectors of length 2n.
  std::size_t block_size() const noexcept { return grid_.size(); }
  std::size_t dimension() const noexcept { return 2 * grid_.size(); }
  std::span<const double> delta() const noexcept { return delta_; }
  std::span<const FourierEntry> coupling() const noexcept { return coupling_; }
  Symmetry symmetry() const noexcept { return symmetry_; }
  /// Resolved matvec path (never automatic).
  MatvecMode mode() const noexcept { return mode_; }
  /// Same operator, different matvec path.
  SystemOperator with_mode(MatvecMode mode) const;

  Workspace make_workspace() const;

  /// out = A v (or A^T v). `v` and `out` must not alias.
  void apply(std::span<const Complex> v, std::span<Complex> out, bool transpose,
             Workspace& ws) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v, bool transpose = false) const;

  /// out = H v, or conj(H) v when `conjugate` is set (length n each).
  void hankel(std::span<const Complex> v, std::span<Complex> out, bool conjugate,
              Workspace& ws) const;

  /// Estimate of the spectral norm ||A||_2 from power iteration on A^H A.
  double norm_estimate(int iterations = 10) const;

private:
  SystemOperator() = default;
  void finalize(MatvecMode mode);
  void hankel_direct(std::span<const Complex> v, std::span<Complex> out, bool conjugate) const;
  void hankel_fft(std::span<const Complex> v, std::span<Complex> out, bool conjugate,
                  Workspace& ws) const;

  GridSpec grid_ = GridSpec::from_spacing(1, 0, 1.0);
  int q_ = -1;
  std::vector<double> delta_;
  std::vector<FourierEntry> coupling_;
  std::vector<int> coupling_offsets_;  // nnz x D multi-indices of coupling_
  Symmetry symmetry_ = Symmetry::general_complex;
  MatvecMode mode_ = MatvecMode::direct;
  std::shared_ptr<const detail::FftKernel> fft_;
};

/// Default cap on n for dense materialization.
inline constexpr std::size_t kDenseCap = 4096;

/// Explicit 2n x 2n matrix A. Oracle use only; refuses n > cap.
Eigen::MatrixXcd materialize_dense(const SystemOperator& op, std::size_t cap = kDenseCap);

/// Diagonal and coupling listing of the operator for debugging: `delta m n_1..n_D value`
/// lines followed by `gamma n_1..n_D re im` lines.
void write_operator(std::ostream& out, const SystemOperator& op);

}  // namespace fermibose
