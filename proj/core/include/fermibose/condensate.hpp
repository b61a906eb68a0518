#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "fermibose/lattice.hpp"
#include "fermibose/symmetry.hpp"

namespace fermibose {

using Complex = std::complex<double>;

/// Complex field sampled on the B^D spatial grid, in flatten order. Site with
/// multi-index n sits at x = n * L / B (cell midpoints of [-L/2, L/2]^D).
using Field = std::vector<Complex>;

/// Default relative tolerance used to classify coefficient symmetry.
inline constexpr double kDefaultSymmetryTolerance = 1e-10;

enum class CondensateKind { uniform, thomas_fermi, grid_samples };

struct CondensateSpec {
  CondensateKind kind = CondensateKind::uniform;
  /// Peak molecular density rho_0 in 1/m^D (unused for grid_samples).
  double peak_density = 0.0;
  /// Thomas-Fermi radii per axis in metres.
  std::vector<double> tf_radii;
  /// Optional phase theta(x) in radians, B^D samples in flatten order.
  std::vector<double> phase;
  /// Psi_0 samples for grid_samples, B^D values in flatten order.
  Field samples;
};

/// Spatial coordinate of site index `n` along one axis.
double site_position(int n, const GridSpec& grid) noexcept;

/// Samples Psi_0(x) = sqrt(rho_0(x)) exp(i theta(x)) on the spatial grid.
/// Throws ConfigError when the spec is inconsistent or a Thomas-Fermi cloud
/// does not fit inside the box (2 R_j >= L would alias in momentum space).
Field build_condensate(const CondensateSpec& spec, const GridSpec& grid);

struct FourierEntry {
  std::size_t index;  ///< linear lattice index of k
  Complex value;      ///< g_k, units of Psi_0 * m^{D/2}
};

/// Sparse momentum-space coefficients g_k of the condensate wave-function.
/// Coefficients outside [-K, K]^D are implicitly zero.
class FourierTensor {
public:
  FourierTensor() = default;

  /// Builds a tensor from explicit entries (duplicates rejected, zeros dropped)
  /// and classifies its symmetry with relative tolerance `tol_sym`.
  static FourierTensor from_entries(const GridSpec& grid, std::vector<FourierEntry> entries,
                                    double tol_sym = kDefaultSymmetryTolerance);

  const GridSpec& grid() const noexcept { return grid_; }
  /// Entries sorted by linear index.
  std::span<const FourierEntry> entries() const noexcept { return entries_; }
  Symmetry symmetry() const noexcept { return symmetry_; }
  double leading_modulus() const noexcept { return leading_modulus_; }
  std::size_t nonzeros() const noexcept { return entries_.size(); }
  /// g at linear index m, zero when not stored.
  Complex at(std::size_t m) const;

private:
  friend FourierTensor truncate_coefficients(const FourierTensor&, double);

  GridSpec grid_ = GridSpec::from_spacing(1, 0, 1.0);
  std::vector<FourierEntry> entries_;
  Symmetry symmetry_ = Symmetry::general_complex;
  double leading_modulus_ = 0.0;
};

/// Strongest symmetry class satisfied by `entries` within tol_sym * max|g|.
Symmetry classify_symmetry(const GridSpec& grid, std::span<const FourierEntry> entries,
                           double tol_sym = kDefaultSymmetryTolerance);

/// True when the coefficients are unchanged by flipping the sign of any single
/// momentum axis (within tol_sym times the largest modulus). Such operators
/// commute with each axis reflection, so rows related by reflections share norms.
bool axis_mirror_symmetric(const GridSpec& grid, std::span<const FourierEntry> entries,
                           double tol_sym = kDefaultSymmetryTolerance);

/// g_k = L^{-D/2} (L/B)^D sum_x Psi_0(x) exp(-i k.x): midpoint quadrature of the
/// defining integral, evaluated with a centered D-dimensional DFT.
FourierTensor fourier_coefficients(std::span<const Complex> field, const GridSpec& grid,
                                   double tol_sym = kDefaultSymmetryTolerance);

/// Drops every coefficient with |g_k| < rel_threshold * leading_modulus.
FourierTensor truncate_coefficients(const FourierTensor& tensor, double rel_threshold);

/// Psi_0(x) = L^{-D/2} sum_k g_k exp(i k.x) on the spatial grid.
Field reconstruct_density(const FourierTensor& tensor, const GridSpec& grid);

/// Reads `n_1 ... n_D re im` lines (one per site) into a field.
Field read_field_samples(std::istream& in, const GridSpec& grid);
/// Writes the nonzero coefficients as `n_1 ... n_D re im` lines.
void write_fourier_tensor(std::ostream& out, const FourierTensor& tensor);

}  // namespace fermibose
