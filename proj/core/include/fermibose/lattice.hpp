#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fermibose {

/// Integer coordinates n = (n_1, ..., n_D) of a lattice site, each in [-K, K].
/// Axis 0 is the most significant (slowest-varying) digit of the linear index.
using MultiIndex = std::vector<int>;

/// D-dimensional cubic momentum lattice k = dk * n with B = 2K+1 points per axis.
///
/// Linear indices are 0-based in code: index m corresponds to the 1-based
/// position m+1 of the base-B flattening
///   f(n) = 1 + sum_j (n_j + K) B^(D-j).
/// Under this map negation of the multi-index becomes m -> size()-1-m.
class GridSpec {
public:
  /// Lattice whose box length per axis is `box_length` metres (dk = 2 pi / L).
  static GridSpec from_box_length(int dimension, int half_width, double box_length);
  /// Lattice with spacing `dk` in 1/m (L = 2 pi / dk).
  static GridSpec from_spacing(int dimension, int half_width, double dk);

  int dimension() const noexcept { return dimension_; }
  int half_width() const noexcept { return half_width_; }
  int points_per_axis() const noexcept { return points_; }
  double box_length() const noexcept { return box_length_; }
  double spacing() const noexcept { return spacing_; }
  /// Total number of sites B^D.
  std::size_t size() const noexcept { return size_; }
  /// B^(D-1-axis): the stride of `axis` in the linear index.
  std::size_t stride(int axis) const noexcept { return strides_[static_cast<std::size_t>(axis)]; }

  std::size_t flatten(std::span<const int> n) const;
  MultiIndex unflatten(std::size_t m) const;
  /// Writes the coordinates of site m into `out` (length D) without allocating.
  void unflatten_into(std::size_t m, std::span<int> out) const;
  /// Linear index of -f^{-1}(m).
  std::size_t negate(std::size_t m) const;
  bool contains(std::span<const int> n) const noexcept;

  /// Physical momentum dk * n of site m, in 1/m.
  std::vector<double> momentum_of(std::size_t m) const;
  /// |k|^2 of site m, in 1/m^2.
  double momentum_squared(std::size_t m) const;

  bool operator==(const GridSpec&) const = default;

private:
  GridSpec(int dimension, int half_width, double box_length, double spacing);

  int dimension_ = 1;
  int half_width_ = 0;
  int points_ = 1;
  double box_length_ = 0.0;
  double spacing_ = 0.0;
  std::size_t size_ = 1;
  std::vector<std::size_t> strides_;
};

}  // namespace fermibose
