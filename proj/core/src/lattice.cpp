#include "fermibose/lattice.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

namespace fermibose {

GridSpec GridSpec::from_box_length(int dimension, int half_width, double box_length) {
  if (!(box_length > 0.0)) {
    throw std::domain_error("box length must be positive");
  }
  return GridSpec(dimension, half_width, box_length, 2.0 * std::numbers::pi / box_length);
}

GridSpec GridSpec::from_spacing(int dimension, int half_width, double dk) {
  if (!(dk > 0.0)) {
    throw std::domain_error("lattice spacing must be positive");
  }
  return GridSpec(dimension, half_width, 2.0 * std::numbers::pi / dk, dk);
}

GridSpec::GridSpec(int dimension, int half_width, double box_length, double spacing)
    : dimension_(dimension),
      half_width_(half_width),
      points_(2 * half_width + 1),
      box_length_(box_length),
      spacing_(spacing) {
  if (dimension < 1) {
    throw std::domain_error("lattice dimension must be >= 1");
  }
  if (half_width < 0) {
    throw std::domain_error("lattice half-width K must be >= 0");
  }
  strides_.assign(static_cast<std::size_t>(dimension), 1);
  for (int axis = dimension - 2; axis >= 0; --axis) {
    strides_[static_cast<std::size_t>(axis)] =
        strides_[static_cast<std::size_t>(axis) + 1] * static_cast<std::size_t>(points_);
  }
  size_ = strides_[0] * static_cast<std::size_t>(points_);
}

bool GridSpec::contains(std::span<const int> n) const noexcept {
  if (n.size() != static_cast<std::size_t>(dimension_)) return false;
  for (int c : n) {
    if (c < -half_width_ || c > half_width_) return false;
  }
  return true;
}

std::size_t GridSpec::flatten(std::span<const int> n) const {
  if (n.size() != static_cast<std::size_t>(dimension_)) {
    throw std::domain_error("multi-index has " + std::to_string(n.size()) +
                            " components, lattice dimension is " + std::to_string(dimension_));
  }
  std::size_t m = 0;
  for (std::size_t axis = 0; axis < n.size(); ++axis) {
    if (n[axis] < -half_width_ || n[axis] > half_width_) {
      throw std::domain_error("component " + std::to_string(n[axis]) + " on axis " +
                              std::to_string(axis + 1) + " is outside [-" +
                              std::to_string(half_width_) + ", " + std::to_string(half_width_) +
                              "]");
    }
    m += static_cast<std::size_t>(n[axis] + half_width_) * strides_[axis];
  }
  return m;
}

void GridSpec::unflatten_into(std::size_t m, std::span<int> out) const {
  if (m >= size_) {
    // Reported in the 1-based convention of the flattening map.
    throw std::domain_error("linear index " + std::to_string(m + 1) + " is outside [1, " +
                            std::to_string(size_) + "]");
  }
  for (std::size_t axis = 0; axis < strides_.size(); ++axis) {
    const std::size_t digit = m / strides_[axis];
    m -= digit * strides_[axis];
    out[axis] = static_cast<int>(digit) - half_width_;
  }
}

MultiIndex GridSpec::unflatten(std::size_t m) const {
  MultiIndex n(static_cast<std::size_t>(dimension_));
  unflatten_into(m, n);
  return n;
}

std::size_t GridSpec::negate(std::size_t m) const {
  if (m >= size_) {
    throw std::domain_error("linear index " + std::to_string(m + 1) + " is outside [1, " +
                            std::to_string(size_) + "]");
  }
  return size_ - 1 - m;
}

std::vector<double> GridSpec::momentum_of(std::size_t m) const {
  const MultiIndex n = unflatten(m);
  std::vector<double> k(n.size());
  for (std::size_t axis = 0; axis < n.size(); ++axis) {
    k[axis] = spacing_ * static_cast<double>(n[axis]);
  }
  return k;
}

double GridSpec::momentum_squared(std::size_t m) const {
  double sum = 0.0;
  for (double c : momentum_of(m)) sum += c * c;
  return sum;
}

}  // namespace fermibose
