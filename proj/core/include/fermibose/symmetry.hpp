#pragma once

#include <string>
#include <string_view>

namespace fermibose {

/// Symmetry class of the condensate wave-function, ordered by increasing
/// structure: each class implies every class before it.
enum class Symmetry {
  general_complex = 0,
  real_psi = 1,       ///< g(-k) = conj(g(k))
  real_even_psi = 2,  ///< additionally every g(k) real
  uniform = 3,        ///< single coefficient at k = 0
};

/// True when `have` carries at least the structure of `need`.
constexpr bool implies(Symmetry have, Symmetry need) noexcept {
  return static_cast<int>(have) >= static_cast<int>(need);
}

std::string_view to_string(Symmetry s) noexcept;
/// Inverse of to_string; throws std::invalid_argument on unknown names.
Symmetry parse_symmetry(std::string_view name);

}  // namespace fermibose
