#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include "fermibose/krylov.hpp"
#include "fermibose/symmetry.hpp"
#include "fermibose/system_operator.hpp"

namespace fermibose {

/// Which block-row of M = exp(A t) a row belongs to: upper rows are the
/// spin-1 annihilation operators, lower rows the spin-2 creation operators.
enum class BlockRow : int { upper = 0, lower = 1 };

struct RowRequest {
  BlockRow block = BlockRow::upper;
  std::size_t index = 0;  ///< 0-based lattice index m

  auto operator<=>(const RowRequest&) const = default;
};

/// One block-row of M at a given time, written in the block convention
///
///     M = [ M11  q M12 ]
///         [ M21    M22 ]
///
/// Upper rows carry (M11 row m, M12 row m); lower rows (M21 row m, M22 row m).
struct MRows {
  double time = 0.0;  ///< t / t0
  RowRequest row;
  Symmetry symmetry = Symmetry::general_complex;
  Eigen::VectorXcd left;   ///< M11 (upper) or M21 (lower) row
  Eigen::VectorXcd right;  ///< M12 (upper) or M22 (lower) row

  const Eigen::VectorXcd& m11_row() const;
  const Eigen::VectorXcd& m12_row() const;
  const Eigen::VectorXcd& m21_row() const;
  const Eigen::VectorXcd& m22_row() const;
};

/// Rows of one time, sorted by request for lookup.
class RowSet {
public:
  RowSet() = default;
  RowSet(double time, std::vector<MRows> rows);

  double time() const noexcept { return time_; }
  std::span<const MRows> rows() const noexcept { return rows_; }
  bool contains(RowRequest r) const;
  const MRows& at(RowRequest r) const;
  const MRows& upper(std::size_t m) const { return at({BlockRow::upper, m}); }

private:
  double time_ = 0.0;
  std::vector<MRows> rows_;
};

/// How a requested row follows from a computed one.
enum class RowTransform {
  /// lower row m from upper row m: M21 = conj(M12), M22 = conj(M11)
  conjugate_swap,
  /// row -k from row k with entries reversed (real and even wave-functions)
  reverse,
  /// both of the above
  reverse_conjugate_swap,
};

struct Reconstruction {
  RowRequest target;
  RowRequest source;
  RowTransform transform;
};

struct RowPlan {
  std::vector<RowRequest> computed;  ///< sorted, unique
  std::vector<Reconstruction> recipe;
  std::vector<RowRequest> requested;  ///< sorted, unique
};

/// Smallest set of rows to compute so that every requested row is either
/// computed or obtained by a symmetry of M:
///   real_psi       lower rows are conjugates of upper rows,
///   real_even_psi  additionally row -k is row k reversed.
RowPlan minimal_row_set(std::span<const RowRequest> requested, Symmetry symmetry,
                        const GridSpec& grid);

/// Applies `plan.recipe` to computed rows of one time; returns every requested row.
RowSet reconstruct_rows(const RowPlan& plan, const RowSet& computed);

/// Computes each requested row of exp(A t) as exp(A^T t) e_R with an
/// independent expv call, on `threads` workers. Output order follows `rows`
/// regardless of scheduling.
std::vector<MRows> rows_of_M(const SystemOperator& op, std::span<const RowRequest> rows, double t,
                             const KrylovConfig& cfg, int threads = 1, ExpvStats* stats = nullptr);

/// Same rows at several increasing times; result[i] holds all rows at times[i].
/// Each row is one multi-time expv sweep. `per_row` receives the
/// work counters of each row in input order.
std::vector<std::vector<MRows>> rows_of_M(const SystemOperator& op,
                                          std::span<const RowRequest> rows,
                                          std::span<const double> times, const KrylovConfig& cfg,
                                          int threads = 1, ExpvStats* stats = nullptr,
                                          std::vector<ExpvStats>* per_row = nullptr);

/// Worker count used when a caller passes threads <= 0.
int default_thread_count() noexcept;

}  // namespace fermibose
