#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fermibose/krylov.hpp"
#include "fermibose/rows.hpp"

namespace fermibose {

/// Occupations below this are treated as vacuum: g2 is reported undefined.
inline constexpr double kOccupationFloor = 1e-30;

/// n_{k,k'} = <a+_k a_k'> (same for both spins): conj(M12_k) . M12_k'.
Complex normal_moment(const MRows& row_k, const MRows& row_k2);

/// n_k = ||M12_k||^2.
double occupation(const MRows& row_k);

/// m_{k,k'} = <a_{k,1} a_{k',2}> = M11_k . conj(M21_k').
/// `row_k` must be an upper row. `row_k2` may be the lower row k' (always
/// valid) or the upper row k' when the operator symmetry is at least
/// real_psi, in which case M21_k' = conj(M12_k') is used.
Complex anomalous_moment(const MRows& row_k, const MRows& row_k2);

/// 1 + q |n_{k,k'}|^2 / (n_k n_k'); nullopt if either occupation is below the floor.
std::optional<double> g2_same_spin(Complex n_kk2, double n_k, double n_k2, int q);
/// 1 + |m_{k,k'}|^2 / (n_k n_k'); nullopt if either occupation is below the floor.
std::optional<double> g2_opposite_spin(Complex m_kk2, double n_k, double n_k2);

std::optional<double> g2_same_spin(const MRows& row_k, const MRows& row_k2, int q);
std::optional<double> g2_opposite_spin(const MRows& row_k, const MRows& row_k2_for_anomalous,
                                       const MRows& row_k2_upper);

struct MomentPair {
  std::size_t k = 0;   ///< linear lattice index
  std::size_t k2 = 0;
  Complex normal;      ///< n_{k,k'}
  Complex anomalous;   ///< m_{k,k'}
  std::optional<double> g2_same;
  std::optional<double> g2_opposite;
};

struct MomentTable {
  double time = 0.0;
  std::vector<MomentPair> pairs;
  std::vector<std::pair<std::size_t, double>> occupations;  ///< sorted by index
};

using IndexPair = std::pair<std::size_t, std::size_t>;

/// Rows needed to evaluate `pairs`: upper rows of both sides, plus lower rows
/// of the second side for general_complex operators.
std::vector<RowRequest> rows_for_pairs(std::span<const IndexPair> pairs, Symmetry symmetry);

/// Builds the table from rows that include rows_for_pairs(pairs, symmetry).
MomentTable moment_table(const RowSet& rows, std::span<const IndexPair> pairs, int q,
                         Symmetry symmetry);

/// Every lattice mode paired with its partner -k: n_k, m_{k,-k} and the
/// opposite-spin g2 of the pair.
std::vector<IndexPair> back_to_back_pairs(const GridSpec& grid);

/// One point of a collinear slice.
struct SlicePoint {
  std::size_t index = 0;
  double momentum = 0.0;  ///< k along the slice axis, 1/m
  double occupation = 0.0;
  std::optional<double> g2;
};

struct SliceTable {
  double time = 0.0;
  int axis = 0;
  std::size_t reference = 0;
  std::vector<SlicePoint> points;  ///< ordered by momentum
};

/// Linear indices of the B sites on the line through `reference` along `axis`.
std::vector<std::size_t> slice_sites(const GridSpec& grid, int axis, std::size_t reference);

/// Same-spin g2 between each slice site and the reference, from upper rows.
SliceTable slice_table(const RowSet& rows, const GridSpec& grid, int axis, std::size_t reference,
                       int q);

/// Collinear same-spin correlation slices at each time, computing only the
/// rows on the line (halved for real and even wave-functions).
std::vector<SliceTable> cl_slice(const SystemOperator& op, int axis, std::size_t reference,
                                 std::span<const double> times, const KrylovConfig& cfg,
                                 int threads = 1, ExpvStats* stats = nullptr);

/// Order-fixed pairwise summation; the result depends only on the input order.
double pairwise_sum(std::span<const double> values);

/// Atom number per spin, N_sigma(t) = ||M12||_F^2, from per-row squared norms
/// indexed by upper row (size n).
double atom_number_from_norms(std::span<const double> row_norms);

/// True when every single-axis reflection leaves both the couplings and the
/// detunings unchanged (relative tolerance `tol_sym`).
bool axis_mirror_symmetric(const SystemOperator& op, double tol_sym = kDefaultSymmetryTolerance);

/// Rows a full sweep computes and, for every upper row m, which of them
/// carries the same norm. Rows -k mirror rows k for real and even
/// wave-functions; with `axis_mirrors` every single-axis reflection does too,
/// leaving the sites with all coordinates <= 0.
struct SweepPlan {
  std::vector<RowRequest> rows;     ///< sorted upper rows to compute
  std::vector<std::size_t> source;  ///< size n: position in `rows` of the row with equal norm
};
SweepPlan sweep_plan(const GridSpec& grid, Symmetry symmetry, bool axis_mirrors = false);

/// Norms of all n upper rows from the norms of plan.rows (same order).
std::vector<double> expand_sweep_norms(const SweepPlan& plan, std::span<const double> computed_norms);

/// Full row sweep of ||M12||_F^2 at each time. Rows are processed in chunks
/// so memory stays at O(chunk * n); rows with equal norms by symmetry are
/// computed once.
std::vector<double> total_atom_number(const SystemOperator& op, std::span<const double> times,
                                      const KrylovConfig& cfg, int threads = 1,
                                      ExpvStats* stats = nullptr, std::size_t chunk = 64);

}  // namespace fermibose
