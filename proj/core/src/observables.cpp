#include "fermibose/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fermibose {

namespace {

void require_same_time(const MRows& a, const MRows& b) {
  if (a.time != b.time) {
    throw std::domain_error("rows at different times (" + std::to_string(a.time) + " vs " +
                            std::to_string(b.time) + ")");
  }
}

}  // namespace

Complex normal_moment(const MRows& row_k, const MRows& row_k2) {
  require_same_time(row_k, row_k2);
  return row_k.m12_row().dot(row_k2.m12_row());  // Eigen dot conjugates the left side
}

double occupation(const MRows& row_k) { return row_k.m12_row().squaredNorm(); }

Complex anomalous_moment(const MRows& row_k, const MRows& row_k2) {
  require_same_time(row_k, row_k2);
  const auto& m11 = row_k.m11_row();
  if (row_k2.row.block == BlockRow::lower) {
    // sum_j M11(k, j) conj(M21(k', j))
    return row_k2.m21_row().dot(m11);
  }
  if (!implies(row_k2.symmetry, Symmetry::real_psi)) {
    throw std::domain_error("anomalous moment of a general complex condensate needs the M21 row of " +
                            std::to_string(row_k2.row.index + 1));
  }
  return (m11.array() * row_k2.m12_row().array()).sum();
}

std::optional<double> g2_same_spin(Complex n_kk2, double n_k, double n_k2, int q) {
  if (!(n_k > kOccupationFloor) || !(n_k2 > kOccupationFloor)) return std::nullopt;
  return 1.0 + q * std::norm(n_kk2) / (n_k * n_k2);
}

std::optional<double> g2_opposite_spin(Complex m_kk2, double n_k, double n_k2) {
  if (!(n_k > kOccupationFloor) || !(n_k2 > kOccupationFloor)) return std::nullopt;
  return 1.0 + std::norm(m_kk2) / (n_k * n_k2);
}

std::optional<double> g2_same_spin(const MRows& row_k, const MRows& row_k2, int q) {
  if (row_k.row == row_k2.row) {
    // |n_kk|^2 = n_k^2 exactly; avoid rounding in the ratio.
    const double n = occupation(row_k);
    if (!(n > kOccupationFloor)) return std::nullopt;
    return 1.0 + q;
  }
  return g2_same_spin(normal_moment(row_k, row_k2), occupation(row_k), occupation(row_k2), q);
}

std::optional<double> g2_opposite_spin(const MRows& row_k, const MRows& row_k2_for_anomalous,
                                       const MRows& row_k2_upper) {
  return g2_opposite_spin(anomalous_moment(row_k, row_k2_for_anomalous), occupation(row_k),
                          occupation(row_k2_upper));
}

std::vector<RowRequest> rows_for_pairs(std::span<const IndexPair> pairs, Symmetry symmetry) {
  std::vector<RowRequest> out;
  const bool need_lower = !implies(symmetry, Symmetry::real_psi);
  for (const auto& [k, k2] : pairs) {
    out.push_back({BlockRow::upper, k});
    out.push_back({BlockRow::upper, k2});
    if (need_lower) out.push_back({BlockRow::lower, k2});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

MomentTable moment_table(const RowSet& rows, std::span<const IndexPair> pairs, int q,
                         Symmetry symmetry) {
  MomentTable table;
  table.time = rows.time();
  const bool need_lower = !implies(symmetry, Symmetry::real_psi);
  std::vector<std::size_t> seen;
  for (const auto& [k, k2] : pairs) {
    const MRows& a = rows.upper(k);
    const MRows& b = rows.upper(k2);
    const MRows& b_anom = need_lower ? rows.at({BlockRow::lower, k2}) : b;
    MomentPair p;
    p.k = k;
    p.k2 = k2;
    p.normal = normal_moment(a, b);
    p.anomalous = anomalous_moment(a, b_anom);
    p.g2_same = g2_same_spin(a, b, q);
    p.g2_opposite = g2_opposite_spin(p.anomalous, occupation(a), occupation(b));
    table.pairs.push_back(p);
    seen.push_back(k);
    seen.push_back(k2);
  }
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  for (std::size_t k : seen) table.occupations.emplace_back(k, occupation(rows.upper(k)));
  return table;
}

std::vector<IndexPair> back_to_back_pairs(const GridSpec& grid) {
  std::vector<IndexPair> out;
  out.reserve(grid.size());
  for (std::size_t m = 0; m < grid.size(); ++m) out.emplace_back(m, grid.negate(m));
  return out;
}

std::vector<std::size_t> slice_sites(const GridSpec& grid, int axis, std::size_t reference) {
  if (axis < 0 || axis >= grid.dimension()) {
    throw std::domain_error("slice axis " + std::to_string(axis + 1) + " outside 1.." +
                            std::to_string(grid.dimension()));
  }
  if (reference >= grid.size()) throw std::domain_error("slice reference outside the lattice");
  MultiIndex n = grid.unflatten(reference);
  std::vector<std::size_t> out;
  const int K = grid.half_width();
  for (int j = -K; j <= K; ++j) {
    n[static_cast<std::size_t>(axis)] = j;
    out.push_back(grid.flatten(n));
  }
  return out;
}

SliceTable slice_table(const RowSet& rows, const GridSpec& grid, int axis, std::size_t reference,
                       int q) {
  SliceTable table;
  table.time = rows.time();
  table.axis = axis;
  table.reference = reference;
  const MRows& ref = rows.upper(reference);
  for (std::size_t m : slice_sites(grid, axis, reference)) {
    const MRows& row = rows.upper(m);
    SlicePoint pt;
    pt.index = m;
    pt.momentum = grid.momentum_of(m)[static_cast<std::size_t>(axis)];
    pt.occupation = occupation(row);
    pt.g2 = g2_same_spin(row, ref, q);
    table.points.push_back(pt);
  }
  return table;
}

std::vector<SliceTable> cl_slice(const SystemOperator& op, int axis, std::size_t reference,
                                 std::span<const double> times, const KrylovConfig& cfg,
                                 int threads, ExpvStats* stats) {
  const auto& grid = op.grid();
  std::vector<RowRequest> wanted;
  for (std::size_t m : slice_sites(grid, axis, reference)) wanted.push_back({BlockRow::upper, m});
  const RowPlan plan = minimal_row_set(wanted, op.symmetry(), grid);
  auto computed = rows_of_M(op, plan.computed, times, cfg, threads, stats);
  std::vector<SliceTable> out;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const RowSet full = reconstruct_rows(plan, RowSet(times[ti], std::move(computed[ti])));
    out.push_back(slice_table(full, grid, axis, reference, op.q()));
  }
  return out;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double atom_number_from_norms(std::span<const double> row_norms) { return pairwise_sum(row_norms); }

bool axis_mirror_symmetric(const SystemOperator& op, double tol_sym) {
  const auto& grid = op.grid();
  if (!axis_mirror_symmetric(grid, op.coupling(), tol_sym)) return false;
  const auto delta = op.delta();
  double scale = 0.0;
  for (double d : delta) scale = std::max(scale, std::abs(d));
  MultiIndex n(static_cast<std::size_t>(grid.dimension()));
  for (std::size_t m = 0; m < grid.size(); ++m) {
    for (int axis = 0; axis < grid.dimension(); ++axis) {
      grid.unflatten_into(m, n);
      n[static_cast<std::size_t>(axis)] = -n[static_cast<std::size_t>(axis)];
      if (std::abs(delta[grid.flatten(n)] - delta[m]) > tol_sym * scale) return false;
    }
  }
  return true;
}

SweepPlan sweep_plan(const GridSpec& grid, Symmetry symmetry, bool axis_mirrors) {
  const bool reverse_ok = implies(symmetry, Symmetry::real_even_psi);
  SweepPlan plan;
  plan.source.resize(grid.size());
  std::vector<std::size_t> position(grid.size(), grid.size());
  MultiIndex n(static_cast<std::size_t>(grid.dimension()));
  for (std::size_t m = 0; m < grid.size(); ++m) {
    std::size_t rep = m;
    if (axis_mirrors) {
      grid.unflatten_into(m, n);
      for (auto& c : n) c = -std::abs(c);
      rep = grid.flatten(n);
    } else if (reverse_ok) {
      rep = std::min(m, grid.negate(m));
    }
    // Representatives never exceed m, so they are numbered before use.
    if (rep == m) {
      position[m] = plan.rows.size();
      plan.rows.push_back({BlockRow::upper, m});
    }
    plan.source[m] = position[rep];
  }
  return plan;
}

std::vector<double> expand_sweep_norms(const SweepPlan& plan, std::span<const double> computed_norms) {
  if (computed_norms.size() != plan.rows.size()) {
    throw std::domain_error("sweep expects " + std::to_string(plan.rows.size()) +
                            " row norms, got " + std::to_string(computed_norms.size()));
  }
  std::vector<double> out(plan.source.size());
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = computed_norms[plan.source[m]];
  return out;
}

std::vector<double> total_atom_number(const SystemOperator& op, std::span<const double> times,
                                      const KrylovConfig& cfg, int threads, ExpvStats* stats,
                                      std::size_t chunk) {
  const auto& grid = op.grid();
  const SweepPlan plan =
      sweep_plan(grid, op.symmetry(), axis_mirror_symmetric(op));
  const auto& rows = plan.rows;
  KrylovConfig shared = cfg;
  if (shared.norm_est <= 0.0) shared.norm_est = op.norm_estimate();
  chunk = std::max<std::size_t>(chunk, 1);

  // norms[ti][i] for computed row i
  std::vector<std::vector<double>> norms(times.size(), std::vector<double>(rows.size()));
  for (std::size_t begin = 0; begin < rows.size(); begin += chunk) {
    const std::size_t end = std::min(rows.size(), begin + chunk);
    const std::span<const RowRequest> part(rows.data() + begin, end - begin);
    const auto block = rows_of_M(op, part, times, shared, threads, stats);
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      for (std::size_t i = 0; i < part.size(); ++i) norms[ti][begin + i] = occupation(block[ti][i]);
    }
  }
  std::vector<double> out;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    out.push_back(atom_number_from_norms(expand_sweep_norms(plan, norms[ti])));
  }
  return out;
}

}  // namespace fermibose
