#include "fermibose/rows.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "fermibose/errors.hpp"

namespace fermibose {

namespace {

std::string describe(RowRequest r) {
  return std::string(r.block == BlockRow::upper ? "upper" : "lower") + " row " +
         std::to_string(r.index + 1);
}

}  // namespace

const Eigen::VectorXcd& MRows::m11_row() const {
  if (row.block != BlockRow::upper) throw std::domain_error("m11_row requested from a lower row");
  return left;
}
const Eigen::VectorXcd& MRows::m12_row() const {
  if (row.block != BlockRow::upper) throw std::domain_error("m12_row requested from a lower row");
  return right;
}
const Eigen::VectorXcd& MRows::m21_row() const {
  if (row.block != BlockRow::lower) throw std::domain_error("m21_row requested from an upper row");
  return left;
}
const Eigen::VectorXcd& MRows::m22_row() const {
  if (row.block != BlockRow::lower) throw std::domain_error("m22_row requested from an upper row");
  return right;
}

RowSet::RowSet(double time, std::vector<MRows> rows) : time_(time), rows_(std::move(rows)) {
  std::sort(rows_.begin(), rows_.end(),
            [](const MRows& a, const MRows& b) { return a.row < b.row; });
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].time != time_) {
      throw std::domain_error(describe(rows_[i].row) + " has time " +
                              std::to_string(rows_[i].time) + ", row set is at " +
                              std::to_string(time_));
    }
    if (i > 0 && rows_[i].row == rows_[i - 1].row) {
      throw std::domain_error("duplicate " + describe(rows_[i].row));
    }
  }
}

bool RowSet::contains(RowRequest r) const {
  auto it = std::lower_bound(rows_.begin(), rows_.end(), r,
                             [](const MRows& a, RowRequest key) { return a.row < key; });
  return it != rows_.end() && it->row == r;
}

const MRows& RowSet::at(RowRequest r) const {
  auto it = std::lower_bound(rows_.begin(), rows_.end(), r,
                             [](const MRows& a, RowRequest key) { return a.row < key; });
  if (it == rows_.end() || it->row != r) {
    throw std::out_of_range(describe(r) + " is not available at t = " + std::to_string(time_));
  }
  return *it;
}

RowPlan minimal_row_set(std::span<const RowRequest> requested, Symmetry symmetry,
                        const GridSpec& grid) {
  RowPlan plan;
  plan.requested.assign(requested.begin(), requested.end());
  std::sort(plan.requested.begin(), plan.requested.end());
  plan.requested.erase(std::unique(plan.requested.begin(), plan.requested.end()),
                       plan.requested.end());
  for (const auto& r : plan.requested) {
    if (r.index >= grid.size()) throw std::domain_error(describe(r) + " is outside the lattice");
  }

  const bool conj_ok = implies(symmetry, Symmetry::real_psi);
  const bool reverse_ok = implies(symmetry, Symmetry::real_even_psi);

  for (const auto& r : plan.requested) {
    RowRequest source = r;
    bool reversed = false;
    bool swapped = false;
    if (conj_ok && r.block == BlockRow::lower) {
      source.block = BlockRow::upper;
      swapped = true;
    }
    if (reverse_ok) {
      const std::size_t neg = grid.negate(r.index);
      if (neg < r.index) {
        source.index = neg;
        reversed = true;
      }
    }
    plan.computed.push_back(source);
    if (swapped || reversed) {
      const RowTransform tr = swapped && reversed ? RowTransform::reverse_conjugate_swap
                              : swapped           ? RowTransform::conjugate_swap
                                                  : RowTransform::reverse;
      plan.recipe.push_back({r, source, tr});
    }
  }
  std::sort(plan.computed.begin(), plan.computed.end());
  plan.computed.erase(std::unique(plan.computed.begin(), plan.computed.end()),
                      plan.computed.end());
  return plan;
}

RowSet reconstruct_rows(const RowPlan& plan, const RowSet& computed) {
  std::vector<MRows> out;
  out.reserve(plan.requested.size());
  std::size_t next_recipe = 0;
  // plan.recipe follows plan.requested order.
  for (const auto& r : plan.requested) {
    if (next_recipe < plan.recipe.size() && plan.recipe[next_recipe].target == r) {
      const auto& rec = plan.recipe[next_recipe++];
      const MRows& src = computed.at(rec.source);
      MRows row;
      row.time = src.time;
      row.row = r;
      row.symmetry = src.symmetry;
      switch (rec.transform) {
        case RowTransform::conjugate_swap:
          row.left = src.right.conjugate();
          row.right = src.left.conjugate();
          break;
        case RowTransform::reverse:
          row.left = src.left.reverse();
          row.right = src.right.reverse();
          break;
        case RowTransform::reverse_conjugate_swap:
          row.left = src.right.reverse().conjugate();
          row.right = src.left.reverse().conjugate();
          break;
      }
      out.push_back(std::move(row));
    } else {
      out.push_back(computed.at(r));
    }
  }
  return RowSet(computed.time(), std::move(out));
}

int default_thread_count() noexcept {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<std::vector<MRows>> rows_of_M(const SystemOperator& op,
                                          std::span<const RowRequest> rows,
                                          std::span<const double> times, const KrylovConfig& cfg,
                                          int threads, ExpvStats* stats,
                                          std::vector<ExpvStats>* per_row) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || (i > 0 && !(times[i] > times[i - 1]))) {
      throw std::domain_error("times must be non-negative and strictly increasing");
    }
  }
  const std::size_t n = op.block_size();
  for (const auto& r : rows) {
    if (r.index >= n) throw std::domain_error(describe(r) + " is outside the lattice");
  }
  cfg.validate(op.dimension());

  KrylovConfig shared = cfg;
  if (shared.norm_est <= 0.0) shared.norm_est = op.norm_estimate();

  std::vector<std::vector<MRows>> result(times.size(), std::vector<MRows>(rows.size()));
  std::vector<ExpvStats> row_stats(rows.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::size_t error_row = rows.size();
  std::exception_ptr error;

  const double q = op.q();
  auto worker = [&] {
    KrylovPropagator prop(op, shared);
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= rows.size() || failed.load()) return;
      try {
        const RowRequest req = rows[i];
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(2 * n));
        v[static_cast<Eigen::Index>(req.block == BlockRow::upper ? req.index : n + req.index)] = 1.0;
        std::vector<Eigen::VectorXcd> vs;
        try {
          vs = prop.expv_times(v, times, true, &row_stats[i]);
        } catch (const NumericalError& e) {
          throw NumericalError("propagating to t/t0 = " + std::to_string(times.back()) + ": " +
                               e.what());
        }
        for (std::size_t ti = 0; ti < times.size(); ++ti) {
          const Eigen::VectorXcd& x = vs[ti];
          MRows& out = result[ti][i];
          out.time = times[ti];
          out.row = req;
          out.symmetry = op.symmetry();
          const auto ni = static_cast<Eigen::Index>(n);
          out.left = x.head(ni);
          out.right = x.tail(ni);
          // exp(At) upper-right block is q M12.
          if (req.block == BlockRow::upper) out.right *= q;
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_row) {
          error_row = i;
          error = std::current_exception();
        }
        failed.store(true);
      }
    }
  };

  const int workers = std::max(1, std::min<int>(threads <= 0 ? default_thread_count() : threads,
                                                static_cast<int>(std::max<std::size_t>(rows.size(), 1))));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  if (error) {
    try {
      std::rethrow_exception(error);
    } catch (const NumericalError& e) {
      throw NumericalError(describe(rows[error_row]) + ": " + e.what());
    }
  }
  if (stats) {
    for (const auto& s : row_stats) *stats += s;
  }
  if (per_row) *per_row = std::move(row_stats);
  return result;
}

std::vector<MRows> rows_of_M(const SystemOperator& op, std::span<const RowRequest> rows, double t,
                             const KrylovConfig& cfg, int threads, ExpvStats* stats) {
  const double times[] = {t};
  return std::move(rows_of_M(op, rows, times, cfg, threads, stats).front());
}

}  // namespace fermibose
