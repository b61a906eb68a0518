#include "doctest.h"

#include <random>

#include "fermibose/dense.hpp"
#include "fermibose/observables.hpp"
#include "reference.hpp"

using namespace fermibose;

// Randomised structural properties of M = exp(A t) over many small systems.
TEST_SUITE("properties") {
  TEST_CASE("M is unitary for fermions and pseudo-unitary for bosons") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.05, 2.0);
    for (int trial = 0; trial < 24; ++trial) {
      const int d = 1 + trial % 3;
      const auto grid = GridSpec::from_spacing(d, d == 3 ? 1 : 2, 1.0);
      const int q = trial % 2 ? 1 : -1;
      const auto sym = static_cast<Symmetry>(trial % 3);
      const auto op = SystemOperator::from_dimensionless(
          grid, q, reference::simple_detunings(grid, u(rng)),
          reference::random_entries(grid, sym, 500 + trial, u(rng) * 0.5), sym);
      const auto m = reference::taylor_expm(materialize_dense(op) * u(rng));
      const auto n = static_cast<Eigen::Index>(grid.size());
      Eigen::VectorXcd j = Eigen::VectorXcd::Ones(2 * n);
      j.tail(n) *= static_cast<double>(q < 0 ? 1 : -1);
      // fermions: M M^H = I; bosons: M J M^H = J with J = diag(I, -I)
      const Eigen::MatrixXcd lhs = m * j.asDiagonal() * m.adjoint();
      const Eigen::MatrixXcd rhs = j.asDiagonal();
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, m.cwiseAbs2().maxCoeff()));
      CHECK(block_identity_residuals(m, q).conjugation <= 1e-11 * std::max(1.0, m.cwiseAbs().maxCoeff()));
    }
  }

  TEST_CASE("moment matrices are positive semidefinite and obey the exclusion bound") {
    KrylovConfig cfg;
    cfg.tol = 1e-12;
    for (int trial = 0; trial < 8; ++trial) {
      const auto grid = GridSpec::from_spacing(2, 2, 1.0);
      const int q = trial % 2 ? 1 : -1;
      const auto op = SystemOperator::from_dimensionless(
          grid, q, reference::simple_detunings(grid),
          reference::random_entries(grid, Symmetry::real_psi, 900 + trial, 0.6), Symmetry::real_psi);
      std::vector<RowRequest> req;
      for (std::size_t m = 0; m < grid.size(); ++m) req.push_back({BlockRow::upper, m});
      const RowSet rows(1.5, rows_of_M(op, req, 1.5, cfg));
      const auto n = static_cast<Eigen::Index>(grid.size());
      Eigen::MatrixXcd moments(n, n);
      for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
          moments(a, b) = normal_moment(rows.upper(static_cast<std::size_t>(a)),
                                        rows.upper(static_cast<std::size_t>(b)));
        }
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(moments);
      const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
      CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * std::max(1.0, top));
      if (q < 0) CHECK(eig.eigenvalues().maxCoeff() <= 1.0 + 1e-10);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double nk = occupation(rows.upper(k));
        const double nm = occupation(rows.upper(grid.negate(k)));
        const Complex mk = anomalous_moment(rows.upper(k), rows.upper(grid.negate(k)));
        // Cauchy-Schwarz: |<a_k a_-k>|^2 <= <a+a>_k <a a+>_-k and the mirrored product
        const double slack = 1e-10 * std::max(1.0, nk * nm);
        CHECK(std::norm(mk) - nk * (1.0 + q * nm) <= slack);
        CHECK(std::norm(mk) - nm * (1.0 + q * nk) <= slack);
        if (q < 0) {
          CHECK(nk >= -1e-12);
          CHECK(nk <= 1.0 + 1e-12);
        }
      }
    }
  }
}
