// Micro benchmarks of the matvec paths and the Krylov propagator.

#include <benchmark/benchmark.h>

#include <vector>

#include "fermibose/condensate.hpp"
#include "fermibose/krylov.hpp"
#include "fermibose/system_operator.hpp"

using namespace fermibose;

namespace {

// Thomas-Fermi operator on a (2K+1)^D lattice with desk-like parameters.
SystemOperator make_operator(int dim, int half_width, MatvecMode mode) {
  const auto grid = GridSpec::from_spacing(dim, half_width, 2.8e5);
  CondensateSpec spec;
  spec.kind = CondensateKind::thomas_fermi;
  spec.peak_density = 1e15;
  spec.tf_radii.assign(static_cast<std::size_t>(dim), 4e-6);
  const auto field = build_condensate(spec, grid);
  PhysicalParams p;
  p.atom_mass = 6.642e-26;
  p.detuning = -1e3;
  p.coupling = 2e-5;
  return SystemOperator::build(fourier_coefficients(field, grid), p, grid, mode);
}

Eigen::VectorXcd unit_vector(std::size_t dim) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  v[0] = 1.0;
  return v;
}

void apply_bench(benchmark::State& state, MatvecMode mode) {
  const auto op = make_operator(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), mode);
  auto ws = op.make_workspace();
  std::vector<Complex> v(op.dimension(), Complex(1.0, 0.5));
  std::vector<Complex> out(op.dimension());
  for (auto _ : state) {
    op.apply(v, out, false, ws);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetLabel(mode == MatvecMode::fft ? "fft" : "direct");
}

void BM_ApplyDirect(benchmark::State& state) { apply_bench(state, MatvecMode::direct); }
void BM_ApplyFft(benchmark::State& state) { apply_bench(state, MatvecMode::fft); }

void BM_Expv(benchmark::State& state) {
  const auto op = make_operator(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)),
                                MatvecMode::automatic);
  KrylovConfig cfg;
  cfg.tol = 1e-10;
  KrylovPropagator prop(op, cfg);
  const auto v = unit_vector(op.dimension());
  for (auto _ : state) benchmark::DoNotOptimize(prop.expv(v, 1.0, false));
}

}  // namespace

BENCHMARK(BM_ApplyDirect)->Args({1, 64})->Args({2, 8})->Args({2, 16})->Args({3, 5});
BENCHMARK(BM_ApplyFft)->Args({1, 64})->Args({2, 8})->Args({2, 16})->Args({3, 5})->Args({3, 15});
BENCHMARK(BM_Expv)->Args({2, 8})->Args({3, 5})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
