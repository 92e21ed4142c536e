#include <benchmark/benchmark.h>

#include <random>

#include "hfcheck/exactdyn.hpp"
#include "hfcheck/fluctuation.hpp"

using namespace hfcheck;

namespace {

const Potential kV(1, {{{0}, 1.0}, {{1}, 0.375}});

Eigen::MatrixXcd random_matrix(int rows, int cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = cplx(g(rng), g(rng));
  }
  return a;
}

OrbitalSet random_orbitals(int m, int n) { return OrbitalSet(reorthonormalize(random_matrix(m, n, 7))); }

// Arg: cutoff K, so M = 2K + 1.
void BM_BuildHamiltonian(benchmark::State& state) {
  const ModeBasis b(1, static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(build_hamiltonian(b, kV));
}
BENCHMARK(BM_BuildHamiltonian)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

void BM_ApplyParticleHole(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const FockBasis fb(m);
  const OrbitalSet orb = random_orbitals(m, m / 2);
  const FockVector psi = random_matrix(static_cast<int>(fb.dim()), 1, 11).col(0).normalized();
  for (auto _ : state) benchmark::DoNotOptimize(apply_particle_hole(fb, orb, psi));
}
BENCHMARK(BM_ApplyParticleHole)->DenseRange(5, 11, 2)->Unit(benchmark::kMicrosecond);

void BM_SectorEigendecomposition(benchmark::State& state) {
  const ModeBasis b(1, static_cast<int>(state.range(0)), 3);
  const ManyBodyHamiltonian h = build_hamiltonian(b, kV);
  for (auto _ : state) benchmark::DoNotOptimize(ExactPropagator(h, {3}));
}
BENCHMARK(BM_SectorEigendecomposition)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

void BM_ApplyGrowth(benchmark::State& state) {
  const int cutoff = static_cast<int>(state.range(0));
  const ModeBasis b(1, cutoff, 3);
  const FluctuationTerms terms(b, kV, random_orbitals(b.size(), 3));
  const FockVector xi = random_matrix(1 << b.size(), 1, 13).col(0).normalized();
  for (auto _ : state) benchmark::DoNotOptimize(terms.apply_growth(xi));
}
BENCHMARK(BM_ApplyGrowth)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_TraceNorm(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const Eigen::MatrixXcd a = random_matrix(m, m, 17);
  for (auto _ : state) benchmark::DoNotOptimize(trace_norm(a));
}
BENCHMARK(BM_TraceNorm)->RangeMultiplier(2)->Range(8, 128)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
