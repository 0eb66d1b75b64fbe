#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "subdiff/fracpde.hpp"
#include "subdiff/levy.hpp"
#include "subdiff/sde.hpp"
#include "subdiff/specfun.hpp"
#include "subdiff/subordination.hpp"

using namespace subdiff;

namespace {

void BM_StableIncrement(benchmark::State& state) {
  const specfun::StableIndex beta(static_cast<double>(state.range(0)) / 10.0);
  rng::RandomStream s(1, {1});
  for (auto _ : state) benchmark::DoNotOptimize(subordination::sample_stable_increment(beta, 1e-3, s));
}
BENCHMARK(BM_StableIncrement)->Arg(3)->Arg(5)->Arg(8);

void BM_SymmetricStable(benchmark::State& state) {
  rng::RandomStream s(1, {2});
  for (auto _ : state) benchmark::DoNotOptimize(levy::sample_symmetric_stable(1.5, s));
}
BENCHMARK(BM_SymmetricStable);

void BM_InverseSubordinatorPath(benchmark::State& state) {
  const auto spec = subordination::MixtureSpec::single(0.5);
  std::uint64_t p = 0;
  for (auto _ : state) {
    auto streams = subordination::component_streams(spec, 3, p++);
    const auto path = subordination::sample_mixture_path(spec, 1e-3, 1.0, streams);
    benchmark::DoNotOptimize(subordination::inverse_process(path, 1.0));
  }
}
BENCHMARK(BM_InverseSubordinatorPath);

void BM_TimeChangedBrownianPath(benchmark::State& state) {
  const auto spec = subordination::MixtureSpec::single(0.5);
  sde::SimulationOptions opt;
  const std::vector<double> t{1.0};
  std::uint64_t p = 0;
  for (auto _ : state) {
    auto streams = sde::PathStreams::for_path(spec, 4, p++);
    benchmark::DoNotOptimize(sde::simulate_time_changed_path(sde::SDECoefficients::brownian(),
                                                             levy::LevyTriplet::brownian(), spec, 0.0, t, opt,
                                                             streams));
  }
}
BENCHMARK(BM_TimeChangedBrownianPath);

void BM_MittagLeffler(benchmark::State& state) {
  const double z = -static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(specfun::mittag_leffler(0.6, z));
}
BENCHMARK(BM_MittagLeffler)->Arg(0)->Arg(5)->Arg(30)->Arg(80);

void BM_StableDensity(benchmark::State& state) {
  const double tau = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(specfun::stable_density(specfun::StableIndex(0.7), tau));
}
BENCHMARK(BM_StableDensity)->Arg(1)->Arg(10)->Arg(100);

void BM_InverseDensityTwoAtom(benchmark::State& state) {
  const subordination::MixtureSpec spec({{1.0, specfun::StableIndex(0.4)}, {1.0, specfun::StableIndex(0.8)}});
  for (auto _ : state) benchmark::DoNotOptimize(subordination::inverse_density(spec, 1.0, 0.7));
}
BENCHMARK(BM_InverseDensityTwoAtom);

void BM_L1ForwardHeat(benchmark::State& state) {
  const auto grid = fracpde::make_space_grid(8.0, 0.02);
  const fracpde::DriftDiffusion heat{{}, [](double) { return 1.0; }, {}, fracpde::OperatorForm::kForward};
  const auto phi = fracpde::discrete_delta(grid);
  const auto steps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        fracpde::solve_dode(fracpde::DistributedOrder::single(0.5), heat, phi, grid, {1.0 / steps, steps}));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_L1ForwardHeat)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond)->Complexity();

void BM_SpectralFractionalLaplacian(benchmark::State& state) {
  const fracpde::SpaceGrid grid{4.0 * M_PI, static_cast<std::size_t>(state.range(0))};
  std::vector<double> u(grid.points);
  for (std::size_t m = 0; m < u.size(); ++m) u[m] = std::exp(-grid.x(m) * grid.x(m));
  const fracpde::FractionalLaplacian gen{1.5, {}, {}};
  for (auto _ : state) benchmark::DoNotOptimize(fracpde::fractional_laplacian_apply(gen, grid, u));
}
BENCHMARK(BM_SpectralFractionalLaplacian)->Arg(512)->Arg(4096);

}  // namespace
BENCHMARK_MAIN();
