#include <benchmark/benchmark.h>

#include <random>

#include "metricforge/dynamics.hpp"
#include "metricforge/metric.hpp"
#include "metricforge/models.hpp"
#include "metricforge/phase.hpp"

using namespace metricforge;

namespace {

ComplexMatrix random_matrix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = Complex(u(rng), u(rng));
  }
  return m;
}

const ParamMap kJcFull{{"eps", 0.5}, {"omega", 1}, {"rho", 0.02}};

}  // namespace

static void BM_EigenAnalysis(benchmark::State& state) {
  const ComplexMatrix m = random_matrix(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(eigen_analysis(m));
}
BENCHMARK(BM_EigenAnalysis)->RangeMultiplier(2)->Range(2, 64);

static void BM_SpectralMetric(benchmark::State& state) {
  ParamMap p = kJcFull;
  p["levels"] = static_cast<double>(state.range(0));
  const ModelInstance m = make_model(ModelFamily::jc_full, p);
  const double h_norm = norm(m.hamiltonian);
  for (auto _ : state) {
    const BiorthSystem sys = biorthonormalize(eigen_analysis(m.hamiltonian).pairs, Normalization::unit_left, {}, h_norm);
    benchmark::DoNotOptimize(spectral_metric(sys, m.hamiltonian));
  }
}
BENCHMARK(BM_SpectralMetric)->Arg(2)->Arg(8)->Arg(32);

static void BM_DasMetric(benchmark::State& state) {
  ParamMap p = kJcFull;
  p["levels"] = static_cast<double>(state.range(0));
  const ModelInstance m = make_model(ModelFamily::jc_full, p);
  for (auto _ : state) benchmark::DoNotOptimize(model_das_metric(m));
}
BENCHMARK(BM_DasMetric)->Arg(2)->Arg(8)->Arg(32);

static void BM_Sweep(benchmark::State& state) {
  const std::vector<Axis> axes{{"rho", linspace(0.0, 0.5, 64)}, {"levels", {1.0, 2.0, 4.0, 8.0}}};
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sweep(ModelFamily::jc_full, {{"eps", 0.5}, {"omega", 1}}, axes, {}, threads));
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_Sweep)->Arg(1)->Arg(4)->UseRealTime();

static void BM_MatExp(benchmark::State& state) {
  const ComplexMatrix m = random_matrix(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(mat_exp(m, Complex(0.0, -1.0)));
}
BENCHMARK(BM_MatExp)->RangeMultiplier(2)->Range(2, 32);

static void BM_Evolve(benchmark::State& state) {
  const ModelInstance m = make_model(ModelFamily::jc_doublet, {{"eps", 0.5}, {"n", 0}, {"omega", 1}, {"rho", 0.125}});
  const auto times = linspace(0.0, 10.0, 101);
  const ComplexVector psi0{1.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(evolve(m.hamiltonian, psi0, times, *m.analytic_metric));
}
BENCHMARK(BM_Evolve);
BENCHMARK_MAIN();
