// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "pamlab/fk/fk.hpp"
#include "pamlab/model/potential.hpp"
#include "pamlab/spectral/domain.hpp"
#include "pamlab/spectral/operator.hpp"

using namespace pamlab;

namespace {

spectral::SchrodingerOperator make_operator(int m) {
  auto mesh = std::make_shared<const spectral::Mesh>(spectral::GridDomain::centred_box(2, 4, m));
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> U(0.0, 3.0);
  std::vector<double> V(mesh->size());
  for (auto& v : V) v = U(g);
  return spectral::SchrodingerOperator(mesh, std::move(V));
}

template <bool Parallel>
void BM_apply(benchmark::State& state) {
  const auto op = make_operator(int(state.range(0)));
  std::vector<double> x(op.size(), 1.0), y(op.size());
  for (auto _ : state) {
    if constexpr (Parallel)
      op.apply(x, y);
    else
      op.apply_serial(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(op.size()));
}

struct Environment {
  model::ModelParams params;
  fk::PathEstimator est;
  fk::FkOptions opt;
  std::unique_ptr<model::TabulatedPotential> field;

  explicit Environment(std::size_t paths) {
    params.dim = 2;
    params.alpha = 4.0;
    est.dim = 2;
    est.t = 1.0;
    est.n_paths = paths;
    opt.trunc_radius = 6.0;
    field = fk::environment_field(params, fk::sample_environment(params, est, 3, 0, opt), est, opt);
  }
};

template <bool Parallel>
void BM_quenched_mass(benchmark::State& state) {
  const Environment env(std::size_t(state.range(0)));
  for (auto _ : state) {
    const auto m = Parallel ? fk::quenched_mass(*env.field, env.est, 7) : fk::quenched_mass_serial(*env.field, env.est, 7);
    benchmark::DoNotOptimize(m.estimate);
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(env.est.n_paths));
}

}  // namespace

BENCHMARK(BM_apply<true>)->Name("apply/parallel")->Arg(32)->Arg(128);
BENCHMARK(BM_apply<false>)->Name("apply/serial")->Arg(32)->Arg(128);
BENCHMARK(BM_quenched_mass<true>)->Name("quenched_mass/parallel")->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_quenched_mass<false>)->Name("quenched_mass/serial")->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
