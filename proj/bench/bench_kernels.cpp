#include <random>

#include <benchmark/benchmark.h>

#include "mvsis/kernels.hpp"
#include "mvsis/model.hpp"

namespace {

using namespace mvsis;

struct Fixture {
  Matrix adjacency;
  MultiVirusModel model;
  Matrix x;
  std::vector<EpidemicState> states;
};

Fixture make_fixture(Index n) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) a(i, j) = u(rng) < 0.1 ? 1.0 : 0.0;
  }
  const double scale = 0.4 / std::max(1.0, a.rowwise().sum().maxCoeff());
  std::vector<VirusLayer> layers{VirusLayer::homogeneous(scale, a, 0.3), VirusLayer::homogeneous(0.8 * scale, a, 0.2)};
  Matrix x(n, 2);
  for (Index i = 0; i < n; ++i) {
    x(i, 0) = 0.4 * u(rng);
    x(i, 1) = 0.4 * u(rng);
  }
  MultiVirusModel model(1.0, std::move(layers));
  Matrix next;
  kernels::advance_reference(model, x, next);
  std::vector<EpidemicState> states{EpidemicState(x), EpidemicState(next)};
  return {std::move(a), std::move(model), std::move(x), std::move(states)};
}

void BM_AdvanceReference(benchmark::State& state) {
  const auto f = make_fixture(state.range(0));
  Matrix next;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::advance_reference(f.model, f.x, next));
  }
}

void BM_AdvanceParallel(benchmark::State& state) {
  const auto f = make_fixture(state.range(0));
  Matrix next;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::advance_parallel(f.model, f.x, next));
  }
}

void BM_MatvecReference(benchmark::State& state) {
  const auto f = make_fixture(state.range(0));
  const Vector v = f.x.col(0);
  Vector y;
  for (auto _ : state) {
    kernels::matvec_reference(f.adjacency, v, y);
    benchmark::DoNotOptimize(y.data());
  }
}

void BM_MatvecParallel(benchmark::State& state) {
  const auto f = make_fixture(state.range(0));
  const Vector v = f.x.col(0);
  Vector y;
  for (auto _ : state) {
    kernels::matvec_parallel(f.adjacency, v, y);
    benchmark::DoNotOptimize(y.data());
  }
}

void BM_PhiRowsReference(benchmark::State& state) {
  const auto f = make_fixture(state.range(0));
  Eigen::MatrixX2d phi(f.x.rows(), 2);
  Vector rhs(f.x.rows());
  for (auto _ : state) {
    kernels::phi_rows_reference(f.states, f.adjacency, 0, phi, rhs);
    benchmark::DoNotOptimize(phi.data());
  }
}

void BM_PhiRowsParallel(benchmark::State& state) {
  const auto f = make_fixture(state.range(0));
  Eigen::MatrixX2d phi(f.x.rows(), 2);
  Vector rhs(f.x.rows());
  for (auto _ : state) {
    kernels::phi_rows_parallel(f.states, f.adjacency, 0, phi, rhs);
    benchmark::DoNotOptimize(phi.data());
  }
}

}  // namespace

BENCHMARK(BM_AdvanceReference)->Arg(256)->Arg(1024)->Arg(3000);
BENCHMARK(BM_AdvanceParallel)->Arg(256)->Arg(1024)->Arg(3000);
BENCHMARK(BM_MatvecReference)->Arg(256)->Arg(1024)->Arg(3000);
BENCHMARK(BM_MatvecParallel)->Arg(256)->Arg(1024)->Arg(3000);
BENCHMARK(BM_PhiRowsReference)->Arg(256)->Arg(1024)->Arg(3000);
BENCHMARK(BM_PhiRowsParallel)->Arg(256)->Arg(1024)->Arg(3000);

BENCHMARK_MAIN();
