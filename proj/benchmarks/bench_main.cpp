#include <benchmark/benchmark.h>

#include "qdc/classifiers.hpp"
#include "qdc/linalg.hpp"
#include "qdc/preprocess.hpp"
#include "qdc/quantum.hpp"
#include "qdc/rng.hpp"
#include "qdc/solvers.hpp"

namespace {

using namespace qdc;

SymMatrix random_symmetric(std::size_t n, Xoshiro256& rng) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return SymMatrix(m);
}

std::pair<Matrix, std::vector<int>> random_instance(std::size_t n, std::size_t q, int k,
                                                    Xoshiro256& rng) {
  Matrix x(n, q);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vector v(q);
    for (double& e : v) e = rng.next_gaussian();
    v = l2_normalize(v);
    std::copy(v.begin(), v.end(), x.row(i));
    labels[i] = static_cast<int>(i % static_cast<std::size_t>(k)) + 1;
  }
  return {std::move(x), std::move(labels)};
}

void BM_SymEig(benchmark::State& state) {
  Xoshiro256 rng(1);
  const SymMatrix s = random_symmetric(static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) {
    EigDecomposition eig = sym_eig(s);
    benchmark::DoNotOptimize(eig.eigenvalues.data());
  }
}
BENCHMARK(BM_SymEig)->Arg(64)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_PinvPow(benchmark::State& state) {
  Xoshiro256 rng(2);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  const SymMatrix psd(transpose_times(m, m));
  for (auto _ : state) {
    SymMatrix r = pinv_pow(psd, -0.5);
    benchmark::DoNotOptimize(r.mat().data());
  }
}
BENCHMARK(BM_PinvPow)->Arg(128)->Arg(350)->Unit(benchmark::kMillisecond);

void BM_PgmFit(benchmark::State& state) {
  Xoshiro256 rng(3);
  const std::size_t q = static_cast<std::size_t>(state.range(0));
  std::vector<DensityMatrix> states;
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) {
    Vector v(q);
    for (double& e : v) e = rng.next_gaussian();
    states.push_back(to_density(l2_normalize(v)));
    labels.push_back(i % 10 + 1);
  }
  const ClassEnsemble ens = class_centroids(states, labels);
  for (auto _ : state) {
    Povm povm = pgm(ens);
    benchmark::DoNotOptimize(povm.elements.data());
  }
}
BENCHMARK(BM_PgmFit)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_KpgmFit(benchmark::State& state) {
  Xoshiro256 rng(4);
  auto [x, labels] = random_instance(static_cast<std::size_t>(state.range(0)), 784, 10, rng);
  for (auto _ : state) {
    KernelPgmModel model = kpgm_fit(x, labels, 4);
    benchmark::DoNotOptimize(model.g_inv_sqrt.mat().data());
  }
}
BENCHMARK(BM_KpgmFit)->Arg(100)->Arg(350)->Unit(benchmark::kMillisecond);

void BM_KpgmScores(benchmark::State& state) {
  Xoshiro256 rng(5);
  auto [x, labels] = random_instance(350, 784, 10, rng);
  const KernelPgmModel model = kpgm_fit(x, labels, 4);
  Vector z(784);
  for (double& e : z) e = rng.next_gaussian();
  z = l2_normalize(z);
  for (auto _ : state) {
    Vector s = kpgm_scores(model, z);
    benchmark::DoNotOptimize(s.data());
  }
}
BENCHMARK(BM_KpgmScores);

void BM_TensorPower(benchmark::State& state) {
  Xoshiro256 rng(6);
  Vector v(10);
  for (double& e : v) e = rng.next_gaussian();
  v = l2_normalize(v);
  const std::size_t m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    Vector t = tensor_power(v, m);
    benchmark::DoNotOptimize(t.data());
  }
}
BENCHMARK(BM_TensorPower)->Arg(2)->Arg(4)->Arg(6);

void BM_SdpSolve(benchmark::State& state) {
  Xoshiro256 rng(7);
  const std::size_t q = static_cast<std::size_t>(state.range(0));
  std::vector<DensityMatrix> states;
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) {
    Vector v(q);
    for (double& e : v) e = rng.next_gaussian();
    states.push_back(to_density(l2_normalize(v)));
    labels.push_back(i % 4 + 1);
  }
  PovmSdpProblem problem;
  problem.ensemble = class_centroids(states, labels);
  for (auto _ : state) {
    auto [povm, report] = solve_povm_sdp(problem, 1e-6);
    benchmark::DoNotOptimize(report.iterations);
  }
}
BENCHMARK(BM_SdpSolve)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_BoxGapLp(benchmark::State& state) {
  Xoshiro256 rng(8);
  const std::size_t q = static_cast<std::size_t>(state.range(0));
  std::vector<Vector> centroids;
  for (int k = 0; k < 5; ++k) {
    Vector c(q);
    for (double& e : c) e = rng.uniform(-1.0, 1.0);
    centroids.push_back(std::move(c));
  }
  for (auto _ : state) {
    BoxGapLpSolution sol = solve_box_gap_lp(centroids, 1.0);
    benchmark::DoNotOptimize(sol.gamma);
  }
}
BENCHMARK(BM_BoxGapLp)->Arg(10)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
