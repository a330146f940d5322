#include <benchmark/benchmark.h>

#include "qdspdc/kernels.hpp"
#include "qdspdc/simkit.hpp"

using namespace qdspdc;
namespace k = qdspdc::kernels;

namespace {

MatrixXc random_hermitian(Eigen::Index n) {
  const MatrixXc a = MatrixXc::Random(n, n);
  return a + a.adjoint();
}

template <auto Fn>
void trace_product(benchmark::State& st) {
  const auto n = static_cast<Eigen::Index>(st.range(0));
  const MatrixXc a = random_hermitian(n), b = random_hermitian(n);
  for (auto _ : st) benchmark::DoNotOptimize(Fn(a, b));
}

template <auto Fn>
void pair_density(benchmark::State& st) {
  const auto n = static_cast<Eigen::Index>(st.range(0));
  const MatrixXc a = random_hermitian(n), b = random_hermitian(n);
  for (auto _ : st) benchmark::DoNotOptimize(Fn(a, b, k::PairWeights{}));
}

template <auto Fn>
void diagonal_sums(benchmark::State& st) {
  const auto n = static_cast<Eigen::Index>(st.range(0));
  const Eigen::MatrixXd m = Eigen::MatrixXd::Random(n, n);
  for (auto _ : st) benchmark::DoNotOptimize(Fn(m));
}

template <auto Fn>
void convolve_full(benchmark::State& st) {
  const Eigen::VectorXd y = Eigen::VectorXd::Random(st.range(0));
  const Eigen::VectorXd kern = Eigen::VectorXd::Random(1001);
  for (auto _ : st) benchmark::DoNotOptimize(Fn(y, kern));
}

template <auto Fn>
void dip_cross_terms(benchmark::State& st) {
  const auto n = static_cast<Eigen::Index>(st.range(0));
  const MatrixXc f = MatrixXc::Random(n, n);
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd nu = Eigen::VectorXd::LinSpaced(n, -200.0, 200.0);
  std::vector<double> delays;
  for (int i = -50; i <= 50; ++i) delays.push_back(i);
  for (auto _ : st) benchmark::DoNotOptimize(Fn(f, w, nu, delays));
}

void simulate(benchmark::State& st) {
  ExperimentConfig cfg;
  cfg.duration = 0.05;
  const SimulationModel model(cfg);
  SimulationOptions opt;
  opt.threads = static_cast<int>(st.range(0));
  for (auto _ : st) {
    VectorSink sink;
    simulate_run(model, sink, opt);
    benchmark::DoNotOptimize(sink.records.data());
  }
}

}  // namespace

BENCHMARK(trace_product<k::serial::trace_product>)->Name("trace_product/serial")->Arg(512)->Arg(1024);
BENCHMARK(trace_product<k::omp::trace_product>)->Name("trace_product/omp")->Arg(512)->Arg(1024);
BENCHMARK(pair_density<k::serial::pair_density>)->Name("pair_density/serial")->Arg(512)->Arg(1024);
BENCHMARK(pair_density<k::omp::pair_density>)->Name("pair_density/omp")->Arg(512)->Arg(1024);
BENCHMARK(diagonal_sums<k::serial::diagonal_sums>)->Name("diagonal_sums/serial")->Arg(1024)->Arg(2048);
BENCHMARK(diagonal_sums<k::omp::diagonal_sums>)->Name("diagonal_sums/omp")->Arg(1024)->Arg(2048);
BENCHMARK(convolve_full<k::serial::convolve_full>)->Name("convolve_full/serial")->Arg(4096)->Arg(16384);
BENCHMARK(convolve_full<k::omp::convolve_full>)->Name("convolve_full/omp")->Arg(4096)->Arg(16384);
BENCHMARK(dip_cross_terms<k::serial::dip_cross_terms>)->Name("dip_cross_terms/serial")->Arg(201)->Arg(401);
BENCHMARK(dip_cross_terms<k::omp::dip_cross_terms>)->Name("dip_cross_terms/omp")->Arg(201)->Arg(401);
BENCHMARK(simulate)->Name("simulate_run/threads")->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
