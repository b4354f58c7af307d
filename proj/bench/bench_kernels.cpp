// Serial references against the OpenMP kernels on the same inputs.

#include <benchmark/benchmark.h>

#include <cmath>
#include <span>
#include <vector>

#include "levelflow/bic.hpp"
#include "levelflow/curvature_flow.hpp"
#include "levelflow/harmonic.hpp"
#include "levelflow/levelsets.hpp"

using namespace levelflow;

namespace {

const double kE2 = std::exp(2.0);

HarmonicField log_plus_re() {
  const std::vector<double> p{1.0, 0.1};
  return harmonic::catalog_field("log_plus_re", std::span<const double>(p));
}

Chart cap() { return Chart::conformal(factors::quadratic(-0.1), Domain::annulus(1.0, 3.0)); }

const std::vector<double>& profile_grid() {
  static const auto grid = levelsets::inset_grid(0.15, 0.75, 64);
  return grid;
}

template <bool Parallel>
void BM_length_profile(benchmark::State& state) {
  const auto u = log_plus_re();
  const Chart chart = cap();
  for (auto _ : state) {
    auto p = Parallel ? levelsets::length_profile(u, chart, profile_grid(), {1024})
                      : levelsets::length_profile_serial(u, chart, profile_grid(), {1024});
    benchmark::DoNotOptimize(p.L.data());
  }
}

template <bool Parallel>
void BM_principle_audit(benchmark::State& state) {
  const auto u = log_plus_re();
  const Chart chart = cap();
  const Domain region = Domain::annulus(1.2, 2.8);
  const curvature_flow::AuditOptions o{256, 256, 1024};
  for (auto _ : state) {
    auto r = Parallel ? curvature_flow::principle_audit(u, chart, region, curvature_flow::Quantity::phi_k,
                                                        curvature_flow::CorollaryCase::case3, o)
                      : curvature_flow::principle_audit_serial(u, chart, region, curvature_flow::Quantity::phi_k,
                                                               curvature_flow::CorollaryCase::case3, o);
    benchmark::DoNotOptimize(r.interior_extremum.value);
  }
}

template <bool Parallel>
void BM_bic_length_profile(benchmark::State& state) {
  const auto f = bic::conical_factor(0.0, {{{1.2, 0.0}, 0.5}, {{0.0, -1.6}, 0.3}});
  const harmonic::DirichletSpec spec{kE2, 0.0, -2.0};
  std::vector<double> t(400);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = -2.0 + 2.0 * static_cast<double>(i) / 399.0;
  for (auto _ : state) {
    auto p = Parallel ? bic::bic_length_profile(f, spec, t) : bic::bic_length_profile_serial(f, spec, t);
    benchmark::DoNotOptimize(p.L.data());
  }
}

}  // namespace

BENCHMARK(BM_length_profile<false>)->Name("length_profile/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_length_profile<true>)->Name("length_profile/omp")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_principle_audit<false>)->Name("principle_audit/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_principle_audit<true>)->Name("principle_audit/omp")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_bic_length_profile<false>)->Name("bic_length_profile/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_bic_length_profile<true>)->Name("bic_length_profile/omp")->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
