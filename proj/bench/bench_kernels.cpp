#include "symcover/kernels.hpp"
#include "symcover/presets.hpp"
#include "symcover/sampler.hpp"

#include <benchmark/benchmark.h>

using namespace symcover;

namespace {

const Points& sample_for(const Body& body) {
  static const Points pts = sample_uniform(body, 1 << 15, 11).points;
  return pts;
}

Body bench_body() { return make_body(find_preset("hpoly6").spec); }

void BM_GaugeRows(benchmark::State& state) {
  const Body body = bench_body();
  const Points& pts = sample_for(body);
  const Exec exec = state.range(0) ? Exec::parallel : Exec::serial;
  for (auto _ : state) benchmark::DoNotOptimize(gauge_rows(body, pts, exec));
  state.SetItemsProcessed(state.iterations() * pts.rows());
}

void BM_MembershipMask(benchmark::State& state) {
  const Body body = bench_body();
  const Points& pts = sample_for(body);
  const Exec exec = state.range(0) ? Exec::parallel : Exec::serial;
  for (auto _ : state) benchmark::DoNotOptimize(membership_mask(body, pts, exec));
  state.SetItemsProcessed(state.iterations() * pts.rows());
}

void BM_ReflectedHits(benchmark::State& state) {
  const Body body = bench_body();
  const Points& pts = sample_for(body);
  const Vec x = 0.1 * Vec::Ones(body.dim());
  const Exec exec = state.range(0) ? Exec::parallel : Exec::serial;
  for (auto _ : state) benchmark::DoNotOptimize(count_reflected_hits(body, x, pts, exec));
  state.SetItemsProcessed(state.iterations() * pts.rows());
}

void BM_Incidence(benchmark::State& state) {
  const Body shape = make_body(shapes::scaled(shapes::cube(3), 0.3));
  const Body k = make_body(shapes::cube(3));
  const Points witnesses = sample_uniform(k, 4000, 3).points;
  const Points centers = sample_uniform(k, 400, 4).points;
  const Exec exec = state.range(0) ? Exec::parallel : Exec::serial;
  for (auto _ : state) benchmark::DoNotOptimize(incidence_lists(shape, witnesses, centers, exec));
}

}  // namespace

// Arg 0: serial reference, 1: OpenMP.
BENCHMARK(BM_GaugeRows)->Arg(0)->Arg(1);
BENCHMARK(BM_MembershipMask)->Arg(0)->Arg(1);
BENCHMARK(BM_ReflectedHits)->Arg(0)->Arg(1);
BENCHMARK(BM_Incidence)->Arg(0)->Arg(1);

BENCHMARK_MAIN();
