#include <benchmark/benchmark.h>

#include "cvdistill/cli.hpp"
#include "cvdistill/config.hpp"
#include "cvdistill/montecarlo.hpp"
#include "cvdistill/tomography.hpp"

using namespace cvdistill;

namespace {

SimulationConfig canonical_sim(std::int64_t n) {
  auto sim = parse_config(canonical_config_text()).simulation();
  sim.sample_count = static_cast<std::size_t>(n);
  return sim;
}

void BM_SampleSerial(benchmark::State& st) {
  const auto sim = canonical_sim(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(serial::sample_protocol(sim));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_SampleParallel(benchmark::State& st) {
  const auto sim = canonical_sim(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(sample_protocol(sim));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

struct Filtered {
  ProjectionSet set;
  std::vector<std::vector<double>> filtered;
};

const Filtered& filtered_fixture() {
  static const Filtered f = [] {
    ProjectionOptions o;
    o.n_angles = 128;
    o.samples_per_angle = 20000;
    o.bins = 256;
    o.half_range = 13.0;
    Filtered out{collect_projections(MixtureState::single({0.0, 0.0, 0.49, 10.0}), o), {}};
    out.filtered = filter_projections(out.set, {});
    return out;
  }();
  return f;
}

void BM_BackprojectSerial(benchmark::State& st) {
  const auto& f = filtered_fixture();
  const auto spec = GridSpec::symmetric(6.0, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(serial::backproject(f.filtered, f.set.angles, f.set.bin_edges, spec));
}

void BM_BackprojectParallel(benchmark::State& st) {
  const auto& f = filtered_fixture();
  const auto spec = GridSpec::symmetric(6.0, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(backproject(f.filtered, f.set.angles, f.set.bin_edges, spec));
}

}  // namespace

BENCHMARK(BM_SampleSerial)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleParallel)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BackprojectSerial)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BackprojectParallel)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
