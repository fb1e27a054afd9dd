// OpenMP dataset enumeration against the serial reference loop. Both produce
// identical datasets (see the surrogate tests); this only measures time.

#include <string>

#include <benchmark/benchmark.h>

#include "sccuc/case_model.hpp"
#include "sccuc/surrogate.hpp"

namespace {

const char* kCases[] = {"net3", "net9", "net30s"};

sccuc::NetworkCase load(std::int64_t i) {
  return sccuc::load_case_file(std::string(SCCUC_DATA_DIR) + "/" + kCases[i] + ".json");
}

void BM_EnumerateParallel(benchmark::State& state) {
  const auto c = load(state.range(0));
  std::size_t n = 0;
  for (auto _ : state) {
    const auto ds = sccuc::enumerate_dataset(c);
    n = ds.codes.size();
    benchmark::DoNotOptimize(ds);
  }
  state.SetLabel(kCases[state.range(0)]);
  state.counters["samples"] = double(n);
}

void BM_EnumerateSerial(benchmark::State& state) {
  const auto c = load(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sccuc::enumerate_dataset_serial(c));
  state.SetLabel(kCases[state.range(0)]);
}

}  // namespace

BENCHMARK(BM_EnumerateParallel)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnumerateSerial)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
