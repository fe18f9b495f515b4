// Serial reference vs OpenMP kernels on a 1024x1024 frame.
#include <benchmark/benchmark.h>

#include <random>

#include "synapcount/detect.hpp"
#include "synapcount/kernels.hpp"
#include "synapcount/synthetic.hpp"

using namespace synapcount;
namespace k = synapcount::kernels;

namespace {

constexpr int kSide = 1024;

Mask random_mask(double density) {
  std::mt19937_64 rng(1);
  std::bernoulli_distribution on(density);
  Mask m(kSide, kSide);
  for (auto& b : m.bits()) b = on(rng);
  return m;
}

const synthetic::Neuron& neuron() {
  static const auto n = [] {
    synthetic::NeuronSpec spec;
    spec.width = spec.height = kSide;
    spec.dendrites = 5;
    spec.puncta = 60;
    return synthetic::generate(spec);
  }();
  return n;
}

template <auto Fn>
void BM_Label(benchmark::State& state) {
  const auto m = random_mask(state.range(0) / 100.0);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(m, 8));
  state.SetItemsProcessed(state.iterations() * kSide * kSide);
}

template <auto Fn>
void BM_Tube(benchmark::State& state) {
  const auto segs = k::segments_of(neuron().traces.traces[0]);
  for (auto _ : state) {
    Mask m(kSide, kSide);
    Fn(segs, 4.0, m);
    benchmark::DoNotOptimize(m.bits().data());
  }
}

template <auto Fn>
void BM_Normalize(benchmark::State& state) {
  std::vector<std::uint16_t> in(kSide * kSide), out(in.size());
  std::mt19937_64 rng(2);
  for (auto& v : in) v = rng() % 65536;
  for (auto _ : state) {
    Fn(in, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_Analyze(benchmark::State& state) {
  AnalysisConfig cfg;
  cfg.thickness = 8 * cfg.scale;
  cfg.threshold_red = cfg.threshold_green = 120;
  cfg.mode = AnalysisMode::per_dendrite;
  const auto& n = neuron();
  for (auto _ : state) benchmark::DoNotOptimize(analyze(n.red, n.green, n.traces, cfg));
}

}  // namespace

BENCHMARK(BM_Label<k::serial::label_components>)->Name("label/serial")->Arg(10)->Arg(50)->Arg(90);
BENCHMARK(BM_Label<k::parallel::label_components>)->Name("label/parallel")->Arg(10)->Arg(50)->Arg(90);
BENCHMARK(BM_Tube<k::serial::rasterize_tube>)->Name("tube/serial");
BENCHMARK(BM_Tube<k::parallel::rasterize_tube>)->Name("tube/parallel");
BENCHMARK(BM_Normalize<k::serial::normalize_full_range>)->Name("normalize/serial");
BENCHMARK(BM_Normalize<k::parallel::normalize_full_range>)->Name("normalize/parallel");
BENCHMARK(BM_Analyze)->Name("analyze/1024x1024x5")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
