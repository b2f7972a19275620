// Parallel kernels against the serial reference on a synthetic image.
#include <benchmark/benchmark.h>

#include <omp.h>

#include <cstdint>

#include "crowdgen/image_ops.hpp"
#include "crowdgen/rng.hpp"

namespace {

crowdgen::ImageBuffer noise_image(int side) {
  crowdgen::ImageBuffer img(side, side);
  crowdgen::Rng rng(7);
  for (auto& b : img.pixels) b = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

crowdgen::OpKind op_for(int index) {
  using namespace crowdgen::ops;
  switch (index) {
    case 0: return Hue{0.2, crowdgen::HueMode::kWrap};
    case 1: return Saturation{1.4};
    case 2: return Exposure{0.5};
    case 3: return TonePreset{Tone::kFall, 0.8};
    default: return Vignette{0.5, 0.5, 0.3, 0.7};
  }
}

const char* op_label(int index) {
  static const char* labels[] = {"hue", "saturation", "exposure", "fall", "vignette"};
  return labels[index];
}

void BM_Serial(benchmark::State& state) {
  const auto img = noise_image(static_cast<int>(state.range(1)));
  const auto op = op_for(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(crowdgen::apply_serial(img, op));
  state.SetLabel(op_label(static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * img.width * img.height);
}

void BM_Parallel(benchmark::State& state) {
  const auto img = noise_image(static_cast<int>(state.range(1)));
  const auto op = op_for(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(crowdgen::apply(img, op));
  state.SetLabel(op_label(static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * img.width * img.height);
  state.counters["threads"] = omp_get_max_threads();
}

}  // namespace

BENCHMARK(BM_Serial)->ArgsProduct({{0, 1, 2, 3, 4}, {256, 1024}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)->ArgsProduct({{0, 1, 2, 3, 4}, {256, 1024}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
