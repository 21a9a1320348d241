#include <benchmark/benchmark.h>

#include "redattack/attack.hpp"
#include "redattack/baseline_attack.hpp"
#include "redattack/gradient_estimate.hpp"
#include "redattack/imageio.hpp"
#include "redattack/metrics.hpp"

namespace {

using namespace redattack;

struct Fixture {
  MlpOracle oracle = load_mlp(REDATTACK_FIXTURE_DIR "/pattern_mlp.json");
  ImageTensor source = read_image(REDATTACK_FIXTURE_DIR "/source.pgm");
  ImageTensor reference = read_image(REDATTACK_FIXTURE_DIR "/reference.pgm");
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

void BM_EstimateBoundary(benchmark::State& state) {
  Fixture& f = fixture();
  const auto pred = AdversarialPredicate::untargeted(Label{0});
  const double delta = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        estimate_boundary(f.source, Label{0}, f.reference, Label{1}, pred, delta, f.oracle));
  }
}
BENCHMARK(BM_EstimateBoundary)->Arg(10)->Arg(100)->Arg(1000);

void BM_ProbeGradient(benchmark::State& state) {
  Fixture& f = fixture();
  const auto pred = AdversarialPredicate::untargeted(Label{0});
  const BoundarySample current =
      estimate_boundary(f.source, Label{0}, f.reference, Label{1}, pred, 0.01, f.oracle);
  RandomSource rng(1);
  const ProbeOptions options{static_cast<std::size_t>(state.range(0)), 0.0196, 0.01};
  for (auto _ : state) {
    benchmark::DoNotOptimize(probe_gradient(current, f.source, pred, options, f.oracle, rng));
  }
}
BENCHMARK(BM_ProbeGradient)->Arg(5)->Arg(20)->Arg(64);

void BM_RunAttack(benchmark::State& state) {
  Fixture& f = fixture();
  AttackConfig c;
  c.max_queries = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_attack(f.source, f.reference, f.oracle, c));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunAttack)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_BoundaryWalk(benchmark::State& state) {
  Fixture& f = fixture();
  BoundaryWalkConfig c;
  c.max_queries = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_boundary_attack(f.source, f.reference, f.oracle, c));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BoundaryWalk)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Ssim(benchmark::State& state) {
  const std::size_t side = static_cast<std::size_t>(state.range(0));
  RandomSource rng(2);
  std::vector<double> a(side * side * 3), b(side * side * 3);
  for (auto& p : a) p = rng.uniform();
  for (auto& p : b) p = rng.uniform();
  const ImageTensor x(Shape{side, side, 3}, a), y(Shape{side, side, 3}, b);
  for (auto _ : state) benchmark::DoNotOptimize(ssim(x, y));
}
BENCHMARK(BM_Ssim)->Arg(32)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
