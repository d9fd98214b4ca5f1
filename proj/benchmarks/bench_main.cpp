#include <benchmark/benchmark.h>

#include "sap/experiment.hpp"
#include "sap/gossip.hpp"

namespace {

using namespace sap;

void BM_RowUpdate(benchmark::State& state) {
  const LinearSystem sys = gaussian_system(100, static_cast<int>(state.range(0)), 1);
  Vector x = Vector::Zero(sys.cols());
  int row = 0;
  for (auto _ : state) {
    kernel::row_update(x, sys, row, 1.0);
    row = (row + 1) % 100;
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_RowUpdate)->Arg(50)->Arg(200)->Arg(1000);

void BM_BlockUpdate(benchmark::State& state) {
  const LinearSystem sys = gaussian_system(200, 100, 2);
  const auto dist = SketchDistribution::uniform_block(200, static_cast<int>(state.range(0)));
  Rng rng(3);
  Vector x = Vector::Zero(100);
  for (auto _ : state) {
    const Sketch s = dist.draw(rng);
    kernel::block_update(x, sys, s.rows, 1.0);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_BlockUpdate)->Arg(2)->Arg(8)->Arg(32);

void BM_GossipTick(benchmark::State& state) {
  const Network g = rgg(100, 4096);
  Rng init(5);
  Vector c(100);
  for (int i = 0; i < 100; ++i) c(i) = init.uniform();
  GossipProtocol protocol;
  switch (state.range(0)) {
    case 0: protocol = GossipProtocol::pairwise(1.0); break;
    case 1: protocol = GossipProtocol::block(5, 1.0, 0.0); break;
    default: protocol = GossipProtocol::acc_gossip(AccOption::Two); break;
  }
  GossipSim sim(g, protocol, c, 6);
  for (auto _ : state) {
    sim.tick();
    benchmark::DoNotOptimize(sim.values().data());
  }
}
BENCHMARK(BM_GossipTick)->Arg(0)->Arg(1)->Arg(2);

void BM_SpectrumOfW(benchmark::State& state) {
  const Network g = cycle(static_cast<int>(state.range(0)));
  const LinearSystem sys(incidence(g), Vector::Zero(g.edge_count()));
  const auto dist = SketchDistribution::uniform_coordinate(g.edge_count());
  for (auto _ : state) {
    const Spectrum s = spectrum_of_W(sys, dist);
    benchmark::DoNotOptimize(s.lambda_min_plus);
  }
}
BENCHMARK(BM_SpectrumOfW)->Arg(50)->Arg(200);

void BM_Pseudoinverse(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LinearSystem sys = gaussian_system(n, n / 2, 7);
  const Matrix gram = sys.A() * sys.A().transpose();
  for (auto _ : state) {
    const Matrix p = pseudoinverse_sym(gram);
    benchmark::DoNotOptimize(p.data());
  }
}
BENCHMARK(BM_Pseudoinverse)->Arg(50)->Arg(150);

}  // namespace

BENCHMARK_MAIN();
