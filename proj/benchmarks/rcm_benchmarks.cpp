#include <benchmark/benchmark.h>

#include "rcm/coupling.hpp"
#include "rcm/exact.hpp"
#include "rcm/observables.hpp"
#include "rcm/parafermion.hpp"
#include "rcm/sampler.hpp"

using namespace rcm;

namespace {

void BM_HeatBathSweep(benchmark::State& state) {
    auto d = share(build_box(static_cast<int>(state.range(0))));
    sampler::ChainState chain(d, BoundaryCondition::free(*d), {ModelParams::critical_p(2.0), 2.0, 0.0}, 1);
    for (auto _ : state) sampler::heat_bath_sweep(chain);
    state.SetItemsProcessed(state.iterations() * d->num_edges());
}
BENCHMARK(BM_HeatBathSweep)->Arg(8)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_ChayesMachtaStep(benchmark::State& state) {
    auto d = share(build_box(static_cast<int>(state.range(0))));
    sampler::ChainState chain(d, BoundaryCondition::free(*d), {ModelParams::critical_p(2.0), 2.0, 0.0}, 1);
    for (auto _ : state) sampler::chayes_machta_step(chain);
    state.SetItemsProcessed(state.iterations() * d->num_edges());
}
BENCHMARK(BM_ChayesMachtaStep)->Arg(8)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_ExactMeasureBox1(benchmark::State& state) {
    auto d = share(build_box(1));
    const double h = state.range(0) ? 0.2 : 0.0;
    for (auto _ : state) {
        exact::ExactMeasure m(d, BoundaryCondition::wired(*d), {0.5, 2.0, h});
        benchmark::DoNotOptimize(m.log_partition_function());
    }
}
BENCHMARK(BM_ExactMeasureBox1)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ArmOccurs(benchmark::State& state) {
    const int R = static_cast<int>(state.range(0));
    auto d = share(build_box(R));
    sampler::ChainState chain(d, BoundaryCondition::free(*d), {ModelParams::critical_p(2.0), 2.0, 0.0}, 7);
    for (int i = 0; i < 50; ++i) sampler::chayes_machta_step(chain);
    const observables::ArmSpec spec{{1, 0, 1, 0}, 2, R};
    for (auto _ : state) benchmark::DoNotOptimize(observables::arm_occurs(chain.config(), spec));
}
BENCHMARK(BM_ArmOccurs)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_ExactCouplingRun(benchmark::State& state) {
    auto d = share(build_box(1));
    const double p = ModelParams::critical_p(2.0);
    const coupling::ExactCoupler coupler(d, BoundaryCondition::free(*d), BoundaryCondition::wired(*d), p, p, 2.0);
    auto tree = coupling::boundary_cluster_tree(*d);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto res = coupler.run(*tree, ++seed, coupling::stop_when_boundary_cluster_explored());
        benchmark::DoNotOptimize(res.stop_time);
    }
}
BENCHMARK(BM_ExactCouplingRun)->Unit(benchmark::kMicrosecond);

void BM_ParafermionBox1(benchmark::State& state) {
    auto d = share(build_box(1));
    const int x = d->find_vertex({0, 1});
    for (auto _ : state) {
        auto obs = parafermion::observable_exact(d, x);
        benchmark::DoNotOptimize(obs.F.data());
    }
}
BENCHMARK(BM_ParafermionBox1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
