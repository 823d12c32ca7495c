#include <benchmark/benchmark.h>

#include <vector>

#include "dube/balancing.hpp"
#include "dube/dataset.hpp"
#include "dube/ensemble.hpp"
#include "dube/learners.hpp"
#include "dube/metrics.hpp"
#include "dube/rng.hpp"

namespace {

dube::Dataset gaussian_data(std::size_t n, std::size_t d)
{
    dube::Rng gen(n * 31 + d);
    std::vector<double> xs(n * d);
    std::vector<dube::ClassId> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        ys[i] = i % 11 == 0 ? 1 : 0;
        for (std::size_t j = 0; j < d; ++j) {
            xs[i * d + j] = gen.normal() + (ys[i] == 1 ? 0.8 : 0.0);
        }
    }
    return dube::Dataset(std::move(xs), d, std::move(ys), 2);
}

void BM_ResampleStep(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const dube::Dataset ds = gaussian_data(n, 16);
    dube::Rng gen(1);
    std::vector<double> errors(n);
    for (auto& e : errors) {
        e = gen.uniform();
    }
    const dube::IntraStrategy shem{dube::IntraStrategy::Kind::SHEM, 5};
    std::uint64_t round = 0;
    for (auto _ : state) {
        const auto plan = dube::make_sampling_plan(ds, errors, dube::InterStrategy::RHS, shem);
        for (dube::ClassId c = 0; c < 2; ++c) {
            dube::Rng rng = dube::Rng(round).derive({c});
            benchmark::DoNotOptimize(dube::weighted_resample(ds.class_rows(c), plan.weights[c], plan.target, rng));
        }
        ++round;
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ResampleStep)->Arg(5000)->Arg(20000)->Arg(40000)->Unit(benchmark::kMillisecond);

void BM_TreeFit(benchmark::State& state)
{
    const dube::Dataset ds = gaussian_data(static_cast<std::size_t>(state.range(0)), 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dube::DecisionTree::fit(ds, dube::TreeParams{}, 0));
    }
}
BENCHMARK(BM_TreeFit)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_DubeFit(benchmark::State& state)
{
    const dube::Dataset ds = gaussian_data(2000, 8);
    dube::DubeConfig cfg;
    cfg.k = static_cast<std::size_t>(state.range(0));
    cfg.intra = {dube::IntraStrategy::Kind::SHEM, 5};
    cfg.alpha = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dube::dube_fit(ds, cfg));
    }
}
BENCHMARK(BM_DubeFit)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_MacroAuroc(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    dube::Rng gen(2);
    std::vector<dube::ClassId> y(n);
    std::vector<double> scores(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = static_cast<dube::ClassId>(i % 3);
    }
    for (auto& s : scores) {
        s = gen.uniform();
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(dube::macro_auroc(y, scores, 3));
    }
}
BENCHMARK(BM_MacroAuroc)->Arg(1000)->Arg(100000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
