// Serial reference vs OpenMP kernels. Worker count comes from the second
// benchmark argument (parallel only).

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mcqa/ingestion.hpp"
#include "mcqa/kernels.hpp"

using namespace mcqa;

namespace {

std::vector<kernels::ScoreRow> make_rows(std::size_t n) {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> z(0.0, 2.0);
    std::vector<kernels::ScoreRow> rows(n, kernels::ScoreRow(4));
    for (auto& r : rows)
        for (auto& x : r) x = z(rng);
    return rows;
}

std::vector<McqItem> make_items(std::size_t n) {
    const auto toy = load_dataset(MCQA_TOY_CORPUS);
    std::vector<McqItem> items;
    items.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto item = toy[i % toy.size()];
        item.id = "b" + std::to_string(i);
        items.push_back(std::move(item));
    }
    return items;
}

void BM_MaxProbsSerial(benchmark::State& state) {
    const auto rows = make_rows(state.range(0));
    std::vector<double> out(rows.size());
    for (auto _ : state) {
        kernels::serial::tempered_max_probs(rows, 1.3, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MaxProbsParallel(benchmark::State& state) {
    const auto rows = make_rows(state.range(0));
    std::vector<double> out(rows.size());
    kernels::set_worker_count(static_cast<int>(state.range(1)));
    for (auto _ : state) {
        kernels::parallel::tempered_max_probs(rows, 1.3, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DistsSerial(benchmark::State& state) {
    const auto rows = make_rows(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::tempered_dists(rows, 0.8));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DistsParallel(benchmark::State& state) {
    const auto rows = make_rows(state.range(0));
    kernels::set_worker_count(static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::tempered_dists(rows, 0.8));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ScoreSerial(benchmark::State& state) {
    const auto items = make_items(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::score_items(items, InputVariant::Full));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ScoreParallel(benchmark::State& state) {
    const auto items = make_items(state.range(0));
    kernels::set_worker_count(static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::score_items(items, InputVariant::Full));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_MaxProbsSerial)->Arg(100000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MaxProbsParallel)->ArgsProduct({{100000}, {1, 2, 4}})->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_DistsSerial)->Arg(100000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DistsParallel)->ArgsProduct({{100000}, {1, 2, 4}})->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_ScoreSerial)->Arg(20000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ScoreParallel)->ArgsProduct({{20000}, {1, 2, 4}})->Unit(benchmark::kMicrosecond)->UseRealTime();

BENCHMARK_MAIN();
