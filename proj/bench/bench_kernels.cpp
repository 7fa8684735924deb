// OpenMP kernels against their serial references.
#include "agentgraph/dataset.hpp"
#include "agentgraph/evaluation.hpp"
#include "oracles.hpp"

#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

using namespace agentgraph;
namespace fs = std::filesystem;

namespace {

const HashEmbeddingProvider provider;

std::pair<TaskGraph, TaskGraph> graph_pair(std::size_t n) {
    std::mt19937_64 rng(n);
    return {oracle::random_dag(rng, n, n, 4.0 / double(n)), oracle::random_dag(rng, n, n, 4.0 / double(n))};
}

template <auto Kernel>
void similarity(benchmark::State& state) {
    auto [e, a] = graph_pair(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(e, a, provider));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

struct Batch {
    std::vector<ScenarioRecord> records;
    std::vector<ExecutionTrace> traces;
    std::vector<EvaluationInput> inputs;

    explicit Batch(std::size_t n) : records(n), traces(n) {
        std::mt19937_64 rng(7);
        for (std::size_t i = 0; i < n; ++i) {
            records[i].name = "s" + std::to_string(i);
            records[i].expected_graph = oracle::random_dag(rng, 4, 6, 0.4);
            records[i].gold_response = "the plan is ready";
            traces[i].graph = oracle::random_dag(rng, 4, 6, 0.4);
            traces[i].final_answer = "plan ready";
        }
        for (std::size_t i = 0; i < n; ++i) inputs.push_back({&records[i], &traces[i]});
    }
};

template <auto Kernel>
void batch(benchmark::State& state) {
    Batch b(static_cast<std::size_t>(state.range(0)));
    LexicalJudge judge;
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(b.inputs, provider, EvaluationConfig{}, judge));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

// Copies of the committed fixtures, written once.
const fs::path& scenario_tree() {
    static const fs::path root = [] {
        const fs::path dir = fs::temp_directory_path() / "agentgraph_bench_scenarios";
        fs::remove_all(dir);
        auto load = load_scenarios(fs::path(AGENTGRAPH_SOURCE_DIR) / "fixtures/scenarios");
        for (int copy = 0; copy < 40; ++copy)
            for (auto rec : load.records) {
                rec.name += "_" + std::to_string(copy);
                write_scenario(rec, dir);
            }
        return dir;
    }();
    return root;
}

template <auto Kernel>
void loading(benchmark::State& state) {
    const auto& root = scenario_tree();
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(root));
}

} // namespace

BENCHMARK(similarity<label_similarity_matrix>)->Name("similarity_matrix/omp")->Arg(32)->Arg(128)->Arg(512);
BENCHMARK(similarity<label_similarity_matrix_serial>)->Name("similarity_matrix/serial")->Arg(32)->Arg(128)->Arg(512);
BENCHMARK(batch<evaluate_batch>)->Name("evaluate_batch/omp")->Arg(64)->Arg(256)->UseRealTime();
BENCHMARK(batch<evaluate_batch_serial>)->Name("evaluate_batch/serial")->Arg(64)->Arg(256)->UseRealTime();
BENCHMARK(loading<load_scenarios>)->Name("load_scenarios/omp")->UseRealTime();
BENCHMARK(loading<load_scenarios_serial>)->Name("load_scenarios/serial")->UseRealTime();

BENCHMARK_MAIN();
