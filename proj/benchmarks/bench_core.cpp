#include "triage/analysis/dataflow.hpp"
#include "triage/app/pipeline.hpp"
#include "triage/distance/distance.hpp"
#include "triage/sampler/sampling.hpp"

#include <random>

#include <benchmark/benchmark.h>

namespace {

using namespace triage;

const std::filesystem::path kBundles = std::filesystem::path(TRIAGE_FIXTURES_DIR) / "bundles";

distance::TokenSeq tokens(std::mt19937_64& rng, std::size_t n) {
    distance::TokenSeq t(n);
    for (auto& s : t) s = "t" + std::to_string(rng() % 6);
    return t;
}

std::vector<sampler::Patch> patches(std::size_t n) {
    std::mt19937_64 rng(42);
    const distance::TokenSeq buggy = tokens(rng, 12);
    std::vector<sampler::Patch> out;
    for (std::size_t i = 0; i < n; ++i) {
        distance::TokenSeq t = buggy;
        for (int e = 0; e < 3; ++e) t[rng() % t.size()] = "e" + std::to_string(rng() % (1 + i % 5));
        std::string text;
        for (const auto& s : t) text += s + " ";
        out.push_back(sampler::make_patch("p" + std::to_string(i), static_cast<int>(i) + 1, text, buggy));
    }
    return out;
}

void BM_Levenshtein(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const auto a = tokens(rng, static_cast<std::size_t>(state.range(0)));
    const auto b = tokens(rng, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(distance::levenshtein(a, b));
}
BENCHMARK(BM_Levenshtein)->Arg(8)->Arg(30)->Arg(120);

void BM_DistanceMatrix(benchmark::State& state) {
    std::vector<distance::TokenSeq> seqs;
    for (const auto& p : patches(static_cast<std::size_t>(state.range(0)))) seqs.push_back(p.tokens);
    for (auto _ : state) benchmark::DoNotOptimize(distance::distance_matrix(seqs));
}
BENCHMARK(BM_DistanceMatrix)->Arg(10)->Arg(40)->Arg(100);

void BM_Sample(benchmark::State& state) {
    const auto ps = patches(static_cast<std::size_t>(state.range(0)));
    const sampler::PatchSet set(ps, ps.front().tokens);
    for (auto _ : state) benchmark::DoNotOptimize(sampler::sample(set));
}
BENCHMARK(BM_Sample)->Arg(10)->Arg(40)->Arg(100);

void BM_DefUse(benchmark::State& state) {
    const auto c = corpus::load(kBundles / "ranksum");
    const auto* fn = c.program.find_function("uTest");
    for (auto _ : state) benchmark::DoNotOptimize(analysis::def_use_analysis(*fn));
}
BENCHMARK(BM_DefUse);

void BM_TracePatch(benchmark::State& state) {
    auto prepared = app::prepare_bundle(kBundles / "loopidx", {});
    const app::Workspace ws(std::move(prepared.corpus), std::move(prepared.validation.plausible), {});
    for (auto _ : state) benchmark::DoNotOptimize(ws.trace_patch("a2"));
}
BENCHMARK(BM_TracePatch);

void BM_RunPipeline(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(app::run_pipeline(kBundles / "ranksum", {}));
}
BENCHMARK(BM_RunPipeline)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
