#include "tshs/bouts.hpp"
#include "tshs/gbdt.hpp"
#include "tshs/insertion.hpp"
#include "tshs/plot.hpp"
#include "tshs/rng.hpp"
#include "tshs/serialize.hpp"
#include "tshs/synth.hpp"
#include "tshs/taskgen.hpp"

#include <benchmark/benchmark.h>

#include <cstdint>
#include <memory>
#include <set>
#include <vector>

using namespace tshs;

namespace {

Series3 random_series(int64_t len, uint64_t seed) {
    Rng rng(seed);
    Series3 s;
    for (int c = 0; c < 3; ++c) {
        s[c].resize(static_cast<size_t>(len));
        for (auto& v : s[c])
            v = static_cast<float>(0.3 * rng.normal());
    }
    return s;
}

// Everything a sample-generation call needs, built once.
struct GenBench {
    Corpus corpus;
    std::set<std::string> participants;
    BoutIndex index;
    TemplatePack templates;
    BackgroundSampler any_bg;
    BackgroundSampler pure_bg;
    GenInputs in;

    explicit GenBench(int64_t window) {
        SynthSpec spec;
        spec.participants = 4;
        spec.minutes = 90.0;
        spec.rate = 50.0;
        spec.seed = 3;
        corpus = synth_corpus(spec);
        auto ids = corpus.participant_ids();
        participants = {ids.begin(), ids.end()};
        index = BoutIndex::build(corpus, participants);
        templates = TemplatePack::builtin();
        any_bg = BackgroundSampler::build(corpus, participants, window, BackgroundKind::Any);
        pure_bg = BackgroundSampler::build(corpus, participants, window, BackgroundKind::Pure);
        in.corpus = &corpus;
        in.index = &index;
        in.templates = &templates;
        in.any_bg = &any_bg;
        in.pure_bg = pure_bg.empty() ? nullptr : &pure_bg;
        in.participants = &participants;
        in.rate = 50.0;
    }
};

GenBench& gen_fixture(int64_t window) {
    static auto* fx = new GenBench(window);
    return *fx;
}

void bm_generate_hour_sample(benchmark::State& state) {
    auto& fx = gen_fixture(180'000);
    uint64_t i = 0;
    for (auto _ : state) {
        HaystackSample s =
            generate_sample(fx.in, default_task_config(TaskFamily::Existence),
                            TaskFamily::Existence, 3600.0, "train", 0, 1000 + i++);
        benchmark::DoNotOptimize(s.series[0].data());
    }
}
BENCHMARK(bm_generate_hour_sample)->Unit(benchmark::kMillisecond);

void bm_insert_needle(benchmark::State& state) {
    Series3 bg = random_series(180'000, 1);
    Series3 needle = random_series(9'000, 2);
    for (auto _ : state) {
        Series3 copy = bg;
        insert_needle(copy, needle, 40'000, BlendSpec{});
        benchmark::DoNotOptimize(copy[0].data());
    }
}
BENCHMARK(bm_insert_needle)->Unit(benchmark::kMillisecond);

void bm_gbdt_fit(benchmark::State& state) {
    Rng rng(9);
    Matrix x(2'000, 60);
    std::vector<int> y(2'000);
    for (int64_t r = 0; r < x.rows; ++r) {
        y[static_cast<size_t>(r)] = static_cast<int>(r % 2);
        for (int64_t c = 0; c < x.cols; ++c)
            x.at(r, c) = static_cast<float>(rng.normal() + 0.2 * y[static_cast<size_t>(r)]);
    }
    GbdtParams params;
    params.trees = 40;
    for (auto _ : state) {
        Gbdt model = Gbdt::fit(x, y, params);
        benchmark::DoNotOptimize(model.tree_count());
    }
}
BENCHMARK(bm_gbdt_fit)->Unit(benchmark::kMillisecond);

void bm_auc(benchmark::State& state) {
    Rng rng(11);
    std::vector<double> scores(100'000);
    std::vector<int> labels(100'000);
    for (size_t i = 0; i < scores.size(); ++i) {
        labels[i] = static_cast<int>(i % 2);
        scores[i] = rng.normal() + (labels[i] == 1 ? 0.3 : 0.0);
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(mann_whitney_auc(scores, labels));
}
BENCHMARK(bm_auc)->Unit(benchmark::kMillisecond);

void bm_plot_hour(benchmark::State& state) {
    HaystackSample sample;
    sample.id = "bench";
    sample.rate = 50.0;
    sample.context_s = 3600.0;
    sample.series = random_series(180'000, 4);
    for (auto _ : state) {
        std::string svg = render_plot(sample);
        benchmark::DoNotOptimize(svg.data());
    }
}
BENCHMARK(bm_plot_hour)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
