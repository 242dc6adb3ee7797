#include <benchmark/benchmark.h>

#include "bench_support.hpp"
#include "terrastep/split.hpp"

using namespace terrastep;

namespace {

// one model per algorithm, trained once on the small fixture corpus
const ModelArtifact& model_for(Algo algo) {
    static const auto models = [] {
        std::vector<ModelArtifact> out;
        const auto [train, test] = split_train_test(bench::fixture_dataset(), 0.2, 7);
        for (Algo a : {Algo::Knn, Algo::Svm, Algo::Rf, Algo::Gb, Algo::Ann})
            out.push_back(fit_model(a, train, 7));
        return out;
    }();
    return models[static_cast<std::size_t>(algo)];
}

void predict_bench(benchmark::State& state, Algo algo) {
    const ModelArtifact& model = model_for(algo);
    const Dataset& ds = bench::fixture_dataset();
    std::size_t i = 0;
    for (auto _ : state) {
        auto label = predict(model, ds.rows[i % ds.size()]);
        benchmark::DoNotOptimize(label);
        ++i;
    }
}

}  // namespace

static void PredictKnn(benchmark::State& s) { predict_bench(s, Algo::Knn); }
static void PredictSvm(benchmark::State& s) { predict_bench(s, Algo::Svm); }
static void PredictRf(benchmark::State& s) { predict_bench(s, Algo::Rf); }
static void PredictGb(benchmark::State& s) { predict_bench(s, Algo::Gb); }
static void PredictAnn(benchmark::State& s) { predict_bench(s, Algo::Ann); }

BENCHMARK(PredictKnn);
BENCHMARK(PredictSvm);
BENCHMARK(PredictRf);
BENCHMARK(PredictGb);
BENCHMARK(PredictAnn);
