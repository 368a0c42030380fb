#include "qccs/equiv.hpp"
#include "qccs/parser.hpp"
#include "qccs/plts.hpp"
#include "qccs/sched.hpp"

#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

using namespace qccs;

namespace {

ModelFile loadModel(const std::string& name) {
    std::ifstream in(std::string(QCCS_MODELS_DIR) + "/" + name);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parseModel(buffer.str());
}

Configuration configOf(const ModelFile& model, const std::string& name) {
    const ConfigDecl* decl = model.findConfig(name);
    return {decl->process, decl->state};
}

std::string modelText() {
    std::ifstream in(std::string(QCCS_MODELS_DIR) + "/measurement_sum.qccs");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void BM_ParseModel(benchmark::State& state) {
    std::string text = modelText();
    for (auto _ : state) benchmark::DoNotOptimize(parseModel(text));
}
BENCHMARK(BM_ParseModel);

void BM_Transitions(benchmark::State& state) {
    ModelFile model = loadModel("measurement_sum.qccs");
    Configuration d = configOf(model, "D");
    for (auto _ : state) benchmark::DoNotOptimize(transitions(d, model.defs));
}
BENCHMARK(BM_Transitions);

void BM_BuildPlts(benchmark::State& state) {
    ModelFile model = loadModel("measurement_sum.qccs");
    Configuration d = configOf(model, "D");
    for (auto _ : state) benchmark::DoNotOptimize(buildPlts(d, model.defs));
}
BENCHMARK(BM_BuildPlts);

void BM_SchedulerVectors(benchmark::State& state) {
    ModelFile model = loadModel("measurement_sum.qccs");
    Configuration d = configOf(model, "D");
    Plts g = buildPlts({Process::par(d.process, Process::nil()), d.state}, model.defs);
    std::vector<std::string> channels{"c", "d"};
    for (auto _ : state) {
        SchedulerEnumerator en(g);
        Scheduler s;
        while (en.next(s))
            benchmark::DoNotOptimize(observationVector(g, s, g.root, channels));
    }
}
BENCHMARK(BM_SchedulerVectors);

void BM_CheckObsEquivStrategies(benchmark::State& state) {
    ModelFile model = loadModel("measurement_sum.qccs");
    Configuration c = configOf(model, "C"), d = configOf(model, "D");
    for (auto _ : state)
        benchmark::DoNotOptimize(
            checkObsEquiv(c, d, TestBasis{}, EquivMode::Strategies, model.defs));
}
BENCHMARK(BM_CheckObsEquivStrategies);

void BM_LiftRelation(benchmark::State& state) {
    ModelFile model = loadModel("measurement_vs_dephasing.qccs");
    std::mt19937 rng(42);
    QState zero = QState::fromKets({"q"}, {KetPreset::Zero});

    std::vector<Configuration> rows, cols;
    for (int i = 0; i < 3; ++i)
        rows.push_back({Process::cout("c", Expr::lit(i), Process::nil()), zero});
    for (int j = 0; j < 3; ++j)
        cols.push_back({Process::cout("d", Expr::lit(j), Process::nil()), zero});
    Distribution mu = Distribution::fromWeighted(
        {{rows[0], 0.25}, {rows[1], 0.25}, {rows[2], 0.5}});
    Distribution nu = Distribution::fromWeighted(
        {{cols[0], 0.5}, {cols[1], 0.25}, {cols[2], 0.25}});
    CandidateRelation rel;
    for (const auto& a : rows)
        for (const auto& b : cols)
            if (rng() % 2) rel.pairs.emplace_back(a, b);

    for (auto _ : state) benchmark::DoNotOptimize(liftRelation(rel, mu, nu));
}
BENCHMARK(BM_LiftRelation);

void BM_ApplySuperSixQubits(benchmark::State& state) {
    std::vector<std::string> reg{"q0", "q1", "q2", "q3", "q4", "q5"};
    QState rho = QState::fromKets(reg, std::vector<KetPreset>(6, KetPreset::Plus));
    CMatrix p0(2, 2), p1(2, 2);
    p0 << 1, 0, 0, 0;
    p1 << 0, 0, 0, 1;
    SuperOperator deph{1, {p0, p1}};
    for (auto _ : state) benchmark::DoNotOptimize(applySuper(rho, deph, {"q3"}));
}
BENCHMARK(BM_ApplySuperSixQubits);

}  // namespace

BENCHMARK_MAIN();
