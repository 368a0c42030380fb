#include "qccs/sched.hpp"

#include "qccs/parser.hpp"

#include "testutil.hpp"

#include <doctest.h>

using namespace qccs;
using test::getConfig;
using test::loadModel;

namespace {

/// Scheduler that picks the edge with the given action at the node whose
/// process prints as `processText` and whose state matches, first edge
/// elsewhere.
Scheduler schedulerByAction(const Plts& g,
                            const std::vector<std::pair<std::string, std::string>>& wanted) {
    Scheduler s;
    s.choice.assign(g.size(), Scheduler::kStop);
    for (size_t i = 0; i < g.size(); ++i) {
        const auto& edges = g.nodes[i].edges;
        if (edges.empty()) continue;
        s.choice[i] = 0;
        std::string text = printProcess(g.nodes[i].config.process) + " @ " +
                           formatMatrix(g.nodes[i].config.state.matrix());
        for (const auto& [pattern, action] : wanted) {
            if (text.find(pattern) == std::string::npos) continue;
            for (size_t e = 0; e < edges.size(); ++e)
                if (printAction(edges[e].action) == action) s.choice[i] = static_cast<int>(e);
        }
    }
    validateScheduler(s, g);
    return s;
}

}  // namespace

TEST_CASE("the tau closure reaches the half/half mixture after measuring") {
    ModelFile model = loadModel("measurement_vs_dephasing.qccs");
    Plts g = buildPlts(getConfig(model, "C"), model.defs);

    Scheduler s;
    s.choice.assign(g.size(), Scheduler::kStop);
    for (size_t i = 0; i < g.size(); ++i)
        if (!g.nodes[i].edges.empty()) s.choice[i] = 0;
    validateScheduler(s, g);

    auto stable = weakTauClosure(NodeDist::point(g.root), s, g);
    REQUIRE(stable.has_value());
    REQUIRE(stable->entries.size() == 2);
    CHECK(stable->entries[0].second == doctest::Approx(0.5));
    CHECK(stable->entries[1].second == doctest::Approx(0.5));

    // a distribution without tau choices is already stable
    auto again = weakTauClosure(*stable, s, g);
    REQUIRE(again.has_value());
    CHECK(again->equals(*stable));
}

TEST_CASE("the closure under the branch-following strategy matches by hand") {
    ModelFile model = loadModel("measurement_sum.qccs");
    Plts g = buildPlts(getConfig(model, "D"), model.defs);

    // choose the summand whose continuation is outcome-driven
    REQUIRE(g.node(g.root).edges.size() == 3);
    Scheduler s;
    s.choice.assign(g.size(), Scheduler::kStop);
    for (size_t i = 0; i < g.size(); ++i)
        if (!g.nodes[i].edges.empty()) s.choice[i] = 0;
    s.choice[static_cast<size_t>(g.root)] = 2;  // the A(x) summand
    validateScheduler(s, g);

    auto stable = weakTauClosure(NodeDist::point(g.root), s, g);
    REQUIRE(stable.has_value());
    REQUIRE(stable->entries.size() == 2);
    for (const auto& [id, p] : stable->entries) {
        CHECK(p == doctest::Approx(0.5));
        CHECK(printProcess(g.node(id).config.process).find("A(") != std::string::npos);
    }
}

TEST_CASE("splitting the outputs by outcome observes each channel with half") {
    ModelFile model = loadModel("measurement_vs_dephasing.qccs");
    Plts g = buildPlts(getConfig(model, "C"), model.defs);

    // c!0 at the |0> branch, d!0 at the |1> branch
    Scheduler f = schedulerByAction(g, {{"[[1, 0], [0, 0]]", "c!0"}, {"[[0, 0], [0, 1]]", "d!0"}});
    CHECK(observe(g, f, g.root, "c") == doctest::Approx(0.5));
    CHECK(observe(g, f, g.root, "d") == doctest::Approx(0.5));
}

TEST_CASE("the dephasing side can only commit to one channel") {
    ModelFile model = loadModel("measurement_vs_dephasing.qccs");
    Plts g = buildPlts(getConfig(model, "D"), model.defs);

    SchedulerEnumerator en(g);
    CHECK(en.count() == 2);
    Scheduler s;
    while (en.next(s)) {
        auto pc = observe(g, s, g.root, "c");
        REQUIRE(pc.has_value());
        CHECK((*pc == doctest::Approx(0.0) || *pc == doctest::Approx(1.0)));
    }
}

TEST_CASE("deadlocked configurations observe zero on every channel") {
    ModelFile model = loadModel("measurement_vs_dephasing.qccs");
    QState zero = QState::fromKets({"q"}, {KetPreset::Zero});
    Plts g = buildPlts({Process::nil(), zero}, model.defs);
    Scheduler s;
    s.choice.assign(1, Scheduler::kStop);
    CHECK(observe(g, s, g.root, "c") == doctest::Approx(0.0));
}

TEST_CASE("scheduler enumeration counts the per-node products") {
    ModelFile model = loadModel("measurement_vs_dephasing.qccs");
    Plts g = buildPlts(getConfig(model, "C"), model.defs);
    SchedulerEnumerator en(g);
    CHECK(en.count() == 4);  // two binary choices
    int seen = 0;
    Scheduler s;
    while (en.next(s)) {
        validateScheduler(s, g);
        ++seen;
    }
    CHECK(seen == 4);

    CHECK_THROWS_AS(SchedulerEnumerator(g, 3), EnumerationCapError);
}

TEST_CASE("invalid schedulers are rejected") {
    ModelFile model = loadModel("measurement_vs_dephasing.qccs");
    Plts g = buildPlts(getConfig(model, "C"), model.defs);

    Scheduler bad;
    bad.choice.assign(g.size(), 0);
    // stop at a live node
    bad.choice[static_cast<size_t>(g.root)] = Scheduler::kStop;
    CHECK_THROWS_AS(validateScheduler(bad, g), SemanticsError);
    // missing edge index
    bad.choice[static_cast<size_t>(g.root)] = 7;
    CHECK_THROWS_AS(validateScheduler(bad, g), SemanticsError);
}

TEST_CASE("a tau self-loop makes the observation undefined") {
    ModelFile model = parseModel(R"(
register q;
cchan c;
Loop() := tau.Loop();
config L = ( Loop(), |0> );
)");
    Plts g = buildPlts(getConfig(model, "L"), model.defs);
    Scheduler s;
    s.choice.assign(1, 0);
    CHECK_FALSE(observe(g, s, g.root, "c").has_value());
    CHECK(observationVector(g, s, g.root, {"c"}).divergent);
}

TEST_CASE("a probabilistic tau loop with an exit is still divergent") {
    // half the mass recirculates forever, so no stable distribution exists
    ModelFile model = parseModel(R"(
register q;
cchan c;
measurement M(1) = { 0: [1, 0, 0, 0], 1: [0, 0, 0, 1] };
superop H(1) = { [0.70710678118654752, 0.70710678118654752, 0.70710678118654752, -0.70710678118654752] };
Coin(s;) := H[s].M[s; x].((if x = 0 then c!0) + (if x = 1 then Coin(s;)));
config L = ( Coin(q;), |0> );
)");
    Plts g = buildPlts(getConfig(model, "L"), model.defs);
    SchedulerEnumerator en(g);
    Scheduler s;
    bool anyDivergent = false;
    while (en.next(s)) {
        auto v = observationVector(g, s, g.root, {"c"});
        if (v.divergent) anyDivergent = true;
    }
    CHECK(anyDivergent);
}

TEST_CASE("strategies force the same choice at nodes sharing a process term") {
    ModelFile model = loadModel("measurement_vs_dephasing.qccs");
    Plts g = buildPlts(getConfig(model, "C"), model.defs);

    StrategyEnumerator en(g, model.defs);
    CHECK(en.count() == 2);
    Strategy st;
    while (en.next(st)) {
        Scheduler s = strategyToScheduler(st, en.context(), g);
        validateScheduler(s, g);
        // both mid nodes share the process term, so both pick the same label
        std::vector<std::string> midActions;
        for (size_t i = 0; i < g.size(); ++i) {
            if (printProcess(g.nodes[i].config.process) != "c!0 + d!0") continue;
            midActions.push_back(
                printAction(g.nodes[i].edges[static_cast<size_t>(s.choice[i])].action));
        }
        REQUIRE(midActions.size() == 2);
        CHECK(midActions[0] == midActions[1]);

        auto v = observationVector(g, s, g.root, {"c", "d"});
        REQUIRE_FALSE(v.divergent);
        CHECK((v.probabilities[0] == doctest::Approx(1.0) ||
               v.probabilities[1] == doctest::Approx(1.0)));
    }
}

TEST_CASE("the outcome-driven strategy splits the observation between channels") {
    ModelFile model = loadModel("measurement_sum.qccs");
    Plts g = buildPlts(getConfig(model, "D"), model.defs);

    StrategyEnumerator en(g, model.defs);
    CHECK(en.count() == 3);

    bool sawSplit = false;
    Strategy st;
    while (en.next(st)) {
        Scheduler s = strategyToScheduler(st, en.context(), g);
        auto v = observationVector(g, s, g.root, {"c", "d"});
        REQUIRE_FALSE(v.divergent);
        if (v.probabilities[0] == doctest::Approx(0.5) &&
            v.probabilities[1] == doctest::Approx(0.5))
            sawSplit = true;
    }
    CHECK(sawSplit);
}

TEST_CASE("strategies on an all-stop graph map to the all-stop scheduler") {
    ModelFile model = loadModel("measurement_vs_dephasing.qccs");
    QState zero = QState::fromKets({"q"}, {KetPreset::Zero});
    Plts g = buildPlts({Process::nil(), zero}, model.defs);
    StrategyEnumerator en(g, model.defs);
    CHECK(en.count() == 1);
    Strategy st;
    REQUIRE(en.next(st));
    Scheduler s = strategyToScheduler(st, en.context(), g);
    CHECK(s.choice == std::vector<int>{Scheduler::kStop});
}

TEST_CASE("witness tables round-trip through their text form") {
    ModelFile model = loadModel("measurement_vs_dephasing.qccs");
    Plts g = buildPlts(getConfig(model, "C"), model.defs);

    Scheduler f = schedulerByAction(g, {{"[[1, 0], [0, 0]]", "c!0"}, {"[[0, 0], [0, 1]]", "d!0"}});
    std::string table = serializeScheduler(f, g);
    Scheduler back = parseSchedulerWitness(table, g);
    CHECK(back.choice == f.choice);

    CHECK_THROWS_AS(parseSchedulerWitness("garbage", g), SemanticsError);
    CHECK_THROWS_AS(parseSchedulerWitness("qccs-witness v1\nmode: scheduler\nnode 99 : 0\n", g),
                    SemanticsError);

    StrategyEnumerator en(g, model.defs);
    Strategy st;
    REQUIRE(en.next(st));
    std::string stable = serializeStrategy(st, en.context());
    Strategy stBack = parseStrategyWitness(stable, en.context());
    CHECK(stBack.choice == st.choice);
}

TEST_CASE("one schema serves nodes whose states prune different branches") {
    // the same measuring process term is reached at |0> and at |1>; the
    // shared schema instantiates to the single surviving branch each time
    ModelFile model = parseModel(R"(
register q;
cchan c;
measurement M(1) = { 0: [1, 0, 0, 0], 1: [0, 0, 0, 1] };
superop X(1) = { [0, 1, 1, 0] };
config S = ( tau.M[q; x].c!x + X[q].M[q; x].c!x, |0> );
)");
    Plts g = buildPlts(getConfig(model, "S"), model.defs);

    StrategyEnumerator en(g, model.defs);
    CHECK(en.count() == 2);  // only the root's choice of summand is free

    int m0 = g.findNode(parseProcessText("M[q; x].c!x", model.defs),
                        QState::fromKets({"q"}, {KetPreset::Zero}));
    int m1 = g.findNode(parseProcessText("M[q; x].c!x", model.defs),
                        QState::fromKets({"q"}, {KetPreset::One}));
    REQUIRE(m0 >= 0);
    REQUIRE(m1 >= 0);

    Strategy st;
    while (en.next(st)) {
        Scheduler s = strategyToScheduler(st, en.context(), g);
        validateScheduler(s, g);
        // both measuring nodes take their tau, each to its own collapsed branch
        const auto& e0 = g.node(m0).edges[static_cast<size_t>(s.choice[static_cast<size_t>(m0)])];
        const auto& e1 = g.node(m1).edges[static_cast<size_t>(s.choice[static_cast<size_t>(m1)])];
        REQUIRE(e0.branches.size() == 1);
        REQUIRE(e1.branches.size() == 1);
        CHECK(printProcess(g.node(e0.branches[0].target).config.process) == "c!0");
        CHECK(printProcess(g.node(e1.branches[0].target).config.process) == "c!1");
    }
}

TEST_CASE("observations stay in range and leave at most unit mass") {
    for (const char* name : {"measurement_vs_dephasing.qccs", "measurement_sum.qccs",
                             "conditional_correction.qccs", "restriction_choice.qccs"}) {
        ModelFile model = loadModel(name);
        std::vector<std::string> channels;
        for (const auto& [ch, decl] : model.defs.channels)
            if (decl.kind == ChannelKind::Classical) channels.push_back(ch);
        for (const auto& [cfgName, decl] : model.configs) {
            Plts g = buildPlts({decl.process, decl.state}, model.defs);
            SchedulerEnumerator en(g);
            Scheduler s;
            while (en.next(s)) {
                auto v = observationVector(g, s, g.root, channels);
                if (v.divergent) continue;
                double total = 0.0;
                for (double p : v.probabilities) {
                    CHECK(p >= -1e-12);
                    CHECK(p <= 1.0 + 1e-12);
                    total += p;
                }
                CHECK(total <= 1.0 + 1e-9);
            }
        }
    }
}

TEST_CASE("the stable distribution is independent of the elimination order") {
    // second route: repeatedly substitute the scheduler's tau choice at the
    // highest-numbered support node instead of descending from the root
    ModelFile model = loadModel("measurement_sum.qccs");
    Plts g = buildPlts(getConfig(model, "D"), model.defs);
    SchedulerEnumerator en(g);
    Scheduler s;
    while (en.next(s)) {
        auto viaMemo = weakTauClosure(NodeDist::point(g.root), s, g);
        REQUIRE(viaMemo.has_value());

        NodeDist current = NodeDist::point(g.root);
        for (int guard = 0; guard < 1000; ++guard) {
            int pick = -1;
            for (const auto& [id, p] : current.entries) {
                int c = s.choice[static_cast<size_t>(id)];
                if (c != Scheduler::kStop &&
                    g.node(id).edges[static_cast<size_t>(c)].action.isTau())
                    pick = std::max(pick, id);
            }
            if (pick < 0) break;
            NodeDist next;
            for (const auto& [id, p] : current.entries) {
                if (id != pick) {
                    next.entries.emplace_back(id, p);
                    continue;
                }
                const auto& edge =
                    g.node(id).edges[static_cast<size_t>(s.choice[static_cast<size_t>(id)])];
                for (const auto& b : edge.branches)
                    next.entries.emplace_back(b.target, p * b.probability);
            }
            next.normalizeOrder();
            current = std::move(next);
        }
        CHECK(current.equals(*viaMemo));
    }
}

TEST_CASE("strategy instantiation is always a valid scheduler") {
    for (const char* name : {"measurement_vs_dephasing.qccs", "measurement_sum.qccs",
                             "conditional_correction.qccs", "restriction_choice.qccs"}) {
        ModelFile model = loadModel(name);
        for (const auto& [cfgName, decl] : model.configs) {
            Plts g = buildPlts({decl.process, decl.state}, model.defs);
            StrategyEnumerator en(g, model.defs);
            Strategy st;
            while (en.next(st)) {
                Scheduler s = strategyToScheduler(st, en.context(), g);
                validateScheduler(s, g);
            }
        }
    }
}
