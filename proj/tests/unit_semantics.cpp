#include "qccs/plts.hpp"
#include "qccs/semantics.hpp"

#include "testutil.hpp"

#include <doctest.h>

using namespace qccs;
using test::getConfig;
using test::loadModel;
using test::standardDefs;
using test::TermGen;
using test::transitionSetsEqual;

TEST_CASE("a measurement prefix makes a single probabilistic tau transition") {
    ModelFile model = loadModel("measurement_vs_dephasing.qccs");
    Configuration c = getConfig(model, "C");

    auto ts = transitions(c, model.defs);
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].action.isTau());
    REQUIRE(ts[0].target.size() == 2);

    Process contP = parseProcessText("c!0 + d!0", model.defs);
    QState zero = QState::fromKets({"q"}, {KetPreset::Zero});
    QState one = QState::fromKets({"q"}, {KetPreset::One});
    Distribution expected = Distribution::fromWeighted(
        {{Configuration{contP, zero}, 0.5}, {Configuration{contP, one}, 0.5}});
    CHECK(ts[0].target.equals(expected));
}

TEST_CASE("a channel prefix makes one deterministic tau transition to the mixture") {
    ModelFile model = loadModel("measurement_vs_dephasing.qccs");
    Configuration d = getConfig(model, "D");

    auto ts = transitions(d, model.defs);
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].action.isTau());
    REQUIRE(ts[0].target.isPoint());

    CMatrix mixed(2, 2);
    mixed << 0.5, 0, 0, 0.5;
    CHECK(matrixEq(ts[0].target.onlyConfiguration().state.matrix(), mixed));
}

TEST_CASE("nil has no transitions; a sum offers both branches") {
    ModelFile model = loadModel("measurement_vs_dephasing.qccs");
    QState zero = QState::fromKets({"q"}, {KetPreset::Zero});

    CHECK(transitions({Process::nil(), zero}, model.defs).empty());

    Configuration choice{parseProcessText("c!0 + d!0", model.defs), zero};
    auto ts = transitions(choice, model.defs);
    REQUIRE(ts.size() == 2);
    CHECK(ts[0].action == Action::cout("c", 0));
    CHECK(ts[1].action == Action::cout("d", 0));
    CHECK(ts[0].target.isPoint());
    CHECK(ts[0].target.onlyConfiguration().process.kind() == Process::Kind::Nil);
}

TEST_CASE("identical summands collapse to one transition") {
    ModelFile model = loadModel("measurement_vs_dephasing.qccs");
    QState zero = QState::fromKets({"q"}, {KetPreset::Zero});
    Configuration twice{parseProcessText("c!0 + c!0", model.defs), zero};
    CHECK(transitions(twice, model.defs).size() == 1);
}

TEST_CASE("classical communication synchronizes matching values as tau") {
    Definitions defs = standardDefs();
    QState state = QState::fromKets(defs.registerNames,
                                    {KetPreset::Zero, KetPreset::Zero, KetPreset::Zero});

    Configuration c{parseProcessText("c!1 || c?x.d!x", defs), state};
    auto ts = transitions(c, defs);

    // left output interleaves, right inputs over the domain, plus one sync
    int taus = 0, outs = 0, ins = 0;
    const Transition* sync = nullptr;
    for (const auto& t : ts) {
        if (t.action.isTau()) {
            ++taus;
            sync = &t;
        }
        if (t.action.kind == Action::Kind::COut) ++outs;
        if (t.action.kind == Action::Kind::CIn) ++ins;
    }
    CHECK(outs == 1);
    CHECK(ins == 2);  // domain {0, 1}
    REQUIRE(taus == 1);
    REQUIRE(sync->target.isPoint());
    CHECK(printProcess(sync->target.onlyConfiguration().process) == "nil || d!1");

    // restriction hides the channel but keeps the internal step
    Configuration hidden{parseProcessText("(c!1 || c?x.d!x) \\ {c}", defs), state};
    auto hiddenTs = transitions(hidden, defs);
    REQUIRE(hiddenTs.size() == 1);
    CHECK(hiddenTs[0].action.isTau());
}

TEST_CASE("unmatched output values do not synchronize") {
    Definitions defs = standardDefs();
    QState state = QState::fromKets(defs.registerNames,
                                    {KetPreset::Zero, KetPreset::Zero, KetPreset::Zero});
    // 5 is outside the declared domain of c, so no input matches it
    Configuration c{parseProcessText("c!5 || c?x.d!x", defs), state};
    for (const auto& t : transitions(c, defs)) CHECK_FALSE(t.action.isTau());
}

TEST_CASE("quantum communication hands over the named qubit") {
    Definitions defs = standardDefs();
    QState state = QState::fromKets(defs.registerNames,
                                    {KetPreset::Plus, KetPreset::Zero, KetPreset::Zero});

    Configuration c{parseProcessText("qc!q0 || qc?r.Deph[r]", defs), state};
    auto ts = transitions(c, defs);

    const Transition* sync = nullptr;
    for (const auto& t : ts)
        if (t.action.isTau()) sync = &t;
    REQUIRE(sync != nullptr);
    CHECK(printProcess(sync->target.onlyConfiguration().process) == "nil || Deph[q0]");

    // the receiving side alone ranges over register names not already free
    Configuration open{parseProcessText("qc?r.Deph[r]", defs), state};
    auto openTs = transitions(open, defs);
    CHECK(openTs.size() == 3);
    for (const auto& t : openTs) CHECK(t.action.kind == Action::Kind::QIn);
}

TEST_CASE("a qubit can be relayed through two synchronizations") {
    Definitions defs = standardDefs();
    QState state = QState::fromKets(defs.registerNames,
                                    {KetPreset::Plus, KetPreset::Zero, KetPreset::Zero});
    Configuration c{parseProcessText("qc!q0 || (qc?r.qd!r || qd?s.Deph[s])", defs), state};

    Plts g = buildPlts(c, defs);
    // after both handovers someone dephases exactly the relayed qubit
    bool relayed = false;
    for (const auto& node : g.nodes)
        if (printProcess(node.config.process).find("Deph[q0]") != std::string::npos) relayed = true;
    CHECK(relayed);

    // hiding both quantum channels leaves only the internal steps
    Configuration hidden{
        parseProcessText("(qc!q0 || (qc?r.qd!r || qd?s.Deph[s])) \\ {qc, qd}", defs), state};
    Plts gh = buildPlts(hidden, defs);
    for (const auto& node : gh.nodes)
        for (const auto& edge : node.edges) CHECK(edge.action.isTau());
    // two handovers, one dephasing step, then silence
    int steps = 0;
    int at = gh.root;
    while (!gh.node(at).edges.empty()) {
        REQUIRE(gh.node(at).edges.size() == 1);
        REQUIRE(gh.node(at).edges[0].branches.size() == 1);
        at = gh.node(at).edges[0].branches[0].target;
        ++steps;
    }
    CHECK(steps == 3);
}

TEST_CASE("communication works across a relabeling boundary") {
    Definitions defs = standardDefs();
    QState state = QState::fromKets(defs.registerNames,
                                    {KetPreset::Zero, KetPreset::Zero, KetPreset::Zero});
    // the left component speaks c, relabeled to d at its boundary
    Configuration c{parseProcessText("(c!1)[c -> d] || d?x.d!x", defs), state};
    auto ts = transitions(c, defs);
    const Transition* sync = nullptr;
    for (const auto& t : ts)
        if (t.action.isTau()) sync = &t;
    REQUIRE(sync != nullptr);
    CHECK(printProcess(sync->target.onlyConfiguration().process) == "nil[c -> d] || d!1");
}

TEST_CASE("an entangling gate and a one-qubit measurement agree with the tensor math") {
    ModelFile model = parseModel(R"(
register a, b;
cchan c;
superop CX(2) = { [1,0,0,0, 0,1,0,0, 0,0,0,1, 0,0,1,0] };
measurement M(1) = { 0: [1, 0, 0, 0], 1: [0, 0, 0, 1] };
config Bell = ( CX[a, b].M[a; x].c!x, |+>, |0> );
)");
    Plts g = buildPlts(getConfig(model, "Bell"), model.defs);

    // after CX the state is the Bell projector, then measuring the first
    // qubit collapses both
    int bellNode = -1;
    for (size_t i = 0; i < g.size(); ++i) {
        CMatrix bell = CMatrix::Zero(4, 4);
        bell(0, 0) = bell(0, 3) = bell(3, 0) = bell(3, 3) = 0.5;
        if (matrixEq(g.nodes[i].config.state.matrix(), bell)) bellNode = static_cast<int>(i);
    }
    REQUIRE(bellNode >= 0);
    REQUIRE(g.node(bellNode).edges.size() == 1);
    const auto& meas = g.node(bellNode).edges[0];
    REQUIRE(meas.branches.size() == 2);
    QState z00 = QState::fromKets({"a", "b"}, {KetPreset::Zero, KetPreset::Zero});
    QState z11 = QState::fromKets({"a", "b"}, {KetPreset::One, KetPreset::One});
    CHECK(stateEq(g.node(meas.branches[0].target).config.state, z00));
    CHECK(stateEq(g.node(meas.branches[1].target).config.state, z11));
    CHECK(meas.branches[0].probability == doctest::Approx(0.5));
    CHECK(meas.branches[1].probability == doctest::Approx(0.5));
}

TEST_CASE("the input side may not capture a qubit owned by the partner") {
    Definitions defs = standardDefs();
    QState state = QState::fromKets(defs.registerNames,
                                    {KetPreset::Zero, KetPreset::Zero, KetPreset::Zero});
    // partner owns q1: receiving q1 from outside is blocked, q0/q2 are fine
    Configuration c{parseProcessText("qc?r.qd!r || Deph[q1]", defs), state};
    int quantumIns = 0;
    for (const auto& t : transitions(c, defs))
        if (t.action.kind == Action::Kind::QIn) {
            ++quantumIns;
            CHECK(t.action.qubit != "q1");
        }
    CHECK(quantumIns == 2);
}

TEST_CASE("relabeling renames actions and continuations consistently") {
    Definitions defs = standardDefs();
    QState state = QState::fromKets(defs.registerNames,
                                    {KetPreset::Zero, KetPreset::Zero, KetPreset::Zero});
    Configuration base{parseProcessText("c!0.d!1", defs), state};
    Configuration wrapped{parseProcessText("(c!0.d!1)[c -> d]", defs), state};

    auto baseTs = transitions(base, defs);
    auto wrappedTs = transitions(wrapped, defs);
    REQUIRE(baseTs.size() == 1);
    REQUIRE(wrappedTs.size() == 1);
    CHECK(wrappedTs[0].action == baseTs[0].action.relabeled({{"c", "d"}}));
    CHECK(wrappedTs[0].target.onlyConfiguration().process.kind() == Process::Kind::Relabel);
}

TEST_CASE("if-then is transparent when true and inert when false") {
    Definitions defs = standardDefs();
    QState state = QState::fromKets(defs.registerNames,
                                    {KetPreset::Zero, KetPreset::Zero, KetPreset::Zero});
    CHECK(transitions({parseProcessText("if 0 = 0 then c!0", defs), state}, defs).size() == 1);
    CHECK(transitions({parseProcessText("if 0 = 1 then c!0", defs), state}, defs).empty());
    // constant calls pass actions through directly
    CHECK(transitions({parseProcessText("A0(0)", defs), state}, defs).size() == 1);
}

TEST_CASE("inputs on a channel without a domain are rejected") {
    Definitions defs = standardDefs();
    defs.channels["bare"] = {ChannelKind::Classical, {}};
    QState state = QState::fromKets(defs.registerNames,
                                    {KetPreset::Zero, KetPreset::Zero, KetPreset::Zero});
    CHECK_THROWS_AS(transitions({parseProcessText("bare?x.c!x", defs), state}, defs),
                    SemanticsError);
}

TEST_CASE("reachable graphs match the drawn shapes after node merging") {
    ModelFile model = loadModel("measurement_vs_dephasing.qccs");

    Plts gc = buildPlts(getConfig(model, "C"), model.defs);
    // root, the two post-measurement configurations, and the two terminals
    CHECK(gc.size() == 5);
    REQUIRE(gc.node(gc.root).edges.size() == 1);
    const auto& tauEdge = gc.node(gc.root).edges[0];
    CHECK(tauEdge.action.isTau());
    REQUIRE(tauEdge.branches.size() == 2);
    CHECK(tauEdge.branches[0].probability == doctest::Approx(0.5));
    CHECK(tauEdge.branches[1].probability == doctest::Approx(0.5));
    for (const auto& b : tauEdge.branches) {
        const auto& mid = gc.node(b.target);
        REQUIRE(mid.edges.size() == 2);
        CHECK(mid.edges[0].action == Action::cout("c", 0));
        CHECK(mid.edges[1].action == Action::cout("d", 0));
        // both outputs land on the same terminal
        CHECK(mid.edges[0].branches[0].target == mid.edges[1].branches[0].target);
        CHECK(gc.deadlocked(mid.edges[0].branches[0].target));
    }

    Plts gd = buildPlts(getConfig(model, "D"), model.defs);
    CHECK(gd.size() == 3);
    REQUIRE(gd.node(gd.root).edges.size() == 1);
    CHECK(gd.node(gd.root).edges[0].action.isTau());
    CHECK(gd.node(gd.root).edges[0].branches.size() == 1);

    QState zero = QState::fromKets({"q"}, {KetPreset::Zero});
    Plts trivial = buildPlts({Process::nil(), zero}, model.defs);
    CHECK(trivial.size() == 1);
    CHECK(trivial.node(0).edges.empty());
}

TEST_CASE("the conditional-correction graphs collapse their identical leaves") {
    ModelFile model = loadModel("conditional_correction.qccs");
    Plts gc = buildPlts(getConfig(model, "C"), model.defs);
    // root; A(q;0)@|0>, A(q;1)@|1>; I[q]@|0>, X[q]@|1>; nil@|0> (shared)
    CHECK(gc.size() == 6);

    Plts gd = buildPlts(getConfig(model, "D"), model.defs);
    CHECK(gd.size() == 3);

    // X undoes the measured |1>: every terminal state is |0>
    QState zero = QState::fromKets({"q"}, {KetPreset::Zero});
    for (const auto& node : gc.nodes)
        if (node.config.process.kind() == Process::Kind::Nil)
            CHECK(stateEq(node.config.state, zero));
}

TEST_CASE("restricted channels never appear on graph edges") {
    ModelFile model = loadModel("restriction_choice.qccs");
    Plts g = buildPlts(getConfig(model, "Qr"), model.defs);
    for (const auto& node : g.nodes)
        for (const auto& edge : node.edges)
            for (const auto& ch : edge.action.channelNames()) CHECK(ch != "c");
    // the silenced branch deadlocks without output
    bool sawDeadEnd = false;
    for (const auto& node : g.nodes)
        if (node.config.process.kind() != Process::Kind::Nil && node.edges.empty() &&
            printProcess(node.config.process).find("c!0") != std::string::npos)
            sawDeadEnd = true;
    CHECK(sawDeadEnd);
}

TEST_CASE("graph construction stops at the node budget on divergent state spaces") {
    // an irrational rotation never revisits a state
    const char* text = R"(
register q;
cchan c;
superop R(1) = { [0.8775825618903728, -0.479425538604203, 0.479425538604203, 0.8775825618903728] };
Spin(s;) := R[s].Spin(s;);
config S = ( Spin(q;), |0> );
)";
    ModelFile model = parseModel(text);
    CHECK_THROWS_AS(buildPlts(getConfig(model, "S"), model.defs, 40), StateSpaceLimitError);
}

TEST_CASE("unguarded recursion is detected instead of looping") {
    const char* text = R"(
register q;
cchan c;
Bad() := Bad() + c!0;
config B = ( Bad(), |0> );
)";
    ModelFile model = parseModel(text);
    CHECK_THROWS_AS(transitions(getConfig(model, "B"), model.defs), SemanticsError);
}

TEST_CASE("guarded recursion yields a finite graph with a self loop") {
    const char* text = R"(
register q;
cchan c;
Loop() := tau.Loop();
config L = ( Loop(), |0> );
)";
    ModelFile model = parseModel(text);
    Plts g = buildPlts(getConfig(model, "L"), model.defs);
    CHECK(g.size() == 1);
    REQUIRE(g.node(0).edges.size() == 1);
    CHECK(g.node(0).edges[0].action.isTau());
    CHECK(g.node(0).edges[0].branches[0].target == 0);
}

TEST_CASE("schemas mirror the prefix rules") {
    ModelFile model = loadModel("measurement_vs_dephasing.qccs");
    const Definitions& defs = model.defs;

    auto measureSchemas = transitionSchemas(getConfig(model, "C").process, defs);
    REQUIRE(measureSchemas.size() == 1);
    CHECK(measureSchemas[0].action.isTau());
    REQUIRE(measureSchemas[0].branches.size() == 2);
    for (const auto& b : measureSchemas[0].branches)
        CHECK(b.kind == TransitionSchema::BranchKind::Project);
    // the projectors of the branches resolve the identity
    CMatrix sum = measureSchemas[0].branches[0].projector + measureSchemas[0].branches[1].projector;
    CHECK(matrixEq(sum, CMatrix::Identity(2, 2)));

    auto choiceSchemas = transitionSchemas(parseProcessText("c!0 + d!0", defs), defs);
    REQUIRE(choiceSchemas.size() == 2);
    for (const auto& s : choiceSchemas) {
        REQUIRE(s.branches.size() == 1);
        CHECK(s.branches[0].kind == TransitionSchema::BranchKind::Plain);
    }

    auto channelSchemas = transitionSchemas(getConfig(model, "D").process, defs);
    REQUIRE(channelSchemas.size() == 1);
    REQUIRE(channelSchemas[0].branches.size() == 1);
    CHECK(channelSchemas[0].branches[0].kind == TransitionSchema::BranchKind::Apply);
}

TEST_CASE("instantiating the schemas reproduces the direct transitions") {
    Definitions defs = standardDefs();
    TermGen gen(defs, 20240101);
    int checked = 0;
    for (int i = 0; i < 200; ++i) {
        Process p = gen.closedTerm();
        QState rho = test::randomState(defs, gen.rng());
        Configuration c{p, rho};

        auto direct = transitions(c, defs);
        std::vector<Transition> viaSchemas;
        for (const auto& schema : transitionSchemas(p, defs))
            viaSchemas.push_back(instantiate(schema, rho));
        // instantiation may collapse schema duplicates that differ only by
        // zero-probability branches; compare as sets after dedup
        std::vector<Transition> dedup;
        for (auto& t : viaSchemas) {
            bool seen = false;
            for (const auto& existing : dedup)
                if (existing.action == t.action && existing.target.equals(t.target)) seen = true;
            if (!seen) dedup.push_back(std::move(t));
        }
        CAPTURE(printProcess(p));
        CHECK(transitionSetsEqual(direct, dedup));
        ++checked;
    }
    CHECK(checked == 200);
}

TEST_CASE("relabeled processes make exactly the renamed transitions") {
    Definitions defs = standardDefs();
    TermGen gen(defs, 31337);
    RelabelFn f{{"c", "d"}, {"qc", "qd"}};
    for (int i = 0; i < 60; ++i) {
        Process p = gen.closedTerm();
        QState rho = test::randomState(defs, gen.rng());

        auto base = transitions({p, rho}, defs);
        auto wrapped = transitions({Process::relabel(p, f), rho}, defs);

        std::vector<Transition> image;
        for (const auto& t : base) {
            Transition mapped{t.action.relabeled(f),
                              t.target.mapProcesses(
                                  [&](const Process& q) { return Process::relabel(q, f); })};
            bool seen = false;
            for (const auto& existing : image)
                if (existing.action == mapped.action && existing.target.equals(mapped.target))
                    seen = true;
            if (!seen) image.push_back(std::move(mapped));
        }
        CHECK(transitionSetsEqual(wrapped, image));
    }
}

TEST_CASE("restricted processes never offer actions on hidden channels") {
    Definitions defs = standardDefs();
    TermGen gen(defs, 99999, 3);
    std::set<std::string> hidden{"c", "qc"};
    int graphs = 0;
    for (int i = 0; i < 60; ++i) {
        Process p = Process::restrict(gen.closedTerm(), hidden);
        QState rho = test::randomState(defs, gen.rng());
        try {
            Plts g = buildPlts({p, rho}, defs, 400);
            ++graphs;
            for (const auto& node : g.nodes)
                for (const auto& edge : node.edges)
                    for (const auto& ch : edge.action.channelNames()) CHECK(!hidden.count(ch));
        } catch (const StateSpaceLimitError&) {
            // oversized random instances are fine to skip
        }
    }
    CHECK(graphs > 20);
}

TEST_CASE("projector branches of a schema resolve the identity") {
    Definitions defs = standardDefs();
    TermGen gen(defs, 24680);
    for (int i = 0; i < 60; ++i) {
        Process p = gen.closedTerm();
        for (const auto& schema : transitionSchemas(p, defs)) {
            bool projecting = false;
            for (const auto& b : schema.branches)
                if (b.kind == TransitionSchema::BranchKind::Project) projecting = true;
            if (!projecting) continue;
            CMatrix sum;
            bool first = true;
            for (const auto& b : schema.branches) {
                REQUIRE(b.kind == TransitionSchema::BranchKind::Project);
                if (first) {
                    sum = b.projector;
                    first = false;
                } else {
                    sum += b.projector;
                }
            }
            CHECK(matrixEq(sum, CMatrix::Identity(sum.rows(), sum.cols())));
        }
    }
}

TEST_CASE("every transition preserves trace and yields valid states") {
    Definitions defs = standardDefs();
    TermGen gen(defs, 555);
    for (int i = 0; i < 80; ++i) {
        Process p = gen.closedTerm();
        QState rho = test::randomState(defs, gen.rng());
        for (const auto& t : transitions({p, rho}, defs)) {
            double total = 0.0;
            for (const auto& [config, prob] : t.target.entries()) {
                total += prob;
                config.state.validate(1e-7);
                // parallel legality survives along edges
                CHECK(checkLegal(config.process, defs).ok);
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("lifted steps mix successor choices with the source weights") {
    ModelFile model = loadModel("measurement_vs_dephasing.qccs");
    Configuration c = getConfig(model, "C");
    auto ts = transitions(c, model.defs);
    REQUIRE(ts.size() == 1);
    const Distribution& mid = ts[0].target;

    auto viaC = liftTransition(mid, Action::cout("c", 0), model.defs);
    REQUIRE(viaC.size() == 1);
    CHECK(viaC[0].size() == 2);  // nil@|0> and nil@|1>, half each

    // no support element offers e!0
    CHECK(liftTransition(mid, Action::cout("e", 0), model.defs).empty());

    // two choices per element: 2x2 combinations, deduplicated by value
    Definitions defs = standardDefs();
    QState z3 = QState::fromKets(defs.registerNames,
                                 {KetPreset::Zero, KetPreset::Zero, KetPreset::Zero});
    Distribution two = Distribution::fromWeighted(
        {{Configuration{parseProcessText("c!0.c!0 + c!0.d!0", defs), z3}, 0.5},
         {Configuration{parseProcessText("c!0.c!1 + c!0.d!1", defs), z3}, 0.5}});
    auto lifted = liftTransition(two, Action::cout("c", 0), defs);
    CHECK(lifted.size() == 4);
}
