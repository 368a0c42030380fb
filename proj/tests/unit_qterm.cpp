#include "qccs/definitions.hpp"
#include "qccs/parser.hpp"
#include "qccs/process.hpp"

#include "testutil.hpp"

#include <doctest.h>

using namespace qccs;
using test::standardDefs;
using test::TermGen;

TEST_CASE("free quantum variables follow the structural equations") {
    Definitions defs = standardDefs();

    // c!q.nil frees the sent qubit
    Process send = Process::qout("qc", "q0", Process::nil());
    CHECK(send.qv(defs) == std::set<std::string>{"q0"});

    CHECK(Process::nil().qv(defs).empty());

    // qc?q.qd!q.nil: the input binder cancels the later send
    Process relay = Process::qin("qc", "q0", Process::qout("qd", "q0", Process::nil()));
    CHECK(relay.qv(defs).empty());

    Process meas = Process::measure("M", {"q1"}, "x", Process::nil());
    CHECK(meas.qv(defs) == std::set<std::string>{"q1"});

    Process call = Process::constCall("A0", {}, {Expr::lit(0)});
    CHECK(call.qv(defs).empty());

    Definitions empty;
    CHECK_THROWS_AS(call.qv(empty), DefinitionError);
}

TEST_CASE("free classical variables respect input and measurement binders") {
    Process relay = Process::cin("c", "x", Process::cout("d", Expr::var("x"), Process::nil()));
    CHECK(relay.fv().empty());

    Process leak = Process::cout("d", Expr::var("x"), Process::nil());
    CHECK(leak.fv() == std::set<std::string>{"x"});

    // M[q;x].c!x.nil || d!y.nil leaves only y free
    Process par = Process::par(
        Process::measure("M", {"q0"}, "x", Process::cout("c", Expr::var("x"), Process::nil())),
        Process::cout("d", Expr::var("y"), Process::nil()));
    CHECK(par.fv() == std::set<std::string>{"y"});
}

TEST_CASE("legality conditions are reported with the offending subterm") {
    Definitions defs = standardDefs();

    // condition 1: sent qubit still used afterwards
    Process bad1 = Process::qout("qc", "q0", Process::superOp("Deph", {"q0"}, Process::nil()));
    auto r1 = checkLegal(bad1, defs);
    CHECK_FALSE(r1.ok);
    CHECK(r1.condition == 1);
    CHECK(r1.subterm.find("qc!q0") != std::string::npos);

    // condition 2: parallel components sharing a qubit
    Process bad2 = Process::par(Process::superOp("Deph", {"q0"}, Process::nil()),
                                Process::superOp("X", {"q0"}, Process::nil()));
    auto r2 = checkLegal(bad2, defs);
    CHECK_FALSE(r2.ok);
    CHECK(r2.condition == 2);

    // a measurement feeding a choice is fine
    Process good = Process::measure(
        "M", {"q0"}, "x",
        Process::sum(Process::cout("c", Expr::lit(0), Process::nil()),
                     Process::cout("d", Expr::lit(0), Process::nil())));
    CHECK(checkLegal(good, defs).ok);

    // condition 3: unknown constant and arity mismatch
    Process bad3 = Process::constCall("nowhere", {}, {});
    CHECK(checkLegal(bad3, defs).condition == 3);
    Process bad4 = Process::constCall("A0", {}, {});
    CHECK(checkLegal(bad4, defs).condition == 3);

    // structural problems: unknown channel, wrong kind, bad relabeling
    Process bad5 = Process::cout("nochan", Expr::lit(0), Process::nil());
    CHECK_FALSE(checkLegal(bad5, defs).ok);
    Process bad6 = Process::cin("qc", "x", Process::nil());
    CHECK_FALSE(checkLegal(bad6, defs).ok);
    Process bad7 = Process::relabel(Process::nil(), {{"c", "qc"}});
    CHECK_FALSE(checkLegal(bad7, defs).ok);
}

TEST_CASE("substitution replaces free occurrences and stops at binders") {
    Definitions defs = standardDefs();

    Process out = Process::cout("c", Expr::var("x"), Process::nil());
    Process substituted = out.substitute({{"x", 0.0}});
    CHECK(substituted.structurallyEqual(Process::cout("c", Expr::lit(0), Process::nil())));

    Process bound = Process::measure("M", {"q0"}, "x",
                                     Process::cout("c", Expr::var("x"), Process::nil()));
    CHECK(bound.substitute({{"x", 1.0}}).structurallyEqual(bound));

    // A0(x){3/x} becomes A0(3); unfolding resolves the conditional branches
    Process call = Process::constCall("A0", {}, {Expr::var("x")});
    Process applied = call.substitute({{"x", 3.0}});
    CHECK(applied.structurallyEqual(Process::constCall("A0", {}, {Expr::lit(3)})));
    Process unfolded = unfold(applied, defs);
    CHECK(unfolded.fv().empty());
}

TEST_CASE("unfolding checks arity and renames quantum parameters simultaneously") {
    Definitions defs = standardDefs();

    ProcessDef swapTargets;
    swapTargets.quantumParams = {"a", "b"};
    swapTargets.body = Process::superOp("X", {"a"}, Process::superOp("H", {"b"}, Process::nil()));
    defs.constants["SwapOp"] = swapTargets;

    // call with arguments that collide with the parameter names, crosswise
    Process call = Process::constCall("SwapOp", {"b", "a"}, {});
    Process body = unfold(call, defs);
    CHECK(body.structurallyEqual(
        Process::superOp("X", {"b"}, Process::superOp("H", {"a"}, Process::nil()))));

    CHECK_THROWS_AS(unfold(Process::constCall("SwapOp", {"q0"}, {}), defs), DefinitionError);
    CHECK_THROWS_AS(unfold(Process::constCall("missing", {}, {}), defs), DefinitionError);
}

TEST_CASE("deep unfolding keeps recursive constants guarded") {
    Definitions defs = standardDefs();
    ProcessDef loop;
    loop.body = Process::tau(Process::constCall("Loop", {}, {}));
    defs.constants["Loop"] = loop;

    Process p = Process::constCall("Loop", {}, {});
    Process norm = unfoldDeep(p, defs);
    // one unfolding step, then the recursive call is left in place
    CHECK(norm.structurallyEqual(Process::tau(Process::constCall("Loop", {}, {}))));

    // non-recursive constants expand fully and share keys with their expansion
    Process call = Process::constCall("A0", {}, {Expr::lit(0)});
    CHECK(printProcess(unfoldDeep(call, defs)) == printProcess(unfold(call, defs)));
}

TEST_CASE("classical substitution never changes the free quantum variables") {
    Definitions defs = standardDefs();
    TermGen gen(defs, 20250810);
    for (int i = 0; i < 200; ++i) {
        Process p = gen.closedTerm();
        REQUIRE(checkLegal(p, defs).ok);
        CHECK(p.substitute({{"x", 1.0}, {"y", 0.0}, {"z", 1.0}}).qv(defs) == p.qv(defs));
    }
}

TEST_CASE("a process is fixed by substitution exactly when it is closed") {
    Definitions defs = standardDefs();
    TermGen gen(defs, 42);
    int openSeen = 0;
    for (int i = 0; i < 300; ++i) {
        Process p = gen.closedTerm();
        CHECK(p.fv().empty());
        CHECK(p.substitute({{"x", 1.0}, {"y", 2.0}, {"z", 3.0}}).structurallyEqual(p));
    }
    // an open term with x free must change under {1/x}
    Process open = Process::cout("c", Expr::var("x"), Process::nil());
    CHECK_FALSE(open.substitute({{"x", 1.0}}).structurallyEqual(open));
    openSeen += open.fv().size();
    CHECK(openSeen == 1);
}

TEST_CASE("legality is stable under recombination of disjoint legal parts") {
    Definitions defs = standardDefs();
    TermGen gen(defs, 7);
    for (int i = 0; i < 100; ++i) {
        Process p = gen.closedTerm();
        Process q = gen.closedTerm();
        REQUIRE(checkLegal(p, defs).ok);
        REQUIRE(checkLegal(q, defs).ok);
        CHECK(checkLegal(Process::sum(p, q), defs).ok);

        auto pq = p.qv(defs);
        auto qq = q.qv(defs);
        bool disjoint = true;
        for (const auto& name : pq)
            if (qq.count(name)) disjoint = false;
        if (disjoint) CHECK(checkLegal(Process::par(p, q), defs).ok);
    }
}
