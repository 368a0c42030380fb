#include "qccs/semantics.hpp"

namespace qccs {

namespace {

using Branch = TransitionSchema::Branch;
using BranchKind = TransitionSchema::BranchKind;

Branch plainBranch(Process target) {
    Branch b;
    b.target = std::move(target);
    b.kind = BranchKind::Plain;
    return b;
}

bool sameBranch(const Branch& a, const Branch& b) {
    if (a.kind != b.kind || a.qubits != b.qubits) return false;
    if (!a.target.structurallyEqual(b.target)) return false;
    switch (a.kind) {
        case BranchKind::Plain: return true;
        case BranchKind::Apply: {
            if (a.op.arity != b.op.arity || a.op.kraus.size() != b.op.kraus.size()) return false;
            for (size_t i = 0; i < a.op.kraus.size(); ++i)
                if (!matrixEq(a.op.kraus[i], b.op.kraus[i])) return false;
            return true;
        }
        case BranchKind::Project: return matrixEq(a.projector, b.projector);
    }
    return false;
}

bool sameSchema(const TransitionSchema& a, const TransitionSchema& b) {
    if (!(a.action == b.action) || a.branches.size() != b.branches.size()) return false;
    for (size_t i = 0; i < a.branches.size(); ++i)
        if (!sameBranch(a.branches[i], b.branches[i])) return false;
    return true;
}

void pushUnique(std::vector<TransitionSchema>& list, TransitionSchema s) {
    for (const auto& existing : list)
        if (sameSchema(existing, s)) return;
    list.push_back(std::move(s));
}

TransitionSchema singleBranch(Process source, Action action, Branch branch) {
    TransitionSchema s;
    s.source = std::move(source);
    s.action = std::move(action);
    s.branches.push_back(std::move(branch));
    return s;
}

const Branch& onlyPlainBranch(const TransitionSchema& s) {
    if (s.branches.size() != 1 || s.branches.front().kind != BranchKind::Plain)
        throw SemanticsError("internal: communication premise is not a single plain branch");
    return s.branches.front();
}

std::vector<TransitionSchema> schemasOf(const Process& p, const Definitions& defs,
                                        std::set<std::string>& expanding);

std::vector<TransitionSchema> parSchemas(const Process& p, const Definitions& defs,
                                         std::set<std::string>& expanding) {
    const Process& lhs = p.left();
    const Process& rhs = p.right();
    auto leftSchemas = schemasOf(lhs, defs, expanding);
    auto rightSchemas = schemasOf(rhs, defs, expanding);
    auto leftQv = lhs.qv(defs);
    auto rightQv = rhs.qv(defs);

    std::vector<TransitionSchema> out;

    auto retarget = [](const TransitionSchema& s, auto&& wrap) {
        TransitionSchema copy = s;
        for (auto& b : copy.branches) b.target = wrap(b.target);
        return copy;
    };

    for (const auto& s : leftSchemas) {
        if (s.action.kind == Action::Kind::QIn && rightQv.count(s.action.qubit)) continue;
        auto copy = retarget(s, [&](const Process& t) { return Process::par(t, rhs); });
        copy.source = p;
        out.push_back(std::move(copy));
    }
    for (const auto& s : rightSchemas) {
        if (s.action.kind == Action::Kind::QIn && leftQv.count(s.action.qubit)) continue;
        auto copy = retarget(s, [&](const Process& t) { return Process::par(lhs, t); });
        copy.source = p;
        out.push_back(std::move(copy));
    }

    auto communicate = [&](const std::vector<TransitionSchema>& ins,
                           const std::vector<TransitionSchema>& outs, bool leftIsInput) {
        for (const auto& in : ins) {
            if (in.action.kind != Action::Kind::CIn && in.action.kind != Action::Kind::QIn) continue;
            for (const auto& o : outs) {
                bool classicalMatch = in.action.kind == Action::Kind::CIn &&
                                      o.action.kind == Action::Kind::COut &&
                                      in.action.channel == o.action.channel &&
                                      in.action.value == o.action.value;
                bool quantumMatch = in.action.kind == Action::Kind::QIn &&
                                    o.action.kind == Action::Kind::QOut &&
                                    in.action.channel == o.action.channel &&
                                    in.action.qubit == o.action.qubit;
                if (!classicalMatch && !quantumMatch) continue;
                const Process& inTarget = onlyPlainBranch(in).target;
                const Process& outTarget = onlyPlainBranch(o).target;
                Process combined = leftIsInput ? Process::par(inTarget, outTarget)
                                               : Process::par(outTarget, inTarget);
                out.push_back(singleBranch(p, Action::tau(), plainBranch(std::move(combined))));
            }
        }
    };
    communicate(leftSchemas, rightSchemas, true);
    communicate(rightSchemas, leftSchemas, false);
    return out;
}

std::vector<TransitionSchema> schemasOf(const Process& p, const Definitions& defs,
                                        std::set<std::string>& expanding) {
    switch (p.kind()) {
        case Process::Kind::Nil: return {};

        case Process::Kind::Tau:
            return {singleBranch(p, Action::tau(), plainBranch(p.cont()))};

        case Process::Kind::CIn: {
            const ChannelDecl* ch = defs.findChannel(p.name());
            if (!ch) throw SemanticsError("channel '" + p.name() + "' is not declared");
            if (!ch->domain)
                throw SemanticsError("classical input on channel '" + p.name() +
                                     "' which has no declared value domain");
            std::vector<TransitionSchema> out;
            for (double v : *ch->domain)
                out.push_back(singleBranch(p, Action::cin(p.name(), v),
                                           plainBranch(p.cont().substitute({{p.var(), v}}))));
            return out;
        }

        case Process::Kind::COut:
            return {singleBranch(p, Action::cout(p.name(), p.value().eval()),
                                 plainBranch(p.cont()))};

        case Process::Kind::QIn: {
            auto blocked = p.qv(defs);
            std::vector<TransitionSchema> out;
            for (const auto& r : defs.registerNames) {
                if (blocked.count(r)) continue;
                out.push_back(singleBranch(p, Action::qin(p.name(), r),
                                           plainBranch(p.cont().substituteQuantum({{p.var(), r}}))));
            }
            return out;
        }

        case Process::Kind::QOut:
            return {singleBranch(p, Action::qout(p.name(), p.var()), plainBranch(p.cont()))};

        case Process::Kind::SuperOp: {
            const SuperOperator* op = defs.findSuperOp(p.name());
            if (!op) throw SemanticsError("super-operator '" + p.name() + "' is not declared");
            Branch b;
            b.target = p.cont();
            b.kind = BranchKind::Apply;
            b.op = *op;
            b.qubits = p.qubits();
            return {singleBranch(p, Action::tau(), std::move(b))};
        }

        case Process::Kind::Measure: {
            const Measurement* m = defs.findMeasurement(p.name());
            if (!m) throw SemanticsError("measurement '" + p.name() + "' is not declared");
            TransitionSchema s;
            s.source = p;
            s.action = Action::tau();
            for (const auto& branch : m->branches) {
                Branch b;
                b.target = p.cont().substitute({{p.var(), branch.outcome}});
                b.kind = BranchKind::Project;
                b.projector = branch.projector;
                b.qubits = p.qubits();
                s.branches.push_back(std::move(b));
            }
            return {std::move(s)};
        }

        case Process::Kind::Sum: {
            auto out = schemasOf(p.left(), defs, expanding);
            for (auto& s : schemasOf(p.right(), defs, expanding)) out.push_back(std::move(s));
            for (auto& s : out) s.source = p;
            return out;
        }

        case Process::Kind::Par: return parSchemas(p, defs, expanding);

        case Process::Kind::Relabel: {
            std::vector<TransitionSchema> out;
            for (const auto& s : schemasOf(p.cont(), defs, expanding)) {
                TransitionSchema copy = s;
                copy.source = p;
                copy.action = s.action.relabeled(p.relabelFn());
                for (auto& b : copy.branches) b.target = Process::relabel(b.target, p.relabelFn());
                out.push_back(std::move(copy));
            }
            return out;
        }

        case Process::Kind::Restrict: {
            std::vector<TransitionSchema> out;
            for (const auto& s : schemasOf(p.cont(), defs, expanding)) {
                bool blocked = false;
                for (const auto& c : s.action.channelNames())
                    if (p.restrictSet().count(c)) blocked = true;
                if (blocked) continue;
                TransitionSchema copy = s;
                copy.source = p;
                for (auto& b : copy.branches) b.target = Process::restrict(b.target, p.restrictSet());
                out.push_back(std::move(copy));
            }
            return out;
        }

        case Process::Kind::If: {
            if (!p.cond().eval()) return {};
            auto out = schemasOf(p.cont(), defs, expanding);
            for (auto& s : out) s.source = p;
            return out;
        }

        case Process::Kind::ConstCall: {
            if (expanding.count(p.name()))
                throw SemanticsError("unguarded recursion through constant '" + p.name() + "'");
            expanding.insert(p.name());
            auto out = schemasOf(unfold(p, defs), defs, expanding);
            expanding.erase(p.name());
            for (auto& s : out) s.source = p;
            return out;
        }
    }
    return {};
}

}  // namespace

std::vector<TransitionSchema> transitionSchemas(const Process& p, const Definitions& defs) {
    auto freeVars = p.fv();
    if (!freeVars.empty())
        throw SemanticsError("transition schemas need a closed process ('" + *freeVars.begin() +
                             "' is free)");
    std::set<std::string> expanding;
    auto raw = schemasOf(p, defs, expanding);
    std::vector<TransitionSchema> out;
    out.reserve(raw.size());
    for (auto& s : raw) pushUnique(out, std::move(s));
    return out;
}

Transition instantiate(const TransitionSchema& schema, const QState& rho) {
    std::vector<std::pair<Configuration, double>> weighted;
    for (const auto& b : schema.branches) {
        switch (b.kind) {
            case TransitionSchema::BranchKind::Plain:
                weighted.emplace_back(Configuration{b.target, rho}, 1.0);
                break;
            case TransitionSchema::BranchKind::Apply:
                weighted.emplace_back(Configuration{b.target, applySuper(rho, b.op, b.qubits)}, 1.0);
                break;
            case TransitionSchema::BranchKind::Project: {
                std::vector<int> positions;
                for (const auto& q : b.qubits) positions.push_back(rho.qubitIndex(q));
                CMatrix lifted = liftOperator(b.projector, positions, rho.qubitCount());
                CMatrix post = lifted * rho.matrix() * lifted.adjoint();
                double weight = post.trace().real();
                if (weight <= kProbFloor) continue;
                weighted.emplace_back(Configuration{b.target, QState(rho.registerNames(), post / weight)},
                                      weight);
                break;
            }
        }
    }
    return {schema.action, Distribution::fromWeighted(std::move(weighted))};
}

}  // namespace qccs
