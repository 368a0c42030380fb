#include "qccs/semantics.hpp"

#include "qccs/parser.hpp"

#include <algorithm>

namespace qccs {

std::string printAction(const Action& a) {
    switch (a.kind) {
        case Action::Kind::Tau: return "tau";
        case Action::Kind::CIn: return a.channel + "?" + formatReal(a.value);
        case Action::Kind::COut: return a.channel + "!" + formatReal(a.value);
        case Action::Kind::QIn: return a.channel + "?" + a.qubit;
        case Action::Kind::QOut: return a.channel + "!" + a.qubit;
    }
    return "tau";
}

Distribution Distribution::point(Configuration c) {
    Distribution d;
    d.entries_.emplace_back(std::move(c), 1.0);
    return d;
}

Distribution Distribution::fromWeighted(std::vector<std::pair<Configuration, double>> entries) {
    Distribution d;
    double total = 0.0;
    for (auto& [config, p] : entries) {
        total += p;
        if (p <= kProbFloor) continue;
        bool merged = false;
        for (auto& [existing, q] : d.entries_) {
            if (existing.equals(config)) {
                q += p;
                merged = true;
                break;
            }
        }
        if (!merged) d.entries_.emplace_back(std::move(config), p);
    }
    if (std::abs(total - 1.0) > kMatrixTol)
        throw SemanticsError("distribution weights sum to " + formatReal(total) + ", expected 1");
    return d;
}

bool Distribution::equals(const Distribution& other, double tol) const {
    if (entries_.size() != other.entries_.size()) return false;
    std::vector<bool> used(other.entries_.size(), false);
    for (const auto& [c, p] : entries_) {
        bool found = false;
        for (size_t j = 0; j < other.entries_.size(); ++j) {
            if (used[j]) continue;
            if (std::abs(other.entries_[j].second - p) <= tol && other.entries_[j].first.equals(c, tol)) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

namespace {

bool sameTransition(const Transition& a, const Transition& b) {
    return a.action == b.action && a.target.equals(b.target);
}

void pushUnique(std::vector<Transition>& list, Transition t) {
    for (const auto& existing : list)
        if (sameTransition(existing, t)) return;
    list.push_back(std::move(t));
}

/// The transition must be a point distribution with an untouched state
/// (inputs and outputs never branch or act on the state).
const Configuration& pointTarget(const Transition& t) {
    if (!t.target.isPoint())
        throw SemanticsError("internal: non-point distribution on a communication action");
    return t.target.onlyConfiguration();
}

std::vector<Transition> transitionsOf(const Process& p, const QState& rho, const Definitions& defs,
                                      std::set<std::string>& expanding);

std::vector<Transition> parTransitions(const Process& p, const QState& rho,
                                       const Definitions& defs, std::set<std::string>& expanding) {
    const Process& lhs = p.left();
    const Process& rhs = p.right();
    auto leftTrans = transitionsOf(lhs, rho, defs, expanding);
    auto rightTrans = transitionsOf(rhs, rho, defs, expanding);
    auto leftQv = lhs.qv(defs);
    auto rightQv = rhs.qv(defs);

    std::vector<Transition> out;

    // interleaving; a quantum input may not capture a qubit of the partner
    for (const auto& t : leftTrans) {
        if (t.action.kind == Action::Kind::QIn && rightQv.count(t.action.qubit)) continue;
        out.push_back({t.action, t.target.mapProcesses(
                                     [&](const Process& q) { return Process::par(q, rhs); })});
    }
    for (const auto& t : rightTrans) {
        if (t.action.kind == Action::Kind::QIn && leftQv.count(t.action.qubit)) continue;
        out.push_back({t.action, t.target.mapProcesses(
                                     [&](const Process& q) { return Process::par(lhs, q); })});
    }

    // synchronization on matching input/output pairs, both directions
    auto communicate = [&](const std::vector<Transition>& ins, const std::vector<Transition>& outs,
                           bool leftIsInput) {
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
                const Configuration& inTarget = pointTarget(in);
                const Configuration& outTarget = pointTarget(o);
                Process combined = leftIsInput
                                       ? Process::par(inTarget.process, outTarget.process)
                                       : Process::par(outTarget.process, inTarget.process);
                out.push_back(
                    {Action::tau(), Distribution::point(Configuration{std::move(combined), rho})});
            }
        }
    };
    communicate(leftTrans, rightTrans, true);
    communicate(rightTrans, leftTrans, false);
    return out;
}

std::vector<Transition> transitionsOf(const Process& p, const QState& rho, const Definitions& defs,
                                      std::set<std::string>& expanding) {
    switch (p.kind()) {
        case Process::Kind::Nil: return {};

        case Process::Kind::Tau:
            return {{Action::tau(), Distribution::point(Configuration{p.cont(), rho})}};

        case Process::Kind::CIn: {
            const ChannelDecl* ch = defs.findChannel(p.name());
            if (!ch) throw SemanticsError("channel '" + p.name() + "' is not declared");
            if (!ch->domain)
                throw SemanticsError("classical input on channel '" + p.name() +
                                     "' which has no declared value domain");
            std::vector<Transition> out;
            for (double v : *ch->domain)
                out.push_back({Action::cin(p.name(), v),
                               Distribution::point(Configuration{p.cont().substitute({{p.var(), v}}), rho})});
            return out;
        }

        case Process::Kind::COut:
            return {{Action::cout(p.name(), p.value().eval()),
                     Distribution::point(Configuration{p.cont(), rho})}};

        case Process::Kind::QIn: {
            // open input: the received name ranges over register qubits that are
            // not already free in the continuation
            auto blocked = p.qv(defs);
            std::vector<Transition> out;
            for (const auto& r : defs.registerNames) {
                if (blocked.count(r)) continue;
                Process cont = p.cont().substituteQuantum({{p.var(), r}});
                out.push_back({Action::qin(p.name(), r),
                               Distribution::point(Configuration{std::move(cont), rho})});
            }
            return out;
        }

        case Process::Kind::QOut:
            return {{Action::qout(p.name(), p.var()),
                     Distribution::point(Configuration{p.cont(), rho})}};

        case Process::Kind::SuperOp: {
            const SuperOperator* op = defs.findSuperOp(p.name());
            if (!op) throw SemanticsError("super-operator '" + p.name() + "' is not declared");
            return {{Action::tau(),
                     Distribution::point(Configuration{p.cont(), applySuper(rho, *op, p.qubits())})}};
        }

        case Process::Kind::Measure: {
            const Measurement* m = defs.findMeasurement(p.name());
            if (!m) throw SemanticsError("measurement '" + p.name() + "' is not declared");
            std::vector<std::pair<Configuration, double>> weighted;
            for (const auto& branch : measure(rho, *m, p.qubits())) {
                Process cont = p.cont().substitute({{p.var(), branch.outcome}});
                weighted.emplace_back(Configuration{std::move(cont), branch.postState},
                                      branch.probability);
            }
            return {{Action::tau(), Distribution::fromWeighted(std::move(weighted))}};
        }

        case Process::Kind::Sum: {
            auto out = transitionsOf(p.left(), rho, defs, expanding);
            for (auto& t : transitionsOf(p.right(), rho, defs, expanding)) out.push_back(std::move(t));
            return out;
        }

        case Process::Kind::Par: return parTransitions(p, rho, defs, expanding);

        case Process::Kind::Relabel: {
            std::vector<Transition> out;
            for (const auto& t : transitionsOf(p.cont(), rho, defs, expanding)) {
                out.push_back({t.action.relabeled(p.relabelFn()),
                               t.target.mapProcesses([&](const Process& q) {
                                   return Process::relabel(q, p.relabelFn());
                               })});
            }
            return out;
        }

        case Process::Kind::Restrict: {
            std::vector<Transition> out;
            for (const auto& t : transitionsOf(p.cont(), rho, defs, expanding)) {
                bool blocked = false;
                for (const auto& c : t.action.channelNames())
                    if (p.restrictSet().count(c)) blocked = true;
                if (blocked) continue;
                out.push_back({t.action, t.target.mapProcesses([&](const Process& q) {
                                   return Process::restrict(q, p.restrictSet());
                               })});
            }
            return out;
        }

        case Process::Kind::If:
            if (!p.cond().eval()) return {};
            return transitionsOf(p.cont(), rho, defs, expanding);

        case Process::Kind::ConstCall: {
            if (expanding.count(p.name()))
                throw SemanticsError("unguarded recursion through constant '" + p.name() + "'");
            expanding.insert(p.name());
            auto out = transitionsOf(unfold(p, defs), rho, defs, expanding);
            expanding.erase(p.name());
            return out;
        }
    }
    return {};
}

}  // namespace

std::vector<Transition> transitions(const Configuration& c, const Definitions& defs) {
    auto freeVars = c.process.fv();
    if (!freeVars.empty())
        throw SemanticsError("configuration process is not closed ('" + *freeVars.begin() +
                             "' is free)");
    std::set<std::string> expanding;
    auto raw = transitionsOf(c.process, c.state, defs, expanding);
    std::vector<Transition> out;
    out.reserve(raw.size());
    for (auto& t : raw) pushUnique(out, std::move(t));
    return out;
}

std::vector<Distribution> liftTransition(const Distribution& mu, const Action& alpha,
                                         const Definitions& defs) {
    // per support element, the alpha-successors
    std::vector<std::vector<Distribution>> choices;
    for (const auto& [config, weight] : mu.entries()) {
        std::vector<Distribution> succ;
        for (const auto& t : transitions(config, defs))
            if (t.action == alpha) succ.push_back(t.target);
        if (succ.empty()) return {};
        choices.push_back(std::move(succ));
    }

    std::vector<Distribution> results;
    std::vector<size_t> pick(choices.size(), 0);
    while (true) {
        std::vector<std::pair<Configuration, double>> mixed;
        for (size_t i = 0; i < choices.size(); ++i) {
            double weight = mu.entries()[i].second;
            for (const auto& [c, q] : choices[i][pick[i]].entries())
                mixed.emplace_back(c, weight * q);
        }
        Distribution combined = Distribution::fromWeighted(std::move(mixed));
        bool seen = false;
        for (const auto& r : results)
            if (r.equals(combined)) {
                seen = true;
                break;
            }
        if (!seen) results.push_back(std::move(combined));

        size_t i = 0;
        for (; i < pick.size(); ++i) {
            if (++pick[i] < choices[i].size()) break;
            pick[i] = 0;
        }
        if (i == pick.size()) break;
    }
    return results;
}

}  // namespace qccs
