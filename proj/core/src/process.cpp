#include "qccs/process.hpp"

#include "qccs/definitions.hpp"
#include "qccs/parser.hpp"

#include <algorithm>

namespace qccs {

namespace {
std::shared_ptr<const Process> box(Process p) { return std::make_shared<const Process>(std::move(p)); }
}  // namespace

Process Process::nil() {
    static const Process instance = [] {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Nil;
        return Process(std::move(n));
    }();
    return instance;
}

Process Process::constCall(std::string name, std::vector<std::string> quantumArgs,
                           std::vector<Expr> classicalArgs) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::ConstCall;
    n->name = std::move(name);
    n->qubits = std::move(quantumArgs);
    n->exprs = std::move(classicalArgs);
    return Process(std::move(n));
}

Process Process::tau(Process cont) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Tau;
    n->left = box(std::move(cont));
    return Process(std::move(n));
}

Process Process::cin(std::string channel, std::string var, Process cont) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::CIn;
    n->name = std::move(channel);
    n->var = std::move(var);
    n->left = box(std::move(cont));
    return Process(std::move(n));
}

Process Process::cout(std::string channel, Expr value, Process cont) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::COut;
    n->name = std::move(channel);
    n->expr = std::make_shared<const Expr>(std::move(value));
    n->left = box(std::move(cont));
    return Process(std::move(n));
}

Process Process::qin(std::string channel, std::string qubit, Process cont) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::QIn;
    n->name = std::move(channel);
    n->var = std::move(qubit);
    n->left = box(std::move(cont));
    return Process(std::move(n));
}

Process Process::qout(std::string channel, std::string qubit, Process cont) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::QOut;
    n->name = std::move(channel);
    n->var = std::move(qubit);
    n->left = box(std::move(cont));
    return Process(std::move(n));
}

Process Process::superOp(std::string opName, std::vector<std::string> qubits, Process cont) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::SuperOp;
    n->name = std::move(opName);
    n->qubits = std::move(qubits);
    n->left = box(std::move(cont));
    return Process(std::move(n));
}

Process Process::measure(std::string measName, std::vector<std::string> qubits, std::string var,
                         Process cont) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Measure;
    n->name = std::move(measName);
    n->qubits = std::move(qubits);
    n->var = std::move(var);
    n->left = box(std::move(cont));
    return Process(std::move(n));
}

Process Process::sum(Process lhs, Process rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Sum;
    n->left = box(std::move(lhs));
    n->right = box(std::move(rhs));
    return Process(std::move(n));
}

Process Process::par(Process lhs, Process rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Par;
    n->left = box(std::move(lhs));
    n->right = box(std::move(rhs));
    return Process(std::move(n));
}

Process Process::relabel(Process cont, RelabelFn fn) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Relabel;
    n->left = box(std::move(cont));
    n->relabelFn = std::move(fn);
    return Process(std::move(n));
}

Process Process::restrict(Process cont, std::set<std::string> channels) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Restrict;
    n->left = box(std::move(cont));
    n->channels = std::move(channels);
    return Process(std::move(n));
}

Process Process::ifThen(BExpr cond, Process cont) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::If;
    n->bexpr = std::make_shared<const BExpr>(std::move(cond));
    n->left = box(std::move(cont));
    return Process(std::move(n));
}

bool Process::structurallyEqual(const Process& other) const {
    if (node_ == other.node_) return true;
    if (kind() != other.kind()) return false;
    switch (kind()) {
        case Kind::Nil: return true;
        case Kind::ConstCall: {
            if (name() != other.name() || qubits() != other.qubits()) return false;
            if (classicalArgs().size() != other.classicalArgs().size()) return false;
            for (size_t i = 0; i < classicalArgs().size(); ++i)
                if (!classicalArgs()[i].structurallyEqual(other.classicalArgs()[i])) return false;
            return true;
        }
        case Kind::Tau: return cont().structurallyEqual(other.cont());
        case Kind::CIn:
            return name() == other.name() && var() == other.var() &&
                   cont().structurallyEqual(other.cont());
        case Kind::COut:
            return name() == other.name() && value().structurallyEqual(other.value()) &&
                   cont().structurallyEqual(other.cont());
        case Kind::QIn:
        case Kind::QOut:
            return name() == other.name() && var() == other.var() &&
                   cont().structurallyEqual(other.cont());
        case Kind::SuperOp:
            return name() == other.name() && qubits() == other.qubits() &&
                   cont().structurallyEqual(other.cont());
        case Kind::Measure:
            return name() == other.name() && qubits() == other.qubits() && var() == other.var() &&
                   cont().structurallyEqual(other.cont());
        case Kind::Sum:
        case Kind::Par:
            return left().structurallyEqual(other.left()) &&
                   right().structurallyEqual(other.right());
        case Kind::Relabel:
            return relabelFn() == other.relabelFn() && cont().structurallyEqual(other.cont());
        case Kind::Restrict:
            return restrictSet() == other.restrictSet() && cont().structurallyEqual(other.cont());
        case Kind::If:
            return cond().structurallyEqual(other.cond()) && cont().structurallyEqual(other.cont());
    }
    return false;
}

std::set<std::string> Process::qv(const Definitions& defs) const {
    switch (kind()) {
        case Kind::Nil: return {};
        case Kind::ConstCall: {
            if (!defs.findConstant(name()))
                throw DefinitionError("unresolved process constant '" + name() + "'");
            return {qubits().begin(), qubits().end()};
        }
        case Kind::Tau:
        case Kind::CIn:
        case Kind::COut:
            return cont().qv(defs);
        case Kind::QIn: {
            auto s = cont().qv(defs);
            s.erase(var());
            return s;
        }
        case Kind::QOut: {
            auto s = cont().qv(defs);
            s.insert(var());
            return s;
        }
        case Kind::SuperOp:
        case Kind::Measure: {
            auto s = cont().qv(defs);
            s.insert(qubits().begin(), qubits().end());
            return s;
        }
        case Kind::Sum:
        case Kind::Par: {
            auto s = left().qv(defs);
            auto r = right().qv(defs);
            s.insert(r.begin(), r.end());
            return s;
        }
        case Kind::Relabel:
        case Kind::Restrict:
        case Kind::If:
            return cont().qv(defs);
    }
    return {};
}

namespace {

void fvInto(const Process& p, std::set<std::string>& bound, std::set<std::string>& out) {
    switch (p.kind()) {
        case Process::Kind::Nil: return;
        case Process::Kind::ConstCall: {
            std::set<std::string> vars;
            for (const auto& e : p.classicalArgs()) e.collectVars(vars);
            for (const auto& v : vars)
                if (!bound.count(v)) out.insert(v);
            return;
        }
        case Process::Kind::Tau:
        case Process::Kind::QIn:
        case Process::Kind::QOut:
            fvInto(p.cont(), bound, out);
            return;
        case Process::Kind::CIn: {
            bool wasBound = bound.count(p.var()) > 0;
            bound.insert(p.var());
            fvInto(p.cont(), bound, out);
            if (!wasBound) bound.erase(p.var());
            return;
        }
        case Process::Kind::COut: {
            std::set<std::string> vars;
            p.value().collectVars(vars);
            for (const auto& v : vars)
                if (!bound.count(v)) out.insert(v);
            fvInto(p.cont(), bound, out);
            return;
        }
        case Process::Kind::SuperOp:
            fvInto(p.cont(), bound, out);
            return;
        case Process::Kind::Measure: {
            bool wasBound = bound.count(p.var()) > 0;
            bound.insert(p.var());
            fvInto(p.cont(), bound, out);
            if (!wasBound) bound.erase(p.var());
            return;
        }
        case Process::Kind::Sum:
        case Process::Kind::Par:
            fvInto(p.left(), bound, out);
            fvInto(p.right(), bound, out);
            return;
        case Process::Kind::Relabel:
        case Process::Kind::Restrict:
            fvInto(p.cont(), bound, out);
            return;
        case Process::Kind::If: {
            std::set<std::string> vars;
            p.cond().collectVars(vars);
            for (const auto& v : vars)
                if (!bound.count(v)) out.insert(v);
            fvInto(p.cont(), bound, out);
            return;
        }
    }
}

}  // namespace

std::set<std::string> Process::fv() const {
    std::set<std::string> bound, out;
    fvInto(*this, bound, out);
    return out;
}

Process Process::substitute(const std::map<std::string, double>& subst) const {
    if (subst.empty()) return *this;
    switch (kind()) {
        case Kind::Nil: return *this;
        case Kind::ConstCall: {
            std::vector<Expr> args;
            args.reserve(classicalArgs().size());
            for (const auto& e : classicalArgs()) args.push_back(e.substitute(subst));
            return constCall(name(), qubits(), std::move(args));
        }
        case Kind::Tau: return tau(cont().substitute(subst));
        case Kind::CIn: {
            auto inner = subst;
            inner.erase(var());
            return cin(name(), var(), cont().substitute(inner));
        }
        case Kind::COut:
            return cout(name(), value().substitute(subst), cont().substitute(subst));
        case Kind::QIn: return qin(name(), var(), cont().substitute(subst));
        case Kind::QOut: return qout(name(), var(), cont().substitute(subst));
        case Kind::SuperOp: return superOp(name(), qubits(), cont().substitute(subst));
        case Kind::Measure: {
            auto inner = subst;
            inner.erase(var());
            return measure(name(), qubits(), var(), cont().substitute(inner));
        }
        case Kind::Sum: return sum(left().substitute(subst), right().substitute(subst));
        case Kind::Par: return par(left().substitute(subst), right().substitute(subst));
        case Kind::Relabel: return relabel(cont().substitute(subst), relabelFn());
        case Kind::Restrict: return restrict(cont().substitute(subst), restrictSet());
        case Kind::If: return ifThen(cond().substitute(subst), cont().substitute(subst));
    }
    return *this;
}

Process Process::substituteQuantum(const std::map<std::string, std::string>& renaming) const {
    if (renaming.empty()) return *this;
    auto mapName = [&renaming](const std::string& q) {
        auto it = renaming.find(q);
        return it == renaming.end() ? q : it->second;
    };
    auto mapNames = [&](const std::vector<std::string>& qs) {
        std::vector<std::string> out;
        out.reserve(qs.size());
        for (const auto& q : qs) out.push_back(mapName(q));
        return out;
    };
    switch (kind()) {
        case Kind::Nil: return *this;
        case Kind::ConstCall:
            return constCall(name(), mapNames(qubits()), classicalArgs());
        case Kind::Tau: return tau(cont().substituteQuantum(renaming));
        case Kind::CIn: return cin(name(), var(), cont().substituteQuantum(renaming));
        case Kind::COut: return cout(name(), value(), cont().substituteQuantum(renaming));
        case Kind::QIn: {
            // quantum input binds by name: an inner binder of the same name shadows
            auto inner = renaming;
            inner.erase(var());
            return qin(name(), var(), cont().substituteQuantum(inner));
        }
        case Kind::QOut: return qout(name(), mapName(var()), cont().substituteQuantum(renaming));
        case Kind::SuperOp:
            return superOp(name(), mapNames(qubits()), cont().substituteQuantum(renaming));
        case Kind::Measure:
            return measure(name(), mapNames(qubits()), var(), cont().substituteQuantum(renaming));
        case Kind::Sum:
            return sum(left().substituteQuantum(renaming), right().substituteQuantum(renaming));
        case Kind::Par:
            return par(left().substituteQuantum(renaming), right().substituteQuantum(renaming));
        case Kind::Relabel: return relabel(cont().substituteQuantum(renaming), relabelFn());
        case Kind::Restrict: return restrict(cont().substituteQuantum(renaming), restrictSet());
        case Kind::If: return ifThen(cond(), cont().substituteQuantum(renaming));
    }
    return *this;
}

namespace {

LegalityReport violation(int condition, std::string message, const Process& subterm) {
    return LegalityReport{false, condition, std::move(message), printProcess(subterm)};
}

LegalityReport checkLegalRec(const Process& p, const Definitions& defs) {
    switch (p.kind()) {
        case Process::Kind::Nil: return {};
        case Process::Kind::ConstCall: {
            const ProcessDef* def = defs.findConstant(p.name());
            if (!def)
                return violation(3, "process constant '" + p.name() + "' has no definition", p);
            if (def->quantumParams.size() != p.qubits().size() ||
                def->classicalParams.size() != p.classicalArgs().size())
                return violation(3, "argument count for '" + p.name() + "' does not match its definition", p);
            std::set<std::string> seen(p.qubits().begin(), p.qubits().end());
            if (seen.size() != p.qubits().size())
                return violation(3, "duplicate quantum argument in call to '" + p.name() + "'", p);
            auto bodyQv = def->body.qv(defs);
            for (const auto& q : bodyQv)
                if (std::find(def->quantumParams.begin(), def->quantumParams.end(), q) ==
                    def->quantumParams.end())
                    return violation(3, "definition of '" + p.name() + "' uses quantum variable '" + q +
                                        "' outside its parameters", p);
            auto bodyFv = def->body.fv();
            for (const auto& x : bodyFv)
                if (std::find(def->classicalParams.begin(), def->classicalParams.end(), x) ==
                    def->classicalParams.end())
                    return violation(3, "definition of '" + p.name() + "' uses classical variable '" + x +
                                        "' outside its parameters", p);
            return {};
        }
        case Process::Kind::Tau: return checkLegalRec(p.cont(), defs);
        case Process::Kind::CIn:
        case Process::Kind::COut: {
            const ChannelDecl* ch = defs.findChannel(p.name());
            if (!ch) return violation(0, "channel '" + p.name() + "' is not declared", p);
            if (ch->kind != ChannelKind::Classical)
                return violation(0, "channel '" + p.name() + "' is quantum but used classically", p);
            return checkLegalRec(p.cont(), defs);
        }
        case Process::Kind::QIn:
        case Process::Kind::QOut: {
            const ChannelDecl* ch = defs.findChannel(p.name());
            if (!ch) return violation(0, "channel '" + p.name() + "' is not declared", p);
            if (ch->kind != ChannelKind::Quantum)
                return violation(0, "channel '" + p.name() + "' is classical but used as quantum", p);
            if (p.kind() == Process::Kind::QOut) {
                auto contQv = p.cont().qv(defs);
                if (contQv.count(p.var()))
                    return violation(1, "sent qubit '" + p.var() +
                                        "' is still free in the continuation", p);
            }
            return checkLegalRec(p.cont(), defs);
        }
        case Process::Kind::SuperOp: {
            const SuperOperator* op = defs.findSuperOp(p.name());
            if (!op) return violation(0, "super-operator '" + p.name() + "' is not declared", p);
            if (static_cast<size_t>(op->arity) != p.qubits().size())
                return violation(0, "super-operator '" + p.name() + "' expects " +
                                    std::to_string(op->arity) + " qubit(s)", p);
            std::set<std::string> seen(p.qubits().begin(), p.qubits().end());
            if (seen.size() != p.qubits().size())
                return violation(0, "duplicate qubit argument to '" + p.name() + "'", p);
            return checkLegalRec(p.cont(), defs);
        }
        case Process::Kind::Measure: {
            const Measurement* m = defs.findMeasurement(p.name());
            if (!m) return violation(0, "measurement '" + p.name() + "' is not declared", p);
            if (static_cast<size_t>(m->arity) != p.qubits().size())
                return violation(0, "measurement '" + p.name() + "' expects " +
                                    std::to_string(m->arity) + " qubit(s)", p);
            std::set<std::string> seen(p.qubits().begin(), p.qubits().end());
            if (seen.size() != p.qubits().size())
                return violation(0, "duplicate qubit argument to '" + p.name() + "'", p);
            return checkLegalRec(p.cont(), defs);
        }
        case Process::Kind::Sum: {
            auto l = checkLegalRec(p.left(), defs);
            if (!l.ok) return l;
            return checkLegalRec(p.right(), defs);
        }
        case Process::Kind::Par: {
            auto lq = p.left().qv(defs);
            auto rq = p.right().qv(defs);
            for (const auto& q : lq)
                if (rq.count(q))
                    return violation(2, "parallel components share quantum variable '" + q + "'", p);
            auto l = checkLegalRec(p.left(), defs);
            if (!l.ok) return l;
            return checkLegalRec(p.right(), defs);
        }
        case Process::Kind::Relabel: {
            for (const auto& [from, to] : p.relabelFn()) {
                const ChannelDecl* cf = defs.findChannel(from);
                const ChannelDecl* ct = defs.findChannel(to);
                if (!cf) return violation(0, "relabeled channel '" + from + "' is not declared", p);
                if (!ct) return violation(0, "relabel target '" + to + "' is not declared", p);
                if (cf->kind != ct->kind)
                    return violation(0, "relabeling must preserve the channel kind ('" + from +
                                        "' -> '" + to + "')", p);
            }
            return checkLegalRec(p.cont(), defs);
        }
        case Process::Kind::Restrict: {
            for (const auto& c : p.restrictSet())
                if (!defs.findChannel(c))
                    return violation(0, "restricted channel '" + c + "' is not declared", p);
            return checkLegalRec(p.cont(), defs);
        }
        case Process::Kind::If: return checkLegalRec(p.cont(), defs);
    }
    return {};
}

}  // namespace

LegalityReport checkLegal(const Process& p, const Definitions& defs) {
    return checkLegalRec(p, defs);
}

std::string describeLegality(const LegalityReport& report) {
    if (report.ok) return "ok";
    std::string s = report.message;
    if (report.condition > 0) s += " (legality condition " + std::to_string(report.condition) + ")";
    if (!report.subterm.empty()) s += " in: " + report.subterm;
    return s;
}

Process unfold(const Process& constCall, const Definitions& defs) {
    if (constCall.kind() != Process::Kind::ConstCall)
        throw DefinitionError("unfold expects a process constant call");
    const ProcessDef* def = defs.findConstant(constCall.name());
    if (!def) throw DefinitionError("unresolved process constant '" + constCall.name() + "'");
    if (def->quantumParams.size() != constCall.qubits().size())
        throw DefinitionError("quantum argument count mismatch in call to '" + constCall.name() + "'");
    if (def->classicalParams.size() != constCall.classicalArgs().size())
        throw DefinitionError("classical argument count mismatch in call to '" + constCall.name() + "'");

    std::map<std::string, std::string> renaming;
    for (size_t i = 0; i < def->quantumParams.size(); ++i)
        if (def->quantumParams[i] != constCall.qubits()[i])
            renaming[def->quantumParams[i]] = constCall.qubits()[i];

    std::map<std::string, double> values;
    for (size_t i = 0; i < def->classicalParams.size(); ++i)
        values[def->classicalParams[i]] = constCall.classicalArgs()[i].eval();

    return def->body.substituteQuantum(renaming).substitute(values);
}

namespace {

Process unfoldDeepRec(const Process& p, const Definitions& defs, std::set<std::string>& active) {
    switch (p.kind()) {
        case Process::Kind::Nil: return p;
        case Process::Kind::ConstCall: {
            if (active.count(p.name())) return p;  // recursive constant: keep the call
            for (const auto& e : p.classicalArgs()) {
                std::set<std::string> vars;
                e.collectVars(vars);
                if (!vars.empty()) return p;  // open argument (bound further out)
            }
            active.insert(p.name());
            Process expanded = unfoldDeepRec(unfold(p, defs), defs, active);
            active.erase(p.name());
            return expanded;
        }
        case Process::Kind::Tau: return Process::tau(unfoldDeepRec(p.cont(), defs, active));
        case Process::Kind::CIn:
            return Process::cin(p.name(), p.var(), unfoldDeepRec(p.cont(), defs, active));
        case Process::Kind::COut:
            return Process::cout(p.name(), p.value(), unfoldDeepRec(p.cont(), defs, active));
        case Process::Kind::QIn:
            return Process::qin(p.name(), p.var(), unfoldDeepRec(p.cont(), defs, active));
        case Process::Kind::QOut:
            return Process::qout(p.name(), p.var(), unfoldDeepRec(p.cont(), defs, active));
        case Process::Kind::SuperOp:
            return Process::superOp(p.name(), p.qubits(), unfoldDeepRec(p.cont(), defs, active));
        case Process::Kind::Measure:
            return Process::measure(p.name(), p.qubits(), p.var(),
                                    unfoldDeepRec(p.cont(), defs, active));
        case Process::Kind::Sum:
            return Process::sum(unfoldDeepRec(p.left(), defs, active),
                                unfoldDeepRec(p.right(), defs, active));
        case Process::Kind::Par:
            return Process::par(unfoldDeepRec(p.left(), defs, active),
                                unfoldDeepRec(p.right(), defs, active));
        case Process::Kind::Relabel:
            return Process::relabel(unfoldDeepRec(p.cont(), defs, active), p.relabelFn());
        case Process::Kind::Restrict:
            return Process::restrict(unfoldDeepRec(p.cont(), defs, active), p.restrictSet());
        case Process::Kind::If:
            return Process::ifThen(p.cond(), unfoldDeepRec(p.cont(), defs, active));
    }
    return p;
}

}  // namespace

Process unfoldDeep(const Process& p, const Definitions& defs) {
    std::set<std::string> active;
    return unfoldDeepRec(p, defs, active);
}

void checkDefinitions(const Definitions& defs) {
    for (const auto& [name, op] : defs.superOps) {
        try {
            op.validate();
        } catch (const QStateError& e) {
            throw DefinitionError("super-operator '" + name + "': " + e.what());
        }
    }
    for (const auto& [name, m] : defs.measurements) {
        try {
            m.validate();
        } catch (const QStateError& e) {
            throw DefinitionError("measurement '" + name + "': " + e.what());
        }
    }
    for (const auto& [name, def] : defs.constants) {
        std::set<std::string> qset(def.quantumParams.begin(), def.quantumParams.end());
        std::set<std::string> cset(def.classicalParams.begin(), def.classicalParams.end());
        if (qset.size() != def.quantumParams.size() || cset.size() != def.classicalParams.size())
            throw DefinitionError("definition of '" + name + "' has duplicate parameters");
        auto report = checkLegal(def.body, defs);
        if (!report.ok)
            throw DefinitionError("definition of '" + name + "': " + describeLegality(report));
        for (const auto& q : def.body.qv(defs))
            if (!qset.count(q))
                throw DefinitionError("definition of '" + name + "' uses quantum variable '" + q +
                                      "' outside its parameters");
        for (const auto& x : def.body.fv())
            if (!cset.count(x))
                throw DefinitionError("definition of '" + name + "' uses classical variable '" + x +
                                      "' outside its parameters");
    }
}

}  // namespace qccs
