#include "qccs/parser.hpp"

namespace qccs {

namespace {

// Levels: 0 sum, 1 par, 2 postfix (relabel/restrict), 3 prefix/atom.
// A child rendered at level L needs parentheses when the context requires
// something tighter than L.

std::string wrapIf(bool cond, std::string s) { return cond ? "(" + std::move(s) + ")" : std::move(s); }

std::string printAtomExpr(const Expr& e) {
    std::string s = printExpr(e);
    bool atom = e.kind() == Expr::Kind::Var ||
                (e.kind() == Expr::Kind::Lit && e.value() >= 0);
    return atom ? s : (s.front() == '(' ? s : "(" + s + ")");
}

std::string joinNames(const std::vector<std::string>& names) {
    std::string s;
    for (size_t i = 0; i < names.size(); ++i) {
        if (i) s += ", ";
        s += names[i];
    }
    return s;
}

std::string printRec(const Process& p, int parent) {
    switch (p.kind()) {
        case Process::Kind::Nil: return "nil";
        case Process::Kind::ConstCall: {
            std::string s = p.name() + "(";
            s += joinNames(p.qubits());
            if (!p.classicalArgs().empty()) {
                if (!p.qubits().empty()) s += "; ";
                for (size_t i = 0; i < p.classicalArgs().size(); ++i) {
                    if (i) s += ", ";
                    s += printExpr(p.classicalArgs()[i]);
                }
            }
            s += ")";
            return s;
        }
        case Process::Kind::Sum: {
            std::string s = printRec(p.left(), 0) + " + " + printRec(p.right(), 1);
            return wrapIf(parent > 0, std::move(s));
        }
        case Process::Kind::Par: {
            std::string s = printRec(p.left(), 1) + " || " + printRec(p.right(), 2);
            return wrapIf(parent > 1, std::move(s));
        }
        case Process::Kind::Relabel: {
            std::string s = printRec(p.cont(), 2) + "[";
            bool first = true;
            for (const auto& [from, to] : p.relabelFn()) {
                if (!first) s += ", ";
                first = false;
                s += from + " -> " + to;
            }
            s += "]";
            return wrapIf(parent > 2, std::move(s));
        }
        case Process::Kind::Restrict: {
            std::string s = printRec(p.cont(), 2) + " \\ {";
            bool first = true;
            for (const auto& c : p.restrictSet()) {
                if (!first) s += ", ";
                first = false;
                s += c;
            }
            s += "}";
            return wrapIf(parent > 2, std::move(s));
        }
        default: break;
    }

    // prefix forms
    auto continuation = [&](const Process& cont) -> std::string {
        if (cont.kind() == Process::Kind::Nil) return "";
        return "." + printRec(cont, 3);
    };
    switch (p.kind()) {
        case Process::Kind::Tau: return "tau" + continuation(p.cont());
        case Process::Kind::CIn: return p.name() + "?" + p.var() + continuation(p.cont());
        case Process::Kind::COut:
            return p.name() + "!" + printAtomExpr(p.value()) + continuation(p.cont());
        case Process::Kind::QIn: return p.name() + "?" + p.var() + continuation(p.cont());
        case Process::Kind::QOut: return p.name() + "!" + p.var() + continuation(p.cont());
        case Process::Kind::SuperOp:
            return p.name() + "[" + joinNames(p.qubits()) + "]" + continuation(p.cont());
        case Process::Kind::Measure:
            return p.name() + "[" + joinNames(p.qubits()) + "; " + p.var() + "]" +
                   continuation(p.cont());
        case Process::Kind::If:
            return "if " + printBExpr(p.cond()) + " then " + printRec(p.cont(), 3);
        default: break;
    }
    return "nil";
}

}  // namespace

std::string printProcess(const Process& p) { return printRec(p, 0); }

}  // namespace qccs
