#include "qccs/expr.hpp"

#include <charconv>
#include <cmath>

namespace qccs {

Expr Expr::lit(double value) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Lit;
    n->value = value;
    return Expr(std::move(n));
}

Expr Expr::var(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Var;
    n->name = std::move(name);
    return Expr(std::move(n));
}

static std::shared_ptr<const Expr> box(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

Expr Expr::add(Expr lhs, Expr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Add;
    n->lhs = box(std::move(lhs));
    n->rhs = box(std::move(rhs));
    return Expr(std::move(n));
}

Expr Expr::sub(Expr lhs, Expr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Sub;
    n->lhs = box(std::move(lhs));
    n->rhs = box(std::move(rhs));
    return Expr(std::move(n));
}

Expr Expr::mul(Expr lhs, Expr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Mul;
    n->lhs = box(std::move(lhs));
    n->rhs = box(std::move(rhs));
    return Expr(std::move(n));
}

void Expr::collectVars(std::set<std::string>& out) const {
    switch (kind()) {
        case Kind::Lit: return;
        case Kind::Var: out.insert(name()); return;
        default:
            lhs().collectVars(out);
            rhs().collectVars(out);
    }
}

double Expr::eval() const {
    switch (kind()) {
        case Kind::Lit: return value();
        case Kind::Var: throw EvalError("free classical variable '" + name() + "' in evaluation");
        case Kind::Add: return lhs().eval() + rhs().eval();
        case Kind::Sub: return lhs().eval() - rhs().eval();
        case Kind::Mul: return lhs().eval() * rhs().eval();
    }
    throw std::logic_error("unreachable");
}

Expr Expr::substitute(const std::map<std::string, double>& subst) const {
    switch (kind()) {
        case Kind::Lit: return *this;
        case Kind::Var: {
            auto it = subst.find(name());
            return it == subst.end() ? *this : Expr::lit(it->second);
        }
        case Kind::Add: return Expr::add(lhs().substitute(subst), rhs().substitute(subst));
        case Kind::Sub: return Expr::sub(lhs().substitute(subst), rhs().substitute(subst));
        case Kind::Mul: return Expr::mul(lhs().substitute(subst), rhs().substitute(subst));
    }
    throw std::logic_error("unreachable");
}

bool Expr::structurallyEqual(const Expr& other) const {
    if (kind() != other.kind()) return false;
    switch (kind()) {
        case Kind::Lit: return value() == other.value();
        case Kind::Var: return name() == other.name();
        default:
            return lhs().structurallyEqual(other.lhs()) && rhs().structurallyEqual(other.rhs());
    }
}

BExpr BExpr::cmp(CmpOp op, Expr lhs, Expr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Cmp;
    n->op = op;
    n->elhs = std::make_shared<const Expr>(std::move(lhs));
    n->erhs = std::make_shared<const Expr>(std::move(rhs));
    return BExpr(std::move(n));
}

BExpr BExpr::conj(BExpr lhs, BExpr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::And;
    n->blhs = std::make_shared<const BExpr>(std::move(lhs));
    n->brhs = std::make_shared<const BExpr>(std::move(rhs));
    return BExpr(std::move(n));
}

BExpr BExpr::disj(BExpr lhs, BExpr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Or;
    n->blhs = std::make_shared<const BExpr>(std::move(lhs));
    n->brhs = std::make_shared<const BExpr>(std::move(rhs));
    return BExpr(std::move(n));
}

BExpr BExpr::neg(BExpr operand) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Not;
    n->blhs = std::make_shared<const BExpr>(std::move(operand));
    return BExpr(std::move(n));
}

void BExpr::collectVars(std::set<std::string>& out) const {
    switch (kind()) {
        case Kind::Cmp:
            cmpLhs().collectVars(out);
            cmpRhs().collectVars(out);
            return;
        case Kind::Not: operand().collectVars(out); return;
        default:
            lhs().collectVars(out);
            rhs().collectVars(out);
    }
}

bool BExpr::eval() const {
    switch (kind()) {
        case Kind::Cmp: {
            double a = cmpLhs().eval(), b = cmpRhs().eval();
            switch (cmpOp()) {
                case CmpOp::Eq: return a == b;
                case CmpOp::Ne: return a != b;
                case CmpOp::Le: return a <= b;
                case CmpOp::Lt: return a < b;
            }
            break;
        }
        case Kind::And: return lhs().eval() && rhs().eval();
        case Kind::Or: return lhs().eval() || rhs().eval();
        case Kind::Not: return !operand().eval();
    }
    throw std::logic_error("unreachable");
}

BExpr BExpr::substitute(const std::map<std::string, double>& subst) const {
    switch (kind()) {
        case Kind::Cmp:
            return BExpr::cmp(cmpOp(), cmpLhs().substitute(subst), cmpRhs().substitute(subst));
        case Kind::And: return BExpr::conj(lhs().substitute(subst), rhs().substitute(subst));
        case Kind::Or: return BExpr::disj(lhs().substitute(subst), rhs().substitute(subst));
        case Kind::Not: return BExpr::neg(operand().substitute(subst));
    }
    throw std::logic_error("unreachable");
}

bool BExpr::structurallyEqual(const BExpr& other) const {
    if (kind() != other.kind()) return false;
    switch (kind()) {
        case Kind::Cmp:
            return cmpOp() == other.cmpOp() && cmpLhs().structurallyEqual(other.cmpLhs()) &&
                   cmpRhs().structurallyEqual(other.cmpRhs());
        case Kind::Not: return operand().structurallyEqual(other.operand());
        default:
            return lhs().structurallyEqual(other.lhs()) && rhs().structurallyEqual(other.rhs());
    }
}

std::string formatReal(double value) {
    if (value == 0.0) value = 0.0;  // normalize -0
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

// Precedence: mul > add/sub. Parenthesize children with strictly lower binding.
std::string printExprPrec(const Expr& e, int parent) {
    switch (e.kind()) {
        case Expr::Kind::Lit: {
            if (e.value() < 0) return "(" + formatReal(e.value()) + ")";
            return formatReal(e.value());
        }
        case Expr::Kind::Var: return e.name();
        case Expr::Kind::Add: {
            std::string s = printExprPrec(e.lhs(), 1) + " + " + printExprPrec(e.rhs(), 2);
            return parent > 1 ? "(" + s + ")" : s;
        }
        case Expr::Kind::Sub: {
            std::string s = printExprPrec(e.lhs(), 1) + " - " + printExprPrec(e.rhs(), 2);
            return parent > 1 ? "(" + s + ")" : s;
        }
        case Expr::Kind::Mul: {
            std::string s = printExprPrec(e.lhs(), 2) + " * " + printExprPrec(e.rhs(), 3);
            return parent > 2 ? "(" + s + ")" : s;
        }
    }
    throw std::logic_error("unreachable");
}

// Precedence: not > cmp > and > or.
std::string printBExprPrec(const BExpr& b, int parent) {
    switch (b.kind()) {
        case BExpr::Kind::Cmp: {
            const char* op = "=";
            switch (b.cmpOp()) {
                case BExpr::CmpOp::Eq: op = "="; break;
                case BExpr::CmpOp::Ne: op = "!="; break;
                case BExpr::CmpOp::Le: op = "<="; break;
                case BExpr::CmpOp::Lt: op = "<"; break;
            }
            return printExprPrec(b.cmpLhs(), 0) + " " + op + " " + printExprPrec(b.cmpRhs(), 0);
        }
        case BExpr::Kind::And: {
            std::string s = printBExprPrec(b.lhs(), 2) + " and " + printBExprPrec(b.rhs(), 3);
            return parent > 2 ? "(" + s + ")" : s;
        }
        case BExpr::Kind::Or: {
            std::string s = printBExprPrec(b.lhs(), 1) + " or " + printBExprPrec(b.rhs(), 2);
            return parent > 1 ? "(" + s + ")" : s;
        }
        case BExpr::Kind::Not:
            return "not " + printBExprPrec(b.operand(), 4);
    }
    throw std::logic_error("unreachable");
}

}  // namespace

std::string printExpr(const Expr& e) { return printExprPrec(e, 0); }
std::string printBExpr(const BExpr& b) { return printBExprPrec(b, 0); }

}  // namespace qccs
