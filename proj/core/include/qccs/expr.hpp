#ifndef QCCS_EXPR_HPP
#define QCCS_EXPR_HPP

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>

namespace qccs {

/// Thrown when a classical expression is evaluated with free variables left.
struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Arithmetic expressions over reals: literals, variables, +, -, *.
class Expr {
  public:
    enum class Kind { Lit, Var, Add, Sub, Mul };

    static Expr lit(double value);
    static Expr var(std::string name);
    static Expr add(Expr lhs, Expr rhs);
    static Expr sub(Expr lhs, Expr rhs);
    static Expr mul(Expr lhs, Expr rhs);

    Kind kind() const { return node_->kind; }
    double value() const { return node_->value; }
    const std::string& name() const { return node_->name; }
    const Expr& lhs() const { return *node_->lhs; }
    const Expr& rhs() const { return *node_->rhs; }

    /// Free classical variables of the expression.
    void collectVars(std::set<std::string>& out) const;

    /// Evaluate a closed expression; throws EvalError on a free variable.
    double eval() const;

    /// Replace variables by real literals (missing names stay free).
    Expr substitute(const std::map<std::string, double>& subst) const;

    bool structurallyEqual(const Expr& other) const;

  private:
    struct Node {
        Kind kind;
        double value = 0.0;
        std::string name;
        std::shared_ptr<const Expr> lhs, rhs;
    };
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

// Boolean expressions: comparisons of Exprs plus and/or/not.
class BExpr {
  public:
    enum class Kind { Cmp, And, Or, Not };
    enum class CmpOp { Eq, Ne, Le, Lt };

    static BExpr cmp(CmpOp op, Expr lhs, Expr rhs);
    static BExpr conj(BExpr lhs, BExpr rhs);
    static BExpr disj(BExpr lhs, BExpr rhs);
    static BExpr neg(BExpr operand);

    Kind kind() const { return node_->kind; }
    CmpOp cmpOp() const { return node_->op; }
    const Expr& cmpLhs() const { return *node_->elhs; }
    const Expr& cmpRhs() const { return *node_->erhs; }
    const BExpr& lhs() const { return *node_->blhs; }
    const BExpr& rhs() const { return *node_->brhs; }
    const BExpr& operand() const { return *node_->blhs; }

    void collectVars(std::set<std::string>& out) const;
    bool eval() const;
    BExpr substitute(const std::map<std::string, double>& subst) const;
    bool structurallyEqual(const BExpr& other) const;

  private:
    struct Node {
        Kind kind;
        CmpOp op = CmpOp::Eq;
        std::shared_ptr<const Expr> elhs, erhs;
        std::shared_ptr<const BExpr> blhs, brhs;
    };
    explicit BExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

/// Shortest round-trip decimal form of a real (used by printers and reports).
std::string formatReal(double value);

std::string printExpr(const Expr& e);
std::string printBExpr(const BExpr& b);

}  // namespace qccs

#endif
