#ifndef QCCS_PROCESS_HPP
#define QCCS_PROCESS_HPP

#include "qccs/expr.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace qccs {

struct Definitions;

enum class ChannelKind { Classical, Quantum };

/// Finite channel renaming; identity outside its domain. Must map classical
/// channels to classical ones and quantum channels to quantum ones.
using RelabelFn = std::map<std::string, std::string>;

inline std::string applyRelabel(const RelabelFn& f, const std::string& channel) {
    auto it = f.find(channel);
    return it == f.end() ? channel : it->second;
}

// Process terms. Immutable; handles share structure freely.
//
//   nil | A(q~;e~) | tau.P | c?x.P | c!e.P | c?q.P | c!q.P
//   | E[q~].P | M[q~;x].P | P+Q | P||Q | P[f] | P\L | if b then P
class Process {
  public:
    enum class Kind {
        Nil,
        ConstCall,
        Tau,
        CIn,
        COut,
        QIn,
        QOut,
        SuperOp,
        Measure,
        Sum,
        Par,
        Relabel,
        Restrict,
        If,
    };

    static Process nil();
    static Process constCall(std::string name, std::vector<std::string> quantumArgs,
                             std::vector<Expr> classicalArgs);
    static Process tau(Process cont);
    static Process cin(std::string channel, std::string var, Process cont);
    static Process cout(std::string channel, Expr value, Process cont);
    static Process qin(std::string channel, std::string qubit, Process cont);
    static Process qout(std::string channel, std::string qubit, Process cont);
    static Process superOp(std::string opName, std::vector<std::string> qubits, Process cont);
    static Process measure(std::string measName, std::vector<std::string> qubits, std::string var,
                           Process cont);
    static Process sum(Process lhs, Process rhs);
    static Process par(Process lhs, Process rhs);
    static Process relabel(Process cont, RelabelFn fn);
    static Process restrict(Process cont, std::set<std::string> channels);
    static Process ifThen(BExpr cond, Process cont);

    Kind kind() const { return node_->kind; }

    // Accessors; valid only for the kinds that carry the field.
    const std::string& name() const { return node_->name; }          // ConstCall/channels/op/meas
    const std::string& var() const { return node_->var; }            // CIn, Measure binder; QIn/QOut qubit
    const Expr& value() const { return *node_->expr; }               // COut payload
    const BExpr& cond() const { return *node_->bexpr; }              // If
    const std::vector<std::string>& qubits() const { return node_->qubits; }  // SuperOp/Measure/ConstCall qargs
    const std::vector<Expr>& classicalArgs() const { return node_->exprs; }   // ConstCall
    const Process& cont() const { return *node_->left; }             // prefix/Relabel/Restrict/If
    const Process& left() const { return *node_->left; }             // Sum/Par
    const Process& right() const { return *node_->right; }           // Sum/Par
    const RelabelFn& relabelFn() const { return node_->relabelFn; }  // Relabel
    const std::set<std::string>& restrictSet() const { return node_->channels; }  // Restrict

    bool structurallyEqual(const Process& other) const;

    /// Free quantum variables.
    std::set<std::string> qv(const Definitions& defs) const;
    /// Free classical variables (c?x and M[q~;x] bind x).
    std::set<std::string> fv() const;

    /// Substitutes real values for free classical variables.
    Process substitute(const std::map<std::string, double>& subst) const;
    /// Renames free occurrences of quantum variables (quantum input rebinding
    /// of the same name shadows).
    Process substituteQuantum(const std::map<std::string, std::string>& renaming) const;

  private:
    struct Node {
        Kind kind;
        std::string name;
        std::string var;
        std::shared_ptr<const Expr> expr;
        std::shared_ptr<const BExpr> bexpr;
        std::vector<std::string> qubits;
        std::vector<Expr> exprs;
        std::shared_ptr<const Process> left;
        std::shared_ptr<const Process> right;
        RelabelFn relabelFn;
        std::set<std::string> channels;
    };
    explicit Process(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct ChannelDecl {
    ChannelKind kind = ChannelKind::Classical;
    /// Finite value domain for classical inputs; absent means the channel is
    /// output-only on the classical side.
    std::optional<std::vector<double>> domain;
};

struct ProcessDef {
    std::vector<std::string> quantumParams;
    std::vector<std::string> classicalParams;
    Process body = Process::nil();
};

/// Legality violations as data, reported against the first offending subterm.
struct LegalityReport {
    bool ok = true;
    /// 1: c!q with q in qv(P); 2: P||Q with shared quantum variables;
    /// 3: broken constant reference/definition; 0: other structural problem
    /// (unknown channel/operator, arity or kind mismatch).
    int condition = 0;
    std::string message;
    std::string subterm;
};

std::string describeLegality(const LegalityReport& report);

struct DefinitionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Verifies the legality conditions on every subterm of p:
///   1. q not in qv(P) for each prefix c!q.P;
///   2. qv(P) and qv(Q) disjoint for each P||Q;
///   3. every constant resolves to a definition with matching arity whose
///      body satisfies qv(body) <= quantum params and fv(body) <= classical
///      params (bodies are themselves checked once via checkDefinitions).
/// Also rejects unknown channels/operators and kind/arity mismatches.
LegalityReport checkLegal(const Process& p, const Definitions& defs);

/// Expands A(q~;e~) into its definition body: quantum parameters renamed to
/// the argument qubits simultaneously, classical parameters substituted by
/// the evaluated argument expressions.
Process unfold(const Process& constCall, const Definitions& defs);

/// Recursively unfolds non-recursive constant calls; used to key strategies
/// so that a call and its expansion denote the same process term.
Process unfoldDeep(const Process& p, const Definitions& defs);

}  // namespace qccs

#endif
