#ifndef QCCS_SEMANTICS_HPP
#define QCCS_SEMANTICS_HPP

#include "qccs/definitions.hpp"
#include "qccs/process.hpp"
#include "qccs/qstate.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qccs {

struct SemanticsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Transition labels: tau, classical input/output c?v / c!v carrying a real,
// quantum input/output c?r / c!r carrying a qubit name.
struct Action {
    enum class Kind { Tau, CIn, COut, QIn, QOut };
    Kind kind = Kind::Tau;
    std::string channel;
    double value = 0.0;   // classical payload
    std::string qubit;    // quantum payload

    static Action tau() { return {}; }
    static Action cin(std::string channel, double value) {
        return {Kind::CIn, std::move(channel), value, {}};
    }
    static Action cout(std::string channel, double value) {
        return {Kind::COut, std::move(channel), value, {}};
    }
    static Action qin(std::string channel, std::string qubit) {
        return {Kind::QIn, std::move(channel), 0.0, std::move(qubit)};
    }
    static Action qout(std::string channel, std::string qubit) {
        return {Kind::QOut, std::move(channel), 0.0, std::move(qubit)};
    }

    bool isTau() const { return kind == Kind::Tau; }
    /// Channel names used by the action; empty for tau.
    std::vector<std::string> channelNames() const {
        return isTau() ? std::vector<std::string>{} : std::vector<std::string>{channel};
    }
    Action relabeled(const RelabelFn& f) const {
        Action a = *this;
        if (!isTau()) a.channel = applyRelabel(f, channel);
        return a;
    }
    bool operator==(const Action& other) const {
        return kind == other.kind && channel == other.channel && value == other.value &&
               qubit == other.qubit;
    }
    bool operator<(const Action& other) const {
        if (kind != other.kind) return kind < other.kind;
        if (channel != other.channel) return channel < other.channel;
        if (value != other.value) return value < other.value;
        return qubit < other.qubit;
    }
};

std::string printAction(const Action& a);

/// A closed legal process paired with a density operator over the register.
struct Configuration {
    Process process;
    QState state;

    bool equals(const Configuration& other, double tol = kMatrixTol) const {
        return process.structurallyEqual(other.process) && stateEq(state, other.state, tol);
    }
};

// Finite-support probability distribution over configurations. Weights are
// positive and sum to 1; equal configurations are merged on construction.
class Distribution {
  public:
    Distribution() = default;
    static Distribution point(Configuration c);
    /// Builds from weighted configurations, merging duplicates and dropping
    /// weights below kProbFloor. Throws if the total deviates from 1 by more
    /// than kMatrixTol.
    static Distribution fromWeighted(std::vector<std::pair<Configuration, double>> entries);

    const std::vector<std::pair<Configuration, double>>& entries() const { return entries_; }
    size_t size() const { return entries_.size(); }
    bool isPoint() const { return entries_.size() == 1; }
    const Configuration& onlyConfiguration() const { return entries_.front().first; }

    bool equals(const Distribution& other, double tol = kMatrixTol) const;

    /// New distribution with every configuration's process rewritten.
    template <typename Fn>
    Distribution mapProcesses(Fn&& fn) const {
        std::vector<std::pair<Configuration, double>> out;
        out.reserve(entries_.size());
        for (const auto& [c, p] : entries_)
            out.emplace_back(Configuration{fn(c.process), c.state}, p);
        return fromWeighted(std::move(out));
    }

  private:
    std::vector<std::pair<Configuration, double>> entries_;
};

struct Transition {
    Action action;
    Distribution target;
};

/// All transitions of a configuration under the operational rules, as a
/// duplicate-free list in deterministic order.
std::vector<Transition> transitions(const Configuration& c, const Definitions& defs);

// Process-level transition pattern: instantiating it at any state yields a
// genuine transition. Non-measurement rules give a single branch; the
// measurement rule gives one branch per outcome, with the projectors of the
// branches resolving the identity.
struct TransitionSchema {
    enum class BranchKind { Plain, Apply, Project };
    struct Branch {
        Process target = Process::nil();
        BranchKind kind = BranchKind::Plain;
        SuperOperator op;              // Apply
        CMatrix projector;             // Project
        std::vector<std::string> qubits;
    };
    Process source = Process::nil();
    Action action;
    std::vector<Branch> branches;
};

/// Process-level schemas for every transition of p, independent of the state.
std::vector<TransitionSchema> transitionSchemas(const Process& p, const Definitions& defs);

/// Evaluates a schema at a state: branch weights from the projectors, states
/// from the branch operators, zero-probability branches pruned.
Transition instantiate(const TransitionSchema& schema, const QState& rho);

/// Lifted transition step: every support element picks an alpha-successor and
/// the results are mixed with the source weights. Empty when some support
/// element has no alpha-transition.
std::vector<Distribution> liftTransition(const Distribution& mu, const Action& alpha,
                                         const Definitions& defs);

}  // namespace qccs

#endif
