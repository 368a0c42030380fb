#ifndef QCCS_PLTS_HPP
#define QCCS_PLTS_HPP

#include "qccs/semantics.hpp"

#include <string>
#include <vector>

namespace qccs {

/// Raised when the reachable configuration set exceeds the node budget,
/// which signals an infinite or impractically large state space.
struct StateSpaceLimitError : SemanticsError {
    using SemanticsError::SemanticsError;
};

inline constexpr size_t kDefaultMaxNodes = 10000;

// Reachable fragment of the transition system from a root configuration.
// Nodes are configurations (merged by process equality plus state equality
// at tolerance); edges carry an action and a distribution over node ids.
struct Plts {
    struct Branch {
        int target = 0;
        double probability = 0.0;
    };
    struct Edge {
        Action action;
        std::vector<Branch> branches;  // sorted by target, weights merged
    };
    struct Node {
        Configuration config;
        std::vector<Edge> edges;
    };

    std::vector<Node> nodes;
    int root = 0;

    const Node& node(int id) const { return nodes.at(static_cast<size_t>(id)); }
    size_t size() const { return nodes.size(); }

    /// Node with the given process text and state, if present.
    int findNode(const Process& process, const QState& state, double tol = kMatrixTol) const;

    bool deadlocked(int id) const { return node(id).edges.empty(); }
};

/// Breadth-first closure of `transitions` from the root. Throws
/// StateSpaceLimitError when more than maxNodes configurations are reachable.
Plts buildPlts(const Configuration& root, const Definitions& defs,
               size_t maxNodes = kDefaultMaxNodes);

/// Graphviz rendering: configurations as boxes; probabilistic branches fan
/// out of a small point node carrying the probabilities.
std::string exportDot(const Plts& graph);

/// Structured dump (schema_version 1): nodes with process text and state
/// matrix, edges with action and branch probabilities.
std::string exportJson(const Plts& graph);

/// Canonical line-per-fact serialization used for golden-snapshot comparison:
/// equal strings iff the graphs are identical up to tolerance-rounding.
std::string canonicalPltsText(const Plts& graph);

/// Runs the full QState invariant check on every node.
void validateAllStates(const Plts& graph, double tol = kMatrixTol);

}  // namespace qccs

#endif
