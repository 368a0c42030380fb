#ifndef QCCS_EQUIV_HPP
#define QCCS_EQUIV_HPP

#include "qccs/plts.hpp"
#include "qccs/sched.hpp"
#include "qccs/semantics.hpp"

#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace qccs {

// Coupling between two distributions: positive weights on related pairs whose
// row sums reproduce the first distribution and column sums the second.
struct WeightFunction {
    std::vector<std::tuple<Configuration, Configuration, double>> entries;
};

/// Finite candidate relation between configurations.
struct CandidateRelation {
    std::vector<std::pair<Configuration, Configuration>> pairs;

    bool related(const Configuration& a, const Configuration& b, double tol = kMatrixTol) const {
        for (const auto& [x, y] : pairs)
            if (x.equals(a, tol) && y.equals(b, tol)) return true;
        return false;
    }
};

/// Decides whether mu and nu are related through R by searching for a weight
/// function (a transportation-feasibility problem over the related pairs).
std::optional<WeightFunction> liftRelation(const CandidateRelation& r, const Distribution& mu,
                                           const Distribution& nu, double tol = kMatrixTol);

/// The decomposition view of a successful lifting: triples (p_i, C_i, D_i)
/// with mu = sum p_i C_i, nu = sum p_i D_i and each pair related. Verifies
/// the recomposition before returning.
std::optional<std::vector<std::tuple<double, Configuration, Configuration>>> decomposeLifting(
    const CandidateRelation& r, const Distribution& mu, const Distribution& nu,
    double tol = kMatrixTol);

/// Transportation feasibility on raw weights: arc[i][j] says mass may move
/// from supply i to demand j. Returns the flow matrix when feasible.
std::optional<std::vector<std::vector<double>>> solveTransport(
    const std::vector<double>& supply, const std::vector<double>& demand,
    const std::vector<std::vector<char>>& arc, double tol = kMatrixTol);

struct WeakLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WeakOptions {
    size_t maxDistributions = 200000;
};

/// All distributions reachable from mu by the unrestricted weak relation
/// (stop anywhere, follow any tau edge, mix branch choices independently).
std::vector<NodeDist> weakReach(const Plts& graph, const NodeDist& mu,
                                const WeakOptions& options = {});

/// Weak s-transitions: tau occurrences are deleted from s, then reachability
/// alternates weak closure with lifted action steps.
std::vector<NodeDist> weakSTransition(const Plts& graph, const NodeDist& mu,
                                      const std::vector<Action>& s,
                                      const WeakOptions& options = {});

// Finite stand-ins for the universal quantifiers: context processes for the
// observational checks and environment super-operators for open bisimulation.
struct TestBasis {
    std::vector<Process> contexts;        // empty means { nil }
    std::vector<SuperOperator> superOps;  // empty means { identity }
};

struct OpenBisimResult {
    bool verified = true;
    int pairIndex = -1;     // offending pair when not verified
    std::string reason;
};

/// Checks that R is an open bisimulation relative to the basis: for each pair,
/// equal free quantum variables, equal environment states (partial trace over
/// the free quantum variables), and both transfer directions for every basis
/// super-operator acting on the complement of the free quantum variables.
OpenBisimResult verifyOpenBisim(const CandidateRelation& r, const TestBasis& basis,
                                const Definitions& defs, size_t maxNodes = kDefaultMaxNodes,
                                const WeakOptions& weak = {});

struct OpenBisimDecision {
    bool related = false;
    std::string reason;
    CandidateRelation relation;  // greatest fixpoint over the reachable universe
};

/// Decides the largest open bisimulation over the reachable node pairs of the
/// two configurations' graphs (identity environment basis) by greatest-
/// fixpoint refinement, and reports whether the roots are related.
OpenBisimDecision decideOpenBisim(const Configuration& c1, const Configuration& c2,
                                  const Definitions& defs, size_t maxNodes = kDefaultMaxNodes,
                                  const WeakOptions& weak = {});

enum class EquivMode { Schedulers, Strategies };

struct ObsEquivOptions {
    size_t maxNodes = kDefaultMaxNodes;
    uint64_t enumerationCap = kDefaultEnumerationCap;
    double tol = kMatrixTol;
};

struct EquivVerdict {
    enum class Result { EquivalentOnInputs, Refuted, Inconclusive };
    Result result = Result::EquivalentOnInputs;
    std::string reason;

    // set when refuted by an unmatched observation vector
    bool hasWitness = false;
    int witnessSide = 0;  // 0: first configuration, 1: second
    std::string witnessContext;
    std::string witnessTable;  // serialized scheduler or strategy
    ObservationVector witnessVector;
    std::vector<std::string> channels;
    std::string witnessChannel;  // single channel exhibiting the gap, when one exists
    double witnessProbability = 0.0;

    // matched vector sets per context for equivalent verdicts
    std::vector<std::pair<std::string, std::vector<ObservationVector>>> matched;
};

/// Observational equivalence over the finite basis: for every context, the
/// sets of achievable per-channel observation vectors (over all schedulers or
/// all strategies, per mode) must coincide on both sides. Refutations carry a
/// replayable witness; exceeding the enumeration cap yields Inconclusive.
EquivVerdict checkObsEquiv(const Configuration& c1, const Configuration& c2,
                           const TestBasis& basis, EquivMode mode, const Definitions& defs,
                           const ObsEquivOptions& options = {});

}  // namespace qccs

#endif
