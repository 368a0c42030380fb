#ifndef QCCS_SCHED_HPP
#define QCCS_SCHED_HPP

#include "qccs/plts.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qccs {

inline constexpr uint64_t kDefaultEnumerationCap = 10'000'000;

struct EnumerationCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A memoryless resolution of nondeterminism: one chosen edge per graph node,
// or stop (allowed only at deadlocked nodes).
struct Scheduler {
    static constexpr int kStop = -1;
    std::vector<int> choice;  // edge index per node id, or kStop

    bool stops(int node) const { return choice[static_cast<size_t>(node)] == kStop; }
    int edgeIndex(int node) const { return choice[static_cast<size_t>(node)]; }
};

/// Checks the scheduler against its graph: a chosen edge must exist, and stop
/// is permitted exactly at nodes without outgoing edges.
void validateScheduler(const Scheduler& s, const Plts& graph);

// Distribution over graph nodes; entries sorted by node id, weights positive.
struct NodeDist {
    std::vector<std::pair<int, double>> entries;

    static NodeDist point(int node) { return {{{node, 1.0}}}; }
    void normalizeOrder();
    bool equals(const NodeDist& other, double tol = kMatrixTol) const;
};

/// Exhausts the scheduler's tau choices from mu (clauses of the scheduler-
/// limited weak transition): every support element with a tau choice is
/// replaced by its successor distribution until all support elements either
/// stop or offer a non-tau action. Returns nothing when a tau cycle is
/// reachable, i.e. no stable distribution exists.
std::optional<NodeDist> weakTauClosure(const NodeDist& mu, const Scheduler& s, const Plts& graph);

/// Probability that the configuration uses classical channel `channel` under
/// the scheduler: the stable distribution's mass on support elements whose
/// chosen action is an output on that channel. Empty when tau-divergent.
std::optional<double> observe(const Plts& graph, const Scheduler& s, int startNode,
                              const std::string& channel);

// Per-channel observation probabilities under one scheduler; either the
// closure stabilizes (all channels defined) or it diverges (none are).
struct ObservationVector {
    bool divergent = false;
    std::vector<double> probabilities;

    bool equals(const ObservationVector& other, double tol = kMatrixTol) const;
    /// Stable dedup key (probabilities rounded well below the tolerance).
    std::string key() const;
};

ObservationVector observationVector(const Plts& graph, const Scheduler& s, int startNode,
                                    const std::vector<std::string>& channels);

// Streams every scheduler of a finite graph: the Cartesian product of
// per-node edge choices, stop forced exactly at deadlocked nodes.
class SchedulerEnumerator {
  public:
    explicit SchedulerEnumerator(const Plts& graph, uint64_t cap = kDefaultEnumerationCap);
    /// Total number of schedulers (saturates at UINT64_MAX); throws
    /// EnumerationCapError when above the cap.
    uint64_t count() const { return count_; }
    bool next(Scheduler& out);

  private:
    const Plts* graph_;
    std::vector<int> degrees_;
    std::vector<int> odometer_;
    uint64_t count_ = 1;
    bool exhausted_ = false;
    bool started_ = false;
};

// A strategy chooses per process term (not per configuration): all nodes
// sharing a process term get the instantiation of one schema. Keys are the
// canonical text of the process after constant unfolding.
struct Strategy {
    static constexpr int kStop = -1;
    std::vector<int> choice;  // schema index per key, or kStop at dead keys
};

struct StrategyContext {
    std::vector<std::string> keys;               // in order of first appearance
    std::vector<int> nodeKey;                    // node id -> key index
    std::vector<std::vector<TransitionSchema>> schemas;  // per key

    int keyOf(int node) const { return nodeKey[static_cast<size_t>(node)]; }
};

StrategyContext buildStrategyContext(const Plts& graph, const Definitions& defs);

/// Instantiates the strategy at every node, producing a scheduler on the
/// graph. Throws if a chosen schema's instantiation is not a graph edge
/// (which would contradict schema soundness).
Scheduler strategyToScheduler(const Strategy& s, const StrategyContext& ctx, const Plts& graph);

class StrategyEnumerator {
  public:
    StrategyEnumerator(const Plts& graph, const Definitions& defs,
                       uint64_t cap = kDefaultEnumerationCap);
    const StrategyContext& context() const { return ctx_; }
    uint64_t count() const { return count_; }
    bool next(Strategy& out);

  private:
    StrategyContext ctx_;
    std::vector<int> degrees_;
    std::vector<int> odometer_;
    uint64_t count_ = 1;
    bool exhausted_ = false;
    bool started_ = false;
};

/// Human-readable witness table (one line per node/process-term choice);
/// parseable back by the matching parse function.
std::string serializeScheduler(const Scheduler& s, const Plts& graph);
Scheduler parseSchedulerWitness(const std::string& text, const Plts& graph);

std::string serializeStrategy(const Strategy& s, const StrategyContext& ctx);
Strategy parseStrategyWitness(const std::string& text, const StrategyContext& ctx);

}  // namespace qccs

#endif
