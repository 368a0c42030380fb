#include "qccs/sched.hpp"

#include "qccs/parser.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qccs {

void validateScheduler(const Scheduler& s, const Plts& graph) {
    if (s.choice.size() != graph.size())
        throw SemanticsError("scheduler table size does not match the graph");
    for (size_t i = 0; i < graph.size(); ++i) {
        int c = s.choice[i];
        const auto& edges = graph.nodes[i].edges;
        if (c == Scheduler::kStop) {
            if (!edges.empty())
                throw SemanticsError("scheduler stops at node " + std::to_string(i) +
                                     " which has outgoing transitions");
        } else if (c < 0 || static_cast<size_t>(c) >= edges.size()) {
            throw SemanticsError("scheduler chooses a missing edge at node " + std::to_string(i));
        }
    }
}

void NodeDist::normalizeOrder() {
    std::sort(entries.begin(), entries.end());
    std::vector<std::pair<int, double>> merged;
    for (const auto& [id, p] : entries) {
        if (!merged.empty() && merged.back().first == id)
            merged.back().second += p;
        else
            merged.emplace_back(id, p);
    }
    entries = std::move(merged);
}

bool NodeDist::equals(const NodeDist& other, double tol) const {
    if (entries.size() != other.entries.size()) return false;
    for (size_t i = 0; i < entries.size(); ++i)
        if (entries[i].first != other.entries[i].first ||
            std::abs(entries[i].second - other.entries[i].second) > tol)
            return false;
    return true;
}

namespace {

bool tauChoice(const Scheduler& s, const Plts& graph, int node) {
    int c = s.choice[static_cast<size_t>(node)];
    return c != Scheduler::kStop && graph.node(node).edges[static_cast<size_t>(c)].action.isTau();
}

// Detects a cycle in the tau-choice graph reachable from the support.
bool tauDivergent(const NodeDist& mu, const Scheduler& s, const Plts& graph) {
    enum : char { White, Grey, Black };
    std::vector<char> color(graph.size(), White);

    struct Frame {
        int node;
        size_t branch;
    };
    for (const auto& [start, weight] : mu.entries) {
        (void)weight;
        if (color[static_cast<size_t>(start)] != White) continue;
        std::vector<Frame> stack{{start, 0}};
        color[static_cast<size_t>(start)] = Grey;
        while (!stack.empty()) {
            Frame& frame = stack.back();
            if (!tauChoice(s, graph, frame.node)) {
                color[static_cast<size_t>(frame.node)] = Black;
                stack.pop_back();
                continue;
            }
            const auto& edge =
                graph.node(frame.node).edges[static_cast<size_t>(s.choice[static_cast<size_t>(frame.node)])];
            if (frame.branch >= edge.branches.size()) {
                color[static_cast<size_t>(frame.node)] = Black;
                stack.pop_back();
                continue;
            }
            int next = edge.branches[frame.branch++].target;
            if (color[static_cast<size_t>(next)] == Grey) return true;
            if (color[static_cast<size_t>(next)] == White) {
                color[static_cast<size_t>(next)] = Grey;
                stack.push_back({next, 0});
            }
        }
    }
    return false;
}

}  // namespace

std::optional<NodeDist> weakTauClosure(const NodeDist& mu, const Scheduler& s, const Plts& graph) {
    if (tauDivergent(mu, s, graph)) return std::nullopt;

    // The tau-choice graph is acyclic from here; resolve by memoized descent.
    std::vector<char> computed(graph.size(), 0);
    std::vector<NodeDist> stable(graph.size());

    auto resolve = [&](auto&& self, int node) -> const NodeDist& {
        if (computed[static_cast<size_t>(node)]) return stable[static_cast<size_t>(node)];
        NodeDist result;
        if (!tauChoice(s, graph, node)) {
            result = NodeDist::point(node);
        } else {
            const auto& edge =
                graph.node(node).edges[static_cast<size_t>(s.choice[static_cast<size_t>(node)])];
            for (const auto& b : edge.branches) {
                const NodeDist& sub = self(self, b.target);
                for (const auto& [id, p] : sub.entries)
                    result.entries.emplace_back(id, b.probability * p);
            }
            result.normalizeOrder();
        }
        stable[static_cast<size_t>(node)] = std::move(result);
        computed[static_cast<size_t>(node)] = 1;
        return stable[static_cast<size_t>(node)];
    };

    NodeDist out;
    for (const auto& [node, weight] : mu.entries) {
        const NodeDist& sub = resolve(resolve, node);
        for (const auto& [id, p] : sub.entries) out.entries.emplace_back(id, weight * p);
    }
    out.normalizeOrder();
    return out;
}

std::optional<double> observe(const Plts& graph, const Scheduler& s, int startNode,
                              const std::string& channel) {
    auto stable = weakTauClosure(NodeDist::point(startNode), s, graph);
    if (!stable) return std::nullopt;
    double p = 0.0;
    for (const auto& [node, weight] : stable->entries) {
        int c = s.choice[static_cast<size_t>(node)];
        if (c == Scheduler::kStop) continue;
        const Action& a = graph.node(node).edges[static_cast<size_t>(c)].action;
        if (a.kind == Action::Kind::COut && a.channel == channel) p += weight;
    }
    return p;
}

bool ObservationVector::equals(const ObservationVector& other, double tol) const {
    if (divergent != other.divergent) return false;
    if (divergent) return true;
    if (probabilities.size() != other.probabilities.size()) return false;
    for (size_t i = 0; i < probabilities.size(); ++i)
        if (std::abs(probabilities[i] - other.probabilities[i]) > tol) return false;
    return true;
}

std::string ObservationVector::key() const {
    if (divergent) return "divergent";
    std::string k;
    for (double p : probabilities) {
        k += formatReal(std::round(p * 1e10) / 1e10);
        k += ";";
    }
    return k;
}

ObservationVector observationVector(const Plts& graph, const Scheduler& s, int startNode,
                                    const std::vector<std::string>& channels) {
    ObservationVector v;
    auto stable = weakTauClosure(NodeDist::point(startNode), s, graph);
    if (!stable) {
        v.divergent = true;
        return v;
    }
    v.probabilities.assign(channels.size(), 0.0);
    for (const auto& [node, weight] : stable->entries) {
        int c = s.choice[static_cast<size_t>(node)];
        if (c == Scheduler::kStop) continue;
        const Action& a = graph.node(node).edges[static_cast<size_t>(c)].action;
        if (a.kind != Action::Kind::COut) continue;
        for (size_t i = 0; i < channels.size(); ++i)
            if (channels[i] == a.channel) v.probabilities[i] += weight;
    }
    return v;
}

namespace {

uint64_t productCapped(const std::vector<int>& degrees, uint64_t cap, const char* what) {
    uint64_t total = 1;
    for (int d : degrees) {
        uint64_t factor = d > 0 ? static_cast<uint64_t>(d) : 1;
        if (total > cap / factor + 1) {
            total = UINT64_MAX;
            break;
        }
        total *= factor;
    }
    if (total > cap)
        throw EnumerationCapError(std::string(what) + " enumeration exceeds the cap of " +
                                  std::to_string(cap));
    return total;
}

bool advanceOdometer(std::vector<int>& odometer, const std::vector<int>& degrees) {
    for (size_t i = 0; i < odometer.size(); ++i) {
        if (degrees[i] <= 0) continue;
        if (++odometer[i] < degrees[i]) return true;
        odometer[i] = 0;
    }
    return false;
}

}  // namespace

SchedulerEnumerator::SchedulerEnumerator(const Plts& graph, uint64_t cap) : graph_(&graph) {
    degrees_.reserve(graph.size());
    for (const auto& node : graph.nodes) degrees_.push_back(static_cast<int>(node.edges.size()));
    odometer_.assign(degrees_.size(), 0);
    count_ = productCapped(degrees_, cap, "scheduler");
}

bool SchedulerEnumerator::next(Scheduler& out) {
    if (exhausted_) return false;
    if (started_ && !advanceOdometer(odometer_, degrees_)) {
        exhausted_ = true;
        return false;
    }
    started_ = true;
    out.choice.assign(degrees_.size(), Scheduler::kStop);
    for (size_t i = 0; i < degrees_.size(); ++i)
        if (degrees_[i] > 0) out.choice[i] = odometer_[i];
    return true;
}

StrategyContext buildStrategyContext(const Plts& graph, const Definitions& defs) {
    StrategyContext ctx;
    std::map<std::string, int> index;
    ctx.nodeKey.reserve(graph.size());
    for (const auto& node : graph.nodes) {
        std::string key = printProcess(unfoldDeep(node.config.process, defs));
        auto it = index.find(key);
        if (it == index.end()) {
            int id = static_cast<int>(ctx.keys.size());
            index.emplace(key, id);
            ctx.keys.push_back(key);
            ctx.schemas.push_back(transitionSchemas(node.config.process, defs));
            ctx.nodeKey.push_back(id);
        } else {
            ctx.nodeKey.push_back(it->second);
        }
    }
    return ctx;
}

Scheduler strategyToScheduler(const Strategy& s, const StrategyContext& ctx, const Plts& graph) {
    if (s.choice.size() != ctx.keys.size())
        throw SemanticsError("strategy table size does not match the graph's process terms");
    Scheduler out;
    out.choice.assign(graph.size(), Scheduler::kStop);
    for (size_t node = 0; node < graph.size(); ++node) {
        int key = ctx.nodeKey[node];
        int schemaIdx = s.choice[static_cast<size_t>(key)];
        const auto& edges = graph.nodes[node].edges;
        if (schemaIdx == Strategy::kStop) {
            if (!edges.empty())
                throw SemanticsError("strategy stops at a process term with transitions");
            continue;
        }
        const TransitionSchema& schema = ctx.schemas[static_cast<size_t>(key)][static_cast<size_t>(schemaIdx)];
        Transition t = instantiate(schema, graph.nodes[node].config.state);

        NodeDist want;
        for (const auto& [config, p] : t.target.entries()) {
            int id = graph.findNode(config.process, config.state);
            if (id < 0)
                throw SemanticsError("schema instantiation leaves the reachable graph (node " +
                                     std::to_string(node) + ")");
            want.entries.emplace_back(id, p);
        }
        want.normalizeOrder();

        int match = -1;
        for (size_t e = 0; e < edges.size(); ++e) {
            if (!(edges[e].action == t.action)) continue;
            NodeDist have;
            for (const auto& b : edges[e].branches) have.entries.emplace_back(b.target, b.probability);
            have.normalizeOrder();
            if (have.equals(want)) {
                match = static_cast<int>(e);
                break;
            }
        }
        if (match < 0)
            throw SemanticsError("schema instantiation is not an edge of the graph (node " +
                                 std::to_string(node) + ")");
        out.choice[node] = match;
    }
    return out;
}

StrategyEnumerator::StrategyEnumerator(const Plts& graph, const Definitions& defs, uint64_t cap)
    : ctx_(buildStrategyContext(graph, defs)) {
    degrees_.reserve(ctx_.keys.size());
    for (const auto& schemas : ctx_.schemas) degrees_.push_back(static_cast<int>(schemas.size()));
    odometer_.assign(degrees_.size(), 0);
    count_ = productCapped(degrees_, cap, "strategy");
}

bool StrategyEnumerator::next(Strategy& out) {
    if (exhausted_) return false;
    if (started_ && !advanceOdometer(odometer_, degrees_)) {
        exhausted_ = true;
        return false;
    }
    started_ = true;
    out.choice.assign(degrees_.size(), Strategy::kStop);
    for (size_t i = 0; i < degrees_.size(); ++i)
        if (degrees_[i] > 0) out.choice[i] = odometer_[i];
    return true;
}

std::string serializeScheduler(const Scheduler& s, const Plts& graph) {
    std::string out = "qccs-witness v1\nmode: scheduler\n";
    for (size_t i = 0; i < s.choice.size(); ++i) {
        out += "node " + std::to_string(i) + " : ";
        if (s.choice[i] == Scheduler::kStop) {
            out += "stop";
        } else {
            const auto& edge = graph.nodes[i].edges[static_cast<size_t>(s.choice[i])];
            out += std::to_string(s.choice[i]) + "  # " + printAction(edge.action);
        }
        out += "  # " + printProcess(graph.nodes[i].config.process) + "\n";
    }
    return out;
}

namespace {

std::vector<std::pair<int, std::string>> parseWitnessLines(const std::string& text,
                                                           const std::string& expectMode,
                                                           const std::string& keyword) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::pair<int, std::string>> out;
    bool sawHeader = false, sawMode = false;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (!sawHeader) {
            if (first != "qccs-witness")
                throw SemanticsError("witness file must start with 'qccs-witness v1'");
            sawHeader = true;
            continue;
        }
        if (!sawMode) {
            std::string mode;
            ls >> mode;
            if (first != "mode:" || mode != expectMode)
                throw SemanticsError("witness mode must be '" + expectMode + "'");
            sawMode = true;
            continue;
        }
        if (first != keyword)
            throw SemanticsError("expected '" + keyword + "' line in witness file");
        int id = 0;
        std::string colon, choice;
        if (!(ls >> id >> colon >> choice) || colon != ":")
            throw SemanticsError("malformed witness line: " + line);
        out.emplace_back(id, choice);
    }
    if (!sawHeader || !sawMode) throw SemanticsError("witness file is missing its header");
    return out;
}

}  // namespace

Scheduler parseSchedulerWitness(const std::string& text, const Plts& graph) {
    Scheduler s;
    s.choice.assign(graph.size(), Scheduler::kStop);
    std::vector<bool> seen(graph.size(), false);
    for (const auto& [id, choice] : parseWitnessLines(text, "scheduler", "node")) {
        if (id < 0 || static_cast<size_t>(id) >= graph.size())
            throw SemanticsError("witness references unknown node " + std::to_string(id));
        if (seen[static_cast<size_t>(id)])
            throw SemanticsError("witness sets node " + std::to_string(id) + " twice");
        seen[static_cast<size_t>(id)] = true;
        s.choice[static_cast<size_t>(id)] = choice == "stop" ? Scheduler::kStop : std::stoi(choice);
    }
    for (size_t i = 0; i < graph.size(); ++i)
        if (!seen[i] && !graph.nodes[i].edges.empty())
            throw SemanticsError("witness is missing a choice for node " + std::to_string(i));
    validateScheduler(s, graph);
    return s;
}

std::string serializeStrategy(const Strategy& s, const StrategyContext& ctx) {
    std::string out = "qccs-witness v1\nmode: strategy\n";
    for (size_t i = 0; i < s.choice.size(); ++i) {
        out += "process " + std::to_string(i) + " : ";
        if (s.choice[i] == Strategy::kStop) {
            out += "stop";
        } else {
            const auto& schema = ctx.schemas[i][static_cast<size_t>(s.choice[i])];
            out += std::to_string(s.choice[i]) + "  # " + printAction(schema.action);
        }
        out += "  # " + ctx.keys[i] + "\n";
    }
    return out;
}

Strategy parseStrategyWitness(const std::string& text, const StrategyContext& ctx) {
    Strategy s;
    s.choice.assign(ctx.keys.size(), Strategy::kStop);
    std::vector<bool> seen(ctx.keys.size(), false);
    for (const auto& [id, choice] : parseWitnessLines(text, "strategy", "process")) {
        if (id < 0 || static_cast<size_t>(id) >= ctx.keys.size())
            throw SemanticsError("witness references unknown process term " + std::to_string(id));
        if (seen[static_cast<size_t>(id)])
            throw SemanticsError("witness sets process term " + std::to_string(id) + " twice");
        seen[static_cast<size_t>(id)] = true;
        s.choice[static_cast<size_t>(id)] = choice == "stop" ? Strategy::kStop : std::stoi(choice);
    }
    for (size_t i = 0; i < ctx.keys.size(); ++i) {
        if (seen[i]) continue;
        if (!ctx.schemas[i].empty())
            throw SemanticsError("witness is missing a choice for process term " + std::to_string(i));
    }
    for (size_t i = 0; i < ctx.keys.size(); ++i) {
        int c = s.choice[i];
        if (c == Strategy::kStop) {
            if (!ctx.schemas[i].empty())
                throw SemanticsError("strategy witness stops at a live process term");
        } else if (c < 0 || static_cast<size_t>(c) >= ctx.schemas[i].size()) {
            throw SemanticsError("strategy witness chooses a missing schema");
        }
    }
    return s;
}

}  // namespace qccs
