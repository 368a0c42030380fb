#include "qccs/equiv.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <string>

namespace qccs {

namespace {

std::string distKey(const NodeDist& d) {
    std::string k;
    for (const auto& [id, p] : d.entries) {
        k += std::to_string(id);
        k += ":";
        k += std::to_string(std::llround(p * 1e12));
        k += ";";
    }
    return k;
}

class DistSet {
  public:
    explicit DistSet(size_t cap) : cap_(cap) {}

    bool insert(NodeDist d) {
        std::string key = distKey(d);
        if (keys_.count(key)) return false;
        if (items_.size() >= cap_)
            throw WeakLimitError("weak-transition exploration exceeded " + std::to_string(cap_) +
                                 " distributions");
        keys_.insert(std::move(key));
        items_.push_back(std::move(d));
        return true;
    }
    const std::vector<NodeDist>& items() const { return items_; }

  private:
    size_t cap_;
    std::set<std::string> keys_;
    std::vector<NodeDist> items_;
};

/// Every way of choosing one distribution per part and mixing the choices
/// with the part weights.
void mixChoices(const std::vector<std::pair<double, const std::vector<NodeDist>*>>& parts,
                const std::function<void(NodeDist)>& emit) {
    for (const auto& part : parts)
        if (part.second->empty()) return;
    std::vector<size_t> pick(parts.size(), 0);
    while (true) {
        NodeDist mixed;
        for (size_t i = 0; i < parts.size(); ++i) {
            const NodeDist& chosen = (*parts[i].second)[pick[i]];
            for (const auto& [id, p] : chosen.entries)
                mixed.entries.emplace_back(id, parts[i].first * p);
        }
        mixed.normalizeOrder();
        emit(std::move(mixed));

        size_t i = 0;
        for (; i < parts.size(); ++i) {
            if (++pick[i] < parts[i].second->size()) break;
            pick[i] = 0;
        }
        if (i == parts.size()) break;
    }
}

// Per-node weak reachability sets, computed once per graph to a simultaneous
// fixpoint; closures of arbitrary distributions mix the per-node sets.
class WeakCore {
  public:
    WeakCore(const Plts& graph, const WeakOptions& options)
        : graph_(graph), options_(options) {
        sets_.reserve(graph.size());
        for (size_t i = 0; i < graph.size(); ++i) {
            sets_.emplace_back(options.maxDistributions);
            sets_[i].insert(NodeDist::point(static_cast<int>(i)));
        }
        bool changed = true;
        while (changed) {
            changed = false;
            for (size_t node = 0; node < graph.size(); ++node) {
                for (const auto& edge : graph.nodes[node].edges) {
                    if (!edge.action.isTau()) continue;
                    std::vector<std::pair<double, const std::vector<NodeDist>*>> parts;
                    parts.reserve(edge.branches.size());
                    for (const auto& b : edge.branches)
                        parts.emplace_back(b.probability, &sets_[static_cast<size_t>(b.target)].items());
                    std::vector<NodeDist> produced;
                    mixChoices(parts, [&](NodeDist d) { produced.push_back(std::move(d)); });
                    for (auto& d : produced)
                        if (sets_[node].insert(std::move(d))) changed = true;
                }
            }
        }
    }

    std::vector<NodeDist> closure(const NodeDist& mu) const {
        DistSet out(options_.maxDistributions);
        std::vector<std::pair<double, const std::vector<NodeDist>*>> parts;
        parts.reserve(mu.entries.size());
        for (const auto& [id, p] : mu.entries)
            parts.emplace_back(p, &sets_[static_cast<size_t>(id)].items());
        mixChoices(parts, [&](NodeDist d) { out.insert(std::move(d)); });
        return out.items();
    }

    /// Lifted alpha step: each support element picks one alpha edge.
    std::vector<NodeDist> liftStep(const NodeDist& mu, const Action& alpha) const {
        std::vector<std::vector<NodeDist>> successors;
        successors.reserve(mu.entries.size());
        for (const auto& [id, p] : mu.entries) {
            (void)p;
            std::vector<NodeDist> succ;
            for (const auto& edge : graph_.node(id).edges) {
                if (!(edge.action == alpha)) continue;
                NodeDist d;
                for (const auto& b : edge.branches) d.entries.emplace_back(b.target, b.probability);
                d.normalizeOrder();
                succ.push_back(std::move(d));
            }
            if (succ.empty()) return {};
            successors.push_back(std::move(succ));
        }
        DistSet out(options_.maxDistributions);
        std::vector<std::pair<double, const std::vector<NodeDist>*>> parts;
        parts.reserve(mu.entries.size());
        for (size_t i = 0; i < mu.entries.size(); ++i)
            parts.emplace_back(mu.entries[i].second, &successors[i]);
        mixChoices(parts, [&](NodeDist d) { out.insert(std::move(d)); });
        return out.items();
    }

  private:
    const Plts& graph_;
    WeakOptions options_;
    std::vector<DistSet> sets_;
};

}  // namespace

std::vector<NodeDist> weakReach(const Plts& graph, const NodeDist& mu, const WeakOptions& options) {
    return WeakCore(graph, options).closure(mu);
}

std::vector<NodeDist> weakSTransition(const Plts& graph, const NodeDist& mu,
                                      const std::vector<Action>& s, const WeakOptions& options) {
    std::vector<Action> visible;
    for (const auto& a : s)
        if (!a.isTau()) visible.push_back(a);

    WeakCore core(graph, options);
    std::vector<NodeDist> frontier = core.closure(mu);
    for (const auto& alpha : visible) {
        DistSet next(options.maxDistributions);
        for (const auto& nu : frontier) {
            for (const auto& stepped : core.liftStep(nu, alpha)) {
                for (const auto& closed : core.closure(stepped)) next.insert(closed);
            }
        }
        frontier = next.items();
    }
    return frontier;
}

}  // namespace qccs
