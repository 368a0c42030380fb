#include "qccs/equiv.hpp"

#include "qccs/parser.hpp"

#include <algorithm>
#include <map>

namespace qccs {

namespace {

std::vector<std::string> complementOf(const std::set<std::string>& qv, const Definitions& defs) {
    std::vector<std::string> out;
    for (const auto& q : defs.registerNames)
        if (!qv.count(q)) out.push_back(q);
    return out;
}

Distribution toConfigDistribution(const NodeDist& d, const Plts& graph) {
    std::vector<std::pair<Configuration, double>> entries;
    entries.reserve(d.entries.size());
    for (const auto& [id, p] : d.entries) entries.emplace_back(graph.node(id).config, p);
    return Distribution::fromWeighted(std::move(entries));
}

Distribution edgeDistribution(const Plts::Edge& edge, const Plts& graph) {
    std::vector<std::pair<Configuration, double>> entries;
    entries.reserve(edge.branches.size());
    for (const auto& b : edge.branches)
        entries.emplace_back(graph.node(b.target).config, b.probability);
    return Distribution::fromWeighted(std::move(entries));
}

std::string pairLabel(const Configuration& a, const Configuration& b) {
    return "(" + printProcess(a.process) + ", " + printProcess(b.process) + ")";
}

}  // namespace

OpenBisimResult verifyOpenBisim(const CandidateRelation& r, const TestBasis& basis,
                                const Definitions& defs, size_t maxNodes,
                                const WeakOptions& weak) {
    std::vector<SuperOperator> envOps = basis.superOps;
    bool identityOnly = envOps.empty();

    for (size_t k = 0; k < r.pairs.size(); ++k) {
        const auto& [lhs, rhs] = r.pairs[k];
        auto qvL = lhs.process.qv(defs);
        auto qvR = rhs.process.qv(defs);
        if (qvL != qvR)
            return {false, static_cast<int>(k),
                    "free quantum variables differ for pair " + pairLabel(lhs, rhs)};

        std::vector<std::string> traced(qvL.begin(), qvL.end());
        auto envL = partialTrace(lhs.state, traced);
        auto envR = partialTrace(rhs.state, traced);
        if (!matrixEq(envL.matrix, envR.matrix))
            return {false, static_cast<int>(k),
                    "environment states differ for pair " + pairLabel(lhs, rhs)};

        std::vector<std::string> complement = complementOf(qvL, defs);
        size_t opCount = identityOnly ? 1 : envOps.size();
        for (size_t o = 0; o < opCount; ++o) {
            QState stateL = lhs.state;
            QState stateR = rhs.state;
            std::string opNote = "identity environment";
            if (!identityOnly && !envOps[o].isIdentity()) {
                if (static_cast<size_t>(envOps[o].arity) != complement.size())
                    throw SemanticsError(
                        "environment super-operator arity " + std::to_string(envOps[o].arity) +
                        " does not match the " + std::to_string(complement.size()) +
                        " qubit(s) outside the free quantum variables");
                stateL = applySuper(stateL, envOps[o], complement);
                stateR = applySuper(stateR, envOps[o], complement);
                opNote = "environment super-operator #" + std::to_string(o);
            }

            Plts graphL = buildPlts({lhs.process, stateL}, defs, maxNodes);
            Plts graphR = buildPlts({rhs.process, stateR}, defs, maxNodes);

            auto transfer = [&](const Plts& from, const Plts& to,
                                bool leftToRight) -> std::optional<std::string> {
                for (const auto& edge : from.node(from.root).edges) {
                    std::vector<Action> word;
                    if (!edge.action.isTau()) word.push_back(edge.action);
                    Distribution mu = edgeDistribution(edge, from);
                    bool matched = false;
                    for (const auto& nu : weakSTransition(to, NodeDist::point(to.root), word, weak)) {
                        Distribution nuC = toConfigDistribution(nu, to);
                        bool feasible = leftToRight ? liftRelation(r, mu, nuC).has_value()
                                                    : liftRelation(r, nuC, mu).has_value();
                        if (feasible) {
                            matched = true;
                            break;
                        }
                    }
                    if (!matched)
                        return "transition " + printAction(edge.action) + " of " +
                               (leftToRight ? "the left" : "the right") + " side of pair " +
                               pairLabel(lhs, rhs) + " has no related weak answer (" + opNote + ")";
                }
                return std::nullopt;
            };

            if (auto reason = transfer(graphL, graphR, true))
                return {false, static_cast<int>(k), *reason};
            if (auto reason = transfer(graphR, graphL, false))
                return {false, static_cast<int>(k), *reason};
        }
    }
    return {};
}

OpenBisimDecision decideOpenBisim(const Configuration& c1, const Configuration& c2,
                                  const Definitions& defs, size_t maxNodes,
                                  const WeakOptions& weak) {
    Plts g1 = buildPlts(c1, defs, maxNodes);
    Plts g2 = buildPlts(c2, defs, maxNodes);

    size_t n1 = g1.size(), n2 = g2.size();
    std::vector<std::vector<char>> related(n1, std::vector<char>(n2, 0));

    // static conditions: equal free quantum variables, equal environments
    std::vector<std::set<std::string>> qv1(n1), qv2(n2);
    for (size_t i = 0; i < n1; ++i) qv1[i] = g1.nodes[i].config.process.qv(defs);
    for (size_t j = 0; j < n2; ++j) qv2[j] = g2.nodes[j].config.process.qv(defs);
    for (size_t i = 0; i < n1; ++i) {
        std::vector<std::string> traced(qv1[i].begin(), qv1[i].end());
        auto env1 = partialTrace(g1.nodes[i].config.state, traced);
        for (size_t j = 0; j < n2; ++j) {
            if (qv1[i] != qv2[j]) continue;
            auto env2 = partialTrace(g2.nodes[j].config.state, traced);
            if (matrixEq(env1.matrix, env2.matrix)) related[i][j] = 1;
        }
    }

    // weak answers, cached per node and visible action
    std::map<std::pair<int, std::string>, std::vector<NodeDist>> cache1, cache2;
    auto weakAnswers = [&](const Plts& g, auto& cache, int node,
                           const Action& alpha) -> const std::vector<NodeDist>& {
        std::string key = alpha.isTau() ? std::string() : printAction(alpha);
        auto it = cache.find({node, key});
        if (it != cache.end()) return it->second;
        std::vector<Action> word;
        if (!alpha.isTau()) word.push_back(alpha);
        auto result = weakSTransition(g, NodeDist::point(node), word, weak);
        return cache.emplace(std::make_pair(node, key), std::move(result)).first->second;
    };

    // mu lives on g1 nodes, nu on g2 nodes; arcs follow the current relation
    auto liftFeasible = [&](const NodeDist& mu, const NodeDist& nu) {
        std::vector<double> supply, demand;
        for (const auto& [id, p] : mu.entries) supply.push_back(p);
        for (const auto& [id, p] : nu.entries) demand.push_back(p);
        std::vector<std::vector<char>> arc(mu.entries.size(),
                                           std::vector<char>(nu.entries.size(), 0));
        for (size_t a = 0; a < mu.entries.size(); ++a)
            for (size_t b = 0; b < nu.entries.size(); ++b)
                arc[a][b] = related[static_cast<size_t>(mu.entries[a].first)]
                                   [static_cast<size_t>(nu.entries[b].first)];
        return solveTransport(supply, demand, arc).has_value();
    };

    auto edgeNodeDist = [](const Plts::Edge& edge) {
        NodeDist d;
        for (const auto& b : edge.branches) d.entries.emplace_back(b.target, b.probability);
        d.normalizeOrder();
        return d;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < n1; ++i) {
            for (size_t j = 0; j < n2; ++j) {
                if (!related[i][j]) continue;
                bool ok = true;
                for (const auto& edge : g1.nodes[i].edges) {
                    bool matched = false;
                    for (const auto& nu :
                         weakAnswers(g2, cache2, static_cast<int>(j), edge.action)) {
                        if (liftFeasible(edgeNodeDist(edge), nu)) {
                            matched = true;
                            break;
                        }
                    }
                    if (!matched) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    for (const auto& edge : g2.nodes[j].edges) {
                        bool matched = false;
                        for (const auto& mu :
                             weakAnswers(g1, cache1, static_cast<int>(i), edge.action)) {
                            if (liftFeasible(mu, edgeNodeDist(edge))) {
                                matched = true;
                                break;
                            }
                        }
                        if (!matched) {
                            ok = false;
                            break;
                        }
                    }
                }
                if (!ok) {
                    related[i][j] = 0;
                    changed = true;
                }
            }
        }
    }

    OpenBisimDecision decision;
    decision.related = related[static_cast<size_t>(g1.root)][static_cast<size_t>(g2.root)] != 0;
    for (size_t i = 0; i < n1; ++i)
        for (size_t j = 0; j < n2; ++j)
            if (related[i][j])
                decision.relation.pairs.emplace_back(g1.nodes[i].config, g2.nodes[j].config);
    decision.reason = decision.related
                          ? "roots related by the greatest open bisimulation over reachable pairs"
                          : "roots are not related by any open bisimulation over reachable pairs";
    return decision;
}

}  // namespace qccs
