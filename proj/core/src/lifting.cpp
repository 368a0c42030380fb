#include "qccs/equiv.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace qccs {

namespace {

constexpr double kFlowEps = 1e-12;

}  // namespace

// Max-flow on the bipartite transportation network: source -> supplies ->
// (allowed arcs, unbounded) -> demands -> sink. Feasible iff the flow value
// reaches the total mass. Augmenting paths saturate a source or sink arc each
// round, so the loop is bounded by the number of arcs.
std::optional<std::vector<std::vector<double>>> solveTransport(
    const std::vector<double>& supply, const std::vector<double>& demand,
    const std::vector<std::vector<char>>& arc, double tol) {
    size_t m = supply.size(), n = demand.size();
    double totalSupply = 0.0, totalDemand = 0.0;
    for (double s : supply) totalSupply += s;
    for (double d : demand) totalDemand += d;
    if (std::abs(totalSupply - totalDemand) > tol) return std::nullopt;

    std::vector<double> rowLeft = supply;   // residual source -> row capacity
    std::vector<double> colLeft = demand;   // residual col -> sink capacity
    std::vector<std::vector<double>> flow(m, std::vector<double>(n, 0.0));

    while (true) {
        // BFS over the residual graph: rows 0..m-1, cols m..m+n-1
        std::vector<int> prevOfCol(n, -2);  // row that reached this col (-2 unvisited)
        std::vector<int> prevOfRow(m, -2);  // col whose reverse arc reached this row (-2 unvisited; -1 source)
        std::deque<std::pair<bool, size_t>> queue;  // (isRow, index)
        for (size_t i = 0; i < m; ++i)
            if (rowLeft[i] > kFlowEps) {
                prevOfRow[i] = -1;
                queue.emplace_back(true, i);
            }
        int reachedCol = -1;
        while (!queue.empty() && reachedCol < 0) {
            auto [isRow, idx] = queue.front();
            queue.pop_front();
            if (isRow) {
                for (size_t j = 0; j < n; ++j) {
                    if (!arc[idx][j] || prevOfCol[j] != -2) continue;
                    prevOfCol[j] = static_cast<int>(idx);
                    if (colLeft[j] > kFlowEps) {
                        reachedCol = static_cast<int>(j);
                        break;
                    }
                    queue.emplace_back(false, j);
                }
            } else {
                for (size_t i = 0; i < m; ++i) {
                    if (flow[i][idx] <= kFlowEps || prevOfRow[i] != -2) continue;
                    prevOfRow[i] = static_cast<int>(idx);
                    queue.emplace_back(true, i);
                }
            }
        }
        if (reachedCol < 0) break;

        // bottleneck along the augmenting path
        double bottleneck = colLeft[static_cast<size_t>(reachedCol)];
        {
            int col = reachedCol;
            while (true) {
                int row = prevOfCol[static_cast<size_t>(col)];
                if (prevOfRow[static_cast<size_t>(row)] == -1) {
                    bottleneck = std::min(bottleneck, rowLeft[static_cast<size_t>(row)]);
                    break;
                }
                int backCol = prevOfRow[static_cast<size_t>(row)];
                bottleneck = std::min(bottleneck, flow[static_cast<size_t>(row)][static_cast<size_t>(backCol)]);
                col = backCol;
            }
        }

        // apply the augmentation
        {
            int col = reachedCol;
            colLeft[static_cast<size_t>(col)] -= bottleneck;
            while (true) {
                int row = prevOfCol[static_cast<size_t>(col)];
                flow[static_cast<size_t>(row)][static_cast<size_t>(col)] += bottleneck;
                if (prevOfRow[static_cast<size_t>(row)] == -1) {
                    rowLeft[static_cast<size_t>(row)] -= bottleneck;
                    break;
                }
                int backCol = prevOfRow[static_cast<size_t>(row)];
                flow[static_cast<size_t>(row)][static_cast<size_t>(backCol)] -= bottleneck;
                col = backCol;
            }
        }
    }

    for (size_t i = 0; i < m; ++i)
        if (rowLeft[i] > tol) return std::nullopt;
    for (size_t j = 0; j < n; ++j)
        if (colLeft[j] > tol) return std::nullopt;
    return flow;
}

std::optional<WeightFunction> liftRelation(const CandidateRelation& r, const Distribution& mu,
                                           const Distribution& nu, double tol) {
    const auto& rows = mu.entries();
    const auto& cols = nu.entries();
    std::vector<double> supply, demand;
    supply.reserve(rows.size());
    demand.reserve(cols.size());
    for (const auto& [c, p] : rows) supply.push_back(p);
    for (const auto& [c, p] : cols) demand.push_back(p);

    std::vector<std::vector<char>> arc(rows.size(), std::vector<char>(cols.size(), 0));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j)
            arc[i][j] = r.related(rows[i].first, cols[j].first, tol) ? 1 : 0;

    auto flow = solveTransport(supply, demand, arc, tol);
    if (!flow) return std::nullopt;

    WeightFunction delta;
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j)
            if ((*flow)[i][j] > kFlowEps)
                delta.entries.emplace_back(rows[i].first, cols[j].first, (*flow)[i][j]);
    return delta;
}

std::optional<std::vector<std::tuple<double, Configuration, Configuration>>> decomposeLifting(
    const CandidateRelation& r, const Distribution& mu, const Distribution& nu, double tol) {
    auto delta = liftRelation(r, mu, nu, tol);
    if (!delta) return std::nullopt;

    std::vector<std::tuple<double, Configuration, Configuration>> triples;
    triples.reserve(delta->entries.size());
    for (const auto& [c, d, w] : delta->entries) triples.emplace_back(w, c, d);

    // recomposition check: summing the triples gives back mu and nu
    auto recompose = [&](bool leftSide) {
        std::vector<std::pair<Configuration, double>> acc;
        for (const auto& [w, c, d] : triples) acc.emplace_back(leftSide ? c : d, w);
        return Distribution::fromWeighted(std::move(acc));
    };
    if (!recompose(true).equals(mu, tol) || !recompose(false).equals(nu, tol))
        throw SemanticsError("internal: lifting decomposition failed to recompose");
    return triples;
}

}  // namespace qccs
