#include "qccs/plts.hpp"

#include "qccs/parser.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace qccs {

int Plts::findNode(const Process& process, const QState& state, double tol) const {
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].config.process.structurallyEqual(process) &&
            stateEq(nodes[i].config.state, state, tol))
            return static_cast<int>(i);
    return -1;
}

Plts buildPlts(const Configuration& root, const Definitions& defs, size_t maxNodes) {
    auto report = checkLegal(root.process, defs);
    if (!report.ok)
        throw SemanticsError("illegal root configuration: " + describeLegality(report));

    Plts graph;
    std::unordered_map<std::string, std::vector<int>> byProcess;

    auto intern = [&](const Configuration& config) -> int {
        std::string key = printProcess(config.process);
        auto& bucket = byProcess[key];
        for (int id : bucket)
            if (stateEq(graph.nodes[static_cast<size_t>(id)].config.state, config.state)) return id;
        if (graph.nodes.size() >= maxNodes)
            throw StateSpaceLimitError("reachable configuration set exceeds " +
                                       std::to_string(maxNodes) + " nodes");
        int id = static_cast<int>(graph.nodes.size());
        graph.nodes.push_back(Plts::Node{config, {}});
        bucket.push_back(id);
        return id;
    };

    std::deque<int> frontier;
    graph.root = intern(root);
    frontier.push_back(graph.root);
    std::vector<bool> expanded;

    while (!frontier.empty()) {
        int id = frontier.front();
        frontier.pop_front();
        if (static_cast<size_t>(id) < expanded.size() && expanded[static_cast<size_t>(id)]) continue;
        if (static_cast<size_t>(id) >= expanded.size()) expanded.resize(id + 1, false);
        expanded[static_cast<size_t>(id)] = true;

        Configuration config = graph.nodes[static_cast<size_t>(id)].config;
        for (const auto& t : transitions(config, defs)) {
            Plts::Edge edge;
            edge.action = t.action;
            for (const auto& [target, p] : t.target.entries()) {
                int targetId = intern(target);
                if (static_cast<size_t>(targetId) >= expanded.size() ||
                    !expanded[static_cast<size_t>(targetId)])
                    frontier.push_back(targetId);
                bool merged = false;
                for (auto& b : edge.branches)
                    if (b.target == targetId) {
                        b.probability += p;
                        merged = true;
                        break;
                    }
                if (!merged) edge.branches.push_back({targetId, p});
            }
            std::sort(edge.branches.begin(), edge.branches.end(),
                      [](const Plts::Branch& a, const Plts::Branch& b) { return a.target < b.target; });

            auto& edges = graph.nodes[static_cast<size_t>(id)].edges;
            bool duplicate = false;
            for (const auto& existing : edges) {
                if (!(existing.action == edge.action) ||
                    existing.branches.size() != edge.branches.size())
                    continue;
                bool same = true;
                for (size_t i = 0; i < edge.branches.size(); ++i)
                    if (existing.branches[i].target != edge.branches[i].target ||
                        std::abs(existing.branches[i].probability - edge.branches[i].probability) >
                            kMatrixTol)
                        same = false;
                if (same) {
                    duplicate = true;
                    break;
                }
            }
            if (!duplicate) edges.push_back(std::move(edge));
        }
    }
    return graph;
}

namespace {

std::string dotEscape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        if (c == '\\' || c == '"') out += '\\';
        out += c;
    }
    return out;
}

std::string stateLabel(const Plts& graph, int id) {
    const QState& state = graph.node(id).config.state;
    if (state.dim() <= 4) return formatMatrix(state.matrix());
    return "state#" + std::to_string(id);
}

}  // namespace

std::string exportDot(const Plts& graph) {
    std::string out = "digraph plts {\n  rankdir=TB;\n  node [shape=box, fontname=\"monospace\"];\n";
    for (size_t i = 0; i < graph.nodes.size(); ++i) {
        out += "  n" + std::to_string(i) + " [label=\"" +
               dotEscape(std::to_string(i) + ": " + printProcess(graph.nodes[i].config.process) +
                         "\n" + stateLabel(graph, static_cast<int>(i))) +
               "\"";
        if (static_cast<int>(i) == graph.root) out += ", penwidth=2";
        out += "];\n";
    }
    int pointCount = 0;
    for (size_t i = 0; i < graph.nodes.size(); ++i) {
        for (const auto& edge : graph.nodes[i].edges) {
            std::string label = dotEscape(printAction(edge.action));
            if (edge.branches.size() == 1) {
                out += "  n" + std::to_string(i) + " -> n" + std::to_string(edge.branches[0].target) +
                       " [label=\"" + label + "\"];\n";
            } else {
                std::string point = "p" + std::to_string(pointCount++);
                out += "  " + point + " [shape=point, width=0.08];\n";
                out += "  n" + std::to_string(i) + " -> " + point + " [label=\"" + label +
                       "\", arrowhead=none];\n";
                for (const auto& b : edge.branches)
                    out += "  " + point + " -> n" + std::to_string(b.target) + " [label=\"" +
                           formatReal(b.probability) + "\"];\n";
            }
        }
    }
    out += "}\n";
    return out;
}

std::string exportJson(const Plts& graph) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = 1;
    doc["root"] = graph.root;
    if (!graph.nodes.empty())
        doc["register"] = graph.nodes.front().config.state.registerNames();
    auto& nodes = doc["nodes"] = nlohmann::ordered_json::array();
    for (size_t i = 0; i < graph.nodes.size(); ++i) {
        nlohmann::ordered_json n;
        n["id"] = i;
        n["process"] = printProcess(graph.nodes[i].config.process);
        auto& rows = n["state"] = nlohmann::ordered_json::array();
        const CMatrix& m = graph.nodes[i].config.state.matrix();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                row.push_back({m(r, c).real(), m(r, c).imag()});
            rows.push_back(std::move(row));
        }
        n["deadlocked"] = graph.nodes[i].edges.empty();
        nodes.push_back(std::move(n));
    }
    auto& edges = doc["edges"] = nlohmann::ordered_json::array();
    for (size_t i = 0; i < graph.nodes.size(); ++i) {
        for (const auto& edge : graph.nodes[i].edges) {
            nlohmann::ordered_json e;
            e["source"] = i;
            e["action"] = printAction(edge.action);
            auto& branches = e["branches"] = nlohmann::ordered_json::array();
            for (const auto& b : edge.branches)
                branches.push_back({{"probability", b.probability}, {"target", b.target}});
            edges.push_back(std::move(e));
        }
    }
    return doc.dump(2) + "\n";
}

std::string canonicalPltsText(const Plts& graph) {
    std::string out;
    out += "root 0\n";
    for (size_t i = 0; i < graph.nodes.size(); ++i) {
        out += "node " + std::to_string(i) + ": " +
               printProcess(graph.nodes[i].config.process) + " @ " +
               formatMatrix(graph.nodes[i].config.state.matrix()) + "\n";
    }
    for (size_t i = 0; i < graph.nodes.size(); ++i) {
        for (const auto& edge : graph.nodes[i].edges) {
            out += "edge " + std::to_string(i) + " --" + printAction(edge.action) + "--> {";
            for (size_t b = 0; b < edge.branches.size(); ++b) {
                if (b) out += ", ";
                out += formatReal(edge.branches[b].probability) + " @ " +
                       std::to_string(edge.branches[b].target);
            }
            out += "}\n";
        }
    }
    return out;
}

void validateAllStates(const Plts& graph, double tol) {
    for (const auto& node : graph.nodes) node.config.state.validate(tol);
}

}  // namespace qccs
