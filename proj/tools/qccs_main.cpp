// Command-line front end: parse models, render reachable graphs, replay and
// enumerate schedulers/strategies, and run the equivalence checks.

#include "qccs/equiv.hpp"
#include "qccs/parser.hpp"
#include "qccs/plts.hpp"
#include "qccs/sched.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

using namespace qccs;
using nlohmann::ordered_json;

namespace {

constexpr int kExitEquivalent = 0;
constexpr int kExitRefuted = 1;
constexpr int kExitInconclusive = 2;

std::string readFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void writeOutput(const std::string& outputPath, const std::string& content) {
    if (outputPath.empty() || outputPath == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(outputPath);
    if (!out) throw std::runtime_error("cannot write '" + outputPath + "'");
    out << content;
}

std::vector<std::string> classicalChannels(const Definitions& defs) {
    std::vector<std::string> out;
    for (const auto& [name, decl] : defs.channels)
        if (decl.kind == ChannelKind::Classical) out.push_back(name);
    return out;
}

Configuration selectConfig(const ModelFile& model, const std::string& name,
                           const std::string& path) {
    if (name.empty()) {
        if (model.configs.size() == 1)
            return {model.configs[0].second.process, model.configs[0].second.state};
        throw std::runtime_error("'" + path + "' declares " + std::to_string(model.configs.size()) +
                                 " configurations; pick one with --config or path:NAME");
    }
    const ConfigDecl* decl = model.findConfig(name);
    if (!decl) throw std::runtime_error("no configuration '" + name + "' in '" + path + "'");
    return {decl->process, decl->state};
}

struct Target {
    std::string path;
    std::string config;
};

Target parseTarget(const std::string& spec) {
    auto marker = spec.rfind(".qccs:");
    if (marker != std::string::npos)
        return {spec.substr(0, marker + 5), spec.substr(marker + 6)};
    return {spec, ""};
}

void mergeDefinitions(Definitions& base, const Definitions& extra) {
    if (base.registerNames != extra.registerNames)
        throw std::runtime_error("the two models declare different qubit registers");
    for (const auto& [name, decl] : extra.channels) {
        auto it = base.channels.find(name);
        if (it == base.channels.end()) {
            base.channels[name] = decl;
        } else if (it->second.kind != decl.kind || it->second.domain != decl.domain) {
            throw std::runtime_error("channel '" + name + "' is declared differently in the two models");
        }
    }
    for (const auto& [name, op] : extra.superOps) {
        auto it = base.superOps.find(name);
        if (it == base.superOps.end()) {
            base.superOps[name] = op;
            continue;
        }
        bool same = it->second.arity == op.arity && it->second.kraus.size() == op.kraus.size();
        for (size_t i = 0; same && i < op.kraus.size(); ++i)
            same = matrixEq(it->second.kraus[i], op.kraus[i]);
        if (!same)
            throw std::runtime_error("super-operator '" + name + "' is declared differently in the two models");
    }
    for (const auto& [name, m] : extra.measurements) {
        auto it = base.measurements.find(name);
        if (it == base.measurements.end()) {
            base.measurements[name] = m;
            continue;
        }
        bool same = it->second.arity == m.arity && it->second.branches.size() == m.branches.size();
        for (size_t i = 0; same && i < m.branches.size(); ++i)
            same = it->second.branches[i].outcome == m.branches[i].outcome &&
                   matrixEq(it->second.branches[i].projector, m.branches[i].projector);
        if (!same)
            throw std::runtime_error("measurement '" + name + "' is declared differently in the two models");
    }
    for (const auto& [name, def] : extra.constants) {
        auto it = base.constants.find(name);
        if (it == base.constants.end()) {
            base.constants[name] = def;
        } else if (!it->second.body.structurallyEqual(def.body) ||
                   it->second.quantumParams != def.quantumParams ||
                   it->second.classicalParams != def.classicalParams) {
            throw std::runtime_error("constant '" + name + "' is defined differently in the two models");
        }
    }
}

// ---------------------------------------------------------------------------

int cmdParse(const std::string& path) {
    try {
        ModelFile model = parseModel(readFile(path));
        std::cout << "ok: register of " << model.defs.registerNames.size() << " qubit(s), "
                  << model.defs.channels.size() << " channel(s), " << model.defs.superOps.size()
                  << " super-operator(s), " << model.defs.measurements.size()
                  << " measurement(s), " << model.defs.constants.size() << " definition(s), "
                  << model.configs.size() << " configuration(s)\n";
        if (model.configs.empty())
            std::cout << "warning: no configurations declared; nothing to analyze\n";
        for (const auto& [name, decl] : model.configs)
            std::cout << "  config " << name << " = " << printProcess(decl.process) << "\n";
        return 0;
    } catch (const ParseError& e) {
        std::cerr << path << ":" << e.span().line << ":" << e.span().column << ": error: "
                  << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << path << ": error: " << e.what() << "\n";
        return 1;
    }
}

int cmdLts(const std::string& path, const std::string& configName, const std::string& format,
           size_t maxNodes, const std::string& outputPath) {
    ModelFile model = parseModel(readFile(path));
    Configuration root = selectConfig(model, configName, path);
    Plts graph = buildPlts(root, model.defs, maxNodes);
    writeOutput(outputPath, format == "json" ? exportJson(graph) : exportDot(graph));
    return 0;
}

// An explicit --context always composes (even "nil"), so witnesses produced
// by the check command replay against the identical graph.
Plts buildContextGraph(const ModelFile& model, const std::string& configName,
                       const std::string& path, const std::string& contextText, size_t maxNodes) {
    Configuration base = selectConfig(model, configName, path);
    Configuration root = base;
    if (!contextText.empty()) {
        Process ctx = parseProcessText(contextText, model.defs);
        root = Configuration{Process::par(base.process, ctx), base.state};
        auto report = checkLegal(root.process, model.defs);
        if (!report.ok)
            throw std::runtime_error("context breaks legality: " + describeLegality(report));
    }
    return buildPlts(root, model.defs, maxNodes);
}

int cmdObserve(const std::string& path, const std::string& configName, const std::string& witness,
               bool enumerateFlag, const std::string& channel, const std::string& mode,
               const std::string& contextText, size_t maxNodes, uint64_t maxEnum,
               const std::string& format) {
    ModelFile model = parseModel(readFile(path));
    Plts graph = buildContextGraph(model, configName, path, contextText, maxNodes);
    std::vector<std::string> channels = classicalChannels(model.defs);
    if (!channel.empty()) channels = {channel};

    ordered_json doc;
    doc["schema_version"] = 1;
    doc["command"] = "observe";
    doc["config"] = configName;
    doc["context"] = contextText.empty() ? "nil" : contextText;

    if (!witness.empty()) {
        std::string text = readFile(witness);
        Scheduler s;
        if (text.find("mode: strategy") != std::string::npos) {
            StrategyContext ctx = buildStrategyContext(graph, model.defs);
            Strategy st = parseStrategyWitness(text, ctx);
            s = strategyToScheduler(st, ctx, graph);
        } else {
            s = parseSchedulerWitness(text, graph);
        }
        ObservationVector v = observationVector(graph, s, graph.root, channels);
        if (format == "text") {
            if (v.divergent) {
                std::cout << "tau-divergent under this witness: observation undefined\n";
            } else {
                for (size_t i = 0; i < channels.size(); ++i)
                    std::cout << channels[i] << " : " << formatReal(v.probabilities[i]) << "\n";
            }
        } else {
            doc["divergent"] = v.divergent;
            auto& rows = doc["observations"] = ordered_json::array();
            if (!v.divergent)
                for (size_t i = 0; i < channels.size(); ++i)
                    rows.push_back({{"channel", channels[i]}, {"probability", v.probabilities[i]}});
            std::cout << doc.dump(2) << "\n";
        }
        return 0;
    }

    if (!enumerateFlag) throw std::runtime_error("observe needs --witness FILE or --enumerate");

    // achievable (channel, probability) pairs over all schedulers/strategies
    std::map<std::string, std::set<std::string>> achievable;
    bool divergentPossible = false;
    auto record = [&](const ObservationVector& v) {
        if (v.divergent) {
            divergentPossible = true;
            return;
        }
        for (size_t i = 0; i < channels.size(); ++i)
            achievable[channels[i]].insert(formatReal(v.probabilities[i]));
    };
    if (mode == "strategies") {
        StrategyEnumerator en(graph, model.defs, maxEnum);
        Strategy st;
        while (en.next(st))
            record(observationVector(graph, strategyToScheduler(st, en.context(), graph),
                                     graph.root, channels));
    } else {
        SchedulerEnumerator en(graph, maxEnum);
        Scheduler s;
        while (en.next(s)) record(observationVector(graph, s, graph.root, channels));
    }

    if (format == "text") {
        for (const auto& [ch, probs] : achievable) {
            std::cout << ch << " :";
            for (const auto& p : probs) std::cout << " " << p;
            std::cout << "\n";
        }
        if (divergentPossible) std::cout << "(some witnesses are tau-divergent: undefined)\n";
    } else {
        doc["mode"] = mode;
        auto& rows = doc["achievable"] = ordered_json::array();
        for (const auto& [ch, probs] : achievable) {
            ordered_json row;
            row["channel"] = ch;
            auto& ps = row["probabilities"] = ordered_json::array();
            for (const auto& p : probs) ps.push_back(std::stod(p));
            rows.push_back(std::move(row));
        }
        doc["divergence_possible"] = divergentPossible;
        std::cout << doc.dump(2) << "\n";
    }
    return 0;
}

int cmdEnumerate(const std::string& path, const std::string& configName, const std::string& mode,
                 const std::string& contextText, size_t maxNodes, uint64_t maxEnum, uint64_t limit,
                 const std::string& format) {
    ModelFile model = parseModel(readFile(path));
    Plts graph = buildContextGraph(model, configName, path, contextText, maxNodes);
    std::vector<std::string> channels = classicalChannels(model.defs);

    struct Row {
        std::string table;
        ObservationVector vector;
    };
    std::vector<Row> rows;
    uint64_t total = 0;

    if (mode == "strategies") {
        StrategyEnumerator en(graph, model.defs, maxEnum);
        total = en.count();
        Strategy st;
        while (rows.size() < limit && en.next(st)) {
            Scheduler s = strategyToScheduler(st, en.context(), graph);
            rows.push_back({serializeStrategy(st, en.context()),
                            observationVector(graph, s, graph.root, channels)});
        }
    } else {
        SchedulerEnumerator en(graph, maxEnum);
        total = en.count();
        Scheduler s;
        while (rows.size() < limit && en.next(s))
            rows.push_back({serializeScheduler(s, graph),
                            observationVector(graph, s, graph.root, channels)});
    }

    if (format == "text") {
        std::cout << total << " " << mode << " total, showing " << rows.size() << "\n";
        for (size_t i = 0; i < rows.size(); ++i) {
            std::cout << "--- witness " << i << " ---\n" << rows[i].table;
            if (rows[i].vector.divergent) {
                std::cout << "observation: tau-divergent (undefined)\n";
            } else {
                std::cout << "observation:";
                for (size_t c = 0; c < channels.size(); ++c)
                    std::cout << " " << channels[c] << "=" << formatReal(rows[i].vector.probabilities[c]);
                std::cout << "\n";
            }
        }
    } else {
        ordered_json doc;
        doc["schema_version"] = 1;
        doc["command"] = "enumerate";
        doc["mode"] = mode;
        doc["total"] = total;
        auto& list = doc["witnesses"] = ordered_json::array();
        for (const auto& row : rows) {
            ordered_json w;
            w["table"] = row.table;
            w["divergent"] = row.vector.divergent;
            if (!row.vector.divergent) {
                auto& obs = w["observation"] = ordered_json::array();
                for (size_t c = 0; c < channels.size(); ++c)
                    obs.push_back({{"channel", channels[c]},
                                   {"probability", row.vector.probabilities[c]}});
            }
            list.push_back(std::move(w));
        }
        std::cout << doc.dump(2) << "\n";
    }
    return 0;
}

int cmdCheck(const std::string& leftSpec, const std::string& rightSpec,
             const std::string& relation, const std::string& contextsPath,
             const std::string& superopsPath, const std::string& candidatePath, size_t maxNodes,
             uint64_t maxEnum, double tolerance, const std::string& format) {
    Target leftTarget = parseTarget(leftSpec);
    Target rightTarget = parseTarget(rightSpec);

    ModelFile leftModel = parseModel(readFile(leftTarget.path));
    Definitions defs = leftModel.defs;
    Configuration left = selectConfig(leftModel, leftTarget.config, leftTarget.path);

    Configuration right = left;
    if (rightTarget.path == leftTarget.path) {
        right = selectConfig(leftModel, rightTarget.config, rightTarget.path);
    } else {
        ModelFile rightModel = parseModel(readFile(rightTarget.path));
        mergeDefinitions(defs, rightModel.defs);
        right = selectConfig(rightModel, rightTarget.config, rightTarget.path);
    }

    TestBasis basis;
    if (!contextsPath.empty()) {
        std::istringstream in(readFile(contextsPath));
        std::string line;
        while (std::getline(in, line)) {
            auto comment = line.find("//");
            if (comment != std::string::npos) line.erase(comment);
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            basis.contexts.push_back(parseProcessText(line, defs));
        }
    }
    if (!superopsPath.empty()) {
        ModelFile opsModel = parseModel(readFile(superopsPath));
        for (const auto& [name, op] : opsModel.defs.superOps) basis.superOps.push_back(op);
    }

    ordered_json doc;
    doc["schema_version"] = 1;
    doc["command"] = "check";
    doc["relation"] = relation;
    doc["left"] = {{"file", leftTarget.path}, {"config", leftTarget.config}};
    doc["right"] = {{"file", rightTarget.path}, {"config", rightTarget.config}};

    auto emit = [&](int exitCode) {
        if (format == "json") std::cout << doc.dump(2) << "\n";
        return exitCode;
    };

    if (relation == "openbisim") {
        if (!candidatePath.empty()) {
            // candidate lines: "<leftNode> <rightNode>" over the two graphs
            Plts g1 = buildPlts(left, defs, maxNodes);
            Plts g2 = buildPlts(right, defs, maxNodes);
            CandidateRelation r;
            std::istringstream in(readFile(candidatePath));
            std::string line;
            while (std::getline(in, line)) {
                auto hash = line.find('#');
                if (hash != std::string::npos) line.erase(hash);
                std::istringstream ls(line);
                int i = 0, j = 0;
                if (!(ls >> i >> j)) continue;
                if (i < 0 || static_cast<size_t>(i) >= g1.size() || j < 0 ||
                    static_cast<size_t>(j) >= g2.size())
                    throw std::runtime_error("candidate pair out of range: " + line);
                r.pairs.emplace_back(g1.node(i).config, g2.node(j).config);
            }
            auto result = verifyOpenBisim(r, basis, defs, maxNodes);
            doc["verdict"] = result.verified ? "verified" : "refuted";
            doc["reason"] = result.reason;
            if (format != "json") {
                std::cout << (result.verified
                                  ? "verified: the candidate relation is an open bisimulation "
                                    "relative to the basis\n"
                                  : "refuted: " + result.reason + "\n");
            }
            return emit(result.verified ? kExitEquivalent : kExitRefuted);
        }
        if (!basis.superOps.empty())
            throw std::runtime_error(
                "--superops requires --candidate: the fixpoint decision runs with the identity "
                "environment only");
        auto decision = decideOpenBisim(left, right, defs, maxNodes);
        doc["verdict"] = decision.related ? "related" : "refuted";
        doc["reason"] = decision.reason;
        doc["relation_size"] = decision.relation.pairs.size();
        if (format != "json")
            std::cout << (decision.related ? "related: " : "refuted: ") << decision.reason << "\n";
        return emit(decision.related ? kExitEquivalent : kExitRefuted);
    }

    EquivMode mode = relation == "oest" ? EquivMode::Strategies : EquivMode::Schedulers;
    ObsEquivOptions options;
    options.maxNodes = maxNodes;
    options.enumerationCap = maxEnum;
    options.tol = tolerance;
    EquivVerdict verdict = checkObsEquiv(left, right, basis, mode, defs, options);

    switch (verdict.result) {
        case EquivVerdict::Result::EquivalentOnInputs: {
            doc["verdict"] = "equivalent-on-inputs";
            doc["reason"] = verdict.reason;
            auto& contexts = doc["contexts"] = ordered_json::array();
            for (const auto& [ctx, vectors] : verdict.matched) {
                ordered_json entry;
                entry["context"] = ctx;
                auto& vs = entry["vectors"] = ordered_json::array();
                for (const auto& v : vectors) {
                    if (v.divergent) {
                        vs.push_back("divergent");
                        continue;
                    }
                    ordered_json vec = ordered_json::object();
                    for (size_t i = 0; i < verdict.channels.size(); ++i)
                        vec[verdict.channels[i]] = v.probabilities[i];
                    vs.push_back(std::move(vec));
                }
                contexts.push_back(std::move(entry));
            }
            if (format != "json") {
                std::cout << "equivalent-on-inputs: " << verdict.reason << "\n";
                for (const auto& [ctx, vectors] : verdict.matched)
                    std::cout << "  context " << ctx << ": " << vectors.size()
                              << " matched observation vector(s)\n";
            }
            return emit(kExitEquivalent);
        }
        case EquivVerdict::Result::Refuted: {
            doc["verdict"] = "refuted";
            doc["reason"] = verdict.reason;
            if (verdict.hasWitness) {
                ordered_json w;
                w["side"] = verdict.witnessSide == 0 ? "left" : "right";
                w["context"] = verdict.witnessContext;
                w["table"] = verdict.witnessTable;
                if (verdict.witnessVector.divergent) {
                    w["vector"] = "divergent";
                } else {
                    ordered_json vec = ordered_json::object();
                    for (size_t i = 0; i < verdict.channels.size(); ++i)
                        vec[verdict.channels[i]] = verdict.witnessVector.probabilities[i];
                    w["vector"] = std::move(vec);
                }
                if (!verdict.witnessChannel.empty()) {
                    w["channel"] = verdict.witnessChannel;
                    w["probability"] = verdict.witnessProbability;
                }
                doc["witness"] = std::move(w);
            }
            if (format != "json") {
                std::cout << "refuted: " << verdict.reason << "\n";
                if (verdict.hasWitness) {
                    std::cout << "witness on the " << (verdict.witnessSide == 0 ? "left" : "right")
                              << " side (context " << verdict.witnessContext << "):\n"
                              << verdict.witnessTable;
                    if (!verdict.witnessVector.divergent) {
                        std::cout << "observation:";
                        for (size_t i = 0; i < verdict.channels.size(); ++i)
                            std::cout << " " << verdict.channels[i] << "="
                                      << formatReal(verdict.witnessVector.probabilities[i]);
                        std::cout << "\n";
                    }
                    if (!verdict.witnessChannel.empty())
                        std::cout << "unmatched on channel " << verdict.witnessChannel << " with p="
                                  << formatReal(verdict.witnessProbability) << "\n";
                }
            }
            return emit(kExitRefuted);
        }
        case EquivVerdict::Result::Inconclusive: break;
    }
    doc["verdict"] = "inconclusive";
    doc["reason"] = verdict.reason;
    if (format != "json") std::cout << "inconclusive: " << verdict.reason << "\n";
    return emit(kExitInconclusive);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qCCS workbench: density-matrix process semantics, scheduler and strategy "
                 "enumeration, and observational-equivalence checking"};
    app.require_subcommand(1);

    std::string file, config, format = "text", output, context, witness, channel;
    std::string mode = "schedulers";
    size_t maxNodes = kDefaultMaxNodes;
    uint64_t maxEnum = kDefaultEnumerationCap;
    uint64_t limit = 64;
    bool enumerateFlag = false;

    auto* parse = app.add_subcommand("parse", "parse a model file and report diagnostics");
    parse->add_option("file", file, "model file (.qccs)")->required();

    auto* lts = app.add_subcommand("lts", "build and render the reachable transition graph");
    lts->add_option("file", file)->required();
    lts->add_option("--config", config, "configuration name");
    std::string ltsFormat = "dot";
    lts->add_option("--format", ltsFormat, "dot|json")->check(CLI::IsMember({"dot", "json"}));
    lts->add_option("--max-nodes", maxNodes)->check(CLI::PositiveNumber);
    lts->add_option("-o,--output", output, "output path (default stdout)");

    auto* observe = app.add_subcommand("observe", "channel-use probabilities under a witness, or "
                                                  "the achievable set over all witnesses");
    observe->add_option("file", file)->required();
    observe->add_option("--config", config);
    observe->add_option("--witness", witness, "witness table to replay");
    observe->add_flag("--enumerate", enumerateFlag, "aggregate over all schedulers/strategies");
    observe->add_option("--channel", channel, "restrict to one classical channel");
    observe->add_option("--mode", mode)->check(CLI::IsMember({"schedulers", "strategies"}));
    observe->add_option("--context", context, "parallel context process (default nil)");
    observe->add_option("--max-nodes", maxNodes)->check(CLI::PositiveNumber);
    observe->add_option("--max-enum", maxEnum)->check(CLI::PositiveNumber);
    observe->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    auto* enumerate = app.add_subcommand("enumerate", "list schedulers or strategies as witness "
                                                      "tables with their observations");
    enumerate->add_option("file", file)->required();
    enumerate->add_option("--config", config);
    enumerate->add_option("--mode", mode)->check(CLI::IsMember({"schedulers", "strategies"}));
    enumerate->add_option("--context", context);
    enumerate->add_option("--limit", limit, "maximum witnesses to print")->check(CLI::PositiveNumber);
    enumerate->add_option("--max-nodes", maxNodes)->check(CLI::PositiveNumber);
    enumerate->add_option("--max-enum", maxEnum)->check(CLI::PositiveNumber);
    enumerate->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    auto* check = app.add_subcommand("check", "decide or refute an equivalence between two "
                                              "configurations");
    std::string leftSpec, rightSpec, relation = "oe", contextsPath, superopsPath, candidatePath;
    double tolerance = kMatrixTol;
    check->add_option("left", leftSpec, "FILE.qccs:CONFIG")->required();
    check->add_option("right", rightSpec, "FILE.qccs:CONFIG")->required();
    check->add_option("--relation", relation, "oe|oest|openbisim")
        ->check(CLI::IsMember({"oe", "oest", "openbisim"}));
    check->add_option("--contexts", contextsPath, "file with one context process per line");
    check->add_option("--superops", superopsPath, "model file whose super-operators form the "
                                                  "environment basis (openbisim + --candidate)");
    check->add_option("--candidate", candidatePath, "relation file: one 'leftNode rightNode' pair "
                                                    "per line (verifies instead of deciding)");
    check->add_option("--max-nodes", maxNodes)->check(CLI::PositiveNumber);
    check->add_option("--max-enum", maxEnum)->check(CLI::PositiveNumber);
    check->add_option("--tolerance", tolerance)->check(CLI::Range(1e-15, 1e-3));
    check->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (parse->parsed()) return cmdParse(file);
        if (lts->parsed()) return cmdLts(file, config, ltsFormat, maxNodes, output);
        if (observe->parsed())
            return cmdObserve(file, config, witness, enumerateFlag, channel, mode, context,
                              maxNodes, maxEnum, format);
        if (enumerate->parsed())
            return cmdEnumerate(file, config, mode, context, maxNodes, maxEnum, limit, format);
        if (check->parsed())
            return cmdCheck(leftSpec, rightSpec, relation, contextsPath, superopsPath,
                            candidatePath, maxNodes, maxEnum, tolerance, format);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInconclusive;
    } catch (const EnumerationCapError& e) {
        std::cerr << "inconclusive: " << e.what() << "\n";
        return kExitInconclusive;
    } catch (const StateSpaceLimitError& e) {
        std::cerr << "inconclusive: " << e.what() << "\n";
        return kExitInconclusive;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInconclusive;
    }
    return 0;
}
