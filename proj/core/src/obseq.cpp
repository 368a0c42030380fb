#include "qccs/equiv.hpp"

#include "qccs/parser.hpp"

#include <algorithm>
#include <cmath>

namespace qccs {

namespace {

struct VectorEntry {
    ObservationVector vector;
    std::string table;  // replayable witness
};

std::vector<VectorEntry> achievableVectors(const Plts& graph, EquivMode mode,
                                           const Definitions& defs,
                                           const std::vector<std::string>& channels,
                                           uint64_t cap, double tol) {
    std::vector<VectorEntry> out;
    auto record = [&](const ObservationVector& v, std::string table) {
        for (const auto& e : out)
            if (e.vector.equals(v, tol)) return;
        out.push_back({v, std::move(table)});
    };

    if (mode == EquivMode::Schedulers) {
        SchedulerEnumerator en(graph, cap);
        Scheduler s;
        while (en.next(s)) {
            ObservationVector v = observationVector(graph, s, graph.root, channels);
            record(v, serializeScheduler(s, graph));
        }
    } else {
        StrategyEnumerator en(graph, defs, cap);
        Strategy st;
        while (en.next(st)) {
            Scheduler s = strategyToScheduler(st, en.context(), graph);
            ObservationVector v = observationVector(graph, s, graph.root, channels);
            record(v, serializeStrategy(st, en.context()));
        }
    }
    return out;
}

/// A channel on which the vector differs from every vector of the other side,
/// when a single such channel exists.
std::string distinguishingChannel(const ObservationVector& v,
                                  const std::vector<VectorEntry>& others,
                                  const std::vector<std::string>& channels, double tol,
                                  double* probabilityOut) {
    if (v.divergent) return {};
    for (size_t c = 0; c < channels.size(); ++c) {
        bool distinguishes = true;
        for (const auto& other : others) {
            if (other.vector.divergent) continue;
            if (std::abs(other.vector.probabilities[c] - v.probabilities[c]) <= tol) {
                distinguishes = false;
                break;
            }
        }
        if (distinguishes) {
            *probabilityOut = v.probabilities[c];
            return channels[c];
        }
    }
    return {};
}

}  // namespace

EquivVerdict checkObsEquiv(const Configuration& c1, const Configuration& c2,
                           const TestBasis& basis, EquivMode mode, const Definitions& defs,
                           const ObsEquivOptions& options) {
    EquivVerdict verdict;
    for (const auto& [name, decl] : defs.channels)
        if (decl.kind == ChannelKind::Classical) verdict.channels.push_back(name);

    auto qv1 = c1.process.qv(defs);
    auto qv2 = c2.process.qv(defs);
    if (qv1 != qv2) {
        verdict.result = EquivVerdict::Result::Refuted;
        verdict.reason = "free quantum variables differ";
        return verdict;
    }
    std::vector<std::string> traced(qv1.begin(), qv1.end());
    if (!matrixEq(partialTrace(c1.state, traced).matrix, partialTrace(c2.state, traced).matrix,
                  options.tol)) {
        verdict.result = EquivVerdict::Result::Refuted;
        verdict.reason = "environment states (partial trace over the free quantum variables) differ";
        return verdict;
    }

    std::vector<Process> contexts = basis.contexts;
    if (contexts.empty()) contexts.push_back(Process::nil());

    for (const auto& context : contexts) {
        Configuration left{Process::par(c1.process, context), c1.state};
        Configuration right{Process::par(c2.process, context), c2.state};
        auto leftReport = checkLegal(left.process, defs);
        if (!leftReport.ok)
            throw SemanticsError("context breaks legality: " + describeLegality(leftReport));
        auto rightReport = checkLegal(right.process, defs);
        if (!rightReport.ok)
            throw SemanticsError("context breaks legality: " + describeLegality(rightReport));

        std::string contextText = printProcess(context);
        try {
            Plts g1 = buildPlts(left, defs, options.maxNodes);
            Plts g2 = buildPlts(right, defs, options.maxNodes);

            auto side1 = achievableVectors(g1, mode, defs, verdict.channels,
                                           options.enumerationCap, options.tol);
            auto side2 = achievableVectors(g2, mode, defs, verdict.channels,
                                           options.enumerationCap, options.tol);

            auto findUnmatched = [&](const std::vector<VectorEntry>& mine,
                                     const std::vector<VectorEntry>& theirs) -> const VectorEntry* {
                for (const auto& e : mine) {
                    bool matched = false;
                    for (const auto& o : theirs)
                        if (o.vector.equals(e.vector, options.tol)) {
                            matched = true;
                            break;
                        }
                    if (!matched) return &e;
                }
                return nullptr;
            };

            const VectorEntry* gap1 = findUnmatched(side1, side2);
            const VectorEntry* gap2 = gap1 ? nullptr : findUnmatched(side2, side1);
            if (gap1 || gap2) {
                const VectorEntry* gap = gap1 ? gap1 : gap2;
                verdict.result = EquivVerdict::Result::Refuted;
                verdict.hasWitness = true;
                verdict.witnessSide = gap1 ? 0 : 1;
                verdict.witnessContext = contextText;
                verdict.witnessTable = gap->table;
                verdict.witnessVector = gap->vector;
                verdict.witnessChannel = distinguishingChannel(
                    gap->vector, gap1 ? side2 : side1, verdict.channels, options.tol,
                    &verdict.witnessProbability);
                verdict.reason =
                    std::string(mode == EquivMode::Schedulers ? "a scheduler" : "a strategy") +
                    " on the " + (gap1 ? "first" : "second") +
                    " configuration has no matching counterpart (context " + contextText + ")";
                return verdict;
            }

            std::vector<ObservationVector> vectors;
            vectors.reserve(side1.size());
            for (const auto& e : side1) vectors.push_back(e.vector);
            verdict.matched.emplace_back(contextText, std::move(vectors));
        } catch (const EnumerationCapError& e) {
            verdict.result = EquivVerdict::Result::Inconclusive;
            verdict.reason = std::string(e.what()) + " (context " + contextText + ")";
            return verdict;
        } catch (const StateSpaceLimitError& e) {
            verdict.result = EquivVerdict::Result::Inconclusive;
            verdict.reason = std::string(e.what()) + " (context " + contextText + ")";
            return verdict;
        }
    }

    verdict.result = EquivVerdict::Result::EquivalentOnInputs;
    verdict.reason = "achievable observation vectors coincide on every supplied context";
    return verdict;
}

}  // namespace qccs
