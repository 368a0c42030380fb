#include "testutil.hpp"

#include <json.hpp>

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sys/wait.h>

namespace {

struct RunResult {
    int exitCode = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(QCCS_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::string out;
    size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string models(const std::string& name) { return qccs::test::modelPath(name); }

std::string tmpFile(const std::string& name, const std::string& content) {
    std::string path = std::string(QCCS_BINARY_DIR) + "/" + name;
    std::ofstream out(path);
    REQUIRE(out.good());
    out << content;
    return path;
}

}  // namespace

TEST_CASE("parse reports declarations and exits cleanly") {
    auto r = run("parse " + models("measurement_vs_dephasing.qccs"));
    CHECK(r.exitCode == 0);
    CHECK(r.output.find("ok:") != std::string::npos);
    CHECK(r.output.find("config C") != std::string::npos);
}

TEST_CASE("parse rejects an illegal configuration with exit code 1") {
    std::string bad = tmpFile("bad_legality.qccs", R"(
register q;
qchan qc;
superop E(1) = { [1, 0, 0, 0], [0, 0, 0, 1] };
config Bad = ( qc!q.E[q], |0> );
)");
    auto r = run("parse " + bad);
    CHECK(r.exitCode == 1);
    CHECK(r.output.find("legality condition 1") != std::string::npos);
}

TEST_CASE("parse warns about files without configurations") {
    std::string empty = tmpFile("empty.qccs", "// nothing here\n");
    auto r = run("parse " + empty);
    CHECK(r.exitCode == 0);
    CHECK(r.output.find("no configurations") != std::string::npos);
}

TEST_CASE("lts renders deterministic DOT and JSON") {
    std::string args = "lts " + models("measurement_vs_dephasing.qccs") + " --config C";
    auto first = run(args);
    auto second = run(args);
    CHECK(first.exitCode == 0);
    CHECK(first.output == second.output);  // byte-identical reports
    CHECK(first.output.find("digraph plts") != std::string::npos);
    CHECK(first.output.find("tau") != std::string::npos);

    auto json = run(args + " --format json");
    CHECK(json.exitCode == 0);
    auto doc = nlohmann::json::parse(json.output);
    CHECK(doc["schema_version"] == 1);
    CHECK(doc["nodes"].size() == 5);
    CHECK(doc["root"] == 0);
}

TEST_CASE("lts fails on unknown configurations and tight node budgets") {
    CHECK(run("lts " + models("measurement_vs_dephasing.qccs") + " --config Nope").exitCode != 0);
    CHECK(run("lts " + models("measurement_vs_dephasing.qccs") + " --config C --max-nodes 2")
              .exitCode == 2);
}

TEST_CASE("observe enumerates the achievable channel probabilities") {
    auto r = run("observe " + models("measurement_vs_dephasing.qccs") + " --config C --enumerate");
    CHECK(r.exitCode == 0);
    CHECK(r.output.find("c : 0 0.5 1") != std::string::npos);
    CHECK(r.output.find("d : 0 0.5 1") != std::string::npos);

    auto strat = run("observe " + models("measurement_vs_dephasing.qccs") +
                     " --config C --enumerate --mode strategies");
    CHECK(strat.exitCode == 0);
    CHECK(strat.output.find("c : 0 1") != std::string::npos);
}

TEST_CASE("enumerate prints replayable witness tables") {
    auto r = run("enumerate " + models("measurement_vs_dephasing.qccs") +
                 " --config C --limit 2");
    CHECK(r.exitCode == 0);
    CHECK(r.output.find("4 schedulers total, showing 2") != std::string::npos);
    CHECK(r.output.find("qccs-witness v1") != std::string::npos);
}

TEST_CASE("check separates the pairs with the documented exit codes") {
    std::string m1 = models("measurement_vs_dephasing.qccs");
    std::string m2 = models("measurement_sum.qccs");
    std::string m3 = models("conditional_correction.qccs");
    std::string m4 = models("restriction_choice.qccs");

    CHECK(run("check " + m1 + ":C " + m1 + ":D --relation oe").exitCode == 1);
    CHECK(run("check " + m1 + ":C " + m1 + ":D --relation oest").exitCode == 0);
    CHECK(run("check " + m2 + ":C " + m2 + ":D --relation oe").exitCode == 0);
    CHECK(run("check " + m2 + ":C " + m2 + ":D --relation oest").exitCode == 1);
    CHECK(run("check " + m3 + ":C " + m3 + ":D --relation openbisim").exitCode == 0);
    CHECK(run("check " + m1 + ":C " + m1 + ":D --relation openbisim").exitCode == 1);
    CHECK(run("check " + m4 + ":P " + m4 + ":Q --relation oe").exitCode == 0);
    CHECK(run("check " + m4 + ":Pr " + m4 + ":Qr --relation oe").exitCode == 1);

    // enumeration cap: inconclusive, distinct from both outcomes
    CHECK(run("check " + m1 + ":C " + m1 + ":D --relation oe --max-enum 1").exitCode == 2);
}

TEST_CASE("refutation witnesses replay through observe --witness") {
    std::string m1 = models("measurement_vs_dephasing.qccs");
    auto r = run("check " + m1 + ":C " + m1 + ":D --relation oe --format json");
    CHECK(r.exitCode == 1);
    auto doc = nlohmann::json::parse(r.output);
    REQUIRE(doc["verdict"] == "refuted");
    REQUIRE(doc.contains("witness"));
    CHECK(doc["witness"]["side"] == "left");
    double pc = doc["witness"]["vector"]["c"].get<double>();
    double pd = doc["witness"]["vector"]["d"].get<double>();

    std::string table = doc["witness"]["table"].get<std::string>();
    std::string witnessPath = tmpFile("witness_oe.txt", table);
    std::string context = doc["witness"]["context"].get<std::string>();

    auto replay = run("observe " + m1 + " --config C --witness " + witnessPath + " --context '" +
                      context + "' --format json");
    CHECK(replay.exitCode == 0);
    auto rep = nlohmann::json::parse(replay.output);
    REQUIRE(rep["divergent"] == false);
    for (const auto& row : rep["observations"]) {
        if (row["channel"] == "c") CHECK(row["probability"].get<double>() == doctest::Approx(pc));
        if (row["channel"] == "d") CHECK(row["probability"].get<double>() == doctest::Approx(pd));
    }
}

TEST_CASE("strategy witnesses replay through observe --witness") {
    std::string m2 = models("measurement_sum.qccs");
    auto r = run("check " + m2 + ":C " + m2 + ":D --relation oest --format json");
    CHECK(r.exitCode == 1);
    auto doc = nlohmann::json::parse(r.output);
    REQUIRE(doc["verdict"] == "refuted");
    REQUIRE(doc["witness"]["side"] == "right");
    std::string table = doc["witness"]["table"].get<std::string>();
    CHECK(table.find("mode: strategy") != std::string::npos);

    std::string witnessPath = tmpFile("witness_oest.txt", table);
    auto replay = run("observe " + m2 + " --config D --witness " + witnessPath +
                      " --context nil --format json");
    CHECK(replay.exitCode == 0);
    auto rep = nlohmann::json::parse(replay.output);
    REQUIRE(rep["divergent"] == false);
    for (const auto& row : rep["observations"])
        CHECK(row["probability"].get<double>() == doctest::Approx(0.5));
}

TEST_CASE("check reports are byte-identical across runs") {
    std::string m1 = models("measurement_vs_dephasing.qccs");
    std::string args = "check " + m1 + ":C " + m1 + ":D --relation oe --format json";
    auto first = run(args);
    auto second = run(args);
    CHECK(first.exitCode == 1);
    CHECK(first.output == second.output);
}

TEST_CASE("candidate relations are verified through the CLI") {
    std::string m3 = models("conditional_correction.qccs");
    // node ids follow the deterministic BFS order of the two graphs
    std::string good = tmpFile("candidate_good.txt",
                               "0 0\n1 0\n2 0\n3 1\n4 1\n5 2\n");
    std::string bad = tmpFile("candidate_bad.txt", "0 0\n");
    CHECK(run("check " + m3 + ":C " + m3 + ":D --relation openbisim --candidate " + good)
              .exitCode == 0);
    CHECK(run("check " + m3 + ":C " + m3 + ":D --relation openbisim --candidate " + bad)
              .exitCode == 1);

    // the fixpoint decision only runs with the identity environment
    std::string ops = tmpFile("ops.qccs", "superop X(1) = { [0, 1, 1, 0] };\n");
    CHECK(run("check " + m3 + ":C " + m3 + ":D --relation openbisim --superops " + ops)
              .exitCode == 2);
}

TEST_CASE("check accepts context process files") {
    std::string m1 = models("measurement_vs_dephasing.qccs");
    std::string ctx = tmpFile("contexts.txt", "nil\nd!1\n");
    auto r = run("check " + m1 + ":C " + m1 + ":D --relation oest --contexts " + ctx +
                 " --format json");
    CHECK(r.exitCode == 0);
    auto doc = nlohmann::json::parse(r.output);
    CHECK(doc["verdict"] == "equivalent-on-inputs");
    CHECK(doc["contexts"].size() == 2);
}
