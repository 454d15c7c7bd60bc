#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "caussearch/cli.hpp"
#include "caussearch/error.hpp"
#include "caussearch/graph_io.hpp"

using namespace caussearch;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome cli(const std::vector<std::string>& args, const std::string& stdin_text = "") {
    std::istringstream in(stdin_text);
    std::ostringstream out, err;
    const int code = run_cli(args, in, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("caussearch_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        ::unsetenv("CAUSSEARCH_SEED");
    }
    void TearDown() override {
        ::unsetenv("CAUSSEARCH_SEED");
        fs::remove_all(dir_);
    }
    fs::path path(const std::string& name) const { return dir_ / name; }
    std::string simulated(int p = 5, int n = 500, int seed = 1) {
        const auto data = path("data.tsv");
        auto r = cli({"simulate", "--p", std::to_string(p), "--degree", "2", "--n", std::to_string(n), "--seed",
                      std::to_string(seed), "--out", data.string()});
        EXPECT_EQ(r.code, 0) << r.err;
        return data.string();
    }

    fs::path dir_;
};

} // namespace

TEST_F(Cli, HelpAndUsageErrors) {
    EXPECT_EQ(cli({"--help"}).code, 0);
    EXPECT_NE(cli({"--help"}).out.find("search"), std::string::npos);
    EXPECT_EQ(cli({}).code, 2);
    EXPECT_EQ(cli({"dance"}).code, 2);
    EXPECT_EQ(cli({"simulate", "--p", "3"}).code, 2);
    EXPECT_EQ(cli({"search", "--algorithm", "fges"}).code, 2);
    EXPECT_EQ(cli({"search", "--data", "x.tsv"}).code, 2);
}

TEST_F(Cli, SimulateIsReproducibleAndWritesTruth) {
    const auto a = path("a.tsv"), b = path("b.tsv"), g = path("g.txt");
    ASSERT_EQ(cli({"simulate", "--p", "6", "--degree", "2", "--n", "100", "--seed", "4", "--out", a.string(), "--graph-out",
                   g.string()})
                  .code,
              0);
    ASSERT_EQ(cli({"simulate", "--p", "6", "--degree", "2", "--n", "100", "--seed", "4", "--out", b.string()}).code, 0);
    EXPECT_EQ(slurp(a), slurp(b));
    auto truth = parse_edge_list(slurp(g));
    EXPECT_EQ(truth.num_nodes(), 6);
    EXPECT_TRUE(is_dag(truth));
    auto c = cli({"simulate", "--p", "6", "--degree", "2", "--n", "100", "--seed", "5"});
    EXPECT_NE(c.out, slurp(a));
    EXPECT_EQ(cli({"simulate", "--p", "0", "--degree", "0", "--n", "10"}).code, 2);
    EXPECT_EQ(cli({"simulate", "--p", "3", "--degree", "1", "--n", "0"}).code, 2);
}

TEST_F(Cli, SearchAllAlgorithms) {
    const auto data = simulated(6, 2000);
    for (const std::string alg : {"pc", "fges", "grasp", "fci"}) {
        auto r = cli({"search", "--data", data, "--algorithm", alg, "--penalty", "2"});
        ASSERT_EQ(r.code, 0) << alg << ": " << r.err;
        EXPECT_EQ(parse_edge_list(r.out).num_nodes(), 6);
        EXPECT_EQ(cli({"search", "--data", data, "--algorithm", alg, "--penalty", "2"}).out, r.out);
    }
    auto dot = cli({"search", "--data", data, "--algorithm", "fges", "--format", "dot"});
    EXPECT_EQ(dot.out.rfind("digraph g {", 0), 0u);
}

TEST_F(Cli, ExitCodes) {
    const auto data = simulated();
    EXPECT_EQ(cli({"search", "--data", path("missing.tsv").string(), "--algorithm", "pc"}).code, 3);
    EXPECT_EQ(cli({"search", "--data", data, "--algorithm", "magic"}).code, 2);
    EXPECT_EQ(cli({"search", "--data", data, "--algorithm", "pc", "--alpha", "1.5"}).code, 2);
    EXPECT_EQ(cli({"search", "--data", data, "--algorithm", "pc", "--format", "svg"}).code, 2);
    EXPECT_EQ(cli({"bootstrap", "--data", data, "--algorithm", "fges", "--reps", "0"}).code, 2);
    EXPECT_EQ(cli({"bootstrap", "--data", data, "--algorithm", "fges"}).code, 2);

    const auto mixed = path("mixed.tsv");
    spit(mixed, "x\tg\ty\n0.1\ta\t1.2\n0.4\tb\t0.3\n1.5\ta\t2.2\n-0.3\tb\t0.1\n");
    auto fz = cli({"search", "--data", mixed.string(), "--algorithm", "pc"});
    EXPECT_EQ(fz.code, 4);
    EXPECT_NE(fz.err.find("column 'g'"), std::string::npos);
    EXPECT_EQ(cli({"search", "--data", mixed.string(), "--algorithm", "fges"}).code, 4);
    EXPECT_EQ(cli({"search", "--data", mixed.string(), "--algorithm", "fges", "--score", "degenerate_gaussian"}).code, 0);

    const auto ragged = path("ragged.tsv");
    spit(ragged, "a\tb\n1\t2\n3\n");
    EXPECT_EQ(cli({"search", "--data", ragged.string(), "--algorithm", "pc"}).code, 3);

    auto pag = cli({"convert", "--to", "lavaan"}, "Graph Nodes:\nA,B\n\nGraph Edges:\n1. A o-> B\n");
    EXPECT_EQ(pag.code, 4);
}

TEST_F(Cli, NoFilesWrittenOnFailure) {
    const auto out = path("out.txt"), graph = path("graph.dot");
    auto r = cli({"bootstrap", "--data", path("missing.tsv").string(), "--algorithm", "fges", "--reps", "3", "--out",
                  out.string(), "--graph-out", graph.string()});
    EXPECT_EQ(r.code, 3);
    auto c = cli({"convert", "--to", "lavaan", "--out", out.string()}, "Graph Nodes:\nA,B\n\nGraph Edges:\n1. A <-> B\n");
    EXPECT_EQ(c.code, 4);
    EXPECT_EQ(cli({"simulate", "--p", "0", "--degree", "0", "--n", "5", "--out", out.string()}).code, 2);
    EXPECT_TRUE(fs::is_empty(dir_));
}

TEST_F(Cli, BootstrapWritesTableAndLabeledGraph) {
    const auto data = simulated(5, 800);
    const auto table = path("table.tsv"), graph = path("graph.dot");
    auto r = cli({"bootstrap", "--data", data, "--algorithm", "fges", "--reps", "10", "--seed", "3", "--out",
                  table.string(), "--graph-out", graph.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(table).rfind("pair\t-->\t<--", 0), 0u);
    EXPECT_NE(slurp(graph).find("label=\""), std::string::npos);
    auto again = cli({"bootstrap", "--data", data, "--algorithm", "fges", "--reps", "10", "--seed", "3", "--threads", "1"});
    ASSERT_EQ(again.code, 0);
    EXPECT_EQ(again.out, slurp(table) + slurp(graph));
}

TEST_F(Cli, ConfigFileAndPriorities) {
    simulated(5, 600);
    const auto cfg = path("run.json");
    spit(cfg, R"({
        "data": "data.tsv",
        "algorithm": "grasp",
        "score": {"name": "sem_bic", "penalty_discount": 2},
        "seed": 11,
        "knowledge": {"tiers": [["X1", "X2"], ["X3", "X4", "X5"]], "forbidden": [["X3", "X4"]]}
    })");
    auto from_cfg = cli({"search", "--config", cfg.string()});
    ASSERT_EQ(from_cfg.code, 0) << from_cfg.err;
    auto g = parse_edge_list(from_cfg.out);
    for (int later : {2, 3, 4})
        for (int earlier : {0, 1}) EXPECT_FALSE(g.is_directed(later, earlier));

    auto flagged = cli({"search", "--config", cfg.string(), "--algorithm", "fges"});
    ASSERT_EQ(flagged.code, 0);

    spit(path("bad.json"), R"({"data": "data.tsv", "algorithm": "pc", "colour": "red"})");
    EXPECT_EQ(cli({"search", "--config", path("bad.json").string()}).code, 2);
    spit(path("broken.json"), "{");
    EXPECT_EQ(cli({"search", "--config", path("broken.json").string()}).code, 2);
    EXPECT_EQ(cli({"search", "--config", path("absent.json").string()}).code, 2);
}

TEST_F(Cli, SeedPriority) {
    const auto data = simulated(5, 600);
    auto boot = [&](std::vector<std::string> extra) {
        std::vector<std::string> args{"bootstrap", "--data", data, "--algorithm", "fges", "--reps", "4", "--format", "edges"};
        args.insert(args.end(), extra.begin(), extra.end());
        auto r = cli(args);
        EXPECT_EQ(r.code, 0) << r.err;
        return r.out;
    };
    const auto seed7 = boot({"--seed", "7"});
    const auto seed8 = boot({"--seed", "8"});
    ASSERT_NE(seed7, seed8);
    ::setenv("CAUSSEARCH_SEED", "7", 1);
    EXPECT_EQ(boot({}), seed7);
    EXPECT_EQ(boot({"--seed", "8"}), seed8);
    spit(path("seed.json"), R"({"seed": 8})");
    EXPECT_EQ(boot({"--config", path("seed.json").string()}), seed8);
    ::setenv("CAUSSEARCH_SEED", "seven", 1);
    EXPECT_EQ(cli({"simulate", "--p", "3", "--degree", "1", "--n", "5"}).code, 2);
}

TEST_F(Cli, ConvertRoundTrip) {
    const std::string edges = "Graph Nodes:\nA,B,C\n\nGraph Edges:\n1. A --> B\n2. B o-> C\n";
    auto pcalg = cli({"convert", "--to", "pcalg"}, edges);
    ASSERT_EQ(pcalg.code, 0) << pcalg.err;
    spit(path("g.pcalg"), pcalg.out);
    auto back = cli({"convert", "--in", path("g.pcalg").string(), "--from", "pcalg", "--to", "edges"});
    ASSERT_EQ(back.code, 0) << back.err;
    EXPECT_EQ(back.out, edges);
    EXPECT_EQ(cli({"convert", "--to", "dot"}, edges).code, 0);
    EXPECT_EQ(cli({"convert", "--to", "edges"}, "Graph Nodes:\nA\n\nGraph Edges:\n1. A --> Q\n").code, 3);
    EXPECT_EQ(cli({"convert", "--from", "json", "--to", "edges"}, edges).code, 2);
}

TEST(RunSpecParsing, FieldsAndPaths) {
    auto s = parse_run_spec(R"({"data": "d.csv", "delimiter": "comma", "test": {"name": "fisher_z", "alpha": 0.05},
                                "reps": 30, "format": "pcalg", "schema": {"g": "discrete"},
                                "knowledge": {"tiers": {"2": ["C"], "1": ["A", "B"]}, "forbidden_within": ["1"],
                                              "required": [["A", "C"]]}})",
                            "/cfg");
    EXPECT_EQ(*s.data, fs::path("/cfg/d.csv"));
    EXPECT_EQ(s.load.delimiter, ',');
    EXPECT_EQ(*s.test, "fisher_z");
    EXPECT_EQ(*s.alpha, 0.05);
    EXPECT_EQ(*s.reps, 30);
    EXPECT_EQ(*s.format, OutputFormat::Pcalg);
    EXPECT_EQ(s.load.schema.at("g"), VariableKind::Discrete);
    EXPECT_EQ(s.knowledge.tiers(), (std::vector<std::vector<std::string>>{{"A", "B"}, {"C"}}));
    EXPECT_TRUE(s.knowledge.tier_forbidden_within(0));
    EXPECT_TRUE(s.knowledge.is_required("A", "C"));
    EXPECT_EQ(*parse_run_spec(R"({"data": "/abs/d.tsv"})", "/cfg").data, fs::path("/abs/d.tsv"));
    EXPECT_THROW(parse_run_spec("[]"), ConfigError);
    EXPECT_THROW(parse_run_spec(R"({"alpha": "high"})"), ConfigError);
    EXPECT_THROW(parse_run_spec(R"({"knowledge": {"tiers": {"one": ["A"]}}})"), ConfigError);
    EXPECT_THROW(parse_run_spec(R"({"knowledge": {"banned": []}})"), ConfigError);

    RunSpec flags;
    flags.alpha = 0.2;
    auto merged = merge(s, flags);
    EXPECT_EQ(*merged.alpha, 0.2);
    EXPECT_EQ(*merged.reps, 30);
    EXPECT_EQ(merged.knowledge, s.knowledge);
}
