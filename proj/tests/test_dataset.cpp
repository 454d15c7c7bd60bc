#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "caussearch/dataset.hpp"
#include "caussearch/error.hpp"
#include "support/oracles.hpp"

using namespace caussearch;

namespace {

Dataset parse(const std::string& text, LoadOptions opts = {}) {
    std::istringstream in(text);
    return parse_tabular(in, opts);
}

} // namespace

TEST(LoadTabular, TypesColumnsByRule) {
    auto d = parse("a\tb\n1.5\t0\n2.5\t1\n");
    ASSERT_EQ(d.num_variables(), 2u);
    EXPECT_FALSE(d.variable(0).is_discrete());
    EXPECT_TRUE(d.variable(1).is_discrete());
    EXPECT_EQ(d.variable(1).categories, (std::vector<std::string>{"0", "1"}));
}

TEST(LoadTabular, LevelsInFirstAppearanceOrder) {
    auto d = parse("g\n7\n3\n7\n5\n");
    EXPECT_EQ(d.variable(0).categories, (std::vector<std::string>{"7", "3", "5"}));
    EXPECT_EQ(d.level(1, 0), 1);
    auto labels = parse("c\tx\nred\t1.5\nblue\t2.5\nred\t0.5\n");
    EXPECT_TRUE(labels.variable(0).is_discrete());
    EXPECT_EQ(labels.variable(0).categories, (std::vector<std::string>{"red", "blue"}));
}

TEST(LoadTabular, ThresholdAndSchemaOverride) {
    std::string text = "v\n";
    for (int i = 0; i < 21; ++i) text += std::to_string(i) + "\n";
    EXPECT_FALSE(parse(text).variable(0).is_discrete());
    LoadOptions opts;
    opts.discrete_threshold = 21;
    EXPECT_TRUE(parse(text, opts).variable(0).is_discrete());
    LoadOptions force;
    force.schema["v"] = VariableKind::Continuous;
    auto small = parse("v\n0\n1\n", force);
    EXPECT_FALSE(small.variable(0).is_discrete());
}

TEST(LoadTabular, AirfoilShapedAllContinuous) {
    // Six whitespace-separated columns, all forced continuous.
    std::string text = "Frequency Attack Chord Velocity Displacement Pressure\n"
                       "800 0 0.3048 71.3 0.00266337 126.201\n"
                       "1000 0 0.3048 71.3 0.00266337 125.201\n"
                       "1250  0\t0.3048 71.3 0.00266337 125.951\n";
    LoadOptions opts;
    opts.delimiter = ' ';
    for (auto name : {"Frequency", "Attack", "Chord", "Velocity", "Displacement", "Pressure"})
        opts.schema[name] = VariableKind::Continuous;
    auto d = parse(text, opts);
    EXPECT_EQ(d.num_variables(), 6u);
    EXPECT_TRUE(d.all_continuous());
    EXPECT_DOUBLE_EQ(d.column(5)[2], 125.951);
}

TEST(LoadTabular, MixedElevenColumns) {
    std::string text = "age\tgender\theight\tweight\tsteps\thear_rate\tcalories\tdistance\tentropy\tdevice\tactivity\n";
    for (int i = 0; i < 30; ++i) {
        text += std::to_string(20 + i) + "\t" + std::to_string(i % 2) + "\t1.7\t" + std::to_string(60 + i * 0.5) +
                "\t" + std::to_string(1000.5 + i) + "\t80.1\t" + std::to_string(300.25 + i) + "\t2.5\t0.7\t" +
                std::to_string(i % 2) + "\t" + std::to_string(i % 6) + "\n";
    }
    LoadOptions opts;
    for (auto name : {"gender", "device", "activity"}) opts.schema[name] = VariableKind::Discrete;
    opts.schema["age"] = VariableKind::Continuous;
    auto d = parse(text, opts);
    EXPECT_EQ(d.num_variables(), 11u);
    EXPECT_TRUE(d.variable(1).is_discrete());
    EXPECT_TRUE(d.variable(9).is_discrete());
    EXPECT_EQ(d.variable(10).categories.size(), 6u);
    EXPECT_FALSE(d.variable(0).is_discrete());
}

TEST(LoadTabular, Errors) {
    EXPECT_THROW(parse("a\tb\n1\t2\n3\n"), DataError);
    EXPECT_THROW(parse("a\tb\n"), DataError);
    EXPECT_THROW(parse(""), DataError);
    EXPECT_THROW(parse("a\ta\n1\t2\n"), DataError);
    EXPECT_THROW(parse("a\tb\n1\tNA\n"), DataError);
    LoadOptions opts;
    opts.schema["a"] = VariableKind::Continuous;
    EXPECT_THROW(parse("a\nx\n", opts), DataError);
    opts.schema["zzz"] = VariableKind::Continuous;
    EXPECT_THROW(parse("a\n1\n", opts), DataError);
    EXPECT_THROW(load_tabular("/nonexistent/file.tsv"), DataError);
}

TEST(LoadTabular, SerializeRoundTrip) {
    auto d = oracle::gaussian_dataset(50, 3, 4);
    std::ostringstream out;
    write_tabular(d, out);
    EXPECT_EQ(parse(out.str()), d);
    auto mixed = parse("c\tx\nred\t1.25\nblue\t2.5\nred\t0.5\n");
    std::ostringstream out2;
    write_tabular(mixed, out2);
    EXPECT_EQ(out2.str(), "c\tx\nred\t1.25\nblue\t2.5\nred\t0.5\n");
}

TEST(Resample, Examples) {
    auto one = parse("a\tb\n1.5\t2.5\n");
    EXPECT_EQ(resample(one, 9), one);
    auto d = oracle::gaussian_dataset(100, 2, 1);
    EXPECT_EQ(resample(d, 5), resample(d, 5));
    EXPECT_NE(resample(d, 5), resample(d, 6));
    auto r = resample(d, 5);
    EXPECT_EQ(r.num_rows(), d.num_rows());
    std::multiset<std::pair<double, double>> rows;
    for (std::size_t i = 0; i < d.num_rows(); ++i) rows.insert({d.column(0)[i], d.column(1)[i]});
    for (std::size_t i = 0; i < r.num_rows(); ++i) EXPECT_TRUE(rows.count({r.column(0)[i], r.column(1)[i]}));
}

TEST(Resample, CoverageNearOneMinusInverseE) {
    const std::size_t n = 10000;
    std::vector<double> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<double>(i);
    Dataset d({{"id", VariableKind::Continuous, {}}}, {ids});
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto r = resample(d, seed);
        std::set<double> distinct(r.column(0).begin(), r.column(0).end());
        total += static_cast<double>(distinct.size()) / n;
    }
    EXPECT_NEAR(total / 20, 1.0 - std::exp(-1.0), 0.02);
}

TEST(OneHotEmbed, Examples) {
    auto cont = oracle::gaussian_dataset(10, 2, 0);
    auto e = one_hot_embed(cont);
    EXPECT_EQ(e.data, cont);
    EXPECT_EQ(e.columns_of, (std::vector<std::vector<int>>{{0}, {1}}));

    auto bin = parse("b\n0\n1\n1\n0\n");
    auto eb = one_hot_embed(bin);
    ASSERT_EQ(eb.data.num_variables(), 1u);
    EXPECT_EQ(eb.data.variable(0).name, "b#0");
    // Reference level is the last observed one ("1"), so the indicator is 1 - b.
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(eb.data.column(0)[i], bin.level(i, 0) == 0 ? 1.0 : 0.0);

    std::string text = "x\tt\n";
    std::vector<int> counts(3, 0);
    for (int i = 0; i < 100; ++i) {
        const int level = (i * 7) % 3;
        ++counts[static_cast<std::size_t>(level)];
        text += std::to_string(i) + ".5\t" + std::to_string(level) + "\n";
    }
    auto three = parse(text);
    auto e3 = one_hot_embed(three);
    ASSERT_EQ(e3.data.num_variables(), 3u);
    EXPECT_EQ(e3.columns_of[1].size(), 2u);
    for (std::size_t k = 0; k < 2; ++k) {
        double sum = 0.0;
        for (double v : e3.data.column(static_cast<std::size_t>(e3.columns_of[1][k]))) sum += v;
        const auto& label = three.variable(1).categories[k];
        EXPECT_EQ(sum, counts[static_cast<std::size_t>(std::stoi(label))]);
    }
    EXPECT_THROW(one_hot_embed(parse("c\n1\n1\n")), DataError);
}

TEST(OneHotEmbed, ColumnCountAndPartition) {
    auto d = parse("a\tb\tc\n1\tx\t0.5\n2\ty\t0.25\n3\tz\t0.75\n1\tx\t1.5\n");
    auto e = one_hot_embed(d);
    EXPECT_EQ(e.data.num_variables(), 2u + 2u + 1u);
    std::set<int> seen;
    for (const auto& cols : e.columns_of)
        for (int c : cols) EXPECT_TRUE(seen.insert(c).second);
    EXPECT_EQ(seen.size(), e.data.num_variables());
}

TEST(Covariance, Examples) {
    Dataset d({{"x", VariableKind::Continuous, {}}}, {{1.0, 2.0, 3.0}});
    EXPECT_DOUBLE_EQ(covariance(d).matrix(0, 0), 1.0);
    auto g = oracle::gaussian_dataset(20, 1, 3);
    Dataset dup({{"a", VariableKind::Continuous, {}}, {"b", VariableKind::Continuous, {}}}, {g.column(0), g.column(0)});
    auto c = covariance(dup);
    EXPECT_DOUBLE_EQ(c.matrix(0, 1), c.matrix(0, 0));
    EXPECT_THROW(covariance(parse("a\n1\n2\n")), IncompatibilityError);
    Dataset single({{"x", VariableKind::Continuous, {}}}, {{1.0}});
    EXPECT_THROW(covariance(single), DataError);
}

TEST(Covariance, MatchesTwoPassOracle) {
    auto d = oracle::gaussian_dataset(1000, 5, 11);
    auto c = covariance(d);
    auto o = oracle::two_pass_covariance(d);
    EXPECT_LT((c.matrix - o).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((c.matrix - c.matrix.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.matrix);
    EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-8);
    EXPECT_EQ(c.sample_size, 1000u);
}
