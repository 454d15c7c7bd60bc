#include "caussearch/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "caussearch/error.hpp"
#include "caussearch/graph_io.hpp"
#include "caussearch/random.hpp"

namespace caussearch {

MixedGraph random_dag(int p, double expected_degree, std::uint64_t seed) {
    if (p < 1) throw ConfigError("random_dag needs at least one node (got " + std::to_string(p) + ")");
    if (!(expected_degree >= 0.0) || (p > 1 && expected_degree > p - 1) || (p == 1 && expected_degree > 0.0))
        throw ConfigError("expected degree must lie in [0, p - 1]");
    std::vector<std::string> names;
    for (int i = 1; i <= p; ++i) names.push_back("X" + std::to_string(i));
    MixedGraph g(names);
    if (p == 1) return g;
    Rng rng(seed);
    std::vector<int> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::bernoulli_distribution coin(expected_degree / (p - 1));
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            if (coin(rng)) g.add_directed(order[i], order[j]);
        }
    }
    return g;
}

SemModel random_sem(const MixedGraph& dag, std::uint64_t seed, CoefficientRange range) {
    if (!is_dag(dag)) throw NotADagError("random_sem needs a DAG");
    if (!(range.low > 0.0 && range.low <= range.high))
        throw ConfigError("coefficient range must satisfy 0 < low <= high");
    SemModel m{dag, {}, std::vector<double>(static_cast<std::size_t>(dag.num_nodes()), 1.0)};
    Rng rng(seed);
    std::uniform_real_distribution<double> magnitude(range.low, range.high);
    std::bernoulli_distribution negative(0.5);
    for (const auto& e : dag.edges()) {
        const bool forward = e.at_b == Endpoint::Arrow;
        const double mag = magnitude(rng);
        m.coefficients[forward ? std::pair{e.a, e.b} : std::pair{e.b, e.a}] = negative(rng) ? -mag : mag;
    }
    return m;
}

Dataset simulate(const SemModel& m, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw ConfigError("simulate needs at least one row");
    auto order = topological_order(m.dag);
    if (!order) throw NotADagError("simulate needs a DAG");
    const auto p = static_cast<std::size_t>(m.dag.num_nodes());
    if (m.noise_variances.size() != p) throw ConfigError("one noise variance per node is required");
    std::vector<std::vector<double>> columns(p, std::vector<double>(n, 0.0));
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int v : *order) {
        const auto vi = static_cast<std::size_t>(v);
        if (!(m.noise_variances[vi] > 0.0)) throw ConfigError("noise variances must be positive");
        const double sd = std::sqrt(m.noise_variances[vi]);
        auto& col = columns[vi];
        for (std::size_t r = 0; r < n; ++r) col[r] = sd * normal(rng);
        for (int parent : m.dag.parents(v)) {
            const double b = m.coefficients.at({parent, v});
            const auto& pc = columns[static_cast<std::size_t>(parent)];
            for (std::size_t r = 0; r < n; ++r) col[r] += b * pc[r];
        }
    }
    std::vector<Variable> vars;
    for (const auto& name : m.dag.nodes()) vars.push_back(Variable{name, VariableKind::Continuous, {}});
    return Dataset(std::move(vars), std::move(columns));
}

Eigen::MatrixXd population_covariance(const SemModel& m) {
    const auto p = static_cast<Eigen::Index>(m.dag.num_nodes());
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(p, p);
    for (const auto& [edge, coef] : m.coefficients) b(edge.second, edge.first) = coef;
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) omega(i, i) = m.noise_variances[static_cast<std::size_t>(i)];
    const Eigen::MatrixXd a = (Eigen::MatrixXd::Identity(p, p) - b).inverse();
    return a * omega * a.transpose();
}

std::string sem_model_to_string(const SemModel& m) {
    std::string out = to_edge_list_string(m.dag);
    char buf[64];
    for (const auto& [edge, coef] : m.coefficients) {
        std::snprintf(buf, sizeof buf, "%.17g", coef);
        out += "# coefficient " + m.dag.name(edge.first) + " --> " + m.dag.name(edge.second) + " " + buf + "\n";
    }
    for (int v = 0; v < m.dag.num_nodes(); ++v) {
        std::snprintf(buf, sizeof buf, "%.17g", m.noise_variances[static_cast<std::size_t>(v)]);
        out += "# noise " + m.dag.name(v) + " " + buf + "\n";
    }
    return out;
}

OracleTest::OracleTest(MixedGraph dag) : dag_(std::move(dag)) {
    if (!is_dag(dag_)) throw NotADagError("the oracle test needs a DAG");
}

TestResult OracleTest::decide(int x, int y, std::span<const int> z) const {
    const int p = dag_.num_nodes();
    auto check = [p](int v) {
        if (v < 0 || v >= p) throw ConfigError("oracle test: unknown node index " + std::to_string(v));
    };
    check(x);
    check(y);
    for (int v : z) check(v);
    const bool sep = d_separated(dag_, x, y, std::vector<int>(z.begin(), z.end()));
    return {sep, sep ? 1.0 : 0.0, sep ? 0.0 : 1.0};
}

StructuralMetrics structural_metrics(const MixedGraph& estimate, const MixedGraph& truth) {
    if (estimate.nodes() != truth.nodes()) throw ConfigError("structural_metrics: graphs have different node sets");
    int both = 0;
    int est_only = 0;
    int truth_only = 0;
    int same_marks = 0;
    const int p = truth.num_nodes();
    for (int a = 0; a < p; ++a) {
        for (int b = a + 1; b < p; ++b) {
            const bool in_est = estimate.adjacent(a, b);
            const bool in_truth = truth.adjacent(a, b);
            if (in_est && in_truth) {
                ++both;
                if (estimate.mark(a, b) == truth.mark(a, b) && estimate.mark(b, a) == truth.mark(b, a)) ++same_marks;
            } else if (in_est) {
                ++est_only;
            } else if (in_truth) {
                ++truth_only;
            }
        }
    }
    StructuralMetrics m;
    m.shd = est_only + truth_only + (both - same_marks);
    m.adjacency_precision = both + est_only == 0 ? 1.0 : static_cast<double>(both) / (both + est_only);
    m.adjacency_recall = both + truth_only == 0 ? 1.0 : static_cast<double>(both) / (both + truth_only);
    const double sum = m.adjacency_precision + m.adjacency_recall;
    m.adjacency_f1 = sum == 0.0 ? 0.0 : 2.0 * m.adjacency_precision * m.adjacency_recall / sum;
    m.orientation_accuracy = both == 0 ? 1.0 : static_cast<double>(same_marks) / both;
    return m;
}

} // namespace caussearch
