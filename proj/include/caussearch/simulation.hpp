#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "caussearch/dataset.hpp"
#include "caussearch/graph.hpp"
#include "caussearch/stats.hpp"

namespace caussearch {

/// DAG over X1..Xp: a random node order, then each forward pair joined
/// independently with probability expected_degree / (p - 1).
MixedGraph random_dag(int p, double expected_degree, std::uint64_t seed);

/// Linear-Gaussian structural equation model.
struct SemModel {
    MixedGraph dag;
    /// Keyed by (parent, child).
    std::map<std::pair<int, int>, double> coefficients;
    std::vector<double> noise_variances;
};

struct CoefficientRange {
    double low = 0.3;
    double high = 1.0;
};

/// Coefficients uniform on [-high, -low] U [low, high], unit noise variances.
SemModel random_sem(const MixedGraph& dag, std::uint64_t seed, CoefficientRange range = {});

/// n rows by ancestral sampling in topological order.
Dataset simulate(const SemModel& m, std::size_t n, std::uint64_t seed);

/// (I - B)^-1 Omega (I - B)^-T.
Eigen::MatrixXd population_covariance(const SemModel& m);

/// Edge list of the DAG followed by "# coefficient" and "# noise" comment lines.
std::string sem_model_to_string(const SemModel& m);

/// d-separation in a fixed DAG; p-value is 1 when separated, else 0.
class OracleTest final : public IndependenceTest {
public:
    explicit OracleTest(MixedGraph dag);
    TestResult decide(int x, int y, std::span<const int> z) const override;
    const std::vector<std::string>& variables() const override { return dag_.nodes(); }
    std::string name() const override { return "d-separation oracle"; }

private:
    MixedGraph dag_;
};

struct StructuralMetrics {
    /// Missing + extra adjacencies + shared adjacencies with different marks.
    int shd = 0;
    double adjacency_precision = 1.0;
    double adjacency_recall = 1.0;
    double adjacency_f1 = 1.0;
    /// Share of common adjacencies whose mark pairs agree.
    double orientation_accuracy = 1.0;
};

/// Empty ratios (0 / 0) count as 1; F1 is 0 when precision + recall is 0.
StructuralMetrics structural_metrics(const MixedGraph& estimate, const MixedGraph& truth);

} // namespace caussearch
