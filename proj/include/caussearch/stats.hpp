#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "caussearch/dataset.hpp"

namespace caussearch {

struct TestResult {
    bool independent = false;
    /// Absent for tests that do not produce one (score-based, oracle).
    std::optional<double> p_value;
    double strength = 0.0;
};

/// Conditional-independence test over variable indices. Implementations are
/// symmetric in x and y and deterministic for fixed data.
class IndependenceTest {
public:
    virtual ~IndependenceTest() = default;
    virtual TestResult decide(int x, int y, std::span<const int> z) const = 0;
    virtual const std::vector<std::string>& variables() const = 0;
    virtual std::string name() const = 0;
};

/// Decomposable local score; larger is better.
class Score {
public:
    virtual ~Score() = default;
    virtual double local(int y, std::span<const int> parents) const = 0;
    virtual const std::vector<std::string>& variables() const = 0;
    virtual std::string name() const = 0;
    virtual bool accepts_discrete() const = 0;

    /// Sum of local scores of `parents_of` (one parent list per node).
    double total(const std::vector<std::vector<int>>& parents_of) const;
};

/// Memo of local scores keyed by (y, sorted parents). Thread-safe.
class ScoreCache {
public:
    double get_or_compute(int y, std::span<const int> parents, const std::function<double(int, std::span<const int>)>& f);

private:
    std::mutex mutex_;
    std::map<std::pair<int, std::vector<int>>, double> values_;
};

inline constexpr double kRssFloor = 1e-30;

/// Residual variance (divisor n) of column `y` regressed with intercept on
/// `parents`, computed from an (n - 1)-normalised covariance matrix. Throws
/// DataError naming the collinear columns on a rank-deficient design.
/// Exact fits collapse to kRssFloor / n.
double residual_variance(const Eigen::MatrixXd& cov, std::size_t n, int y, std::span<const int> parents,
                         const std::vector<std::string>& names);

/// Partial correlation of x and y given z via the inverse of the correlation
/// submatrix over {x, y} + z.
double partial_correlation(const Eigen::MatrixXd& cov, int x, int y, std::span<const int> z,
                           const std::vector<std::string>& names);

class FisherZTest final : public IndependenceTest {
public:
    FisherZTest(CovarianceModel cov, double alpha);
    /// Covariance of `d`; throws IncompatibilityError on discrete columns.
    FisherZTest(const Dataset& d, double alpha);

    TestResult decide(int x, int y, std::span<const int> z) const override;
    const std::vector<std::string>& variables() const override { return cov_.names; }
    std::string name() const override { return "Fisher Z"; }

    double alpha() const { return alpha_; }
    double partial_correlation(int x, int y, std::span<const int> z) const;

private:
    CovarianceModel cov_;
    double alpha_;
};

/// Linear-Gaussian BIC: -n ln(RSS/n) - c (|Pa| + 1) ln n.
class SemBicScore final : public Score {
public:
    SemBicScore(const Dataset& d, double penalty_discount);

    double local(int y, std::span<const int> parents) const override;
    const std::vector<std::string>& variables() const override { return cov_.names; }
    std::string name() const override { return "SEM BIC"; }
    bool accepts_discrete() const override { return false; }

private:
    CovarianceModel cov_;
    double penalty_;
    mutable ScoreCache cache_;
};

/// Mixed-data BIC over the one-hot embedding: each embedded column of y is
/// regressed on the embedded columns of the parents.
class DegenerateGaussianScore final : public Score {
public:
    DegenerateGaussianScore(const Dataset& d, double penalty_discount);

    double local(int y, std::span<const int> parents) const override;
    const std::vector<std::string>& variables() const override { return names_; }
    std::string name() const override { return "Degenerate Gaussian"; }
    bool accepts_discrete() const override { return true; }

private:
    std::vector<std::string> names_;
    std::vector<std::vector<int>> columns_of_;
    CovarianceModel embedded_cov_;
    double penalty_;
    mutable ScoreCache cache_;
};

/// Wraps a caller-provided local-score function; memoised per instance.
class CallbackScore final : public Score {
public:
    using Function = std::function<double(int, const std::vector<int>&)>;
    CallbackScore(std::vector<std::string> variables, Function f, std::string label = "Custom score");

    double local(int y, std::span<const int> parents) const override;
    const std::vector<std::string>& variables() const override { return names_; }
    std::string name() const override { return label_; }
    bool accepts_discrete() const override { return true; }

private:
    std::vector<std::string> names_;
    Function f_;
    std::string label_;
    mutable ScoreCache cache_;
};

/// Independence from score differences: x and y are independent given z iff
/// adding either to the other's parent set z lowers the score.
class ScoreBasedTest final : public IndependenceTest {
public:
    explicit ScoreBasedTest(std::shared_ptr<const Score> score);

    TestResult decide(int x, int y, std::span<const int> z) const override;
    const std::vector<std::string>& variables() const override { return score_->variables(); }
    std::string name() const override { return "Score test (" + score_->name() + ")"; }
    const Score& score() const { return *score_; }

private:
    std::shared_ptr<const Score> score_;
};

} // namespace caussearch
