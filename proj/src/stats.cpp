#include "caussearch/stats.hpp"

#include <algorithm>
#include <cmath>

#include "caussearch/error.hpp"

namespace caussearch {

namespace {

constexpr double kCollinearTolerance = 1e-10;
constexpr double kExactFitTolerance = 1e-14;

std::string join_names(std::span<const int> cols, std::size_t upto, const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < upto; ++i) {
        if (i) out += ", ";
        out += names.at(static_cast<std::size_t>(cols[i]));
    }
    return out;
}

/// Cholesky factor of `a` (rows/cols correspond to `cols`). A pivot that
/// vanishes relative to its diagonal entry marks that column as a linear
/// function of the earlier ones (or of the intercept when constant).
Eigen::MatrixXd checked_cholesky(const Eigen::MatrixXd& a, std::span<const int> cols,
                                 const std::vector<std::string>& names) {
    const auto m = a.rows();
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m, m);
    for (long k = 0; k < m; ++k) {
        double d = a(k, k) - l.row(k).head(k).squaredNorm();
        if (!(d > kCollinearTolerance * a(k, k)) || a(k, k) <= 0.0) {
            const auto& name = names.at(static_cast<std::size_t>(cols[static_cast<std::size_t>(k)]));
            if (k == 0 || a(k, k) <= 0.0)
                throw DataError("rank-deficient design: column '" + name + "' is constant");
            throw DataError("rank-deficient design: column '" + name + "' is collinear with {" +
                            join_names(cols, static_cast<std::size_t>(k), names) + "}");
        }
        l(k, k) = std::sqrt(d);
        for (long i = k + 1; i < m; ++i) {
            l(i, k) = (a(i, k) - l.row(i).head(k).dot(l.row(k).head(k))) / l(k, k);
        }
    }
    return l;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& s, std::span<const int> idx) {
    const auto m = static_cast<long>(idx.size());
    Eigen::MatrixXd out(m, m);
    for (long i = 0; i < m; ++i) {
        for (long j = 0; j < m; ++j) out(i, j) = s(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    return out;
}

std::vector<int> sorted_copy(std::span<const int> v) {
    std::vector<int> out(v.begin(), v.end());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

double Score::total(const std::vector<std::vector<int>>& parents_of) const {
    double sum = 0.0;
    for (std::size_t y = 0; y < parents_of.size(); ++y) sum += local(static_cast<int>(y), parents_of[y]);
    return sum;
}

double ScoreCache::get_or_compute(int y, std::span<const int> parents,
                                  const std::function<double(int, std::span<const int>)>& f) {
    std::pair<int, std::vector<int>> key{y, sorted_copy(parents)};
    {
        std::lock_guard lock(mutex_);
        if (auto it = values_.find(key); it != values_.end()) return it->second;
    }
    double value = f(y, key.second);
    std::lock_guard lock(mutex_);
    values_.emplace(std::move(key), value);
    return value;
}

double residual_variance(const Eigen::MatrixXd& cov, std::size_t n, int y, std::span<const int> parents,
                         const std::vector<std::string>& names) {
    const double syy = cov(y, y);
    const double scale = static_cast<double>(n - 1) / static_cast<double>(n);
    double residual = syy;
    if (!parents.empty()) {
        Eigen::MatrixXd l = checked_cholesky(submatrix(cov, parents), parents, names);
        Eigen::VectorXd sxy(static_cast<long>(parents.size()));
        for (std::size_t i = 0; i < parents.size(); ++i) sxy(static_cast<long>(i)) = cov(parents[i], y);
        Eigen::VectorXd w = l.triangularView<Eigen::Lower>().solve(sxy);
        residual = syy - w.squaredNorm();
    }
    if (!(residual > kExactFitTolerance * syy)) return kRssFloor / static_cast<double>(n);
    return residual * scale;
}

double partial_correlation(const Eigen::MatrixXd& cov, int x, int y, std::span<const int> z,
                           const std::vector<std::string>& names) {
    // Canonical index order makes the result exactly symmetric in x and y.
    std::vector<int> idx{std::min(x, y), std::max(x, y)};
    idx.insert(idx.end(), z.begin(), z.end());
    std::sort(idx.begin() + 2, idx.end());
    Eigen::MatrixXd s = submatrix(cov, idx);
    Eigen::VectorXd sd = s.diagonal().cwiseMax(0.0).cwiseSqrt();
    for (long i = 0; i < sd.size(); ++i) {
        if (sd(i) == 0.0)
            throw DataError("variable '" + names.at(static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])) +
                            "' is constant; partial correlation undefined");
    }
    Eigen::MatrixXd r = sd.asDiagonal().inverse() * s * sd.asDiagonal().inverse();
    Eigen::MatrixXd l;
    try {
        l = checked_cholesky(r, idx, names);
    } catch (const DataError&) {
        throw DataError("singular correlation matrix over {" + join_names(idx, idx.size(), names) +
                        "}: the set is collinear");
    }
    Eigen::MatrixXd precision = Eigen::LLT<Eigen::MatrixXd>(r).solve(Eigen::MatrixXd::Identity(r.rows(), r.cols()));
    double pc = -precision(0, 1) / std::sqrt(precision(0, 0) * precision(1, 1));
    return std::clamp(pc, -1.0, 1.0);
}

FisherZTest::FisherZTest(CovarianceModel cov, double alpha) : cov_(std::move(cov)), alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
}

FisherZTest::FisherZTest(const Dataset& d, double alpha)
    : FisherZTest(
          [&] {
              if (auto j = d.first_discrete())
                  throw IncompatibilityError("Fisher Z requires continuous data, but column '" +
                                             d.variable(*j).name + "' is discrete");
              return covariance(d);
          }(),
          alpha) {}

double FisherZTest::partial_correlation(int x, int y, std::span<const int> z) const {
    return caussearch::partial_correlation(cov_.matrix, x, y, z, cov_.names);
}

TestResult FisherZTest::decide(int x, int y, std::span<const int> z) const {
    const double dof = static_cast<double>(cov_.sample_size) - static_cast<double>(z.size()) - 3.0;
    if (dof <= 0.0)
        throw DataError("Fisher Z needs n - |Z| - 3 > 0 (n = " + std::to_string(cov_.sample_size) +
                        ", |Z| = " + std::to_string(z.size()) + ")");
    const double r = partial_correlation(x, y, z);
    double p = 0.0;
    if (std::abs(r) < 1.0) {
        const double stat = std::sqrt(dof) * 0.5 * std::log((1.0 + r) / (1.0 - r));
        p = std::erfc(std::abs(stat) / std::sqrt(2.0));
    }
    p = std::clamp(p, 0.0, 1.0);
    return {p > alpha_, p, p};
}

SemBicScore::SemBicScore(const Dataset& d, double penalty_discount) : penalty_(penalty_discount) {
    if (!(penalty_discount > 0.0)) throw ConfigError("penalty discount must be positive");
    if (auto j = d.first_discrete())
        throw IncompatibilityError("SEM BIC requires continuous data, but column '" + d.variable(*j).name +
                                   "' is discrete");
    cov_ = covariance(d);
}

double SemBicScore::local(int y, std::span<const int> parents) const {
    return cache_.get_or_compute(y, parents, [this](int node, std::span<const int> pa) {
        const auto n = cov_.sample_size;
        if (n <= pa.size() + 1)
            throw DataError("SEM BIC needs n > |Pa| + 1 (n = " + std::to_string(n) + ")");
        const double rv = residual_variance(cov_.matrix, n, node, pa, cov_.names);
        const double nd = static_cast<double>(n);
        return -nd * std::log(rv) - penalty_ * static_cast<double>(pa.size() + 1) * std::log(nd);
    });
}

DegenerateGaussianScore::DegenerateGaussianScore(const Dataset& d, double penalty_discount)
    : names_(d.names()), penalty_(penalty_discount) {
    if (!(penalty_discount > 0.0)) throw ConfigError("penalty discount must be positive");
    auto embedding = one_hot_embed(d);
    columns_of_ = std::move(embedding.columns_of);
    embedded_cov_ = covariance(embedding.data);
}

double DegenerateGaussianScore::local(int y, std::span<const int> parents) const {
    return cache_.get_or_compute(y, parents, [this](int node, std::span<const int> pa) {
        const auto n = embedded_cov_.sample_size;
        std::vector<int> design;
        for (int v : pa) {
            const auto& cols = columns_of_.at(static_cast<std::size_t>(v));
            design.insert(design.end(), cols.begin(), cols.end());
        }
        std::sort(design.begin(), design.end());
        if (n <= design.size() + 1)
            throw DataError("Degenerate Gaussian needs n > |E(Pa)| + 1 (n = " + std::to_string(n) + ")");
        const auto& targets = columns_of_.at(static_cast<std::size_t>(node));
        const double nd = static_cast<double>(n);
        double fit = 0.0;
        for (int e : targets) fit += -nd * std::log(residual_variance(embedded_cov_.matrix, n, e, design, embedded_cov_.names));
        return fit - penalty_ * static_cast<double>(targets.size()) * static_cast<double>(design.size() + 1) *
                         std::log(nd);
    });
}

CallbackScore::CallbackScore(std::vector<std::string> variables, Function f, std::string label)
    : names_(std::move(variables)), f_(std::move(f)), label_(std::move(label)) {
    if (!f_) throw ConfigError("custom score callback is empty");
}

double CallbackScore::local(int y, std::span<const int> parents) const {
    return cache_.get_or_compute(y, parents, [this](int node, std::span<const int> pa) {
        return f_(node, std::vector<int>(pa.begin(), pa.end()));
    });
}

ScoreBasedTest::ScoreBasedTest(std::shared_ptr<const Score> score) : score_(std::move(score)) {
    if (!score_) throw ConfigError("score-based test needs a score");
}

TestResult ScoreBasedTest::decide(int x, int y, std::span<const int> z) const {
    auto gain = [&](int target, int added) {
        std::vector<int> with(z.begin(), z.end());
        with.push_back(added);
        return score_->local(target, with) - score_->local(target, z);
    };
    const double dy = gain(y, x);
    const double dx = gain(x, y);
    const bool independent = dy < 0.0 && dx < 0.0;
    return {independent, std::nullopt, std::max(dx, dy)};
}

} // namespace caussearch
