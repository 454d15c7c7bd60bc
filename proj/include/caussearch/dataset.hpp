#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace caussearch {

enum class VariableKind { Continuous, Discrete };

struct Variable {
    std::string name;
    VariableKind kind = VariableKind::Continuous;
    /// Level labels in index order; empty for continuous variables.
    std::vector<std::string> categories;

    bool is_discrete() const { return kind == VariableKind::Discrete; }

    friend bool operator==(const Variable&, const Variable&) = default;
};

/// Column-major table of continuous and discrete variables. Discrete cells
/// hold level indices (stored as doubles, always integral). Immutable once
/// built; every constructor path validates the table invariants.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<Variable> variables, std::vector<std::vector<double>> columns);

    std::size_t num_rows() const { return rows_; }
    std::size_t num_variables() const { return variables_.size(); }

    const std::vector<Variable>& variables() const { return variables_; }
    const Variable& variable(std::size_t j) const { return variables_.at(j); }
    const std::vector<double>& column(std::size_t j) const { return columns_.at(j); }
    int level(std::size_t row, std::size_t j) const { return static_cast<int>(columns_[j][row]); }

    std::vector<std::string> names() const;
    std::optional<std::size_t> index_of(const std::string& name) const;

    bool all_continuous() const;
    /// First discrete variable, if any.
    std::optional<std::size_t> first_discrete() const;

    /// Copy holding the given rows, in the given order.
    Dataset select_rows(const std::vector<std::size_t>& rows) const;

    /// Continuous columns as an n x p matrix. Throws for discrete data.
    Eigen::MatrixXd matrix() const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::vector<Variable> variables_;
    std::vector<std::vector<double>> columns_;
    std::size_t rows_ = 0;
};

struct LoadOptions {
    /// Field separator. A space means "any run of blanks or tabs".
    char delimiter = '\t';
    /// Per-column kind overrides; these always win over detection.
    std::map<std::string, VariableKind> schema;
    /// Integer-valued columns with at most this many distinct values are
    /// detected as discrete, as are columns with any non-numeric token.
    std::size_t discrete_threshold = 20;
};

Dataset load_tabular(const std::filesystem::path& path, const LoadOptions& options = {});
Dataset parse_tabular(std::istream& in, const LoadOptions& options = {});

/// Writes header plus rows; continuous values with round-trip precision,
/// discrete cells as their level labels.
void write_tabular(const Dataset& d, std::ostream& out, char delimiter = '\t');

/// n rows drawn uniformly with replacement.
Dataset resample(const Dataset& d, std::uint64_t seed);

struct Embedding {
    Dataset data;
    /// For each original variable, the embedded column indices it owns.
    std::vector<std::vector<int>> columns_of;
};

/// Replaces each discrete variable by indicator columns for all observed
/// levels but the last observed one (the reference). Indicators are named
/// "<name>#<label>".
Embedding one_hot_embed(const Dataset& d);

struct CovarianceModel {
    std::vector<std::string> names;
    Eigen::MatrixXd matrix;
    std::size_t sample_size = 0;
};

/// Unbiased (n - 1) sample covariance of an all-continuous dataset.
CovarianceModel covariance(const Dataset& d);

} // namespace caussearch
