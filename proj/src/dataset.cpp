#include "caussearch/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

#include "caussearch/error.hpp"
#include "caussearch/random.hpp"

namespace caussearch {

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    if (delimiter == ' ') {
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) fields.push_back(tok);
        return fields;
    }
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(delimiter, start);
        fields.push_back(line.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return fields;
}

bool is_missing(const std::string& tok) {
    return tok.empty() || tok == "NA" || tok == "NaN" || tok == "nan" || tok == "?" || tok == "*";
}

bool is_integer_token(const std::string& tok) {
    std::size_t i = (tok[0] == '+' || tok[0] == '-') ? 1 : 0;
    if (i == tok.size()) return false;
    return std::all_of(tok.begin() + static_cast<long>(i), tok.end(),
                       [](char c) { return c >= '0' && c <= '9'; });
}

std::optional<double> parse_real(const std::string& tok) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (first != last && *first == '+') ++first;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::string trim_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

} // namespace

Dataset::Dataset(std::vector<Variable> variables, std::vector<std::vector<double>> columns)
    : variables_(std::move(variables)), columns_(std::move(columns)) {
    if (variables_.size() != columns_.size())
        throw DataError("dataset has " + std::to_string(variables_.size()) + " variables but " +
                        std::to_string(columns_.size()) + " columns");
    rows_ = columns_.empty() ? 0 : columns_.front().size();
    std::set<std::string> seen;
    for (std::size_t j = 0; j < variables_.size(); ++j) {
        const auto& v = variables_[j];
        if (v.name.empty()) throw DataError("variable " + std::to_string(j) + " has an empty name");
        if (!seen.insert(v.name).second) throw DataError("duplicate variable name '" + v.name + "'");
        if (columns_[j].size() != rows_)
            throw DataError("column '" + v.name + "' has " + std::to_string(columns_[j].size()) +
                            " rows, expected " + std::to_string(rows_));
        if (v.is_discrete()) {
            if (v.categories.empty()) throw DataError("discrete variable '" + v.name + "' has no levels");
            std::set<std::string> labels(v.categories.begin(), v.categories.end());
            if (labels.size() != v.categories.size())
                throw DataError("discrete variable '" + v.name + "' has duplicate level labels");
            const auto m = static_cast<double>(v.categories.size());
            for (double x : columns_[j]) {
                if (x < 0 || x >= m || x != std::floor(x))
                    throw DataError("discrete variable '" + v.name + "' has an invalid level index");
            }
        } else {
            if (!v.categories.empty())
                throw DataError("continuous variable '" + v.name + "' cannot carry levels");
            for (double x : columns_[j]) {
                if (!std::isfinite(x)) throw DataError("continuous variable '" + v.name + "' has a non-finite value");
            }
        }
    }
}

std::vector<std::string> Dataset::names() const {
    std::vector<std::string> out;
    out.reserve(variables_.size());
    for (const auto& v : variables_) out.push_back(v.name);
    return out;
}

std::optional<std::size_t> Dataset::index_of(const std::string& name) const {
    for (std::size_t j = 0; j < variables_.size(); ++j) {
        if (variables_[j].name == name) return j;
    }
    return std::nullopt;
}

bool Dataset::all_continuous() const { return !first_discrete().has_value(); }

std::optional<std::size_t> Dataset::first_discrete() const {
    for (std::size_t j = 0; j < variables_.size(); ++j) {
        if (variables_[j].is_discrete()) return j;
    }
    return std::nullopt;
}

Dataset Dataset::select_rows(const std::vector<std::size_t>& rows) const {
    std::vector<std::vector<double>> cols(columns_.size());
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        cols[j].reserve(rows.size());
        for (auto r : rows) cols[j].push_back(columns_[j].at(r));
    }
    return Dataset(variables_, std::move(cols));
}

Eigen::MatrixXd Dataset::matrix() const {
    if (auto j = first_discrete())
        throw DataError("variable '" + variables_[*j].name + "' is discrete; a continuous matrix was requested");
    Eigen::MatrixXd m(rows_, variables_.size());
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        for (std::size_t i = 0; i < rows_; ++i) m(static_cast<long>(i), static_cast<long>(j)) = columns_[j][i];
    }
    return m;
}

Dataset parse_tabular(std::istream& in, const LoadOptions& options) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim_cr(line);
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        header = split_line(line, options.delimiter);
        break;
    }
    if (header.empty()) throw DataError("input has no header row");
    {
        std::set<std::string> seen;
        for (const auto& h : header) {
            if (h.empty()) throw DataError("empty column name in header");
            if (!seen.insert(h).second) throw DataError("duplicate column name '" + h + "'");
        }
    }
    for (const auto& [name, kind] : options.schema) {
        if (std::find(header.begin(), header.end(), name) == header.end())
            throw DataError("schema names unknown column '" + name + "'");
    }

    const std::size_t p = header.size();
    std::vector<std::vector<std::string>> tokens(p);
    while (std::getline(in, line)) {
        ++line_no;
        line = trim_cr(line);
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        auto fields = split_line(line, options.delimiter);
        if (fields.size() != p)
            throw DataError("line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                            " fields, expected " + std::to_string(p));
        for (std::size_t j = 0; j < p; ++j) {
            if (is_missing(fields[j]))
                throw DataError("missing value in column '" + header[j] + "' at line " + std::to_string(line_no));
            tokens[j].push_back(std::move(fields[j]));
        }
    }
    if (tokens[0].empty()) throw DataError("input has a header but no data rows");

    std::vector<Variable> vars;
    std::vector<std::vector<double>> cols;
    for (std::size_t j = 0; j < p; ++j) {
        const auto& col = tokens[j];
        VariableKind kind;
        if (auto it = options.schema.find(header[j]); it != options.schema.end()) {
            kind = it->second;
        } else {
            const bool numeric = std::all_of(col.begin(), col.end(), [](const std::string& t) { return parse_real(t).has_value(); });
            const bool integral = std::all_of(col.begin(), col.end(), is_integer_token);
            const std::size_t distinct = integral ? std::set<std::string>(col.begin(), col.end()).size() : 0;
            kind = !numeric || (integral && distinct <= options.discrete_threshold) ? VariableKind::Discrete
                                                                                    : VariableKind::Continuous;
        }
        Variable v{header[j], kind, {}};
        std::vector<double> values;
        values.reserve(col.size());
        if (kind == VariableKind::Discrete) {
            std::unordered_map<std::string, int> index;
            for (const auto& tok : col) {
                auto [it, inserted] = index.emplace(tok, static_cast<int>(v.categories.size()));
                if (inserted) v.categories.push_back(tok);
                values.push_back(it->second);
            }
        } else {
            for (std::size_t i = 0; i < col.size(); ++i) {
                auto x = parse_real(col[i]);
                if (!x)
                    throw DataError("non-numeric token '" + col[i] + "' in continuous column '" + header[j] +
                                    "' (data row " + std::to_string(i + 1) + ")");
                values.push_back(*x);
            }
        }
        vars.push_back(std::move(v));
        cols.push_back(std::move(values));
    }
    return Dataset(std::move(vars), std::move(cols));
}

Dataset load_tabular(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file '" + path.string() + "'");
    return parse_tabular(in, options);
}

void write_tabular(const Dataset& d, std::ostream& out, char delimiter) {
    const auto names = d.names();
    for (std::size_t j = 0; j < names.size(); ++j) out << (j ? std::string(1, delimiter) : "") << names[j];
    out << '\n';
    std::ostringstream cell;
    cell << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < d.num_rows(); ++i) {
        for (std::size_t j = 0; j < d.num_variables(); ++j) {
            if (j) out << delimiter;
            const auto& v = d.variable(j);
            if (v.is_discrete()) {
                out << v.categories[static_cast<std::size_t>(d.level(i, j))];
            } else {
                cell.str({});
                cell << d.column(j)[i];
                out << cell.str();
            }
        }
        out << '\n';
    }
}

Dataset resample(const Dataset& d, std::uint64_t seed) {
    if (d.num_rows() == 0) throw DataError("cannot resample an empty dataset");
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, d.num_rows() - 1);
    std::vector<std::size_t> rows(d.num_rows());
    for (auto& r : rows) r = pick(rng);
    return d.select_rows(rows);
}

Embedding one_hot_embed(const Dataset& d) {
    std::vector<Variable> vars;
    std::vector<std::vector<double>> cols;
    std::vector<std::vector<int>> columns_of(d.num_variables());
    for (std::size_t j = 0; j < d.num_variables(); ++j) {
        const auto& v = d.variable(j);
        if (!v.is_discrete()) {
            columns_of[j].push_back(static_cast<int>(cols.size()));
            vars.push_back(v);
            cols.push_back(d.column(j));
            continue;
        }
        std::vector<bool> observed(v.categories.size(), false);
        for (double x : d.column(j)) observed[static_cast<std::size_t>(x)] = true;
        std::vector<std::size_t> levels;
        for (std::size_t l = 0; l < observed.size(); ++l) {
            if (observed[l]) levels.push_back(l);
        }
        if (levels.size() < 2)
            throw DataError("discrete variable '" + v.name + "' is constant (one observed level); cannot embed");
        levels.pop_back(); // reference level
        for (auto l : levels) {
            std::vector<double> indicator(d.num_rows());
            for (std::size_t i = 0; i < d.num_rows(); ++i)
                indicator[i] = d.column(j)[i] == static_cast<double>(l) ? 1.0 : 0.0;
            columns_of[j].push_back(static_cast<int>(cols.size()));
            vars.push_back({v.name + "#" + v.categories[l], VariableKind::Continuous, {}});
            cols.push_back(std::move(indicator));
        }
    }
    return {Dataset(std::move(vars), std::move(cols)), std::move(columns_of)};
}

CovarianceModel covariance(const Dataset& d) {
    if (auto j = d.first_discrete())
        throw IncompatibilityError("covariance requires continuous data; variable '" + d.variable(*j).name + "' is discrete");
    if (d.num_rows() < 2) throw DataError("covariance requires at least 2 rows");
    Eigen::MatrixXd x = d.matrix();
    x.rowwise() -= x.colwise().mean();
    Eigen::MatrixXd s = (x.transpose() * x) / static_cast<double>(d.num_rows() - 1);
    s = (0.5 * (s + s.transpose())).eval();
    return {d.names(), std::move(s), d.num_rows()};
}

} // namespace caussearch
