#include "caussearch/knowledge.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "caussearch/error.hpp"

namespace caussearch {

Knowledge& Knowledge::add_to_tier(std::size_t tier, const std::string& name) {
    if (auto existing = tier_of(name)) {
        if (*existing == tier) return *this;
        throw ConfigError("variable '" + name + "' is already in tier " + std::to_string(*existing) +
                          "; cannot also place it in tier " + std::to_string(tier));
    }
    if (tiers_.size() <= tier) {
        tiers_.resize(tier + 1);
        forbidden_within_.resize(tier + 1, false);
    }
    tiers_[tier].push_back(name);
    return *this;
}

Knowledge& Knowledge::set_tier_forbidden_within(std::size_t tier, bool flag) {
    if (tiers_.size() <= tier) {
        tiers_.resize(tier + 1);
        forbidden_within_.resize(tier + 1, false);
    }
    forbidden_within_[tier] = flag;
    return *this;
}

Knowledge& Knowledge::add_forbidden(const std::string& from, const std::string& to) {
    forbidden_.emplace(from, to);
    return *this;
}

Knowledge& Knowledge::add_required(const std::string& from, const std::string& to) {
    required_.emplace(from, to);
    return *this;
}

std::optional<std::size_t> Knowledge::tier_of(const std::string& name) const {
    for (std::size_t t = 0; t < tiers_.size(); ++t) {
        if (std::find(tiers_[t].begin(), tiers_[t].end(), name) != tiers_[t].end()) return t;
    }
    return std::nullopt;
}

bool Knowledge::empty() const {
    bool no_tiers = std::all_of(tiers_.begin(), tiers_.end(), [](const auto& t) { return t.empty(); });
    return no_tiers && forbidden_.empty() && required_.empty();
}

bool Knowledge::is_forbidden(const std::string& from, const std::string& to) const {
    if (forbidden_.count({from, to})) return true;
    auto tf = tier_of(from);
    auto tt = tier_of(to);
    if (!tf || !tt) return false;
    if (*tf > *tt) return true;
    return *tf == *tt && from != to && tier_forbidden_within(*tf);
}

bool Knowledge::is_required(const std::string& from, const std::string& to) const {
    return required_.count({from, to}) > 0;
}

std::vector<std::string> Knowledge::validate(const std::vector<std::string>& variables) const {
    std::vector<std::string> problems;
    auto known = [&](const std::string& n) {
        return std::find(variables.begin(), variables.end(), n) != variables.end();
    };
    auto check = [&](const std::string& n, const std::string& where) {
        if (!known(n)) problems.push_back("unknown variable '" + n + "' in " + where);
    };
    for (std::size_t t = 0; t < tiers_.size(); ++t) {
        for (const auto& n : tiers_[t]) check(n, "tier " + std::to_string(t));
    }
    for (const auto& [a, b] : forbidden_) {
        check(a, "forbidden edge " + a + " -> " + b);
        check(b, "forbidden edge " + a + " -> " + b);
    }
    for (const auto& [a, b] : required_) {
        check(a, "required edge " + a + " -> " + b);
        check(b, "required edge " + a + " -> " + b);
        if (is_forbidden(a, b)) problems.push_back("required edge " + a + " -> " + b + " is also forbidden");
    }

    // Required edges must not form a directed cycle.
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& [a, b] : required_) out[a].push_back(b);
    std::map<std::string, int> state;
    std::function<bool(const std::string&)> cyclic = [&](const std::string& v) {
        state[v] = 1;
        for (const auto& w : out[v]) {
            if (state[w] == 1) return true;
            if (state[w] == 0 && cyclic(w)) return true;
        }
        state[v] = 2;
        return false;
    };
    for (const auto& [a, b] : required_) {
        if (state[a] == 0 && cyclic(a)) {
            problems.push_back("required edges form a directed cycle through '" + a + "'");
            break;
        }
    }
    return problems;
}

EdgeConstraints::EdgeConstraints(int p)
    : p_(p),
      forbidden_(static_cast<std::size_t>(p) * static_cast<std::size_t>(p), false),
      required_(static_cast<std::size_t>(p) * static_cast<std::size_t>(p), false),
      tier_(static_cast<std::size_t>(p), -1) {}

EdgeConstraints::EdgeConstraints(const Knowledge& k, const std::vector<std::string>& variables)
    : EdgeConstraints(static_cast<int>(variables.size())) {
    for (int a = 0; a < p_; ++a) {
        const auto& na = variables[static_cast<std::size_t>(a)];
        if (auto t = k.tier_of(na)) tier_[static_cast<std::size_t>(a)] = static_cast<int>(*t);
        for (int b = 0; b < p_; ++b) {
            if (a == b) continue;
            const auto& nb = variables[static_cast<std::size_t>(b)];
            forbidden_[index(a, b)] = k.is_forbidden(na, nb);
            required_[index(a, b)] = k.is_required(na, nb);
            if (forbidden_[index(a, b)] || required_[index(a, b)]) empty_ = false;
        }
    }
}

bool EdgeConstraints::must_precede(int a, int b) const {
    if (required(a, b)) return true;
    int ta = tier(a);
    int tb = tier(b);
    return ta >= 0 && tb >= 0 && ta < tb;
}

} // namespace caussearch
