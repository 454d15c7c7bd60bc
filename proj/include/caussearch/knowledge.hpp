#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace caussearch {

/// Background knowledge: temporal tiers (later tiers cannot cause earlier
/// ones), optional within-tier prohibitions, and explicit forbidden/required
/// directed pairs. Keyed by variable name.
class Knowledge {
public:
    using Pair = std::pair<std::string, std::string>;

    /// Places `name` in `tier`, creating empty tiers up to it. Re-adding to
    /// the same tier is a no-op; a different tier throws ConfigError.
    Knowledge& add_to_tier(std::size_t tier, const std::string& name);
    Knowledge& set_tier_forbidden_within(std::size_t tier, bool flag);
    Knowledge& add_forbidden(const std::string& from, const std::string& to);
    Knowledge& add_required(const std::string& from, const std::string& to);

    const std::vector<std::vector<std::string>>& tiers() const { return tiers_; }
    bool tier_forbidden_within(std::size_t tier) const {
        return tier < forbidden_within_.size() && forbidden_within_[tier];
    }
    const std::set<Pair>& forbidden() const { return forbidden_; }
    const std::set<Pair>& required() const { return required_; }
    std::optional<std::size_t> tier_of(const std::string& name) const;

    bool empty() const;

    /// Explicitly forbidden, later tier to earlier tier, or within a tier
    /// flagged forbidden-within. Unknown names are never forbidden.
    bool is_forbidden(const std::string& from, const std::string& to) const;
    bool is_required(const std::string& from, const std::string& to) const;

    /// Human-readable problems: names missing from `variables`,
    /// required/forbidden overlaps (explicit or tier-implied), required cycles.
    std::vector<std::string> validate(const std::vector<std::string>& variables) const;

    friend bool operator==(const Knowledge&, const Knowledge&) = default;

private:
    std::vector<std::vector<std::string>> tiers_;
    std::vector<bool> forbidden_within_;
    std::set<Pair> forbidden_;
    std::set<Pair> required_;
};

/// Knowledge resolved against an ordered variable list, as p x p lookups.
class EdgeConstraints {
public:
    EdgeConstraints() = default;
    /// No constraints over p variables.
    explicit EdgeConstraints(int p);
    EdgeConstraints(const Knowledge& k, const std::vector<std::string>& variables);

    int size() const { return p_; }
    bool forbidden(int from, int to) const { return forbidden_[index(from, to)]; }
    bool required(int from, int to) const { return required_[index(from, to)]; }
    bool forbidden_both(int a, int b) const { return forbidden(a, b) && forbidden(b, a); }
    bool required_either(int a, int b) const { return required(a, b) || required(b, a); }
    /// Tier index, or -1 for untiered variables.
    int tier(int v) const { return tier_[static_cast<std::size_t>(v)]; }
    bool empty() const { return empty_; }

    /// True when `a` has to come before `b` in any causal order honoring
    /// the knowledge (earlier tier, or a required a -> b edge).
    bool must_precede(int a, int b) const;

private:
    std::size_t index(int from, int to) const {
        return static_cast<std::size_t>(from) * static_cast<std::size_t>(p_) + static_cast<std::size_t>(to);
    }

    int p_ = 0;
    bool empty_ = true;
    std::vector<bool> forbidden_;
    std::vector<bool> required_;
    std::vector<int> tier_;
};

} // namespace caussearch
