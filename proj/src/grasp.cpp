#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>

#include "caussearch/error.hpp"
#include "caussearch/random.hpp"
#include "caussearch/search.hpp"

namespace caussearch {

namespace detail {

std::vector<int> project_node(const Score& score, int y, const std::vector<int>& candidates,
                              const EdgeConstraints& knowledge) {
    std::vector<int> parents;
    std::vector<int> optional;
    for (int c : candidates) {
        if (knowledge.required(c, y)) {
            parents.push_back(c);
        } else if (!knowledge.forbidden(c, y)) {
            optional.push_back(c);
        }
    }
    std::sort(parents.begin(), parents.end());
    double current = score.local(y, parents);
    while (true) {
        int best = -1;
        double best_score = current;
        for (int c : optional) {
            if (std::find(parents.begin(), parents.end(), c) != parents.end()) continue;
            auto trial = parents;
            trial.insert(std::upper_bound(trial.begin(), trial.end(), c), c);
            double s = score.local(y, trial);
            if (s > best_score) {
                best_score = s;
                best = c;
            }
        }
        if (best < 0) break;
        parents.insert(std::upper_bound(parents.begin(), parents.end(), best), best);
        current = best_score;
    }
    while (true) {
        int best = -1;
        double best_score = current;
        for (int c : parents) {
            if (knowledge.required(c, y)) continue;
            auto trial = parents;
            trial.erase(std::find(trial.begin(), trial.end(), c));
            double s = score.local(y, trial);
            if (s > best_score) {
                best_score = s;
                best = c;
            }
        }
        if (best < 0) break;
        parents.erase(std::find(parents.begin(), parents.end(), best));
        current = best_score;
    }
    return parents;
}

std::vector<std::vector<int>> project_order(const Score& score, const std::vector<int>& order,
                                            const EdgeConstraints& knowledge) {
    std::vector<std::vector<int>> parents(order.size());
    std::vector<int> before;
    for (int y : order) {
        parents[static_cast<std::size_t>(y)] = project_node(score, y, before, knowledge);
        before.push_back(y);
    }
    return parents;
}

std::vector<int> tuck(const std::vector<int>& order, int x, int y, const std::vector<std::vector<int>>& parents_of) {
    const auto pos_x = static_cast<std::size_t>(std::find(order.begin(), order.end(), x) - order.begin());
    const auto pos_y = static_cast<std::size_t>(std::find(order.begin(), order.end(), y) - order.begin());
    if (pos_x >= order.size() || pos_y >= order.size() || pos_x >= pos_y) return order;

    std::vector<bool> ancestor(order.size(), false);
    std::vector<int> stack{y};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int pa : parents_of[static_cast<std::size_t>(v)]) {
            if (!ancestor[static_cast<std::size_t>(pa)]) {
                ancestor[static_cast<std::size_t>(pa)] = true;
                stack.push_back(pa);
            }
        }
    }

    std::vector<int> out(order.begin(), order.begin() + static_cast<long>(pos_x));
    std::vector<int> rest;
    for (std::size_t i = pos_x + 1; i < pos_y; ++i) {
        int v = order[i];
        (ancestor[static_cast<std::size_t>(v)] ? out : rest).push_back(v);
    }
    out.push_back(y);
    out.push_back(x);
    out.insert(out.end(), rest.begin(), rest.end());
    out.insert(out.end(), order.begin() + static_cast<long>(pos_y) + 1, order.end());
    return out;
}

MixedGraph dag_from_parents(const std::vector<std::string>& names, const std::vector<std::vector<int>>& parents_of) {
    MixedGraph g(names);
    for (std::size_t y = 0; y < parents_of.size(); ++y) {
        for (int pa : parents_of[y]) g.add_directed(pa, static_cast<int>(y));
    }
    return g;
}

} // namespace detail

namespace {

struct Candidate {
    std::vector<int> order;
    std::vector<std::vector<int>> parents;
    double score = 0.0;
};

class Grasp {
public:
    Grasp(const Score& score, const EdgeConstraints& k, const SearchConfig& cfg)
        : score_(score), k_(k), cfg_(cfg), p_(static_cast<int>(score.variables().size())) {}

    MixedGraph run() {
        if (cfg_.grasp_restarts < 1) throw ConfigError("grasp_restarts must be >= 1");
        if (cfg_.grasp_dfs_depth < 1) throw ConfigError("grasp_dfs_depth must be >= 1");
        std::optional<Candidate> best;
        for (int r = 0; r < cfg_.grasp_restarts; ++r) {
            std::vector<int> start(static_cast<std::size_t>(p_));
            std::iota(start.begin(), start.end(), 0);
            if (r == 0 && cfg_.initial_order) {
                start = *cfg_.initial_order;
                auto sorted = start;
                std::sort(sorted.begin(), sorted.end());
                if (static_cast<int>(sorted.size()) != p_ || std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() ||
                    (p_ > 0 && (sorted.front() != 0 || sorted.back() != p_ - 1)))
                    throw ConfigError("initial order must be a permutation of the variable indices");
            } else if (r > 0) {
                Rng rng(derive_seed(cfg_.seed, static_cast<std::uint64_t>(r)));
                std::shuffle(start.begin(), start.end(), rng);
            }
            auto c = evaluate(admissible(start));
            while (dfs(c.order, c.parents, c.score, 1, c)) {}
            if (cfg_.verbose) std::clog << "grasp: restart " << r << " score " << c.score << '\n';
            if (!best || c.score > best->score) best = std::move(c);
        }
        auto dag = detail::dag_from_parents(score_.variables(), best->parents);
        return meek_closure(cpdag_of(dag), k_).graph;
    }

private:
    /// Stable reordering so that no node precedes one it must follow.
    std::vector<int> admissible(const std::vector<int>& order) const {
        std::vector<int> remaining = order;
        std::vector<int> out;
        while (!remaining.empty()) {
            auto it = std::find_if(remaining.begin(), remaining.end(), [&](int v) {
                return std::none_of(remaining.begin(), remaining.end(), [&](int u) { return u != v && k_.must_precede(u, v); });
            });
            if (it == remaining.end()) throw ConfigError("knowledge ordering constraints are cyclic");
            out.push_back(*it);
            remaining.erase(it);
        }
        return out;
    }

    bool is_admissible(const std::vector<int>& order) const {
        for (std::size_t i = 0; i < order.size(); ++i) {
            for (std::size_t j = i + 1; j < order.size(); ++j) {
                if (k_.must_precede(order[j], order[i])) return false;
            }
        }
        return true;
    }

    Candidate evaluate(std::vector<int> order) {
        Candidate c;
        c.parents.resize(static_cast<std::size_t>(p_));
        std::vector<bool> before(static_cast<std::size_t>(p_), false);
        for (int y : order) {
            auto key = std::pair{y, before};
            auto it = projections_.find(key);
            if (it == projections_.end()) {
                std::vector<int> candidates;
                for (int v = 0; v < p_; ++v) {
                    if (before[static_cast<std::size_t>(v)]) candidates.push_back(v);
                }
                it = projections_.emplace(key, detail::project_node(score_, y, candidates, k_)).first;
            }
            c.parents[static_cast<std::size_t>(y)] = it->second;
            before[static_cast<std::size_t>(y)] = true;
        }
        c.score = score_.total(c.parents);
        c.order = std::move(order);
        return c;
    }

    double tolerance(double s) const { return 1e-9 * std::max(1.0, std::abs(s)); }

    bool dfs(const std::vector<int>& order, const std::vector<std::vector<int>>& parents, double current, int depth,
             Candidate& best) {
        for (int y : order) {
            std::vector<int> pa = parents[static_cast<std::size_t>(y)];
            for (int x : pa) {
                auto moved = detail::tuck(order, x, y, parents);
                if (moved == order || !is_admissible(moved)) continue;
                auto next = evaluate(std::move(moved));
                if (next.score > best.score + tolerance(best.score)) {
                    best = std::move(next);
                    return true;
                }
                if (depth < cfg_.grasp_dfs_depth && next.score >= current - tolerance(current)) {
                    if (dfs(next.order, next.parents, next.score, depth + 1, best)) return true;
                }
            }
        }
        return false;
    }

    const Score& score_;
    const EdgeConstraints& k_;
    const SearchConfig& cfg_;
    int p_;
    std::map<std::pair<int, std::vector<bool>>, std::vector<int>> projections_;
};

} // namespace

MixedGraph grasp_search(const Score& score, const Knowledge& knowledge, const SearchConfig& cfg) {
    const auto constraints = compile_knowledge(knowledge, score.variables());
    return Grasp(score, constraints, cfg).run();
}

} // namespace caussearch
