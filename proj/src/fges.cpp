#include <algorithm>
#include <iostream>

#include "caussearch/error.hpp"
#include "caussearch/search.hpp"
#include "combinations.hpp"

namespace caussearch {

namespace {

struct Move {
    bool insert = true;
    int x = 0;
    int y = 0;
    std::vector<int> subset; // T for inserts, H for deletes
    double delta = 0.0;
};

bool is_clique(const MixedGraph& g, const std::vector<int>& nodes) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            if (!g.adjacent(nodes[i], nodes[j])) return false;
        }
    }
    return true;
}

/// True when every semi-directed path from `from` to `to` passes through `blocked`.
bool semidirected_paths_blocked(const MixedGraph& g, int from, int to, const std::vector<int>& blocked) {
    std::vector<bool> seen(static_cast<std::size_t>(g.num_nodes()), false);
    for (int b : blocked) seen[static_cast<std::size_t>(b)] = true;
    std::vector<int> stack{from};
    seen[static_cast<std::size_t>(from)] = true;
    while (!stack.empty()) {
        int a = stack.back();
        stack.pop_back();
        for (int b : g.adjacents(a)) {
            if (seen[static_cast<std::size_t>(b)]) continue;
            if (!g.is_directed(a, b) && !g.is_undirected(a, b)) continue;
            if (b == to) return false;
            seen[static_cast<std::size_t>(b)] = true;
            stack.push_back(b);
        }
    }
    return true;
}

std::vector<int> set_union(std::vector<int> a, const std::vector<int>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

std::vector<int> set_minus(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    for (int v : a) {
        if (std::find(b.begin(), b.end(), v) == b.end()) out.push_back(v);
    }
    return out;
}

class GreedyEquivalenceSearch {
public:
    GreedyEquivalenceSearch(const Score& score, const EdgeConstraints& k, const SearchConfig& cfg)
        : score_(score), k_(k), cfg_(cfg), p_(static_cast<int>(score.variables().size())) {}

    MixedGraph run() {
        MixedGraph dag(score_.variables());
        for (int a = 0; a < p_; ++a) {
            for (int b = 0; b < p_; ++b) {
                if (k_.required(a, b)) dag.add_directed(a, b);
            }
        }
        pattern_ = meek_closure(cpdag_of(dag), k_).graph;
        total_ = dag_score(dag);
        while (step(true)) {}
        while (step(false)) {}
        return pattern_;
    }

private:
    bool allowed(int from, int to) const { return !k_.forbidden(from, to) && !k_.required(to, from); }

    double dag_score(const MixedGraph& dag) const {
        std::vector<std::vector<int>> parents(static_cast<std::size_t>(p_));
        for (int v = 0; v < p_; ++v) parents[static_cast<std::size_t>(v)] = dag.parents(v);
        return score_.total(parents);
    }

    std::vector<Move> inserts() const {
        std::vector<Move> out;
        const auto& g = pattern_;
        for (int y = 0; y < p_; ++y) {
            const auto pa = g.parents(y);
            const auto nb = g.neighbors(y);
            for (int x = 0; x < p_; ++x) {
                if (x == y || g.adjacent(x, y) || !allowed(x, y)) continue;
                std::vector<int> na;
                std::vector<int> t0;
                for (int t : nb) (g.adjacent(t, x) ? na : t0).push_back(t);
                detail::for_each_powerset(t0, [&](const std::vector<int>& t) {
                    for (int v : t) {
                        if (!allowed(v, y)) return false;
                    }
                    auto s = set_union(na, t);
                    if (!is_clique(g, s) || !semidirected_paths_blocked(g, y, x, s)) return false;
                    auto base = set_union(s, pa);
                    auto with = set_union(base, {x});
                    double delta = score_.local(y, with) - score_.local(y, base);
                    if (delta > 0.0) out.push_back({true, x, y, t, delta});
                    return false;
                });
            }
        }
        return out;
    }

    std::vector<Move> deletes() const {
        std::vector<Move> out;
        const auto& g = pattern_;
        for (int y = 0; y < p_; ++y) {
            const auto pa = g.parents(y);
            const auto nb = g.neighbors(y);
            for (int x : g.adjacents(y)) {
                if (!g.is_directed(x, y) && !g.is_undirected(x, y)) continue;
                if (k_.required_either(x, y)) continue;
                std::vector<int> na;
                for (int t : nb) {
                    if (t != x && g.adjacent(t, x)) na.push_back(t);
                }
                detail::for_each_powerset(na, [&](const std::vector<int>& h) {
                    for (int v : h) {
                        if (!allowed(y, v)) return false;
                        if (g.is_undirected(x, v) && !allowed(x, v)) return false;
                    }
                    auto rest = set_minus(na, h);
                    if (!is_clique(g, rest)) return false;
                    auto without = set_minus(set_union(rest, pa), {x});
                    auto with = set_union(without, {x});
                    double delta = score_.local(y, without) - score_.local(y, with);
                    if (delta > 0.0) out.push_back({false, x, y, h, delta});
                    return false;
                });
            }
        }
        return out;
    }

    MixedGraph apply(const Move& m) const {
        MixedGraph g = pattern_;
        if (m.insert) {
            g.add_directed(m.x, m.y);
            for (int t : m.subset) g.add_directed(t, m.y);
        } else {
            g.remove_edge(m.x, m.y);
            for (int h : m.subset) {
                g.add_directed(m.y, h);
                if (g.is_undirected(m.x, h)) g.add_directed(m.x, h);
            }
        }
        return g;
    }

    bool step(bool forward) {
        auto moves = forward ? inserts() : deletes();
        std::stable_sort(moves.begin(), moves.end(), [](const Move& a, const Move& b) { return a.delta > b.delta; });
        for (const auto& m : moves) {
            auto extension = pdag_to_dag(apply(m));
            if (!extension) continue;
            auto next = meek_closure(cpdag_of(*extension), k_).graph;
            auto member = pdag_to_dag(next);
            if (!member) continue;
            const double next_total = dag_score(*member);
            if (!(next_total > total_)) continue;
            if (cfg_.verbose) {
                std::clog << "fges: " << (m.insert ? "insert " : "delete ") << pattern_.name(m.x) << " - "
                          << pattern_.name(m.y) << " delta " << m.delta << '\n';
            }
            pattern_ = std::move(next);
            total_ = next_total;
            return true;
        }
        return false;
    }

    const Score& score_;
    const EdgeConstraints& k_;
    const SearchConfig& cfg_;
    int p_;
    MixedGraph pattern_;
    double total_ = 0.0;
};

} // namespace

MixedGraph fges_search(const Score& score, const Knowledge& knowledge, const SearchConfig& cfg) {
    const auto constraints = compile_knowledge(knowledge, score.variables());
    return GreedyEquivalenceSearch(score, constraints, cfg).run();
}

} // namespace caussearch
