#include <algorithm>
#include <deque>
#include <set>

#include "caussearch/error.hpp"
#include "caussearch/search.hpp"
#include "combinations.hpp"

namespace caussearch {

namespace {

using E = Endpoint;

bool arrow_at(const MixedGraph& g, int from, int at) { return g.endpoint(from, at) == E::Arrow; }
bool circle_at(const MixedGraph& g, int from, int at) { return g.endpoint(from, at) == E::Circle; }

/// Sets the mark at `at` only when it is currently a circle.
bool settle(MixedGraph& g, int from, int at, Endpoint m) {
    if (!circle_at(g, from, at)) return false;
    g.set_endpoint(from, at, m);
    return true;
}

void orient_colliders(MixedGraph& g, const SepsetMap& sepsets) {
    for (int b = 0; b < g.num_nodes(); ++b) {
        auto adj = g.adjacents(b);
        for (std::size_t i = 0; i < adj.size(); ++i) {
            for (std::size_t j = i + 1; j < adj.size(); ++j) {
                const int a = adj[i];
                const int c = adj[j];
                if (g.adjacent(a, c) || !sepsets.get(a, c) || sepsets.contains(a, c, b)) continue;
                // A tail placed by knowledge at b wins over the collider.
                if (g.endpoint(a, b) == E::Tail || g.endpoint(c, b) == E::Tail) continue;
                g.set_endpoint(a, b, E::Arrow);
                g.set_endpoint(c, b, E::Arrow);
            }
        }
    }
}

/// Nodes reachable from x along paths where every inner node is a collider
/// on the path or sits in a triangle with its path neighbours.
std::vector<int> possible_dsep(const MixedGraph& g, int x) {
    const auto p = static_cast<std::size_t>(g.num_nodes());
    std::vector<bool> in(p, false);
    std::set<std::pair<int, int>> seen;
    std::deque<std::pair<int, int>> queue;
    for (int b : g.adjacents(x)) {
        in[static_cast<std::size_t>(b)] = true;
        seen.insert({x, b});
        queue.emplace_back(x, b);
    }
    while (!queue.empty()) {
        auto [a, b] = queue.front();
        queue.pop_front();
        for (int c : g.adjacents(b)) {
            if (c == a || c == x) continue;
            const bool collider = arrow_at(g, a, b) && arrow_at(g, c, b);
            if (!collider && !g.adjacent(a, c)) continue;
            if (!seen.insert({b, c}).second) continue;
            in[static_cast<std::size_t>(c)] = true;
            queue.emplace_back(b, c);
        }
    }
    std::vector<int> out;
    for (std::size_t v = 0; v < p; ++v) {
        if (in[v] && static_cast<int>(v) != x) out.push_back(static_cast<int>(v));
    }
    return out;
}

void possible_dsep_prune(MixedGraph& g, SepsetMap& sepsets, const IndependenceTest& test,
                         const EdgeConstraints& knowledge, const SearchConfig& cfg) {
    MixedGraph oriented = g.with_all_marks(E::Circle);
    orient_colliders(oriented, sepsets);
    for (const auto& e : oriented.edges()) {
        for (auto [x, y] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
            if (!g.adjacent(x, y) || knowledge.required_either(x, y)) continue;
            auto pds = possible_dsep(oriented, x);
            pds.erase(std::remove(pds.begin(), pds.end(), y), pds.end());
            const std::size_t max_size = cfg.depth < 0 ? pds.size() : std::min(pds.size(), static_cast<std::size_t>(cfg.depth));
            for (std::size_t k = 1; k <= max_size && g.adjacent(x, y); ++k) {
                detail::for_each_subset(pds, k, [&](const std::vector<int>& z) {
                    if (!test.decide(x, y, z).independent) return false;
                    g.remove_edge(x, y);
                    sepsets.set(x, y, z);
                    return true;
                });
            }
        }
    }
}

void apply_knowledge_marks(MixedGraph& g, const EdgeConstraints& k) {
    for (const auto& e : g.edges()) {
        const int a = e.a;
        const int b = e.b;
        if (k.required(a, b)) {
            g.set_edge(a, b, E::Tail, E::Arrow);
        } else if (k.required(b, a)) {
            g.set_edge(b, a, E::Tail, E::Arrow);
        } else {
            if (k.forbidden(a, b)) g.set_endpoint(b, a, E::Arrow);
            if (k.forbidden(b, a)) g.set_endpoint(a, b, E::Arrow);
        }
    }
}

// R1: a *-> b o-* c, a and c nonadjacent => b --> c.
bool rule1(MixedGraph& g) {
    bool changed = false;
    for (int b = 0; b < g.num_nodes(); ++b) {
        for (int a : g.adjacents(b)) {
            if (!arrow_at(g, a, b)) continue;
            for (int c : g.adjacents(b)) {
                if (c == a || g.adjacent(a, c) || !circle_at(g, c, b) || g.endpoint(b, c) == E::Tail) continue;
                g.set_endpoint(c, b, E::Tail);
                g.set_endpoint(b, c, E::Arrow);
                changed = true;
            }
        }
    }
    return changed;
}

// R2: a --> b *-> c or a *-> b --> c, with a *-o c => a *-> c.
bool rule2(MixedGraph& g) {
    bool changed = false;
    for (int a = 0; a < g.num_nodes(); ++a) {
        for (int c : g.adjacents(a)) {
            if (!circle_at(g, a, c)) continue;
            for (int b : g.adjacents(a)) {
                if (b == c || !g.adjacent(b, c)) continue;
                const bool first = g.is_directed(a, b) && arrow_at(g, b, c);
                const bool second = arrow_at(g, a, b) && g.is_directed(b, c);
                if (first || second) {
                    changed |= settle(g, a, c, E::Arrow);
                    break;
                }
            }
        }
    }
    return changed;
}

// R3: a *-> b <-* c, a *-o d o-* c, a and c nonadjacent, d *-o b => d *-> b.
bool rule3(MixedGraph& g) {
    bool changed = false;
    for (int b = 0; b < g.num_nodes(); ++b) {
        for (int d : g.adjacents(b)) {
            if (!circle_at(g, d, b)) continue;
            auto adj = g.adjacents(b);
            bool fired = false;
            for (std::size_t i = 0; i < adj.size() && !fired; ++i) {
                for (std::size_t j = i + 1; j < adj.size() && !fired; ++j) {
                    const int a = adj[i];
                    const int c = adj[j];
                    if (a == d || c == d || g.adjacent(a, c)) continue;
                    if (!arrow_at(g, a, b) || !arrow_at(g, c, b)) continue;
                    if (!g.adjacent(a, d) || !g.adjacent(c, d)) continue;
                    if (!circle_at(g, a, d) || !circle_at(g, c, d)) continue;
                    fired = settle(g, d, b, E::Arrow);
                }
            }
            changed |= fired;
        }
    }
    return changed;
}

// R4: discriminating path <d, ..., a, b, c> for b with b o-* c.
bool rule4(MixedGraph& g, const SepsetMap& sepsets) {
    const int p = g.num_nodes();
    for (int b = 0; b < p; ++b) {
        for (int c : g.adjacents(b)) {
            if (!circle_at(g, c, b)) continue;
            for (int a : g.adjacents(b)) {
                if (a == c || !g.adjacent(a, c) || !g.is_directed(a, c) || !arrow_at(g, b, a)) continue;
                std::vector<bool> visited(static_cast<std::size_t>(p), false);
                visited[static_cast<std::size_t>(a)] = visited[static_cast<std::size_t>(b)] =
                    visited[static_cast<std::size_t>(c)] = true;
                std::deque<int> queue{a};
                while (!queue.empty()) {
                    const int e = queue.front();
                    queue.pop_front();
                    for (int d : g.adjacents(e)) {
                        if (visited[static_cast<std::size_t>(d)] || !arrow_at(g, d, e)) continue;
                        if (!g.adjacent(d, c)) {
                            if (!sepsets.get(d, c)) continue;
                            if (sepsets.contains(d, c, b)) {
                                if (g.endpoint(b, c) == E::Tail) continue;
                                g.set_endpoint(c, b, E::Tail);
                                g.set_endpoint(b, c, E::Arrow);
                            } else {
                                settle(g, a, b, E::Arrow);
                                g.set_endpoint(c, b, E::Arrow);
                                settle(g, b, c, E::Arrow);
                            }
                            return true;
                        }
                        if (arrow_at(g, e, d) && g.is_directed(d, c)) {
                            visited[static_cast<std::size_t>(d)] = true;
                            queue.push_back(d);
                        }
                    }
                }
            }
        }
    }
    return false;
}

} // namespace

MixedGraph fci_search(const IndependenceTest& test, const Knowledge& knowledge, const SearchConfig& cfg) {
    const auto constraints = compile_knowledge(knowledge, test.variables());
    auto [g, sepsets] = adjacency_search(test, constraints, cfg);
    possible_dsep_prune(g, sepsets, test, constraints, cfg);

    g = g.with_all_marks(E::Circle);
    apply_knowledge_marks(g, constraints);
    orient_colliders(g, sepsets);
    bool changed = true;
    while (changed) {
        changed = rule1(g);
        changed |= rule2(g);
        changed |= rule3(g);
        changed |= rule4(g, sepsets);
    }
    return g;
}

} // namespace caussearch
