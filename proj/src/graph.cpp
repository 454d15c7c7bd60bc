#include "caussearch/graph.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "caussearch/error.hpp"
#include "caussearch/knowledge.hpp"

namespace caussearch {

EdgeType edge_type(Endpoint a, Endpoint b) {
    if (a > b) std::swap(a, b);
    using E = Endpoint;
    if (a == E::Tail && b == E::Arrow) return EdgeType::Directed;
    if (a == E::Arrow && b == E::Arrow) return EdgeType::Bidirected;
    if (a == E::Tail && b == E::Tail) return EdgeType::Undirected;
    if (a == E::Arrow && b == E::Circle) return EdgeType::Partial;
    if (a == E::Circle && b == E::Circle) return EdgeType::Nondirected;
    return EdgeType::PartiallyUndirected; // Tail, Circle
}

std::pair<Endpoint, Endpoint> marks_of(EdgeType t) {
    using E = Endpoint;
    switch (t) {
    case EdgeType::Directed: return {E::Tail, E::Arrow};
    case EdgeType::Bidirected: return {E::Arrow, E::Arrow};
    case EdgeType::Undirected: return {E::Tail, E::Tail};
    case EdgeType::Partial: return {E::Circle, E::Arrow};
    case EdgeType::Nondirected: return {E::Circle, E::Circle};
    case EdgeType::PartiallyUndirected: return {E::Circle, E::Tail};
    }
    return {E::Tail, E::Tail};
}

MixedGraph::MixedGraph(std::vector<std::string> nodes) : nodes_(std::move(nodes)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].empty()) throw ConfigError("graph node names must be non-empty");
        if (!index_.emplace(nodes_[i], static_cast<int>(i)).second)
            throw ConfigError("duplicate graph node '" + nodes_[i] + "'");
    }
    marks_.assign(nodes_.size() * nodes_.size(), 0);
}

std::optional<int> MixedGraph::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

int MixedGraph::index(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw ConfigError("unknown node '" + std::string(name) + "'");
}

std::optional<Endpoint> MixedGraph::endpoint(int from, int at) const {
    auto m = raw(from, at);
    if (m == 0) return std::nullopt;
    return static_cast<Endpoint>(m);
}

Endpoint MixedGraph::mark(int from, int at) const {
    auto m = raw(from, at);
    if (m == 0) throw ConfigError("no edge between " + name(from) + " and " + name(at));
    return static_cast<Endpoint>(m);
}

void MixedGraph::set_edge(int a, int b, Endpoint at_a, Endpoint at_b) {
    if (a == b) throw ConfigError("self-loop on " + name(a) + " is not allowed");
    if (a < 0 || b < 0 || a >= num_nodes() || b >= num_nodes()) throw ConfigError("node index out of range");
    raw(b, a) = static_cast<std::uint8_t>(at_a);
    raw(a, b) = static_cast<std::uint8_t>(at_b);
}

void MixedGraph::set_endpoint(int from, int at, Endpoint m) {
    if (!adjacent(from, at)) throw ConfigError("no edge between " + name(from) + " and " + name(at));
    raw(from, at) = static_cast<std::uint8_t>(m);
}

void MixedGraph::remove_edge(int a, int b) {
    raw(a, b) = 0;
    raw(b, a) = 0;
}

void MixedGraph::clear_edges() { std::fill(marks_.begin(), marks_.end(), 0); }

std::vector<int> MixedGraph::adjacents(int a) const {
    std::vector<int> out;
    for (int b = 0; b < num_nodes(); ++b) {
        if (raw(a, b)) out.push_back(b);
    }
    return out;
}

std::vector<int> MixedGraph::parents(int a) const {
    std::vector<int> out;
    for (int b = 0; b < num_nodes(); ++b) {
        if (raw(a, b) && is_directed(b, a)) out.push_back(b);
    }
    return out;
}

std::vector<int> MixedGraph::children(int a) const {
    std::vector<int> out;
    for (int b = 0; b < num_nodes(); ++b) {
        if (raw(a, b) && is_directed(a, b)) out.push_back(b);
    }
    return out;
}

std::vector<int> MixedGraph::neighbors(int a) const {
    std::vector<int> out;
    for (int b = 0; b < num_nodes(); ++b) {
        if (raw(a, b) && is_undirected(a, b)) out.push_back(b);
    }
    return out;
}

std::vector<Edge> MixedGraph::edges() const {
    std::vector<Edge> out;
    for (int a = 0; a < num_nodes(); ++a) {
        for (int b = a + 1; b < num_nodes(); ++b) {
            if (raw(a, b)) out.push_back({a, b, static_cast<Endpoint>(raw(b, a)), static_cast<Endpoint>(raw(a, b))});
        }
    }
    return out;
}

std::size_t MixedGraph::num_edges() const {
    return static_cast<std::size_t>(std::count_if(marks_.begin(), marks_.end(), [](auto m) { return m != 0; })) / 2;
}

MixedGraph MixedGraph::with_all_marks(Endpoint m) const {
    MixedGraph g = *this;
    for (auto& x : g.marks_) {
        if (x) x = static_cast<std::uint8_t>(m);
    }
    return g;
}

std::optional<std::vector<int>> topological_order(const MixedGraph& g) {
    const int p = g.num_nodes();
    std::vector<int> indegree(static_cast<std::size_t>(p), 0);
    for (const auto& e : g.edges()) {
        if (edge_type(e.at_a, e.at_b) != EdgeType::Directed) return std::nullopt;
        ++indegree[static_cast<std::size_t>(e.at_b == Endpoint::Arrow ? e.b : e.a)];
    }
    std::set<int> ready;
    for (int v = 0; v < p; ++v) {
        if (indegree[static_cast<std::size_t>(v)] == 0) ready.insert(v);
    }
    std::vector<int> order;
    while (!ready.empty()) {
        int v = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(v);
        for (int c : g.children(v)) {
            if (--indegree[static_cast<std::size_t>(c)] == 0) ready.insert(c);
        }
    }
    if (static_cast<int>(order.size()) != p) return std::nullopt;
    return order;
}

bool is_dag(const MixedGraph& g) { return topological_order(g).has_value(); }

std::vector<bool> descendants(const MixedGraph& dag, int a) {
    std::vector<bool> seen(static_cast<std::size_t>(dag.num_nodes()), false);
    std::vector<int> stack{a};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int c : dag.children(v)) {
            if (!seen[static_cast<std::size_t>(c)]) {
                seen[static_cast<std::size_t>(c)] = true;
                stack.push_back(c);
            }
        }
    }
    return seen;
}

bool d_separated(const MixedGraph& dag, int x, int y, const std::vector<int>& z) {
    const int p = dag.num_nodes();
    for (int v : {x, y}) {
        if (v < 0 || v >= p) throw ConfigError("unknown node index " + std::to_string(v));
    }
    const auto sz = static_cast<std::size_t>(p);
    std::vector<bool> in_z(sz, false);
    for (int v : z) {
        if (v < 0 || v >= p) throw ConfigError("unknown node index " + std::to_string(v));
        in_z[static_cast<std::size_t>(v)] = true;
    }

    // Nodes that are in Z or have a descendant in Z: colliders there are open.
    std::vector<bool> opens_collider(sz, false);
    std::vector<int> stack(z.begin(), z.end());
    for (int v : z) opens_collider[static_cast<std::size_t>(v)] = true;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int pa : dag.parents(v)) {
            if (!opens_collider[static_cast<std::size_t>(pa)]) {
                opens_collider[static_cast<std::size_t>(pa)] = true;
                stack.push_back(pa);
            }
        }
    }

    // Reachability over (node, arrived-from-child?) states.
    std::vector<bool> visited_up(sz, false);
    std::vector<bool> visited_down(sz, false);
    std::deque<std::pair<int, bool>> queue{{x, true}};
    while (!queue.empty()) {
        auto [v, up] = queue.front();
        queue.pop_front();
        auto& visited = up ? visited_up : visited_down;
        if (visited[static_cast<std::size_t>(v)]) continue;
        visited[static_cast<std::size_t>(v)] = true;
        const bool observed = in_z[static_cast<std::size_t>(v)];
        if (v == y && !observed) return false;
        if (up) {
            if (observed) continue;
            for (int pa : dag.parents(v)) queue.emplace_back(pa, true);
            for (int c : dag.children(v)) queue.emplace_back(c, false);
        } else {
            if (!observed) {
                for (int c : dag.children(v)) queue.emplace_back(c, false);
            }
            if (opens_collider[static_cast<std::size_t>(v)]) {
                for (int pa : dag.parents(v)) queue.emplace_back(pa, true);
            }
        }
    }
    return true;
}

MixedGraph cpdag_of(const MixedGraph& dag) {
    if (!is_dag(dag)) throw NotADagError("cpdag_of requires a DAG");
    MixedGraph pattern = dag;
    for (const auto& e : dag.edges()) pattern.add_undirected(e.a, e.b);
    for (int c = 0; c < dag.num_nodes(); ++c) {
        auto pa = dag.parents(c);
        for (std::size_t i = 0; i < pa.size(); ++i) {
            for (std::size_t j = i + 1; j < pa.size(); ++j) {
                if (!dag.adjacent(pa[i], pa[j])) {
                    pattern.add_directed(pa[i], c);
                    pattern.add_directed(pa[j], c);
                }
            }
        }
    }
    return meek_closure(pattern);
}

std::optional<MixedGraph> pdag_to_dag(const MixedGraph& pdag) {
    const int p = pdag.num_nodes();
    MixedGraph work = pdag;
    MixedGraph dag = pdag;
    std::vector<bool> removed(static_cast<std::size_t>(p), false);
    for (int round = 0; round < p; ++round) {
        int chosen = -1;
        for (int x = 0; x < p && chosen < 0; ++x) {
            if (removed[static_cast<std::size_t>(x)]) continue;
            if (!work.children(x).empty()) continue;
            auto adj = work.adjacents(x);
            bool ok = true;
            for (int y : adj) {
                if (!work.is_directed(y, x) && !work.is_undirected(x, y)) return std::nullopt;
            }
            for (int y : work.neighbors(x)) {
                for (int w : adj) {
                    if (w != y && !work.adjacent(y, w)) ok = false;
                }
            }
            if (ok) chosen = x;
        }
        if (chosen < 0) return std::nullopt;
        for (int y : work.neighbors(chosen)) dag.add_directed(y, chosen);
        for (int y : work.adjacents(chosen)) work.remove_edge(chosen, y);
        removed[static_cast<std::size_t>(chosen)] = true;
    }
    return dag;
}

namespace {

bool rule_orients(const MixedGraph& g, int a, int b) {
    const int p = g.num_nodes();
    // R1: c --> a --- b, c and b nonadjacent.
    for (int c : g.parents(a)) {
        if (c != b && !g.adjacent(c, b)) return true;
    }
    // R2: a --> c --> b.
    for (int c : g.children(a)) {
        if (g.is_directed(c, b)) return true;
    }
    // R3: a --- c --> b, a --- d --> b, c and d nonadjacent.
    auto nb = g.neighbors(a);
    for (std::size_t i = 0; i < nb.size(); ++i) {
        if (!g.is_directed(nb[i], b)) continue;
        for (std::size_t j = i + 1; j < nb.size(); ++j) {
            if (g.is_directed(nb[j], b) && !g.adjacent(nb[i], nb[j])) return true;
        }
    }
    // R4: a --- k --> l --> b, a adjacent to l, k and b nonadjacent.
    for (int k : nb) {
        if (k == b || g.adjacent(k, b)) continue;
        for (int l = 0; l < p; ++l) {
            if (l != a && g.is_directed(k, l) && g.is_directed(l, b) && g.adjacent(a, l)) return true;
        }
    }
    return false;
}

} // namespace

MeekResult meek_closure(const MixedGraph& pattern, const EdgeConstraints& knowledge) {
    MixedGraph g = pattern;
    std::set<std::pair<int, int>> conflicts;
    const bool use_knowledge = knowledge.size() == g.num_nodes() && !knowledge.empty();
    auto allowed = [&](int from, int to) { return !use_knowledge || !knowledge.forbidden(from, to); };

    bool changed = true;
    while (changed) {
        changed = false;
        if (use_knowledge) {
            for (const auto& e : g.edges()) {
                if (!g.is_undirected(e.a, e.b)) continue;
                const bool req_ab = knowledge.required(e.a, e.b);
                const bool req_ba = knowledge.required(e.b, e.a);
                const bool fb_ab = knowledge.forbidden(e.a, e.b);
                const bool fb_ba = knowledge.forbidden(e.b, e.a);
                if (req_ab && !fb_ab) {
                    g.add_directed(e.a, e.b);
                    changed = true;
                } else if (req_ba && !fb_ba) {
                    g.add_directed(e.b, e.a);
                    changed = true;
                } else if (fb_ab && fb_ba) {
                    conflicts.insert({e.a, e.b});
                } else if (fb_ab) {
                    g.add_directed(e.b, e.a);
                    changed = true;
                } else if (fb_ba) {
                    g.add_directed(e.a, e.b);
                    changed = true;
                }
            }
        }
        for (const auto& e : g.edges()) {
            if (!g.is_undirected(e.a, e.b)) continue;
            for (auto [from, to] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
                if (!rule_orients(g, from, to)) continue;
                if (!allowed(from, to)) {
                    conflicts.insert({e.a, e.b});
                    continue;
                }
                g.add_directed(from, to);
                changed = true;
                break;
            }
        }
    }
    return {std::move(g), {conflicts.begin(), conflicts.end()}};
}

MixedGraph meek_closure(const MixedGraph& pattern) {
    return meek_closure(pattern, EdgeConstraints(pattern.num_nodes())).graph;
}

} // namespace caussearch
