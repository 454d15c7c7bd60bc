#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace caussearch {

class EdgeConstraints;

/// Edge-end marks. Absence of an edge is not a mark.
enum class Endpoint : std::uint8_t { Tail = 1, Arrow = 2, Circle = 3 };

/// Unordered classification of an edge by its two marks.
enum class EdgeType {
    Directed,          // -->
    Bidirected,        // <->
    Undirected,        // ---
    Partial,           // o->
    Nondirected,       // o-o
    PartiallyUndirected // o--
};

EdgeType edge_type(Endpoint a, Endpoint b);
/// A representative mark pair (first, second) for each type.
std::pair<Endpoint, Endpoint> marks_of(EdgeType t);

struct Edge {
    int a = 0;
    int b = 0;
    Endpoint at_a = Endpoint::Tail;
    Endpoint at_b = Endpoint::Tail;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Node set plus at most one edge per unordered pair, each end carrying a
/// mark. Covers DAGs, CPDAGs and PAGs. Value-semantic.
class MixedGraph {
public:
    MixedGraph() = default;
    explicit MixedGraph(std::vector<std::string> nodes);

    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    const std::vector<std::string>& nodes() const { return nodes_; }
    const std::string& name(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }
    std::optional<int> find(std::string_view name) const;
    /// Index of a node; throws ConfigError when unknown.
    int index(std::string_view name) const;

    bool adjacent(int a, int b) const { return raw(a, b) != 0; }
    /// Mark at `at` on the edge between `from` and `at`.
    std::optional<Endpoint> endpoint(int from, int at) const;
    /// Same as endpoint() but the edge must exist.
    Endpoint mark(int from, int at) const;

    void set_edge(int a, int b, Endpoint at_a, Endpoint at_b);
    /// Changes the mark at `at` on an existing edge.
    void set_endpoint(int from, int at, Endpoint m);
    void remove_edge(int a, int b);
    void add_directed(int from, int to) { set_edge(from, to, Endpoint::Tail, Endpoint::Arrow); }
    void add_undirected(int a, int b) { set_edge(a, b, Endpoint::Tail, Endpoint::Tail); }
    void clear_edges();

    bool is_directed(int from, int to) const {
        return raw(to, from) == static_cast<std::uint8_t>(Endpoint::Tail) &&
               raw(from, to) == static_cast<std::uint8_t>(Endpoint::Arrow);
    }
    bool is_undirected(int a, int b) const {
        return raw(a, b) == static_cast<std::uint8_t>(Endpoint::Tail) &&
               raw(b, a) == static_cast<std::uint8_t>(Endpoint::Tail);
    }

    std::vector<int> adjacents(int a) const;
    /// Nodes p with p --> a.
    std::vector<int> parents(int a) const;
    /// Nodes c with a --> c.
    std::vector<int> children(int a) const;
    /// Nodes u with a --- u.
    std::vector<int> neighbors(int a) const;

    /// All edges in (a, b) order with a < b.
    std::vector<Edge> edges() const;
    std::size_t num_edges() const;

    /// Copy over the same nodes with every edge's marks replaced.
    MixedGraph with_all_marks(Endpoint m) const;

    friend bool operator==(const MixedGraph& x, const MixedGraph& y) {
        return x.nodes_ == y.nodes_ && x.marks_ == y.marks_;
    }

private:
    std::uint8_t raw(int from, int at) const {
        return marks_[static_cast<std::size_t>(from) * nodes_.size() + static_cast<std::size_t>(at)];
    }
    std::uint8_t& raw(int from, int at) {
        return marks_[static_cast<std::size_t>(from) * nodes_.size() + static_cast<std::size_t>(at)];
    }

    std::vector<std::string> nodes_;
    std::unordered_map<std::string, int> index_;
    // marks_[from * p + at] is the mark at `at` on edge from-at; 0 = no edge.
    std::vector<std::uint8_t> marks_;
};

/// Topological order with ties broken by node index, or nullopt when the
/// graph has a non-directed edge or a directed cycle.
std::optional<std::vector<int>> topological_order(const MixedGraph& g);
bool is_dag(const MixedGraph& g);

/// Every node reachable from `a` along directed edges pointing away from it
/// (a itself excluded).
std::vector<bool> descendants(const MixedGraph& dag, int a);

/// d-separation of x and y given z in a DAG.
bool d_separated(const MixedGraph& dag, int x, int y, const std::vector<int>& z);

/// Canonical CPDAG of the Markov equivalence class of `dag`.
MixedGraph cpdag_of(const MixedGraph& dag);

/// A DAG extending a PDAG (same skeleton, same directed edges, no new
/// unshielded colliders), or nullopt when none exists.
std::optional<MixedGraph> pdag_to_dag(const MixedGraph& pdag);

struct MeekResult {
    MixedGraph graph;
    /// Undirected pairs that knowledge forbids in both directions, or where a
    /// rule wanted a forbidden orientation. Left undirected.
    std::vector<std::pair<int, int>> conflicts;
};

/// Fixed point of Meek rules R1-R4 interleaved with knowledge forcing.
/// Only undirected edges are ever oriented.
MeekResult meek_closure(const MixedGraph& pattern, const EdgeConstraints& knowledge);
MixedGraph meek_closure(const MixedGraph& pattern);

} // namespace caussearch
