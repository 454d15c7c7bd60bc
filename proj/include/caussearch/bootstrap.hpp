#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "caussearch/dataset.hpp"
#include "caussearch/graph.hpp"

namespace caussearch {

/// Edge kinds relative to an ordered pair (a, b), a before b.
enum class PairEdge {
    Forward,           // a --> b
    Backward,          // a <-- b
    Bidirected,        // a <-> b
    PartialForward,    // a o-> b
    PartialBackward,   // a <-o b
    Nondirected,       // a o-o b
    Undirected,        // a --- b
    CircleTail,        // a o-- b
    TailCircle,        // a --o b
    Absent
};

inline constexpr std::size_t kPairEdgeCount = 10;
inline constexpr std::array<PairEdge, kPairEdgeCount> kPairEdgeColumns{
    PairEdge::Forward,     PairEdge::Backward,   PairEdge::Bidirected, PairEdge::PartialForward,
    PairEdge::PartialBackward, PairEdge::Nondirected, PairEdge::Undirected, PairEdge::CircleTail,
    PairEdge::TailCircle,  PairEdge::Absent};

/// Column symbol, e.g. "-->" or "absent".
std::string pair_edge_symbol(PairEdge e);
PairEdge classify(const MixedGraph& g, int a, int b);

/// Per unordered pair, the fraction of graphs showing each edge kind.
class EdgeStatTable {
public:
    using Row = std::array<double, kPairEdgeCount>;

    EdgeStatTable() = default;
    EdgeStatTable(std::vector<std::string> nodes, std::map<std::pair<int, int>, Row> rows, std::size_t graph_count)
        : nodes_(std::move(nodes)), rows_(std::move(rows)), graph_count_(graph_count) {}

    const std::vector<std::string>& nodes() const { return nodes_; }
    /// Every pair (a, b) with a < b.
    const std::map<std::pair<int, int>, Row>& rows() const { return rows_; }
    double frequency(int a, int b, PairEdge e) const;
    double adjacency_frequency(int a, int b) const { return 1.0 - frequency(a, b, PairEdge::Absent); }
    std::size_t graph_count() const { return graph_count_; }

    /// Tab-separated: "pair" then one column per edge kind, two decimals.
    /// Only pairs adjacent in at least one graph are listed.
    void write(std::ostream& out) const;
    std::string to_string() const;

    friend bool operator==(const EdgeStatTable&, const EdgeStatTable&) = default;

private:
    std::vector<std::string> nodes_;
    std::map<std::pair<int, int>, Row> rows_;
    std::size_t graph_count_ = 0;
};

/// Runs one search on a dataset; must be safe to call concurrently.
using FoldSearch = std::function<MixedGraph(const Dataset&)>;

/// `reps` searches, fold i on resample(d, derive_seed(seed, i)), returned in
/// fold order. Folds run on up to `threads` workers (0 = hardware).
std::vector<MixedGraph> bootstrap_search(const Dataset& d, const FoldSearch& search, int reps, std::uint64_t seed,
                                         unsigned threads = 0);

EdgeStatTable graphs_to_probs(const std::vector<MixedGraph>& graphs);

struct LabeledGraph {
    MixedGraph graph;
    /// Frequency of the chosen edge kind, keyed by (a, b) with a < b.
    std::map<std::pair<int, int>, double> labels;
};

/// Pairs with adjacency frequency >= threshold, each with its modal kind.
LabeledGraph consensus_graph(const EdgeStatTable& table, double threshold = 0.5);

} // namespace caussearch
