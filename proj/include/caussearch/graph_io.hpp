#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "caussearch/graph.hpp"

namespace caussearch {

/// Endpoint matrix: codes[i][j] is the mark at node j on edge i - j.
struct PcalgMatrix {
    static constexpr int kAbsent = 0;
    static constexpr int kCircle = 1;
    static constexpr int kArrow = 2;
    static constexpr int kTail = 3;
    static constexpr int kStar = 4; // reserved, never produced or accepted

    std::vector<std::string> names;
    std::vector<std::vector<int>> codes;

    friend bool operator==(const PcalgMatrix&, const PcalgMatrix&) = default;
};

using EdgeLabels = std::map<std::pair<int, int>, std::string>;

/// Graphviz digraph; every edge uses dir=both so circle marks render.
std::string to_dot(const MixedGraph& g, const EdgeLabels& labels = {});

PcalgMatrix to_pcalg(const MixedGraph& g);
MixedGraph from_pcalg(const PcalgMatrix& m);
/// Header row of names, then one row of codes per node; tab separated.
std::string write_pcalg(const PcalgMatrix& m);
PcalgMatrix parse_pcalg(std::string_view text);

/// "child ~ p1 + p2" per node with parents. Throws NotADagError otherwise.
std::string to_lavaan(const MixedGraph& g);

/// "Graph Nodes:" / "Graph Edges:" text with numbered "a --> b" lines.
std::string to_edge_list_string(const MixedGraph& g);
/// Inverse of to_edge_list_string; lines starting with '#' are ignored.
MixedGraph parse_edge_list(std::string_view text);

/// Mark token for an edge written from `a` to `b`, e.g. "o->".
std::string mark_token(Endpoint at_a, Endpoint at_b);
/// One edge as it appears in the edge list, e.g. "X o-> Y".
std::string edge_text(const MixedGraph& g, const Edge& e);

} // namespace caussearch
