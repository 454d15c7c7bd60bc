#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "caussearch/graph.hpp"
#include "caussearch/knowledge.hpp"
#include "caussearch/stats.hpp"

namespace caussearch {

struct SearchConfig {
    /// Largest conditioning set tried by PC/FCI; -1 = unlimited.
    int depth = -1;
    std::uint64_t seed = 0;
    int grasp_dfs_depth = 3;
    /// Number of GRaSP starting permutations; the first is the data order
    /// (or `initial_order`), the rest are seeded shuffles.
    int grasp_restarts = 1;
    /// Explicit GRaSP starting permutation, by variable index.
    std::optional<std::vector<int>> initial_order;
    bool verbose = false;
};

/// Conditioning sets that separated each removed pair, keyed by (min, max).
class SepsetMap {
public:
    void set(int a, int b, std::vector<int> z) { sets_[key(a, b)] = std::move(z); }
    const std::vector<int>* get(int a, int b) const {
        auto it = sets_.find(key(a, b));
        return it == sets_.end() ? nullptr : &it->second;
    }
    bool contains(int a, int b, int v) const;
    std::size_t size() const { return sets_.size(); }

private:
    static std::pair<int, int> key(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }
    std::map<std::pair<int, int>, std::vector<int>> sets_;
};

struct Skeleton {
    MixedGraph graph; // undirected edges only
    SepsetMap sepsets;
};

/// Level-wise adjacency search shared by PC and FCI. Adjacency sets are
/// frozen at the start of each level, so the result does not depend on the
/// order in which pairs are visited.
Skeleton adjacency_search(const IndependenceTest& test, const EdgeConstraints& knowledge, const SearchConfig& cfg);

MixedGraph pc_search(const IndependenceTest& test, const Knowledge& knowledge, const SearchConfig& cfg = {});
MixedGraph fges_search(const Score& score, const Knowledge& knowledge, const SearchConfig& cfg = {});
MixedGraph grasp_search(const Score& score, const Knowledge& knowledge, const SearchConfig& cfg = {});
MixedGraph fci_search(const IndependenceTest& test, const Knowledge& knowledge, const SearchConfig& cfg = {});

/// Throws ConfigError listing every knowledge problem against `variables`.
EdgeConstraints compile_knowledge(const Knowledge& knowledge, const std::vector<std::string>& variables);

namespace detail {

/// Parents of `y` chosen among `candidates` by greedy forward-add then
/// backward-remove on the local score. Forbidden parents are skipped and
/// required ones always kept.
std::vector<int> project_node(const Score& score, int y, const std::vector<int>& candidates,
                              const EdgeConstraints& knowledge);

/// DAG whose parent sets respect `order`, one project_node call per node.
/// Returned as one parent list per node index.
std::vector<std::vector<int>> project_order(const Score& score, const std::vector<int>& order,
                                            const EdgeConstraints& knowledge);

/// Moves `y` and its ancestors lying between `x` and `y` to just before `x`,
/// keeping their relative order.
std::vector<int> tuck(const std::vector<int>& order, int x, int y, const std::vector<std::vector<int>>& parents_of);

MixedGraph dag_from_parents(const std::vector<std::string>& names, const std::vector<std::vector<int>>& parents_of);

} // namespace detail

} // namespace caussearch
