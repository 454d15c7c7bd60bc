#include <algorithm>
#include <iostream>

#include "caussearch/error.hpp"
#include "caussearch/search.hpp"
#include "combinations.hpp"

namespace caussearch {

bool SepsetMap::contains(int a, int b, int v) const {
    const auto* z = get(a, b);
    return z && std::find(z->begin(), z->end(), v) != z->end();
}

EdgeConstraints compile_knowledge(const Knowledge& knowledge, const std::vector<std::string>& variables) {
    auto problems = knowledge.validate(variables);
    if (!problems.empty()) {
        std::string msg = "invalid knowledge:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw ConfigError(msg);
    }
    return EdgeConstraints(knowledge, variables);
}

Skeleton adjacency_search(const IndependenceTest& test, const EdgeConstraints& knowledge, const SearchConfig& cfg) {
    if (cfg.depth < -1) throw ConfigError("depth must be >= -1");
    const auto& names = test.variables();
    const int p = static_cast<int>(names.size());
    Skeleton out{MixedGraph(names), {}};
    auto& g = out.graph;
    for (int a = 0; a < p; ++a) {
        for (int b = a + 1; b < p; ++b) {
            if (!knowledge.forbidden_both(a, b)) g.add_undirected(a, b);
        }
    }

    for (int level = 0; cfg.depth < 0 || level <= cfg.depth; ++level) {
        std::vector<std::vector<int>> frozen(static_cast<std::size_t>(p));
        for (int x = 0; x < p; ++x) frozen[static_cast<std::size_t>(x)] = g.adjacents(x);
        bool more = false;
        for (int x = 0; x < p; ++x) {
            for (int y : frozen[static_cast<std::size_t>(x)]) {
                if (!g.adjacent(x, y) || knowledge.required_either(x, y)) continue;
                std::vector<int> candidates;
                for (int v : frozen[static_cast<std::size_t>(x)]) {
                    if (v != y) candidates.push_back(v);
                }
                if (candidates.size() < static_cast<std::size_t>(level)) continue;
                more = true;
                detail::for_each_subset(candidates, static_cast<std::size_t>(level), [&](const std::vector<int>& z) {
                    if (!test.decide(x, y, z).independent) return false;
                    g.remove_edge(x, y);
                    out.sepsets.set(x, y, z);
                    return true;
                });
            }
        }
        if (!more) break;
    }
    return out;
}

MixedGraph pc_search(const IndependenceTest& test, const Knowledge& knowledge, const SearchConfig& cfg) {
    const auto constraints = compile_knowledge(knowledge, test.variables());
    auto [g, sepsets] = adjacency_search(test, constraints, cfg);
    const int p = g.num_nodes();
    auto allowed = [&](int from, int to) {
        return !constraints.forbidden(from, to) && !constraints.required(to, from);
    };

    for (int z = 0; z < p; ++z) {
        auto adj = g.adjacents(z);
        for (std::size_t i = 0; i < adj.size(); ++i) {
            for (std::size_t j = i + 1; j < adj.size(); ++j) {
                const int x = adj[i];
                const int y = adj[j];
                if (g.adjacent(x, y) || !sepsets.get(x, y) || sepsets.contains(x, y, z)) continue;
                // First orientation wins: never flip an arrowhead already placed.
                const bool ok = allowed(x, z) && allowed(y, z) && !g.is_directed(z, x) && !g.is_directed(z, y);
                if (!ok) {
                    if (cfg.verbose)
                        std::clog << "pc: skipped collider " << g.name(x) << " -> " << g.name(z) << " <- "
                                  << g.name(y) << '\n';
                    continue;
                }
                g.add_directed(x, z);
                g.add_directed(y, z);
            }
        }
    }

    auto closed = meek_closure(g, constraints);
    if (cfg.verbose) {
        for (auto [a, b] : closed.conflicts)
            std::clog << "pc: orientation conflict on " << g.name(a) << " --- " << g.name(b) << '\n';
    }
    return std::move(closed.graph);
}

} // namespace caussearch
