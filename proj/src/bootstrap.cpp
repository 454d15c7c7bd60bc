#include "caussearch/bootstrap.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <optional>
#include <sstream>
#include <thread>

#include "caussearch/error.hpp"
#include "caussearch/random.hpp"

namespace caussearch {

namespace {

[[noreturn]] void rethrow_for_fold(std::exception_ptr e, int fold) {
    const std::string prefix = "bootstrap fold " + std::to_string(fold) + ": ";
    try {
        std::rethrow_exception(e);
    } catch (const ConfigError& x) {
        throw ConfigError(prefix + x.what());
    } catch (const DataError& x) {
        throw DataError(prefix + x.what());
    } catch (const IncompatibilityError& x) {
        throw IncompatibilityError(prefix + x.what());
    } catch (const NotADagError& x) {
        throw NotADagError(prefix + x.what());
    } catch (const ParseError& x) {
        throw ParseError(prefix + x.what());
    } catch (const std::exception& x) {
        throw Error(prefix + x.what());
    }
}

// Consensus tie-break order.
constexpr std::array<PairEdge, kPairEdgeCount - 1> kPreference{
    PairEdge::Forward,     PairEdge::Backward,       PairEdge::Undirected,
    PairEdge::PartialForward, PairEdge::PartialBackward, PairEdge::Nondirected,
    PairEdge::Bidirected,  PairEdge::CircleTail,     PairEdge::TailCircle};

std::size_t column_of(PairEdge e) {
    return static_cast<std::size_t>(std::find(kPairEdgeColumns.begin(), kPairEdgeColumns.end(), e) -
                                    kPairEdgeColumns.begin());
}

} // namespace

std::string pair_edge_symbol(PairEdge e) {
    switch (e) {
    case PairEdge::Forward: return "-->";
    case PairEdge::Backward: return "<--";
    case PairEdge::Bidirected: return "<->";
    case PairEdge::PartialForward: return "o->";
    case PairEdge::PartialBackward: return "<-o";
    case PairEdge::Nondirected: return "o-o";
    case PairEdge::Undirected: return "---";
    case PairEdge::CircleTail: return "o--";
    case PairEdge::TailCircle: return "--o";
    case PairEdge::Absent: return "absent";
    }
    return "?";
}

PairEdge classify(const MixedGraph& g, int a, int b) {
    auto at_b = g.endpoint(a, b);
    if (!at_b) return PairEdge::Absent;
    const Endpoint at_a = g.mark(b, a);
    using E = Endpoint;
    switch (static_cast<int>(at_a) * 4 + static_cast<int>(*at_b)) {
    case static_cast<int>(E::Tail) * 4 + static_cast<int>(E::Arrow): return PairEdge::Forward;
    case static_cast<int>(E::Arrow) * 4 + static_cast<int>(E::Tail): return PairEdge::Backward;
    case static_cast<int>(E::Arrow) * 4 + static_cast<int>(E::Arrow): return PairEdge::Bidirected;
    case static_cast<int>(E::Circle) * 4 + static_cast<int>(E::Arrow): return PairEdge::PartialForward;
    case static_cast<int>(E::Arrow) * 4 + static_cast<int>(E::Circle): return PairEdge::PartialBackward;
    case static_cast<int>(E::Circle) * 4 + static_cast<int>(E::Circle): return PairEdge::Nondirected;
    case static_cast<int>(E::Tail) * 4 + static_cast<int>(E::Tail): return PairEdge::Undirected;
    case static_cast<int>(E::Circle) * 4 + static_cast<int>(E::Tail): return PairEdge::CircleTail;
    default: return PairEdge::TailCircle;
    }
}

double EdgeStatTable::frequency(int a, int b, PairEdge e) const {
    if (a > b) {
        std::swap(a, b);
        switch (e) {
        case PairEdge::Forward: e = PairEdge::Backward; break;
        case PairEdge::Backward: e = PairEdge::Forward; break;
        case PairEdge::PartialForward: e = PairEdge::PartialBackward; break;
        case PairEdge::PartialBackward: e = PairEdge::PartialForward; break;
        case PairEdge::CircleTail: e = PairEdge::TailCircle; break;
        case PairEdge::TailCircle: e = PairEdge::CircleTail; break;
        default: break;
        }
    }
    auto it = rows_.find({a, b});
    if (it == rows_.end()) throw ConfigError("no such pair in edge table");
    return it->second[column_of(e)];
}

void EdgeStatTable::write(std::ostream& out) const {
    out << "pair";
    for (auto e : kPairEdgeColumns) out << '\t' << pair_edge_symbol(e);
    out << '\n';
    char buf[32];
    for (const auto& [pair, row] : rows_) {
        if (row[column_of(PairEdge::Absent)] >= 1.0) continue;
        out << '(' << nodes_[static_cast<std::size_t>(pair.first)] << ", " << nodes_[static_cast<std::size_t>(pair.second)]
            << ')';
        for (double f : row) {
            std::snprintf(buf, sizeof buf, "%.2f", f);
            out << '\t' << buf;
        }
        out << '\n';
    }
}

std::string EdgeStatTable::to_string() const {
    std::ostringstream ss;
    write(ss);
    return ss.str();
}

std::vector<MixedGraph> bootstrap_search(const Dataset& d, const FoldSearch& search, int reps, std::uint64_t seed,
                                         unsigned threads) {
    if (reps < 1) throw ConfigError("bootstrap needs at least one resampling (got " + std::to_string(reps) + ")");
    const auto n = static_cast<std::size_t>(reps);
    std::vector<std::optional<MixedGraph>> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                results[i] = search(resample(d, derive_seed(seed, i)));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(n));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }
    std::vector<MixedGraph> graphs;
    graphs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i]) rethrow_for_fold(errors[i], static_cast<int>(i));
        graphs.push_back(std::move(*results[i]));
    }
    return graphs;
}

EdgeStatTable graphs_to_probs(const std::vector<MixedGraph>& graphs) {
    if (graphs.empty()) throw ConfigError("graphs_to_probs needs at least one graph");
    const auto& nodes = graphs.front().nodes();
    for (const auto& g : graphs) {
        if (g.nodes() != nodes) throw ConfigError("graphs_to_probs: graphs have different node sets");
    }
    const int p = static_cast<int>(nodes.size());
    const double count = static_cast<double>(graphs.size());
    std::map<std::pair<int, int>, EdgeStatTable::Row> rows;
    for (int a = 0; a < p; ++a) {
        for (int b = a + 1; b < p; ++b) {
            std::array<std::size_t, kPairEdgeCount> tally{};
            for (const auto& g : graphs) ++tally[column_of(classify(g, a, b))];
            EdgeStatTable::Row row{};
            for (std::size_t c = 0; c < kPairEdgeCount; ++c) row[c] = static_cast<double>(tally[c]) / count;
            rows.emplace(std::pair{a, b}, row);
        }
    }
    return EdgeStatTable(nodes, std::move(rows), graphs.size());
}

LabeledGraph consensus_graph(const EdgeStatTable& table, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("consensus threshold must lie in (0, 1]");
    LabeledGraph out{MixedGraph(table.nodes()), {}};
    for (const auto& [pair, row] : table.rows()) {
        const double adjacency = 1.0 - row[column_of(PairEdge::Absent)];
        if (adjacency < threshold) continue;
        PairEdge best = kPreference.front();
        double best_freq = -1.0;
        for (auto e : kPreference) {
            if (row[column_of(e)] > best_freq) {
                best = e;
                best_freq = row[column_of(e)];
            }
        }
        auto [a, b] = pair;
        using E = Endpoint;
        switch (best) {
        case PairEdge::Forward: out.graph.set_edge(a, b, E::Tail, E::Arrow); break;
        case PairEdge::Backward: out.graph.set_edge(a, b, E::Arrow, E::Tail); break;
        case PairEdge::Bidirected: out.graph.set_edge(a, b, E::Arrow, E::Arrow); break;
        case PairEdge::PartialForward: out.graph.set_edge(a, b, E::Circle, E::Arrow); break;
        case PairEdge::PartialBackward: out.graph.set_edge(a, b, E::Arrow, E::Circle); break;
        case PairEdge::Nondirected: out.graph.set_edge(a, b, E::Circle, E::Circle); break;
        case PairEdge::Undirected: out.graph.set_edge(a, b, E::Tail, E::Tail); break;
        case PairEdge::CircleTail: out.graph.set_edge(a, b, E::Circle, E::Tail); break;
        case PairEdge::TailCircle: out.graph.set_edge(a, b, E::Tail, E::Circle); break;
        case PairEdge::Absent: break;
        }
        out.labels[pair] = best_freq;
    }
    return out;
}

} // namespace caussearch
