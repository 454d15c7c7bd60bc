#include "caussearch/graph_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

#include "caussearch/error.hpp"

namespace caussearch {

namespace {

char mark_char(Endpoint m, bool left) {
    switch (m) {
    case Endpoint::Tail: return '-';
    case Endpoint::Arrow: return left ? '<' : '>';
    case Endpoint::Circle: return 'o';
    }
    return '?';
}

std::string dot_id(const std::string& s) {
    static const std::array<std::string, 6> keywords{"node", "edge", "graph", "digraph", "subgraph", "strict"};
    bool plain = !s.empty() && !std::isdigit(static_cast<unsigned char>(s[0]));
    for (char c : s) plain = plain && (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
    std::string lower = s;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (plain && std::find(keywords.begin(), keywords.end(), lower) == keywords.end()) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

const char* dot_arrow(Endpoint m) {
    switch (m) {
    case Endpoint::Tail: return "none";
    case Endpoint::Arrow: return "normal";
    case Endpoint::Circle: return "odot";
    }
    return "none";
}

int code_of(Endpoint m) {
    switch (m) {
    case Endpoint::Circle: return PcalgMatrix::kCircle;
    case Endpoint::Arrow: return PcalgMatrix::kArrow;
    case Endpoint::Tail: return PcalgMatrix::kTail;
    }
    return PcalgMatrix::kAbsent;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string> lines_of(std::string_view text) {
    auto lines = split(text, '\n');
    for (auto& l : lines) {
        if (!l.empty() && l.back() == '\r') l.pop_back();
    }
    return lines;
}

} // namespace

std::string mark_token(Endpoint at_a, Endpoint at_b) {
    return {mark_char(at_a, true), '-', mark_char(at_b, false)};
}

std::string edge_text(const MixedGraph& g, const Edge& e) {
    int first = e.a;
    int second = e.b;
    Endpoint m1 = e.at_a;
    Endpoint m2 = e.at_b;
    // Canonical forms are -->, <->, ---, o->, o-o, o--.
    if ((m1 == Endpoint::Arrow && m2 != Endpoint::Arrow) || (m1 == Endpoint::Tail && m2 == Endpoint::Circle)) {
        std::swap(first, second);
        std::swap(m1, m2);
    }
    return g.name(first) + " " + mark_token(m1, m2) + " " + g.name(second);
}

std::string to_dot(const MixedGraph& g, const EdgeLabels& labels) {
    std::ostringstream out;
    out << "digraph g {\n";
    for (int v = 0; v < g.num_nodes(); ++v) {
        if (g.adjacents(v).empty()) out << "  " << dot_id(g.name(v)) << ";\n";
    }
    for (const auto& e : g.edges()) {
        out << "  " << dot_id(g.name(e.a)) << " -> " << dot_id(g.name(e.b)) << " [dir=both, arrowtail="
            << dot_arrow(e.at_a) << ", arrowhead=" << dot_arrow(e.at_b);
        if (auto it = labels.find({e.a, e.b}); it != labels.end()) out << ", label=" << dot_id(it->second);
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

PcalgMatrix to_pcalg(const MixedGraph& g) {
    const auto p = static_cast<std::size_t>(g.num_nodes());
    PcalgMatrix m{g.nodes(), std::vector<std::vector<int>>(p, std::vector<int>(p, 0))};
    for (const auto& e : g.edges()) {
        m.codes[static_cast<std::size_t>(e.a)][static_cast<std::size_t>(e.b)] = code_of(e.at_b);
        m.codes[static_cast<std::size_t>(e.b)][static_cast<std::size_t>(e.a)] = code_of(e.at_a);
    }
    return m;
}

MixedGraph from_pcalg(const PcalgMatrix& m) {
    const auto p = m.names.size();
    if (m.codes.size() != p) throw ParseError("pcalg matrix has " + std::to_string(m.codes.size()) + " rows for " +
                                              std::to_string(p) + " nodes");
    MixedGraph g(m.names);
    for (std::size_t i = 0; i < p; ++i) {
        if (m.codes[i].size() != p) throw ParseError("pcalg matrix row " + std::to_string(i) + " has wrong length");
    }
    auto endpoint_of = [](int code) -> Endpoint {
        switch (code) {
        case PcalgMatrix::kCircle: return Endpoint::Circle;
        case PcalgMatrix::kArrow: return Endpoint::Arrow;
        case PcalgMatrix::kTail: return Endpoint::Tail;
        case PcalgMatrix::kStar: throw ParseError("pcalg code 4 (star endpoint) is not supported");
        default: throw ParseError("invalid pcalg endpoint code " + std::to_string(code));
        }
    };
    for (std::size_t i = 0; i < p; ++i) {
        if (m.codes[i][i] != 0) throw ParseError("pcalg matrix has a nonzero diagonal at " + m.names[i]);
        for (std::size_t j = i + 1; j < p; ++j) {
            const int ij = m.codes[i][j];
            const int ji = m.codes[j][i];
            if ((ij == 0) != (ji == 0))
                throw ParseError("pcalg matrix zero pattern is asymmetric between " + m.names[i] + " and " + m.names[j]);
            if (ij == 0) continue;
            g.set_edge(static_cast<int>(i), static_cast<int>(j), endpoint_of(ji), endpoint_of(ij));
        }
    }
    return g;
}

std::string write_pcalg(const PcalgMatrix& m) {
    std::ostringstream out;
    for (std::size_t j = 0; j < m.names.size(); ++j) out << (j ? "\t" : "") << m.names[j];
    out << '\n';
    for (const auto& row : m.codes) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "\t" : "") << row[j];
        out << '\n';
    }
    return out.str();
}

PcalgMatrix parse_pcalg(std::string_view text) {
    auto lines = lines_of(text);
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) throw ParseError("pcalg text is empty");
    PcalgMatrix m;
    if (!lines[0].empty()) m.names = split(lines[0], '\t');
    if (lines.size() != m.names.size() + 1)
        throw ParseError("pcalg text has " + std::to_string(lines.size() - 1) + " rows for " +
                         std::to_string(m.names.size()) + " nodes");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::vector<int> row;
        for (const auto& tok : split(lines[i], '\t')) {
            if (tok.size() != 1 || !std::isdigit(static_cast<unsigned char>(tok[0])))
                throw ParseError("line " + std::to_string(i + 1) + ": bad pcalg code '" + tok + "'");
            row.push_back(tok[0] - '0');
        }
        m.codes.push_back(std::move(row));
    }
    return m;
}

std::string to_lavaan(const MixedGraph& g) {
    for (const auto& e : g.edges()) {
        if (edge_type(e.at_a, e.at_b) != EdgeType::Directed)
            throw NotADagError("not a DAG: edge " + g.name(e.a) + " " + mark_token(e.at_a, e.at_b) + " " + g.name(e.b) +
                               " is not directed");
    }
    if (!is_dag(g)) {
        for (const auto& e : g.edges()) {
            const int from = e.at_b == Endpoint::Arrow ? e.a : e.b;
            const int to = e.at_b == Endpoint::Arrow ? e.b : e.a;
            if (descendants(g, to)[static_cast<std::size_t>(from)])
                throw NotADagError("not a DAG: edge " + g.name(from) + " --> " + g.name(to) + " lies on a directed cycle");
        }
        throw NotADagError("not a DAG");
    }
    std::string out;
    for (int v = 0; v < g.num_nodes(); ++v) {
        auto pa = g.parents(v);
        if (pa.empty()) continue;
        out += g.name(v) + " ~ ";
        for (std::size_t i = 0; i < pa.size(); ++i) out += (i ? " + " : "") + g.name(pa[i]);
        out += '\n';
    }
    return out;
}

std::string to_edge_list_string(const MixedGraph& g) {
    std::string out = "Graph Nodes:\n";
    for (int v = 0; v < g.num_nodes(); ++v) {
        if (g.name(v).find_first_of(",\n") != std::string::npos)
            throw ConfigError("node name '" + g.name(v) + "' cannot be written to an edge list");
        out += (v ? "," : "") + g.name(v);
    }
    out += '\n';
    auto edges = g.edges();
    if (edges.empty()) return out;
    out += "\nGraph Edges:\n";
    int k = 0;
    for (const auto& e : edges) out += std::to_string(++k) + ". " + edge_text(g, e) + "\n";
    return out;
}

MixedGraph parse_edge_list(std::string_view text) {
    static const std::array<std::pair<const char*, std::pair<Endpoint, Endpoint>>, 6> tokens{{
        {" --> ", {Endpoint::Tail, Endpoint::Arrow}},
        {" <-> ", {Endpoint::Arrow, Endpoint::Arrow}},
        {" --- ", {Endpoint::Tail, Endpoint::Tail}},
        {" o-> ", {Endpoint::Circle, Endpoint::Arrow}},
        {" o-o ", {Endpoint::Circle, Endpoint::Circle}},
        {" o-- ", {Endpoint::Circle, Endpoint::Tail}},
    }};
    auto lines = lines_of(text);
    auto fail = [](std::size_t line, const std::string& what) -> ParseError {
        return ParseError("edge list line " + std::to_string(line + 1) + ": " + what);
    };
    std::size_t i = 0;
    auto skip_ignorable = [&] {
        while (i < lines.size() && (lines[i].empty() || lines[i][0] == '#')) ++i;
    };
    skip_ignorable();
    if (i >= lines.size() || lines[i] != "Graph Nodes:") throw fail(i, "expected 'Graph Nodes:'");
    ++i;
    if (i >= lines.size()) throw fail(i, "missing node list");
    std::vector<std::string> names;
    if (!lines[i].empty()) names = split(lines[i], ',');
    ++i;
    MixedGraph g;
    try {
        g = MixedGraph(names);
    } catch (const ConfigError& e) {
        throw fail(i - 1, e.what());
    }
    skip_ignorable();
    if (i >= lines.size()) return g;
    if (lines[i] != "Graph Edges:") throw fail(i, "expected 'Graph Edges:'");
    ++i;
    int expected = 1;
    for (; i < lines.size(); ++i) {
        const auto& line = lines[i];
        if (line.empty() || line[0] == '#') continue;
        auto dot = line.find(". ");
        if (dot == std::string::npos || line.substr(0, dot) != std::to_string(expected))
            throw fail(i, "expected edge number " + std::to_string(expected));
        std::string body = line.substr(dot + 2);
        std::size_t found = std::string::npos;
        std::pair<Endpoint, Endpoint> marks{};
        std::size_t token_len = 0;
        for (const auto& [tok, m] : tokens) {
            auto pos = body.find(tok);
            if (pos == std::string::npos) continue;
            if (found != std::string::npos) throw fail(i, "ambiguous edge '" + body + "'");
            found = pos;
            marks = m;
            token_len = std::char_traits<char>::length(tok);
        }
        if (found == std::string::npos) throw fail(i, "no edge mark in '" + body + "'");
        auto a = g.find(body.substr(0, found));
        auto b = g.find(body.substr(found + token_len));
        if (!a || !b) throw fail(i, "unknown node in '" + body + "'");
        if (*a == *b) throw fail(i, "self-loop in '" + body + "'");
        if (g.adjacent(*a, *b)) throw fail(i, "second edge between the same nodes in '" + body + "'");
        g.set_edge(*a, *b, marks.first, marks.second);
        ++expected;
    }
    return g;
}

} // namespace caussearch
