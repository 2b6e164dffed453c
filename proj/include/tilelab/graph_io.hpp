#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tilelab/graph.hpp"

namespace tilelab {

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Edge-list text format: first line "n", then one "u v" per line,
// whitespace-separated. '#' starts a comment, blank lines are skipped.
inline Graph parse_edge_list(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool have_n = false;
    int n = 0;
    std::vector<Edge> pairs;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        if (!have_n) {
            if (!(fields >> n)) continue;  // blank/comment-only line before header
            std::string extra;
            if (fields >> extra)
                throw ParseError("edge list line " + std::to_string(line_no) +
                                 ": expected a single vertex count");
            if (n < 0)
                throw ParseError("edge list line " + std::to_string(line_no) +
                                 ": negative vertex count");
            have_n = true;
            continue;
        }
        int u, v;
        if (!(fields >> u)) continue;
        if (!(fields >> v))
            throw ParseError("edge list line " + std::to_string(line_no) +
                             ": expected \"u v\"");
        std::string extra;
        if (fields >> extra)
            throw ParseError("edge list line " + std::to_string(line_no) +
                             ": trailing tokens after edge");
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw ParseError("edge list line " + std::to_string(line_no) +
                             ": endpoint out of range [0," + std::to_string(n) + ")");
        if (u == v)
            throw ParseError("edge list line " + std::to_string(line_no) + ": self-loop");
        pairs.emplace_back(u, v);
    }
    if (!have_n) throw ParseError("edge list: missing vertex-count header line");
    return Graph::from_edge_list(n, pairs);
}

inline std::string serialize_edge_list(const Graph& g) {
    std::ostringstream out;
    out << g.vertex_count() << "\n";
    for (auto [u, v] : g.edges()) out << u << " " << v << "\n";
    return out.str();
}

// graph6: 6-bit groups with offset 63, upper triangle column-major.
inline std::string to_graph6(const Graph& g) {
    int n = g.vertex_count();
    std::string out;
    if (n <= 62) {
        out.push_back(static_cast<char>(n + 63));
    } else if (n <= 258047) {
        out.push_back(126);
        out.push_back(static_cast<char>(((n >> 12) & 63) + 63));
        out.push_back(static_cast<char>(((n >> 6) & 63) + 63));
        out.push_back(static_cast<char>((n & 63) + 63));
    } else {
        throw std::invalid_argument("graph6: vertex count above supported range");
    }
    int group = 0;
    int bits_in_group = 0;
    for (int j = 1; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
            group = (group << 1) | (g.has_edge(i, j) ? 1 : 0);
            if (++bits_in_group == 6) {
                out.push_back(static_cast<char>(group + 63));
                group = 0;
                bits_in_group = 0;
            }
        }
    }
    if (bits_in_group > 0) {
        group <<= (6 - bits_in_group);
        out.push_back(static_cast<char>(group + 63));
    }
    return out;
}

inline Graph parse_graph6(const std::string& text) {
    size_t pos = 0;
    auto need = [&](size_t k) {
        if (pos + k > text.size())
            throw ParseError("graph6: truncated input at offset " + std::to_string(pos));
    };
    auto value = [&](size_t at) {
        unsigned char c = static_cast<unsigned char>(text[at]);
        if (c < 63 || c > 126)
            throw ParseError("graph6: byte out of range at offset " + std::to_string(at));
        return static_cast<int>(c - 63);
    };
    need(1);
    long long n;
    if (static_cast<unsigned char>(text[pos]) == 126) {
        ++pos;
        need(3);
        n = (static_cast<long long>(value(pos)) << 12) |
            (static_cast<long long>(value(pos + 1)) << 6) | value(pos + 2);
        pos += 3;
        if (n <= 62) throw ParseError("graph6: non-canonical long size header");
    } else {
        n = value(pos);
        ++pos;
    }
    long long bit_count = n * (n - 1) / 2;
    size_t groups = static_cast<size_t>((bit_count + 5) / 6);
    need(groups);
    if (pos + groups != text.size())
        throw ParseError("graph6: trailing bytes at offset " + std::to_string(pos + groups));
    std::vector<Edge> pairs;
    long long bit_index = 0;
    for (int j = 1; j < n; ++j) {
        for (int i = 0; i < j; ++i, ++bit_index) {
            int group = value(pos + static_cast<size_t>(bit_index / 6));
            int bit = (group >> (5 - (bit_index % 6))) & 1;
            if (bit) pairs.emplace_back(i, j);
        }
    }
    // padding bits must be zero
    for (long long b = bit_count; b < static_cast<long long>(groups) * 6; ++b) {
        int group = value(pos + static_cast<size_t>(b / 6));
        if ((group >> (5 - (b % 6))) & 1)
            throw ParseError("graph6: nonzero padding bit");
    }
    return Graph::from_edge_list(static_cast<int>(n), pairs);
}

enum class GraphFormat { EdgeList, Graph6, Auto };

inline Graph parse_graph(const std::string& text, GraphFormat format = GraphFormat::Auto) {
    if (format == GraphFormat::EdgeList) return parse_edge_list(text);
    if (format == GraphFormat::Graph6) {
        std::string trimmed = text;
        while (!trimmed.empty() && (trimmed.back() == '\n' || trimmed.back() == '\r'))
            trimmed.pop_back();
        return parse_graph6(trimmed);
    }
    // Auto: an edge list starts with an ASCII integer header; anything else is
    // treated as graph6.
    size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '#'))
        return parse_edge_list(text);
    return parse_graph(text, GraphFormat::Graph6);
}

inline Graph load_graph(const std::string& path, GraphFormat format = GraphFormat::Auto) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open graph file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str(), format);
}

inline void save_graph(const Graph& g, const std::string& path,
                       GraphFormat format = GraphFormat::EdgeList) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    if (format == GraphFormat::Graph6)
        out << to_graph6(g) << "\n";
    else
        out << serialize_edge_list(g);
}

}  // namespace tilelab
