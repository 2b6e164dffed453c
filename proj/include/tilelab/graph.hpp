#pragma once

#include <boost/dynamic_bitset.hpp>

#include <algorithm>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tilelab {

using Bits = boost::dynamic_bitset<unsigned long long>;
using Edge = std::pair<int, int>;  // normalized: first < second

// Subset of [0,n) for an associated Graph. Members kept sorted and unique.
struct VertexSet {
    std::vector<int> members;

    VertexSet() = default;
    VertexSet(std::initializer_list<int> init) : members(init) { normalize(); }
    explicit VertexSet(std::vector<int> init) : members(std::move(init)) { normalize(); }

    static VertexSet full(int n) {
        VertexSet s;
        s.members.resize(static_cast<size_t>(std::max(n, 0)));
        for (int v = 0; v < n; ++v) s.members[static_cast<size_t>(v)] = v;
        return s;
    }

    static VertexSet from_bits(const Bits& bits) {
        VertexSet s;
        for (auto v = bits.find_first(); v != Bits::npos; v = bits.find_next(v))
            s.members.push_back(static_cast<int>(v));
        return s;
    }

    int size() const { return static_cast<int>(members.size()); }
    bool empty() const { return members.empty(); }

    bool contains(int v) const {
        return std::binary_search(members.begin(), members.end(), v);
    }

    Bits bits(int n) const {
        Bits b(static_cast<size_t>(n));
        for (int v : members) {
            if (v < 0 || v >= n) throw std::invalid_argument("vertex set member out of range");
            b.set(static_cast<size_t>(v));
        }
        return b;
    }

    bool operator==(const VertexSet& other) const { return members == other.members; }

private:
    void normalize() {
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
    }
};

// Immutable simple undirected graph on vertices 0..n-1.
class Graph {
public:
    Graph() = default;

    static Graph from_edge_list(int n, const std::vector<Edge>& pairs) {
        if (n < 0) throw std::invalid_argument("negative vertex count");
        std::vector<Edge> normalized;
        normalized.reserve(pairs.size());
        for (auto [u, v] : pairs) {
            if (u < 0 || u >= n || v < 0 || v >= n)
                throw std::invalid_argument("edge endpoint out of range: (" + std::to_string(u) +
                                            "," + std::to_string(v) + ") with n=" + std::to_string(n));
            if (u == v)
                throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
            normalized.emplace_back(std::min(u, v), std::max(u, v));
        }
        std::sort(normalized.begin(), normalized.end());
        normalized.erase(std::unique(normalized.begin(), normalized.end()), normalized.end());
        return Graph(n, std::move(normalized));
    }

    static Graph complete(int n) {
        std::vector<Edge> pairs;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
        return from_edge_list(n, pairs);
    }

    static Graph empty_graph(int n) { return from_edge_list(n, {}); }

    int vertex_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }

    bool has_edge(int u, int v) const {
        check_vertex(u);
        check_vertex(v);
        return u != v && adj_[static_cast<size_t>(u)].test(static_cast<size_t>(v));
    }

    const Bits& neighbours(int v) const {
        check_vertex(v);
        return adj_[static_cast<size_t>(v)];
    }

    int degree(int v) const {
        check_vertex(v);
        return static_cast<int>(adj_[static_cast<size_t>(v)].count());
    }

    int degree_into(int v, const VertexSet& s) const {
        check_vertex(v);
        int count = 0;
        for (int w : s.members) {
            if (w < 0 || w >= n_) throw std::invalid_argument("vertex set member out of range");
            if (adj_[static_cast<size_t>(v)].test(static_cast<size_t>(w))) ++count;
        }
        return count;
    }

    int degree_into(int v, const Bits& mask) const {
        check_vertex(v);
        return static_cast<int>((adj_[static_cast<size_t>(v)] & mask).count());
    }

    // Defined as 0 for the empty graph.
    int min_degree() const {
        int best = 0;
        for (int v = 0; v < n_; ++v) {
            int d = degree(v);
            if (v == 0 || d < best) best = d;
        }
        return best;
    }

    bool operator==(const Graph& other) const {
        return n_ == other.n_ && edges_ == other.edges_;
    }
    bool operator!=(const Graph& other) const { return !(*this == other); }

private:
    Graph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
        adj_.assign(static_cast<size_t>(n), Bits(static_cast<size_t>(n)));
        for (auto [u, v] : edges_) {
            adj_[static_cast<size_t>(u)].set(static_cast<size_t>(v));
            adj_[static_cast<size_t>(v)].set(static_cast<size_t>(u));
        }
    }

    void check_vertex(int v) const {
        if (v < 0 || v >= n_)
            throw std::invalid_argument("vertex " + std::to_string(v) + " out of range [0," +
                                        std::to_string(n_) + ")");
    }

    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<Bits> adj_;
};

inline Graph graph_union(const Graph& g1, const Graph& g2) {
    if (g1.vertex_count() != g2.vertex_count())
        throw std::invalid_argument("union of graphs with different vertex counts");
    std::vector<Edge> pairs = g1.edges();
    pairs.insert(pairs.end(), g2.edges().begin(), g2.edges().end());
    return Graph::from_edge_list(g1.vertex_count(), pairs);
}

struct InducedSubgraph {
    Graph graph;
    std::vector<int> to_parent;  // new label -> old label, increasing
};

inline InducedSubgraph induced(const Graph& g, const VertexSet& s) {
    std::vector<int> to_parent = s.members;
    std::vector<int> to_child(static_cast<size_t>(g.vertex_count()), -1);
    for (size_t i = 0; i < to_parent.size(); ++i) {
        int v = to_parent[i];
        if (v < 0 || v >= g.vertex_count())
            throw std::invalid_argument("induced: member out of range");
        to_child[static_cast<size_t>(v)] = static_cast<int>(i);
    }
    std::vector<Edge> pairs;
    for (auto [u, v] : g.edges()) {
        int cu = to_child[static_cast<size_t>(u)];
        int cv = to_child[static_cast<size_t>(v)];
        if (cu >= 0 && cv >= 0) pairs.emplace_back(cu, cv);
    }
    return {Graph::from_edge_list(s.size(), pairs), std::move(to_parent)};
}

inline int min_degree(const Graph& g) { return g.min_degree(); }

// A few named small graphs used throughout tests and the CLI.
inline Graph make_path(int n) {
    std::vector<Edge> pairs;
    for (int v = 0; v + 1 < n; ++v) pairs.emplace_back(v, v + 1);
    return Graph::from_edge_list(n, pairs);
}

inline Graph make_cycle(int n) {
    if (n < 3) throw std::invalid_argument("cycle needs at least 3 vertices");
    std::vector<Edge> pairs;
    for (int v = 0; v < n; ++v) pairs.emplace_back(v, (v + 1) % n);
    return Graph::from_edge_list(n, pairs);
}

// Star with centre 0 and t leaves.
inline Graph make_star(int t) {
    std::vector<Edge> pairs;
    for (int leaf = 1; leaf <= t; ++leaf) pairs.emplace_back(0, leaf);
    return Graph::from_edge_list(t + 1, pairs);
}

inline Graph make_complete_bipartite(int a, int b) {
    std::vector<Edge> pairs;
    for (int u = 0; u < a; ++u)
        for (int v = a; v < a + b; ++v) pairs.emplace_back(u, v);
    return Graph::from_edge_list(a + b, pairs);
}

}  // namespace tilelab
