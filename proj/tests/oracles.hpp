// Test-only oracles: independent brute-force implementations checked against
// the library. Everything here works from raw definitions (all subgraphs, all
// partitions, all bijections) and deliberately shares no code with the
// library's algorithmic paths.
#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tilelab/density.hpp"
#include "tilelab/graph.hpp"
#include "tilelab/random_models.hpp"

namespace oracle {

using tilelab::BalanceCategory;
using tilelab::Edge;
using tilelab::Graph;
using tilelab::Rational;

// exact fraction comparison without normalization overhead
struct Frac {
    long long num = -1;
    long long den = 1;
};
inline bool frac_less(const Frac& a, const Frac& b) { return a.num * b.den < b.num * a.den; }
inline bool frac_eq(const Frac& a, const Frac& b) { return a.num * b.den == b.num * a.den; }

struct OracleProfile {
    Rational d;
    Rational d_star;
    std::vector<Rational> d_star_v;
    std::vector<long long> s_v;
    long long s = 0;
    bool strictly_balanced = true;
    bool balanced = false;
    bool vertex_balanced = true;
    BalanceCategory category = BalanceCategory::StrictlyBalanced;
    bool induced_suffices = true;  // d(H') <= d(H[V(H')]) for every subgraph H'
};

// Enumerates every subgraph H' = (S, F) with |S| >= 2, F a subset of the
// induced edges, and evaluates all the density definitions directly.
inline OracleProfile oracle_classify(const Graph& h) {
    int n = h.vertex_count();
    OracleProfile out;
    out.d = Rational(h.edge_count(), n - 1);
    Frac d_whole{h.edge_count(), n - 1};
    Frac best{-1, 1};
    std::vector<Frac> best_v(static_cast<size_t>(n), Frac{-1, 1});
    std::vector<long long> s_v(static_cast<size_t>(n), -1);

    for (std::uint32_t subset = 0; subset < (1u << n); ++subset) {
        int size = std::popcount(subset);
        if (size < 2) continue;
        std::vector<Edge> inside;
        for (auto [u, v] : h.edges())
            if ((subset >> u & 1) && (subset >> v & 1)) inside.emplace_back(u, v);
        int e_induced = static_cast<int>(inside.size());
        for (std::uint32_t fmask = 0; fmask < (1u << e_induced); ++fmask) {
            int e = std::popcount(fmask);
            Frac val{e, size - 1};
            if (frac_less(Frac{e_induced, size - 1}, val)) out.induced_suffices = false;
            bool proper = subset != (1u << n) - 1 || e != h.edge_count();
            if (proper && !frac_less(val, d_whole)) out.strictly_balanced = false;
            if (frac_less(best, val)) best = val;
            for (int v = 0; v < n; ++v) {
                if (!(subset >> v & 1)) continue;
                auto& bv = best_v[static_cast<size_t>(v)];
                if (frac_less(bv, val)) {
                    bv = val;
                    s_v[static_cast<size_t>(v)] = e;
                } else if (frac_eq(bv, val) && (s_v[static_cast<size_t>(v)] < 0 ||
                                                e < s_v[static_cast<size_t>(v)])) {
                    s_v[static_cast<size_t>(v)] = e;
                }
            }
        }
    }
    out.d_star = Rational(best.num, best.den);
    for (int v = 0; v < n; ++v) {
        out.d_star_v.emplace_back(best_v[static_cast<size_t>(v)].num,
                                  best_v[static_cast<size_t>(v)].den);
        out.s_v.push_back(s_v[static_cast<size_t>(v)]);
    }
    out.s = *std::max_element(out.s_v.begin(), out.s_v.end());
    out.balanced = out.d_star == out.d;
    for (const auto& dv : out.d_star_v)
        if (dv != out.d_star) out.vertex_balanced = false;
    if (out.strictly_balanced)
        out.category = BalanceCategory::StrictlyBalanced;
    else if (out.balanced)
        out.category = BalanceCategory::BalancedNotStrictly;
    else if (out.vertex_balanced)
        out.category = BalanceCategory::VertexBalancedNotBalanced;
    else
        out.category = BalanceCategory::NonVertexBalanced;
    return out;
}

// Does some injective map of the template onto exactly `group` preserve all
// template edges? Brute force over permutations.
inline bool spans_copy(const Graph& g, const Graph& h, const std::vector<int>& group) {
    std::vector<int> perm(group);
    std::sort(perm.begin(), perm.end());
    do {
        bool ok = true;
        for (auto [u, v] : h.edges())
            if (!g.has_edge(perm[static_cast<size_t>(u)], perm[static_cast<size_t>(v)])) {
                ok = false;
                break;
            }
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

// Exhaustive set-partition decision for a perfect tiling: the lowest
// uncovered vertex is grouped with every (|H|-1)-subset of the rest.
inline bool oracle_perfect_tiling(const Graph& g, const Graph& h) {
    int n = g.vertex_count();
    int k = h.vertex_count();
    if (n % k != 0) return false;
    std::vector<int> free_list;
    std::function<bool(std::uint32_t)> rec = [&](std::uint32_t uncovered) -> bool {
        if (uncovered == 0) return true;
        int v = std::countr_zero(uncovered);
        std::vector<int> rest;
        for (int u = v + 1; u < n; ++u)
            if (uncovered >> u & 1) rest.push_back(u);
        if (static_cast<int>(rest.size()) < k - 1) return false;
        std::vector<int> pick(static_cast<size_t>(k - 1));
        std::function<bool(int, int)> choose = [&](int start, int depth) -> bool {
            if (depth == k - 1) {
                std::vector<int> group{v};
                group.insert(group.end(), pick.begin(), pick.end());
                if (!spans_copy(g, h, group)) return false;
                std::uint32_t next = uncovered;
                for (int u : group) next &= ~(1u << u);
                return rec(next);
            }
            for (int i = start; i < static_cast<int>(rest.size()); ++i) {
                pick[static_cast<size_t>(depth)] = rest[static_cast<size_t>(i)];
                if (choose(i + 1, depth + 1)) return true;
            }
            return false;
        };
        return choose(0, 0);
    };
    return rec(n == 32 ? ~0u : ((1u << n) - 1));
}

// Exhaustive maximum tiling size (number of disjoint copies).
inline int oracle_max_tiling(const Graph& g, const Graph& h) {
    int n = g.vertex_count();
    int k = h.vertex_count();
    std::function<int(std::uint32_t)> rec = [&](std::uint32_t available) -> int {
        if (std::popcount(available) < k) return 0;
        int v = std::countr_zero(available);
        std::uint32_t rest_mask = available & ~(1u << v);
        int best = rec(rest_mask);  // leave v uncovered
        std::vector<int> rest;
        for (int u = v + 1; u < n; ++u)
            if (available >> u & 1) rest.push_back(u);
        std::vector<int> pick(static_cast<size_t>(k - 1));
        std::function<void(int, int)> choose = [&](int start, int depth) {
            if (depth == k - 1) {
                std::vector<int> group{v};
                group.insert(group.end(), pick.begin(), pick.end());
                if (spans_copy(g, h, group)) {
                    std::uint32_t next = available;
                    for (int u : group) next &= ~(1u << u);
                    best = std::max(best, 1 + rec(next));
                }
                return;
            }
            for (int i = start; i < static_cast<int>(rest.size()); ++i) {
                pick[static_cast<size_t>(depth)] = rest[static_cast<size_t>(i)];
                choose(i + 1, depth + 1);
            }
        };
        choose(0, 0);
        return best;
    };
    return rec(n >= 32 ? ~0u : ((1u << n) - 1));
}

// Independent graph6 encoder built on an explicit bit string.
inline std::string oracle_graph6(const Graph& g) {
    int n = g.vertex_count();
    std::string bits;
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < j; ++i) bits.push_back(g.has_edge(i, j) ? '1' : '0');
    while (bits.size() % 6 != 0) bits.push_back('0');
    std::string out;
    out.push_back(static_cast<char>(63 + n));  // callers keep n <= 62
    for (size_t at = 0; at < bits.size(); at += 6) {
        int value = 0;
        for (size_t b = 0; b < 6; ++b) value = value * 2 + (bits[at + b] == '1');
        out.push_back(static_cast<char>(63 + value));
    }
    return out;
}

// All bijections A -> B; returns true when some bijection is a matching.
inline bool oracle_has_perfect_matching(const Graph& g, const std::vector<int>& a,
                                        const std::vector<int>& b) {
    std::vector<int> perm(b);
    std::sort(perm.begin(), perm.end());
    do {
        bool ok = true;
        for (size_t i = 0; i < a.size(); ++i)
            if (!g.has_edge(a[i], perm[i])) {
                ok = false;
                break;
            }
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

// Direct double-subset super-regularity predicate for small sides.
inline bool oracle_super_regular(const Graph& g, const std::vector<int>& a,
                                 const std::vector<int>& b, const Rational& eps,
                                 const Rational& d) {
    using tilelab::ceil_of;
    for (int v : a) {
        int deg = 0;
        for (int w : b) deg += g.has_edge(v, w);
        if (!(Rational(deg) > d * Rational(static_cast<long long>(b.size())))) return false;
    }
    for (int v : b) {
        int deg = 0;
        for (int w : a) deg += g.has_edge(v, w);
        if (!(Rational(deg) > d * Rational(static_cast<long long>(a.size())))) return false;
    }
    std::vector<std::uint32_t> row(a.size(), 0);  // b-mask per A vertex
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            if (g.has_edge(a[i], b[j])) row[i] |= (1u << j);
    int min_x = std::max<long long>(1, ceil_of(eps * Rational(static_cast<long long>(a.size()))));
    int min_y = std::max<long long>(1, ceil_of(eps * Rational(static_cast<long long>(b.size()))));
    for (std::uint32_t xm = 1; xm < (1u << a.size()); ++xm) {
        int xs = std::popcount(xm);
        if (xs < min_x) continue;
        for (std::uint32_t ym = 1; ym < (1u << b.size()); ++ym) {
            int ys = std::popcount(ym);
            if (ys < min_y) continue;
            long long e = 0;
            for (std::uint32_t rest = xm; rest;) {
                int i = std::countr_zero(rest);
                rest &= rest - 1;
                e += std::popcount(row[static_cast<size_t>(i)] & ym);
            }
            if (!(Rational(e, static_cast<long long>(xs) * ys) > d)) return false;
        }
    }
    return true;
}

// Labeled random graph straight from the Rng (not via the library sampler).
inline Graph random_graph(int n, double p, tilelab::Rng& rng) {
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.next_double() < p) edges.emplace_back(u, v);
    return Graph::from_edge_list(n, edges);
}

// Canonical form under relabeling: lexicographically least edge list.
inline std::vector<Edge> canonical_edges(const Graph& g) {
    int n = g.vertex_count();
    std::vector<int> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Edge> best;
    bool first = true;
    do {
        std::vector<Edge> relabeled;
        for (auto [u, v] : g.edges()) {
            int a = perm[static_cast<size_t>(u)], b = perm[static_cast<size_t>(v)];
            relabeled.emplace_back(std::min(a, b), std::max(a, b));
        }
        std::sort(relabeled.begin(), relabeled.end());
        if (first || relabeled < best) {
            best = relabeled;
            first = false;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

inline bool is_connected(const Graph& g) {
    int n = g.vertex_count();
    if (n == 0) return true;
    std::vector<bool> seen(static_cast<size_t>(n), false);
    std::vector<int> stack{0};
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int u = 0; u < n; ++u)
            if (g.has_edge(v, u) && !seen[static_cast<size_t>(u)]) {
                seen[static_cast<size_t>(u)] = true;
                ++count;
                stack.push_back(u);
            }
    }
    return count == n;
}

// All connected 5-vertex graphs up to isomorphism (there are 21).
inline std::vector<Graph> connected_five_vertex_graphs() {
    std::set<std::vector<Edge>> seen;
    std::vector<Graph> out;
    std::vector<Edge> all_pairs;
    for (int u = 0; u < 5; ++u)
        for (int v = u + 1; v < 5; ++v) all_pairs.emplace_back(u, v);
    for (std::uint32_t mask = 0; mask < (1u << 10); ++mask) {
        std::vector<Edge> edges;
        for (int i = 0; i < 10; ++i)
            if (mask >> i & 1) edges.push_back(all_pairs[static_cast<size_t>(i)]);
        Graph g = Graph::from_edge_list(5, edges);
        if (!is_connected(g)) continue;
        if (seen.insert(canonical_edges(g)).second) out.push_back(g);
    }
    return out;
}

// Fixed classification corpus: the 21 connected 5-vertex graphs, named dense
// templates, plus seeded samples on 4..7 vertices.
inline std::vector<Graph> classification_corpus(int minimum = 500) {
    std::vector<Graph> corpus = connected_five_vertex_graphs();
    corpus.push_back(Graph::complete(6));
    corpus.push_back(Graph::complete(7));
    corpus.push_back(tilelab::make_cycle(7));
    corpus.push_back(tilelab::make_star(6));
    tilelab::Rng rng(tilelab::Seed{20260810});
    const double probs[] = {0.3, 0.5, 0.7};
    int size = 4;
    while (static_cast<int>(corpus.size()) < minimum) {
        for (double p : probs) corpus.push_back(random_graph(size, p, rng));
        size = size == 7 ? 4 : size + 1;
    }
    return corpus;
}

}  // namespace oracle
