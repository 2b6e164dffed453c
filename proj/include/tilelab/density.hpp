#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tilelab/graph.hpp"
#include "tilelab/rational.hpp"

namespace tilelab {

// Subset enumeration is 2^|H|; fine for template graphs, not hosts.
inline constexpr int kMaxPatternVertices = 20;

enum class BalanceCategory {
    StrictlyBalanced,
    BalancedNotStrictly,
    VertexBalancedNotBalanced,
    NonVertexBalanced,
};

inline std::string to_string(BalanceCategory c) {
    switch (c) {
        case BalanceCategory::StrictlyBalanced: return "StrictlyBalanced";
        case BalanceCategory::BalancedNotStrictly: return "BalancedNotStrictly";
        case BalanceCategory::VertexBalancedNotBalanced: return "VertexBalancedNotBalanced";
        case BalanceCategory::NonVertexBalanced: return "NonVertexBalanced";
    }
    return "?";
}

struct DensityProfile {
    Rational d;                       // e(H)/(|H|-1)
    Rational d_star;                  // max over vertex subsets of size >= 2
    std::vector<Rational> d_star_v;   // per-vertex maxima
    std::vector<long long> s_v;       // min edge count among per-vertex maximizers
    long long s = 0;                  // max of the s_v
    BalanceCategory category = BalanceCategory::StrictlyBalanced;
    VertexSet witness_subset;         // a subset attaining d_star

    bool balanced() const { return d_star == d; }
    bool vertex_balanced() const {
        for (const auto& dv : d_star_v)
            if (dv != d_star) return false;
        return true;
    }
};

namespace detail {

inline std::vector<std::uint32_t> adjacency_masks(const Graph& h) {
    if (h.vertex_count() > kMaxPatternVertices)
        throw std::invalid_argument("template graph too large for subset enumeration (max " +
                                    std::to_string(kMaxPatternVertices) + " vertices)");
    std::vector<std::uint32_t> masks(static_cast<size_t>(h.vertex_count()), 0);
    for (auto [u, v] : h.edges()) {
        masks[static_cast<size_t>(u)] |= (1u << v);
        masks[static_cast<size_t>(v)] |= (1u << u);
    }
    return masks;
}

inline int subset_edge_count(const std::vector<std::uint32_t>& masks, std::uint32_t subset) {
    int twice = 0;
    for (std::uint32_t rest = subset; rest;) {
        int v = std::countr_zero(rest);
        rest &= rest - 1;
        twice += std::popcount(masks[static_cast<size_t>(v)] & subset);
    }
    return twice / 2;
}

inline std::vector<int> mask_members(std::uint32_t subset) {
    std::vector<int> out;
    for (std::uint32_t rest = subset; rest;) {
        out.push_back(std::countr_zero(rest));
        rest &= rest - 1;
    }
    return out;
}

// Tie-break order for density witnesses: smaller subset first, then
// lexicographically smaller sorted member list.
inline bool witness_precedes(std::uint32_t a, std::uint32_t b) {
    int ca = std::popcount(a), cb = std::popcount(b);
    if (ca != cb) return ca < cb;
    return mask_members(a) < mask_members(b);
}

}  // namespace detail

inline Rational density(const Graph& h) {
    if (h.vertex_count() < 2)
        throw std::invalid_argument("density needs at least 2 vertices");
    return Rational(h.edge_count(), h.vertex_count() - 1);
}

struct MaxDensityResult {
    Rational value;
    VertexSet witness;
};

// Max of density(h[S]) over vertex subsets S with |S| >= 2. Induced subgraphs
// dominate all subgraphs on the same vertex set, so subset enumeration is
// exhaustive for the subgraph maximum; the test oracle re-checks this.
inline MaxDensityResult max_density(const Graph& h) {
    if (h.vertex_count() < 2)
        throw std::invalid_argument("max_density needs at least 2 vertices");
    auto masks = detail::adjacency_masks(h);
    int n = h.vertex_count();
    Rational best(-1);
    std::uint32_t best_mask = 0;
    for (std::uint32_t subset = 1; subset < (1u << n); ++subset) {
        if (std::popcount(subset) < 2) continue;
        Rational value(detail::subset_edge_count(masks, subset), std::popcount(subset) - 1);
        if (value > best || (value == best && detail::witness_precedes(subset, best_mask))) {
            best = value;
            best_mask = subset;
        }
    }
    return {best, VertexSet(detail::mask_members(best_mask))};
}

inline Rational vertex_max_density(const Graph& h, int v) {
    if (h.vertex_count() < 2)
        throw std::invalid_argument("vertex_max_density needs at least 2 vertices");
    if (v < 0 || v >= h.vertex_count())
        throw std::invalid_argument("vertex out of range");
    auto masks = detail::adjacency_masks(h);
    int n = h.vertex_count();
    Rational best(-1);
    for (std::uint32_t subset = 1; subset < (1u << n); ++subset) {
        if (!(subset & (1u << v)) || std::popcount(subset) < 2) continue;
        Rational value(detail::subset_edge_count(masks, subset), std::popcount(subset) - 1);
        if (value > best) best = value;
    }
    return best;
}

// Minimum e(h[S]) over subsets S containing v whose density attains
// vertex_max_density(h, v). Non-induced attainers cannot have fewer edges.
inline long long s_value(const Graph& h, int v) {
    Rational target = vertex_max_density(h, v);
    auto masks = detail::adjacency_masks(h);
    int n = h.vertex_count();
    long long best = -1;
    for (std::uint32_t subset = 1; subset < (1u << n); ++subset) {
        if (!(subset & (1u << v)) || std::popcount(subset) < 2) continue;
        int e = detail::subset_edge_count(masks, subset);
        if (Rational(e, std::popcount(subset) - 1) != target) continue;
        if (best < 0 || e < best) best = e;
    }
    return best;
}

inline DensityProfile classify(const Graph& h) {
    if (h.vertex_count() < 2)
        throw std::invalid_argument("classify needs at least 2 vertices");
    auto masks = detail::adjacency_masks(h);
    int n = h.vertex_count();
    DensityProfile profile;
    profile.d = density(h);

    Rational best(-1);
    std::uint32_t best_mask = 0;
    bool strictly = true;
    std::vector<Rational> per_vertex(static_cast<size_t>(n), Rational(-1));
    const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
    for (std::uint32_t subset = 1; subset <= full; ++subset) {
        if (std::popcount(subset) < 2) continue;
        Rational value(detail::subset_edge_count(masks, subset), std::popcount(subset) - 1);
        if (value > best || (value == best && detail::witness_precedes(subset, best_mask))) {
            if (value > best) best = value;
            best_mask = subset;
        }
        if (subset != full && value >= profile.d) strictly = false;
        for (std::uint32_t rest = subset; rest;) {
            int v = std::countr_zero(rest);
            rest &= rest - 1;
            if (value > per_vertex[static_cast<size_t>(v)])
                per_vertex[static_cast<size_t>(v)] = value;
        }
    }
    profile.d_star = best;
    profile.witness_subset = VertexSet(detail::mask_members(best_mask));
    profile.d_star_v = std::move(per_vertex);

    profile.s_v.resize(static_cast<size_t>(n), -1);
    for (std::uint32_t subset = 1; subset <= full; ++subset) {
        if (std::popcount(subset) < 2) continue;
        int e = detail::subset_edge_count(masks, subset);
        for (std::uint32_t rest = subset; rest;) {
            int v = std::countr_zero(rest);
            rest &= rest - 1;
            auto& sv = profile.s_v[static_cast<size_t>(v)];
            if (Rational(e, std::popcount(subset) - 1) == profile.d_star_v[static_cast<size_t>(v)] &&
                (sv < 0 || e < sv))
                sv = e;
        }
    }
    profile.s = *std::max_element(profile.s_v.begin(), profile.s_v.end());

    bool balanced = profile.d_star == profile.d;
    bool vertex_balanced = profile.vertex_balanced();
    if (strictly)
        profile.category = BalanceCategory::StrictlyBalanced;
    else if (balanced)
        profile.category = BalanceCategory::BalancedNotStrictly;
    else if (vertex_balanced)
        profile.category = BalanceCategory::VertexBalancedNotBalanced;
    else
        profile.category = BalanceCategory::NonVertexBalanced;
    return profile;
}

// Template graph with its precomputed profile.
class Pattern {
public:
    static Pattern from_graph(const Graph& h) {
        if (h.vertex_count() < 2)
            throw std::invalid_argument("pattern needs at least 2 vertices");
        return Pattern(h);
    }

    // k2, k3, k4, c4, c5, p3 (path on 3 vertices), k13 (claw)
    static Pattern named(const std::string& name) {
        if (name == "k2") return from_graph(Graph::complete(2));
        if (name == "k3") return from_graph(Graph::complete(3));
        if (name == "k4") return from_graph(Graph::complete(4));
        if (name == "c4") return from_graph(make_cycle(4));
        if (name == "c5") return from_graph(make_cycle(5));
        if (name == "p3") return from_graph(make_path(3));
        if (name == "k13") return from_graph(make_star(3));
        throw std::invalid_argument("unknown pattern name: " + name);
    }

    const Graph& graph() const { return h_; }
    const DensityProfile& profile() const { return profile_; }
    int size() const { return h_.vertex_count(); }
    int edge_count() const { return h_.edge_count(); }
    const std::vector<Edge>& canonical_edges() const { return canonical_edges_; }

private:
    explicit Pattern(const Graph& h)
        : h_(h), profile_(classify(h)), canonical_edges_(canonicalize(h)) {}

    // Lexicographically least edge list over all relabelings; brute force is
    // fine at template size, above 8 vertices keep the input labeling.
    static std::vector<Edge> canonicalize(const Graph& h) {
        int n = h.vertex_count();
        if (n > 8) return h.edges();
        std::vector<int> perm(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
        std::vector<Edge> best = h.edges();
        do {
            std::vector<Edge> relabeled;
            relabeled.reserve(h.edges().size());
            for (auto [u, v] : h.edges()) {
                int pu = perm[static_cast<size_t>(u)], pv = perm[static_cast<size_t>(v)];
                relabeled.emplace_back(std::min(pu, pv), std::max(pu, pv));
            }
            std::sort(relabeled.begin(), relabeled.end());
            if (relabeled < best) best = relabeled;
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    }

    Graph h_;
    DensityProfile profile_;
    std::vector<Edge> canonical_edges_;
};

struct ThresholdFormulas {
    double p_jkv;        // n^{-1/d(H)} (log n)^{1/e(H)}
    double p_gm;         // n^{-1/d*(H)}
    double p_perturbed;  // c * n^{-1/d*(H)}
};

inline ThresholdFormulas threshold_formulas(const Graph& h, long long n, const Rational& c) {
    if (h.vertex_count() < 2)
        throw std::invalid_argument("threshold_formulas needs at least 2 vertices");
    if (h.edge_count() == 0)
        throw std::invalid_argument("threshold_formulas needs at least one edge");
    if (n < 3) throw std::invalid_argument("threshold_formulas needs n >= 3");
    double dn = static_cast<double>(n);
    double d = to_double(density(h));
    double d_star = to_double(max_density(h).value);
    auto clamp01 = [](double x) { return std::min(1.0, std::max(0.0, x)); };
    double p_jkv = std::pow(dn, -1.0 / d) * std::pow(std::log(dn), 1.0 / h.edge_count());
    double p_gm = std::pow(dn, -1.0 / d_star);
    double p_perturbed = to_double(c) * p_gm;
    return {clamp01(p_jkv), clamp01(p_gm), clamp01(p_perturbed)};
}

}  // namespace tilelab
