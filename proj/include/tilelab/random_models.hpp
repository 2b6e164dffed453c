#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tilelab/density.hpp"
#include "tilelab/graph.hpp"
#include "tilelab/rational.hpp"

namespace tilelab {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace detail

// Root seed plus a documented stream-derivation rule: sub-seed i is
// mix64(root + (i+1)*golden), the splitmix64 step. Same (root, index) pair
// always yields the same stream, independent of call order.
struct Seed {
    std::uint64_t root = 0;

    Seed derive(std::uint64_t index) const {
        return Seed{detail::mix64(root + (index + 1) * detail::kGolden)};
    }
    Seed derive(std::uint64_t a, std::uint64_t b) const { return derive(a).derive(b); }
};

// Portable splitmix64 generator; avoids std distributions so streams are
// identical across standard libraries.
class Rng {
public:
    explicit Rng(Seed seed) : state_(seed.root) {}
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += detail::kGolden;
        return detail::mix64(state_);
    }

    double next_double() {  // uniform in [0,1), 53 bits
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("next_below(0)");
        std::uint64_t limit = ~0ull - (~0ull % bound + 1) % bound;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x > limit);
        return x % bound;
    }

    template <class T>
    void shuffle(std::vector<T>& items) {
        for (size_t i = items.size(); i > 1; --i)
            std::swap(items[i - 1], items[static_cast<size_t>(next_below(i))]);
    }

private:
    std::uint64_t state_;
};

// Uniform in [0,1) keyed by (seed, min(u,v), max(u,v)). Sampling every pair
// against a threshold p gives G_{n,p}; comparing the same draws against
// p1 <= p2 gives the monotone coupling G1 subseteq G2.
inline double pair_uniform(const Seed& seed, int u, int v) {
    auto lo = static_cast<std::uint64_t>(std::min(u, v));
    auto hi = static_cast<std::uint64_t>(std::max(u, v));
    std::uint64_t key = detail::mix64(seed.root + (lo + 1) * detail::kGolden);
    key = detail::mix64(key + (hi + 1) * detail::kGolden);
    return static_cast<double>(key >> 11) * 0x1.0p-53;
}

inline Graph sample_gnp(int n, double p, const Seed& seed) {
    if (n < 0) throw std::invalid_argument("sample_gnp: negative n");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("sample_gnp: p outside [0,1]");
    std::vector<Edge> pairs;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (pair_uniform(seed, u, v) < p) pairs.emplace_back(u, v);
    return Graph::from_edge_list(n, pairs);
}

// Coupled pair of samples from one seed: p1 <= p2 implies G1 subseteq G2.
inline std::pair<Graph, Graph> sample_gnp_coupled(int n, double p1, double p2, const Seed& seed) {
    if (!(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0))
        throw std::invalid_argument("sample_gnp_coupled: p outside [0,1]");
    std::vector<Edge> low, high;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            double x = pair_uniform(seed, u, v);
            if (x < p1) low.emplace_back(u, v);
            if (x < p2) high.emplace_back(u, v);
        }
    return {Graph::from_edge_list(n, low), Graph::from_edge_list(n, high)};
}

// Complete bipartite base from the extremal construction: classes of sizes
// a*n and (1-a)*n with (1-a) > a(|H|-1).
struct ExtremalBase {
    Graph graph;
    VertexSet class_x;  // the small class, size a*n
    VertexSet class_y;  // the large class, size (1-a)*n
};

inline ExtremalBase make_extremal_base(int n, const Rational& a, const Pattern& h) {
    if (!(a > Rational(0) && a < Rational(1)))
        throw std::invalid_argument("extremal base: a must lie in (0,1)");
    Rational b = Rational(1) - a;
    if (!(b > a * Rational(h.size() - 1)))
        throw std::invalid_argument(
            "extremal base requires (1-a) > a*(|H|-1); got a=" + to_string(a) +
            ", |H|=" + std::to_string(h.size()));
    Rational an = a * Rational(n);
    if (an.denominator() != 1)
        throw std::invalid_argument("extremal base: a*n = " + to_string(an) +
                                    " is not an integer");
    int x_size = static_cast<int>(an.numerator());
    ExtremalBase base;
    base.graph = make_complete_bipartite(x_size, n - x_size);
    std::vector<int> xs(static_cast<size_t>(x_size));
    std::iota(xs.begin(), xs.end(), 0);
    std::vector<int> ys(static_cast<size_t>(n - x_size));
    std::iota(ys.begin(), ys.end(), x_size);
    base.class_x = VertexSet(std::move(xs));
    base.class_y = VertexSet(std::move(ys));
    return base;
}

// Linear-minimum-degree base built as vertex-disjoint balanced complete
// bipartite blobs over a seeded permutation of [n]. Starts with
// ceil(1/(2*alpha)) blobs and merges down if integer rounding drops the
// minimum degree below ceil(alpha*n); the result is always verified.
inline Graph make_min_degree_base(int n, const Rational& alpha, const Seed& seed) {
    if (!(alpha > Rational(0) && alpha <= Rational(1, 2)))
        throw std::invalid_argument("min-degree base: alpha must lie in (0, 1/2]");
    if (!(alpha * Rational(n) <= Rational(n - 1)))
        throw std::invalid_argument("min-degree base: alpha*n exceeds n-1");
    long long target = ceil_of(alpha * Rational(n));
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);
    long long blobs = ceil_of(Rational(1) / (Rational(2) * alpha));
    for (; blobs >= 1; --blobs) {
        std::vector<Edge> pairs;
        int start = 0;
        for (long long blob = 0; blob < blobs; ++blob) {
            int size = static_cast<int>((n + blob) / blobs);  // balanced chunk sizes
            int half = size / 2;
            for (int i = 0; i < half; ++i)
                for (int j = half; j < size; ++j)
                    pairs.emplace_back(order[static_cast<size_t>(start + i)],
                                       order[static_cast<size_t>(start + j)]);
            start += size;
        }
        Graph g = Graph::from_edge_list(n, pairs);
        if (g.min_degree() >= target) return g;
    }
    throw std::invalid_argument("min-degree base: cannot reach delta >= " +
                                std::to_string(target) + " with n=" + std::to_string(n));
}

// Base-graph descriptor for the perturbed model G u G_{n,p}.
struct BaseSpec {
    enum class Kind { Empty, Explicit, Extremal, MinDegree };
    Kind kind = Kind::Empty;
    Graph graph;       // Explicit
    Rational a;        // Extremal
    int pattern_size = 0;
    Rational alpha;    // MinDegree

    static BaseSpec empty() { return {}; }
    static BaseSpec explicit_graph(Graph g) {
        BaseSpec s;
        s.kind = Kind::Explicit;
        s.graph = std::move(g);
        return s;
    }
    static BaseSpec extremal(Rational a, int pattern_size) {
        BaseSpec s;
        s.kind = Kind::Extremal;
        s.a = a;
        s.pattern_size = pattern_size;
        return s;
    }
    static BaseSpec min_degree(Rational alpha) {
        BaseSpec s;
        s.kind = Kind::MinDegree;
        s.alpha = alpha;
        return s;
    }
};

struct PerturbedSpec {
    BaseSpec base;
    double p = 0.0;
};

struct PerturbedSample {
    Graph base;
    Graph perturbed;
};

inline Graph make_base(const BaseSpec& spec, int n, const Seed& seed, const Pattern* h = nullptr) {
    switch (spec.kind) {
        case BaseSpec::Kind::Empty:
            return Graph::empty_graph(n);
        case BaseSpec::Kind::Explicit:
            if (spec.graph.vertex_count() != n)
                throw std::invalid_argument("explicit base graph has wrong vertex count");
            return spec.graph;
        case BaseSpec::Kind::Extremal: {
            if (h != nullptr) return make_extremal_base(n, spec.a, *h).graph;
            if (spec.pattern_size < 2)
                throw std::invalid_argument("extremal base needs the template size");
            if (!(spec.a > Rational(0) && spec.a < Rational(1)))
                throw std::invalid_argument("extremal base: a must lie in (0,1)");
            if (!(Rational(1) - spec.a > spec.a * Rational(spec.pattern_size - 1)))
                throw std::invalid_argument("extremal base requires (1-a) > a*(|H|-1); got a=" +
                                            to_string(spec.a) +
                                            ", |H|=" + std::to_string(spec.pattern_size));
            Rational an = spec.a * Rational(n);
            if (an.denominator() != 1)
                throw std::invalid_argument("extremal base: a*n = " + to_string(an) +
                                            " is not an integer");
            int x_size = static_cast<int>(an.numerator());
            return make_complete_bipartite(x_size, n - x_size);
        }
        case BaseSpec::Kind::MinDegree:
            return make_min_degree_base(n, spec.alpha, seed);
    }
    throw std::logic_error("unreachable base kind");
}

// Sub-seed 0 feeds base construction, sub-seed 1 the random perturbation.
inline PerturbedSample sample_perturbed(const PerturbedSpec& spec, int n, const Seed& seed,
                                        const Pattern* h = nullptr) {
    PerturbedSample sample;
    sample.base = make_base(spec.base, n, seed.derive(0), h);
    sample.perturbed = graph_union(sample.base, sample_gnp(n, spec.p, seed.derive(1)));
    return sample;
}

}  // namespace tilelab
