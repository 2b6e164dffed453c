#pragma once

#include <algorithm>
#include <bit>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tilelab/density.hpp"
#include "tilelab/graph.hpp"
#include "tilelab/random_models.hpp"
#include "tilelab/tiling.hpp"

namespace tilelab {

// Exhaustive subset checks enumerate 2^|A| one-side subsets; above this the
// sampled mode applies.
inline constexpr int kExactRegularityCap = 16;
inline constexpr long long kSubsetEnumerationCap = 2'000'000;

inline Rational pair_density(const Graph& host, const VertexSet& a, const VertexSet& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("pair_density: empty side");
    Bits bb = b.bits(host.vertex_count());
    if ((a.bits(host.vertex_count()) & bb).any())
        throw std::invalid_argument("pair_density: sides are not disjoint");
    long long cross = 0;
    for (int v : a.members) cross += host.degree_into(v, bb);
    return Rational(cross, static_cast<long long>(a.size()) * b.size());
}

struct BipartitePair {
    VertexSet a;
    VertexSet b;
    Rational density;

    static BipartitePair of(const Graph& host, VertexSet a, VertexSet b) {
        Rational d = pair_density(host, a, b);
        return {std::move(a), std::move(b), d};
    }
};

enum class RegularityVerdict { Regular, Irregular, SampledPlausible };

struct RegularityReport {
    Rational eps;
    RegularityVerdict verdict = RegularityVerdict::Regular;
    VertexSet witness_x;  // populated iff verdict == Irregular
    VertexSet witness_y;
    Rational pair_value;     // d(A,B)
    Rational witness_value;  // d(X,Y) for the witness
    long long checked_pairs = 0;

    bool regular() const { return verdict != RegularityVerdict::Irregular; }
};

namespace detail {

// Degrees of each b in B into the index-subset X of A, as (degree, position).
inline std::vector<std::pair<int, int>> degrees_into_subset(
    const Graph& host, const std::vector<int>& a_members, const std::vector<int>& b_members,
    std::uint32_t x_mask) {
    std::vector<std::pair<int, int>> degs;
    degs.reserve(b_members.size());
    for (size_t j = 0; j < b_members.size(); ++j) {
        int d = 0;
        for (std::uint32_t rest = x_mask; rest;) {
            int i = std::countr_zero(rest);
            rest &= rest - 1;
            if (host.has_edge(a_members[static_cast<size_t>(i)], b_members[j])) ++d;
        }
        degs.emplace_back(d, static_cast<int>(j));
    }
    return degs;
}

inline VertexSet pick_members(const std::vector<int>& side, const std::vector<std::pair<int, int>>& degs,
                              int k) {
    std::vector<int> out;
    out.reserve(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) out.push_back(side[static_cast<size_t>(degs[static_cast<size_t>(i)].second)]);
    return VertexSet(std::move(out));
}

inline VertexSet subset_from_mask(const std::vector<int>& side, std::uint32_t mask) {
    std::vector<int> out;
    for (std::uint32_t rest = mask; rest;) {
        int i = std::countr_zero(rest);
        rest &= rest - 1;
        out.push_back(side[static_cast<size_t>(i)]);
    }
    return VertexSet(std::move(out));
}

// Uniform k-subset of `side`, by partial Fisher-Yates.
inline VertexSet sample_subset(const std::vector<int>& side, int k, Rng& rng) {
    std::vector<int> pool = side;
    for (int i = 0; i < k; ++i) {
        size_t j = static_cast<size_t>(i) +
                   static_cast<size_t>(rng.next_below(pool.size() - static_cast<size_t>(i)));
        std::swap(pool[static_cast<size_t>(i)], pool[j]);
    }
    pool.resize(static_cast<size_t>(k));
    return VertexSet(std::move(pool));
}

}  // namespace detail

// Exhaustive eps-regularity check. For each X the extreme densities over
// |Y| = k are reached by the k highest / lowest degree vertices of B into X,
// so one sorted scan per X decides every Y without enumerating them.
inline RegularityReport check_eps_regular_exact(const Graph& host, const VertexSet& a,
                                                const VertexSet& b, const Rational& eps) {
    if (a.size() > kExactRegularityCap || b.size() > kExactRegularityCap)
        throw std::invalid_argument("exact regularity check capped at side size " +
                                    std::to_string(kExactRegularityCap) +
                                    "; use the sampled mode");
    if (!(eps > Rational(0))) throw std::invalid_argument("eps must be positive");
    RegularityReport report;
    report.eps = eps;
    report.pair_value = pair_density(host, a, b);
    int min_x = static_cast<int>(ceil_of(eps * Rational(a.size())));
    int min_y = static_cast<int>(ceil_of(eps * Rational(b.size())));
    min_x = std::max(min_x, 1);
    min_y = std::max(min_y, 1);
    const Rational& d_ab = report.pair_value;
    for (std::uint32_t x_mask = 1; x_mask < (1u << a.size()); ++x_mask) {
        int x_size = std::popcount(x_mask);
        if (x_size < min_x) continue;
        auto degs = detail::degrees_into_subset(host, a.members, b.members, x_mask);
        auto desc = degs;
        std::sort(desc.begin(), desc.end(),
                  [](auto& l, auto& r) { return l.first != r.first ? l.first > r.first : l.second < r.second; });
        auto asc = degs;
        std::sort(asc.begin(), asc.end(),
                  [](auto& l, auto& r) { return l.first != r.first ? l.first < r.first : l.second < r.second; });
        long long prefix_hi = 0, prefix_lo = 0;
        for (int k = 1; k <= b.size(); ++k) {
            prefix_hi += desc[static_cast<size_t>(k - 1)].first;
            prefix_lo += asc[static_cast<size_t>(k - 1)].first;
            if (k < min_y) continue;
            ++report.checked_pairs;
            Rational hi(prefix_hi, static_cast<long long>(x_size) * k);
            Rational lo(prefix_lo, static_cast<long long>(x_size) * k);
            std::optional<Rational> bad;
            if (hi - d_ab >= eps) bad = hi;
            else if (d_ab - lo >= eps) bad = lo;
            if (bad) {
                report.verdict = RegularityVerdict::Irregular;
                report.witness_x = detail::subset_from_mask(a.members, x_mask);
                report.witness_y = detail::pick_members(b.members, *bad == hi ? desc : asc, k);
                report.witness_value = *bad;
                return report;
            }
        }
    }
    report.verdict = RegularityVerdict::Regular;
    return report;
}

// Sampled mode: a returned witness is sound (re-checked arithmetic on real
// subsets); "sampled plausible" is one-sided.
inline RegularityReport check_eps_regular_sampled(const Graph& host, const VertexSet& a,
                                                  const VertexSet& b, const Rational& eps,
                                                  int trials, const Seed& seed) {
    if (trials < 1) throw std::invalid_argument("sampled regularity check needs trials >= 1");
    if (!(eps > Rational(0))) throw std::invalid_argument("eps must be positive");
    RegularityReport report;
    report.eps = eps;
    report.pair_value = pair_density(host, a, b);
    int sx = std::max<int>(1, static_cast<int>(ceil_of(eps * Rational(a.size()))));
    int sy = std::max<int>(1, static_cast<int>(ceil_of(eps * Rational(b.size()))));
    if (sx > a.size() || sy > b.size()) {  // no qualifying subsets at all
        report.verdict = RegularityVerdict::SampledPlausible;
        return report;
    }
    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        VertexSet x = detail::sample_subset(a.members, sx, rng);
        VertexSet y = detail::sample_subset(b.members, sy, rng);
        ++report.checked_pairs;
        Rational dxy = pair_density(host, x, y);
        Rational gap = dxy > report.pair_value ? dxy - report.pair_value : report.pair_value - dxy;
        if (gap >= eps) {
            report.verdict = RegularityVerdict::Irregular;
            report.witness_x = std::move(x);
            report.witness_y = std::move(y);
            report.witness_value = dxy;
            return report;
        }
    }
    report.verdict = RegularityVerdict::SampledPlausible;
    return report;
}

struct SuperRegularReport {
    bool ok = false;
    bool exact = false;                  // exhaustive subset mode used
    std::optional<int> failing_vertex;   // degree condition violator
    std::optional<std::pair<VertexSet, VertexSet>> witness;  // sparse subset pair
    long long checked_pairs = 0;
};

// (eps,d)-super-regularity: all eps-fraction subset pairs have density > d and
// every vertex has cross degree > d * |opposite side|.
inline SuperRegularReport check_super_regular(const Graph& host, const VertexSet& a,
                                              const VertexSet& b, const Rational& eps,
                                              const Rational& d, int sampled_trials = 2000,
                                              const Seed& seed = Seed{0x5e9}) {
    if (a.empty() || b.empty()) throw std::invalid_argument("check_super_regular: empty side");
    SuperRegularReport report;
    Bits ab = a.bits(host.vertex_count());
    Bits bb = b.bits(host.vertex_count());
    for (int v : a.members)
        if (!(Rational(host.degree_into(v, bb)) > d * Rational(b.size()))) {
            report.failing_vertex = v;
            return report;
        }
    for (int v : b.members)
        if (!(Rational(host.degree_into(v, ab)) > d * Rational(a.size()))) {
            report.failing_vertex = v;
            return report;
        }
    int min_x = std::max<int>(1, static_cast<int>(ceil_of(eps * Rational(a.size()))));
    int min_y = std::max<int>(1, static_cast<int>(ceil_of(eps * Rational(b.size()))));
    if (a.size() <= kExactRegularityCap && b.size() <= kExactRegularityCap) {
        report.exact = true;
        for (std::uint32_t x_mask = 1; x_mask < (1u << a.size()); ++x_mask) {
            int x_size = std::popcount(x_mask);
            if (x_size < min_x) continue;
            auto degs = detail::degrees_into_subset(host, a.members, b.members, x_mask);
            std::sort(degs.begin(), degs.end(),
                      [](auto& l, auto& r) { return l.first != r.first ? l.first < r.first : l.second < r.second; });
            long long prefix = 0;
            for (int k = 1; k <= b.size(); ++k) {
                prefix += degs[static_cast<size_t>(k - 1)].first;
                if (k < min_y) continue;
                ++report.checked_pairs;
                if (!(Rational(prefix, static_cast<long long>(x_size) * k) > d)) {
                    report.witness = {detail::subset_from_mask(a.members, x_mask),
                                      detail::pick_members(b.members, degs, k)};
                    return report;
                }
            }
        }
        report.ok = true;
        return report;
    }
    if (min_x > a.size() || min_y > b.size()) {
        report.ok = true;
        return report;
    }
    Rng rng(seed);
    for (int t = 0; t < sampled_trials; ++t) {
        VertexSet x = detail::sample_subset(a.members, min_x, rng);
        VertexSet y = detail::sample_subset(b.members, min_y, rng);
        ++report.checked_pairs;
        if (!(pair_density(host, x, y) > d)) {
            report.witness = {std::move(x), std::move(y)};
            return report;
        }
    }
    report.ok = true;
    return report;
}

struct SuperRegularizeResult {
    VertexSet a_prime;
    VertexSet b_prime;
    int trimmed_a = 0;
    int trimmed_b = 0;
};

struct RegularityPromiseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Trim low cross-degree vertices to a fixpoint, then verify the standard
// (2eps, d-3eps) guarantee. Throws RegularityPromiseError when the input
// cannot have been eps-regular with density >= d.
inline SuperRegularizeResult superregularize(const Graph& host, const VertexSet& a,
                                             const VertexSet& b, const Rational& eps,
                                             const Rational& d) {
    if (!(eps > Rational(0) && eps < Rational(1, 3)))
        throw std::invalid_argument("superregularize needs 0 < eps < 1/3");
    std::vector<int> cur_a = a.members, cur_b = b.members;
    Rational threshold = d - eps;
    bool changed = true;
    while (changed) {
        changed = false;
        Bits bb = VertexSet(cur_b).bits(host.vertex_count());
        std::vector<int> keep_a;
        for (int v : cur_a)
            if (Rational(host.degree_into(v, bb)) > threshold * Rational(static_cast<long long>(cur_b.size())))
                keep_a.push_back(v);
        if (keep_a.size() != cur_a.size()) changed = true;
        cur_a = std::move(keep_a);
        if (cur_a.empty()) break;
        Bits ab = VertexSet(cur_a).bits(host.vertex_count());
        std::vector<int> keep_b;
        for (int v : cur_b)
            if (Rational(host.degree_into(v, ab)) > threshold * Rational(static_cast<long long>(cur_a.size())))
                keep_b.push_back(v);
        if (keep_b.size() != cur_b.size()) changed = true;
        cur_b = std::move(keep_b);
        if (cur_b.empty()) break;
    }
    int trimmed_a = a.size() - static_cast<int>(cur_a.size());
    int trimmed_b = b.size() - static_cast<int>(cur_b.size());
    if (Rational(trimmed_a) > eps * Rational(a.size()) ||
        Rational(trimmed_b) > eps * Rational(b.size()))
        throw RegularityPromiseError(
            "superregularize trimmed more than an eps-fraction; the input pair was not "
            "eps-regular with density >= d");
    SuperRegularizeResult result{VertexSet(cur_a), VertexSet(cur_b), trimmed_a, trimmed_b};
    auto verified = check_super_regular(host, result.a_prime, result.b_prime,
                                        Rational(2) * eps, d - Rational(3) * eps);
    if (!verified.ok)
        throw RegularityPromiseError(
            "superregularize output failed the (2eps, d-3eps) check; the input pair was not "
            "eps-regular with density >= d");
    return result;
}

struct Star {
    int centre;
    std::vector<int> leaves;
};

struct StarTiling {
    int t = 0;
    std::vector<Star> stars;
    VertexSet covered;
    int uncovered_count = 0;
    bool meets_target = false;  // uncovered <= eps * n
};

// Greedy K_{1,t} tiling: centres by maximum residual degree, leaves by
// minimum residual degree, then one augmentation pass that re-seats a leaf to
// absorb an uncovered vertex whenever the freed leaf can start a new star.
inline StarTiling greedy_star_tiling(const Graph& g, int t, const Rational& eps) {
    if (t < 1) throw std::invalid_argument("greedy_star_tiling needs t >= 1");
    int n = g.vertex_count();
    Bits uncovered = VertexSet::full(n).bits(n);
    std::vector<Star> stars;

    auto residual = [&](int v) { return g.degree_into(v, uncovered); };
    auto take_leaves = [&](int centre, const Bits& pool) {
        std::vector<std::pair<int, int>> options;  // (residual degree, vertex)
        Bits nbrs = g.neighbours(centre) & pool;
        for (auto v = nbrs.find_first(); v != Bits::npos; v = nbrs.find_next(v))
            options.emplace_back(g.degree_into(static_cast<int>(v), pool), static_cast<int>(v));
        std::sort(options.begin(), options.end(),
                  [](auto& l, auto& r) { return l.first != r.first ? l.first < r.first : l.second < r.second; });
        std::vector<int> leaves;
        for (int i = 0; i < t && i < static_cast<int>(options.size()); ++i)
            leaves.push_back(options[static_cast<size_t>(i)].second);
        return leaves;
    };

    auto greedy_sweep = [&]() {
        while (true) {
            int best = -1, best_deg = t - 1;
            for (auto v = uncovered.find_first(); v != Bits::npos; v = uncovered.find_next(v)) {
                int deg = residual(static_cast<int>(v)) ;
                if (deg > best_deg) {
                    best = static_cast<int>(v);
                    best_deg = deg;
                }
            }
            if (best < 0) break;
            Bits pool = uncovered;
            pool.reset(static_cast<size_t>(best));
            auto leaves = take_leaves(best, pool);  // residual >= t, so t leaves exist
            uncovered.reset(static_cast<size_t>(best));
            for (int leaf : leaves) uncovered.reset(static_cast<size_t>(leaf));
            stars.push_back({best, std::move(leaves)});
        }
    };

    greedy_sweep();

    // augmentation: swap an uncovered u into an existing star for leaf l, then
    // grow a fresh star centred at l; net coverage gain t+1
    std::vector<int> pending;
    for (auto v = uncovered.find_first(); v != Bits::npos; v = uncovered.find_next(v))
        pending.push_back(static_cast<int>(v));
    for (int u : pending) {
        if (!uncovered.test(static_cast<size_t>(u))) continue;
        bool placed = false;
        const size_t existing = stars.size();  // index loop: the body appends
        for (size_t si = 0; si < existing && !placed; ++si) {
            if (!g.has_edge(stars[si].centre, u)) continue;
            for (size_t li = 0; li < stars[si].leaves.size() && !placed; ++li) {
                int leaf = stars[si].leaves[li];
                Bits pool = uncovered;
                pool.reset(static_cast<size_t>(u));
                Bits nbrs = g.neighbours(leaf) & pool;
                if (static_cast<int>(nbrs.count()) < t) continue;
                auto fresh = take_leaves(leaf, pool);
                stars[si].leaves[li] = u;
                uncovered.reset(static_cast<size_t>(u));
                for (int w : fresh) uncovered.reset(static_cast<size_t>(w));
                stars.push_back({leaf, std::move(fresh)});
                placed = true;
            }
        }
    }
    greedy_sweep();

    StarTiling out;
    out.t = t;
    out.stars = std::move(stars);
    std::vector<int> covered;
    for (const auto& s : out.stars) {
        covered.push_back(s.centre);
        covered.insert(covered.end(), s.leaves.begin(), s.leaves.end());
    }
    out.covered = VertexSet(std::move(covered));
    out.uncovered_count = n - out.covered.size();
    out.meets_target = Rational(out.uncovered_count) <= eps * Rational(n);
    return out;
}

struct HallResult {
    bool perfect = false;
    std::vector<Edge> matching;   // host-labelled edges covering A u B
    VertexSet violator;           // W subseteq A with |N(W)| < |W|
    VertexSet violator_nbhd;
};

// Either a perfect matching of (A,B) or a Hall violator, never both. Kuhn's
// augmenting paths; the violator is the set of A-vertices reachable from an
// unmatched A-vertex by alternating paths.
inline HallResult hall_perfect_matching(const Graph& host, const VertexSet& a,
                                        const VertexSet& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("hall_perfect_matching needs |A| == |B|");
    int na = a.size(), nb = b.size();
    std::vector<std::vector<int>> adj(static_cast<size_t>(na));
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j)
            if (host.has_edge(a.members[static_cast<size_t>(i)], b.members[static_cast<size_t>(j)]))
                adj[static_cast<size_t>(i)].push_back(j);
    std::vector<int> match_b(static_cast<size_t>(nb), -1);
    std::vector<int> match_a(static_cast<size_t>(na), -1);
    std::vector<bool> seen;
    std::function<bool(int)> try_augment = [&](int i) -> bool {
        for (int j : adj[static_cast<size_t>(i)]) {
            if (seen[static_cast<size_t>(j)]) continue;
            seen[static_cast<size_t>(j)] = true;
            if (match_b[static_cast<size_t>(j)] < 0 || try_augment(match_b[static_cast<size_t>(j)])) {
                match_b[static_cast<size_t>(j)] = i;
                match_a[static_cast<size_t>(i)] = j;
                return true;
            }
        }
        return false;
    };
    int matched = 0;
    for (int i = 0; i < na; ++i) {
        seen.assign(static_cast<size_t>(nb), false);
        if (try_augment(i)) ++matched;
    }
    HallResult result;
    if (matched == na) {
        result.perfect = true;
        for (int i = 0; i < na; ++i) {
            int u = a.members[static_cast<size_t>(i)];
            int v = b.members[static_cast<size_t>(match_a[static_cast<size_t>(i)])];
            result.matching.emplace_back(std::min(u, v), std::max(u, v));
        }
        std::sort(result.matching.begin(), result.matching.end());
        return result;
    }
    // alternating reachability from every unmatched A vertex
    std::vector<bool> in_z_a(static_cast<size_t>(na), false), in_z_b(static_cast<size_t>(nb), false);
    std::vector<int> queue;
    for (int i = 0; i < na; ++i)
        if (match_a[static_cast<size_t>(i)] < 0) {
            in_z_a[static_cast<size_t>(i)] = true;
            queue.push_back(i);
        }
    while (!queue.empty()) {
        int i = queue.back();
        queue.pop_back();
        for (int j : adj[static_cast<size_t>(i)]) {
            if (in_z_b[static_cast<size_t>(j)]) continue;
            in_z_b[static_cast<size_t>(j)] = true;
            int next = match_b[static_cast<size_t>(j)];
            if (next >= 0 && !in_z_a[static_cast<size_t>(next)]) {
                in_z_a[static_cast<size_t>(next)] = true;
                queue.push_back(next);
            }
        }
    }
    std::vector<int> w, nw;
    for (int i = 0; i < na; ++i)
        if (in_z_a[static_cast<size_t>(i)]) w.push_back(a.members[static_cast<size_t>(i)]);
    for (int j = 0; j < nb; ++j)
        if (in_z_b[static_cast<size_t>(j)]) nw.push_back(b.members[static_cast<size_t>(j)]);
    result.violator = VertexSet(std::move(w));
    result.violator_nbhd = VertexSet(std::move(nw));
    if (result.violator_nbhd.size() >= result.violator.size())
        throw std::logic_error("hall violator failed its own arithmetic");
    return result;
}

enum class CheckMode { Exact, Sampled };

struct FPropertyResult {
    bool holds = false;
    bool exact = false;  // exhaustive enumeration completed
    std::optional<VertexSet> counterexample;
    std::optional<std::pair<VertexSet, VertexSet>> counterexample_pair;
    long long checked = 0;
};

namespace detail {

inline bool has_copy_within(const CopySearch& search, const Bits& within) {
    Bits suffix = within;
    for (auto v = within.find_first(); v != Bits::npos; v = within.find_next(v)) {
        if (find_one_copy_through(search, static_cast<int>(v), suffix)) return true;
        suffix.reset(v);
    }
    return false;
}

// Visits every k-combination of [0,n); fn gets sorted indices, returns false
// to stop. Returns false when stopped early.
template <class Fn>
inline bool for_each_combination(int n, int k, Fn&& fn) {
    if (k > n) return true;
    std::vector<int> idx(static_cast<size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        if (!fn(idx)) return false;
        int i = k - 1;
        while (i >= 0 && idx[static_cast<size_t>(i)] == n - k + i) --i;
        if (i < 0) return true;
        ++idx[static_cast<size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
}

inline long long combinations(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long out = 1;
    for (int i = 1; i <= k; ++i) {
        out = out * (n - k + i) / i;
        if (out > kSubsetEnumerationCap * 64) return out;  // early saturate
    }
    return out;
}

}  // namespace detail

// F_H(eta): every induced subgraph on >= eta*n vertices contains the
// template. Checking subsets of exactly ceil(eta*n) vertices suffices since
// containment is monotone under adding vertices.
inline FPropertyResult check_F_H(const Graph& g, const Pattern& h, const Rational& eta,
                                 CheckMode mode, int trials = 2000, const Seed& seed = Seed{0xF0}) {
    if (!(eta > Rational(0) && eta <= Rational(1)))
        throw std::invalid_argument("check_F_H: eta outside (0,1]");
    int n = g.vertex_count();
    int m = std::max<int>(1, static_cast<int>(ceil_of(eta * Rational(n))));
    FPropertyResult result;
    if (m > n) {  // no qualifying subsets
        result.holds = true;
        result.exact = true;
        return result;
    }
    detail::CopySearch search(g, h);
    auto contains = [&](const VertexSet& s) {
        return detail::has_copy_within(search, s.bits(n));
    };
    if (mode == CheckMode::Exact) {
        if (detail::combinations(n, m) > kSubsetEnumerationCap)
            throw std::invalid_argument("check_F_H: C(n, ceil(eta*n)) above enumeration cap; "
                                        "use the sampled mode");
        bool complete = detail::for_each_combination(n, m, [&](const std::vector<int>& idx) {
            ++result.checked;
            VertexSet s(idx);
            if (!contains(s)) {
                result.counterexample = std::move(s);
                return false;
            }
            return true;
        });
        result.exact = true;
        result.holds = complete;
        return result;
    }
    std::vector<int> all(static_cast<size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        VertexSet s = detail::sample_subset(all, m, rng);
        ++result.checked;
        if (!contains(s)) {
            result.counterexample = std::move(s);
            result.holds = false;
            return result;
        }
    }
    result.holds = true;  // plausible only
    return result;
}

// F'_H(eta): for all ordered disjoint (A,B) with |A|,|B| >= eta*n there is a
// copy with exactly one vertex in A and |H|-1 in B.
inline FPropertyResult check_F_H_prime(const Graph& g, const Pattern& h, const Rational& eta,
                                       CheckMode mode, int trials = 2000,
                                       const Seed& seed = Seed{0xF1}) {
    if (!(eta > Rational(0) && eta <= Rational(1)))
        throw std::invalid_argument("check_F_H_prime: eta outside (0,1]");
    int n = g.vertex_count();
    int m = std::max<int>(1, static_cast<int>(ceil_of(eta * Rational(n))));
    FPropertyResult result;
    if (2 * m > n) {
        result.holds = true;
        result.exact = true;
        return result;
    }
    detail::CopySearch search(g, h);
    auto split_copy_exists = [&](const VertexSet& a, const VertexSet& b) {
        Bits allowed = b.bits(n);
        for (int x : a.members) {
            allowed.set(static_cast<size_t>(x));
            if (detail::find_one_copy_through(search, x, allowed)) return true;
            allowed.reset(static_cast<size_t>(x));
        }
        return false;
    };
    if (mode == CheckMode::Exact) {
        long long outer = detail::combinations(n, m);
        long long inner = detail::combinations(n - m, m);
        if (outer > kSubsetEnumerationCap || inner > kSubsetEnumerationCap ||
            outer * inner > kSubsetEnumerationCap)
            throw std::invalid_argument("check_F_H_prime: enumeration above cap; use sampled mode");
        bool complete = detail::for_each_combination(n, m, [&](const std::vector<int>& a_idx) {
            VertexSet a(a_idx);
            std::vector<int> rest;
            Bits ab = a.bits(n);
            for (int v = 0; v < n; ++v)
                if (!ab.test(static_cast<size_t>(v))) rest.push_back(v);
            return detail::for_each_combination(static_cast<int>(rest.size()), m,
                                                [&](const std::vector<int>& b_idx) {
                std::vector<int> b_members;
                b_members.reserve(b_idx.size());
                for (int i : b_idx) b_members.push_back(rest[static_cast<size_t>(i)]);
                VertexSet b(b_members);
                ++result.checked;
                if (!split_copy_exists(a, b)) {
                    result.counterexample_pair = {a, std::move(b)};
                    return false;
                }
                return true;
            });
        });
        result.exact = true;
        result.holds = complete;
        return result;
    }
    std::vector<int> all(static_cast<size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        VertexSet both = detail::sample_subset(all, 2 * m, rng);
        std::vector<int> pool = both.members;
        Rng mix(seed.derive(static_cast<std::uint64_t>(t)));
        mix.shuffle(pool);
        VertexSet a(std::vector<int>(pool.begin(), pool.begin() + m));
        VertexSet b(std::vector<int>(pool.begin() + m, pool.end()));
        ++result.checked;
        if (!split_copy_exists(a, b)) {
            result.counterexample_pair = {std::move(a), std::move(b)};
            result.holds = false;
            return result;
        }
    }
    result.holds = true;
    return result;
}

// Copy identity for forbidden lists: (vertex set, edge set).
using CopyKey = std::pair<std::vector<int>, std::vector<Edge>>;

// F_H(gamma2, forbidden): every induced subgraph on >= gamma2*n vertices
// contains a copy outside the forbidden collection.
inline FPropertyResult check_F_H_avoiding(const Graph& g, const Pattern& h, const Rational& gamma2,
                                          const std::vector<Embedding>& forbidden, CheckMode mode,
                                          int trials = 2000, const Seed& seed = Seed{0xF2}) {
    if (!(gamma2 > Rational(0) && gamma2 <= Rational(1)))
        throw std::invalid_argument("check_F_H_avoiding: gamma2 outside (0,1]");
    std::vector<CopyKey> banned;
    banned.reserve(forbidden.size());
    for (const auto& e : forbidden) banned.push_back(e.key());
    std::sort(banned.begin(), banned.end());
    banned.erase(std::unique(banned.begin(), banned.end()), banned.end());
    int n = g.vertex_count();
    int m = std::max<int>(1, static_cast<int>(ceil_of(gamma2 * Rational(n))));
    FPropertyResult result;
    if (m > n) {
        result.holds = true;
        result.exact = true;
        return result;
    }
    detail::CopySearch search(g, h);
    auto has_fresh_copy = [&](const Bits& within) {
        bool found = false;
        Bits suffix = within;
        for (auto v = within.find_first(); v != Bits::npos && !found; v = within.find_next(v)) {
            search.for_each_embedding_through(static_cast<int>(v), suffix,
                                              [&](const std::vector<int>& image) {
                Embedding e = Embedding::from_map(h.graph(), image);
                if (!std::binary_search(banned.begin(), banned.end(), e.key())) {
                    found = true;
                    return false;
                }
                return true;
            });
            suffix.reset(v);
        }
        return found;
    };
    if (mode == CheckMode::Exact) {
        if (detail::combinations(n, m) > kSubsetEnumerationCap)
            throw std::invalid_argument("check_F_H_avoiding: enumeration above cap; use sampled mode");
        bool complete = detail::for_each_combination(n, m, [&](const std::vector<int>& idx) {
            ++result.checked;
            VertexSet s(idx);
            if (!has_fresh_copy(s.bits(n))) {
                result.counterexample = std::move(s);
                return false;
            }
            return true;
        });
        result.exact = true;
        result.holds = complete;
        return result;
    }
    std::vector<int> all(static_cast<size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        VertexSet s = detail::sample_subset(all, m, rng);
        ++result.checked;
        if (!has_fresh_copy(s.bits(n))) {
            result.counterexample = std::move(s);
            result.holds = false;
            return result;
        }
    }
    result.holds = true;
    return result;
}

}  // namespace tilelab
