#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tilelab/density.hpp"
#include "tilelab/graph.hpp"
#include "tilelab/random_models.hpp"
#include "tilelab/regularity.hpp"
#include "tilelab/tiling.hpp"

namespace tilelab {

struct HSetClass {
    VertexSet members;
    bool good = false;
    bool excellent = false;
    int common_nbhd_size = 0;
};

// Template minus one vertex, with the label lift back into the template.
struct ReducedPattern {
    Pattern pattern;             // H' on |H|-1 vertices
    int removed;                 // the template vertex dropped
    std::vector<int> to_parent;  // H' label -> H label
};

// Drops a maximum-degree vertex (smallest index on ties): the copies that
// re-attach the dropped vertex only need a common neighbour, while a sparser
// H' is easier to find inside the random layers.
inline ReducedPattern reduce_pattern(const Pattern& h) {
    if (h.size() < 3)
        throw std::invalid_argument("reduce_pattern needs |H| >= 3");
    int drop = 0;
    for (int v = 1; v < h.size(); ++v)
        if (h.graph().degree(v) > h.graph().degree(drop)) drop = v;
    std::vector<int> keep;
    for (int v = 0; v < h.size(); ++v)
        if (v != drop) keep.push_back(v);
    auto sub = induced(h.graph(), VertexSet(keep));
    return {Pattern::from_graph(sub.graph), drop, sub.to_parent};
}

// Classifies h-subsets of T: good when the common cross-neighbourhood in S
// has size >= d1*|S|, excellent when additionally the set spans a copy of H'
// in the random layer. Enumeration is exhaustive up to `cap` subsets, sampled
// beyond it.
inline std::vector<HSetClass> classify_h_sets(const Graph& cross, const Graph& random_layer,
                                              const VertexSet& s, const VertexSet& t,
                                              const Pattern& h_prime, const Rational& d1,
                                              long long cap = 200'000,
                                              const Seed& seed = Seed{0x45}) {
    if (cross.vertex_count() != random_layer.vertex_count())
        throw std::invalid_argument("classify_h_sets: layer size mismatch");
    int h = h_prime.size();
    int n = cross.vertex_count();
    Bits s_bits = s.bits(n);
    detail::CopySearch hp_search(random_layer, h_prime);
    auto classify_one = [&](const std::vector<int>& idx) {
        HSetClass entry;
        std::vector<int> members;
        members.reserve(idx.size());
        for (int i : idx) members.push_back(t.members[static_cast<size_t>(i)]);
        entry.members = VertexSet(members);
        Bits common = s_bits;
        for (int v : entry.members.members) common &= cross.neighbours(v);
        entry.common_nbhd_size = static_cast<int>(common.count());
        entry.good = Rational(entry.common_nbhd_size) >= d1 * Rational(s.size());
        if (entry.good) {
            Bits inside = entry.members.bits(n);
            entry.excellent = detail::has_copy_within(hp_search, inside);
        }
        return entry;
    };
    std::vector<HSetClass> out;
    if (detail::combinations(t.size(), h) <= cap) {
        detail::for_each_combination(t.size(), h, [&](const std::vector<int>& idx) {
            out.push_back(classify_one(idx));
            return true;
        });
        return out;
    }
    Rng rng(seed);
    std::set<std::vector<int>> seen;
    std::vector<int> positions(static_cast<size_t>(t.size()));
    std::iota(positions.begin(), positions.end(), 0);
    while (static_cast<long long>(out.size()) < cap) {
        VertexSet pick = detail::sample_subset(positions, h, rng);
        if (!seen.insert(pick.members).second) continue;
        out.push_back(classify_one(pick.members));
    }
    return out;
}

struct CompletionParams {
    Rational eps5{1, 5};
    Rational phi{1, 50};
    Rational d1{1, 10};
    int retry_cap = 24;
    long long fallback_budget = kDefaultBudget;
};

enum class CompletionRoute { Staged, Fallback };

struct CompletionResult {
    TilingStatus status = TilingStatus::Unknown;
    Tiling tiling;  // on Found: covers S u T exactly
    CompletionRoute route = CompletionRoute::Staged;
    int attempts = 0;
};

namespace detail {

// Shared context for one staged completion run. "Body" always refers to the
// side holding the H'-part of a copy, "connector" to the single vertex on the
// opposite side.
struct CompletionContext {
    const Graph& cross;
    const Graph& random_layer;
    const Graph& host;  // cross u random
    const Pattern& h;
    ReducedPattern hp;
    Rational d1;
    int n;

    CompletionContext(const Graph& cross, const Graph& random_layer, const Graph& host,
                      const Pattern& h, const Rational& d1)
        : cross(cross),
          random_layer(random_layer),
          host(host),
          h(h),
          hp(reduce_pattern(h)),
          d1(d1),
          n(host.vertex_count()) {}

    // Lift an H'-embedding plus a connector into a full template embedding.
    Embedding lift(const Embedding& body, int connector) const {
        std::vector<int> image(static_cast<size_t>(h.size()), -1);
        for (int i = 0; i < hp.pattern.size(); ++i)
            image[static_cast<size_t>(hp.to_parent[static_cast<size_t>(i)])] =
                body.image_map[static_cast<size_t>(i)];
        image[static_cast<size_t>(hp.removed)] = connector;
        return Embedding::from_map(h.graph(), image);
    }

    // Is `set` good for the given opposite side (cross-layer common
    // neighbourhood at least d1 * |opposite|)?
    bool good_set(const std::vector<int>& set, const Bits& opposite_full, int opposite_size,
                  Bits* common_out = nullptr) const {
        Bits common = opposite_full;
        for (int v : set) common &= cross.neighbours(v);
        if (common_out) *common_out = common;
        return Rational(static_cast<long long>(common.count())) >= d1 * Rational(opposite_size);
    }

    // Finds a copy whose H'-body lies in `body_avail` (excellent: spans H' in
    // the random layer and is good towards the full opposite side) and whose
    // connector comes from `conn_avail` adjacent in the host to all body
    // vertices. Returns the full embedding.
    std::optional<Embedding> find_copy(const Bits& body_avail, const Bits& conn_avail,
                                       const Bits& opposite_full, int opposite_size,
                                       Rng& rng) const {
        Bits pool = body_avail;
        if (conn_avail.count() == 1) {
            // single fixed connector: only bodies inside its neighbourhood work
            pool &= host.neighbours(static_cast<int>(conn_avail.find_first()));
        }
        CopySearch body_search(random_layer, hp.pattern);
        std::optional<Embedding> found;
        Bits suffix = pool;
        for (auto v = pool.find_first(); v != Bits::npos && !found; v = pool.find_next(v)) {
            body_search.for_each_embedding_through(
                static_cast<int>(v), suffix,
                [&](const std::vector<int>& image) {
                    Embedding body = Embedding::from_map(hp.pattern.graph(), image);
                    if (!good_set(body.vertices, opposite_full, opposite_size)) return true;
                    Bits usable = conn_avail;
                    for (int u : body.vertices) usable &= host.neighbours(u);
                    auto c = usable.find_first();
                    if (c == Bits::npos) return true;
                    // random-ish connector for retry diversity
                    auto skip = rng.next_below(usable.count());
                    for (std::uint64_t i = 0; i < skip; ++i) c = usable.find_next(c);
                    found = lift(body, static_cast<int>(c));
                    return false;
                },
                &rng);
            suffix.reset(v);
        }
        return found;
    }
};

}  // namespace detail

// Builds a perfect tiling of S u T out of S-copies, T-copies and matched
// closing copies, following the staged route (matching for a single-edge
// template, absorption/greedy/closing stages otherwise); falls back to the
// exact solver restricted to S u T when the stages fail.
inline CompletionResult complete_pair_tiling(const Graph& cross, const Graph& random_layer,
                                             const VertexSet& s, const VertexSet& t,
                                             const Pattern& h,
                                             const CompletionParams& params = {},
                                             const Seed& seed = Seed{7}) {
    if (cross.vertex_count() != random_layer.vertex_count())
        throw std::invalid_argument("complete_pair_tiling: layer size mismatch");
    int n = cross.vertex_count();
    if ((s.bits(n) & t.bits(n)).any())
        throw std::invalid_argument("complete_pair_tiling: S and T intersect");
    long long total = s.size() + t.size();
    if (total % h.size() != 0)
        throw std::invalid_argument("complete_pair_tiling: |S u T| not divisible by |H|");
    Graph host = graph_union(cross, random_layer);
    CompletionResult result;
    if (total == 0) {
        result.status = TilingStatus::Found;
        result.route = CompletionRoute::Staged;
        return result;
    }

    std::vector<int> union_members = s.members;
    union_members.insert(union_members.end(), t.members.begin(), t.members.end());
    VertexSet s_u_t(union_members);

    auto finish_staged = [&](std::vector<Embedding> embeddings, int attempts) {
        result.tiling = Tiling::of(std::move(embeddings));
        result.attempts = attempts;
        std::string why;
        if (!validate_tiling(host, h, result.tiling, &why) || result.tiling.covered != s_u_t)
            return false;
        result.status = TilingStatus::Found;
        result.route = CompletionRoute::Staged;
        return true;
    };

    // --- single-edge template: matching route -------------------------------
    if (h.size() == 2) {
        const VertexSet& small = s.size() <= t.size() ? s : t;
        const VertexSet& large = s.size() <= t.size() ? t : s;
        int z = large.size() - small.size();  // even by divisibility
        for (int attempt = 0; attempt < std::max(1, params.retry_cap); ++attempt) {
            Rng rng(seed.derive(static_cast<std::uint64_t>(attempt)));
            // z/2 disjoint random-layer edges inside the large side
            std::vector<Edge> inside;
            Bits large_bits = large.bits(n);
            for (auto [u, v] : random_layer.edges())
                if (large_bits.test(static_cast<size_t>(u)) && large_bits.test(static_cast<size_t>(v)))
                    inside.emplace_back(u, v);
            rng.shuffle(inside);
            std::vector<Edge> m_edges;
            Bits used(static_cast<size_t>(n));
            for (auto [u, v] : inside) {
                if (static_cast<int>(m_edges.size()) == z / 2) break;
                if (used.test(static_cast<size_t>(u)) || used.test(static_cast<size_t>(v))) continue;
                m_edges.emplace_back(u, v);
                used.set(static_cast<size_t>(u));
                used.set(static_cast<size_t>(v));
            }
            if (static_cast<int>(m_edges.size()) < z / 2) continue;  // reshuffle may still work
            std::vector<int> rest;
            for (int v : large.members)
                if (!used.test(static_cast<size_t>(v))) rest.push_back(v);
            auto hall = hall_perfect_matching(host, small, VertexSet(rest));
            if (!hall.perfect) continue;
            std::vector<Embedding> embeddings;
            for (auto [u, v] : m_edges)
                embeddings.push_back(Embedding::from_map(h.graph(), {u, v}));
            for (auto [u, v] : hall.matching)
                embeddings.push_back(Embedding::from_map(h.graph(), {u, v}));
            if (finish_staged(std::move(embeddings), attempt + 1)) return result;
        }
    } else {
        // --- general template: absorption + balanced greedy + closing -------
        detail::CompletionContext ctx(cross, random_layer, host, h, params.d1);
        const int hh = h.size() - 1;
        // work with body side B = larger side, connector side A = smaller
        const VertexSet& side_s = s.size() >= t.size() ? t : s;  // connector-rich side "S"
        const VertexSet& side_t = s.size() >= t.size() ? s : t;  // body side "T", the larger
        Bits s_full = side_s.bits(n);
        Bits t_full = side_t.bits(n);
        int big_n = std::max(side_s.size(), side_t.size());
        int z = static_cast<int>(floor_of(params.phi * params.eps5 * Rational(big_n)));
        int m = std::max<int>(z + 1, static_cast<int>(floor_of(params.phi * Rational(big_n))));
        m = std::min(m, side_s.size());
        int mprime = m - z;

        // maximal excellent H'-tiling in the random layer inside T
        std::vector<Embedding> pool;
        {
            Rng rng(seed.derive(0xB0D1));
            Bits avail = t_full;
            detail::CopySearch body_search(random_layer, ctx.hp.pattern);
            bool more = true;
            while (more) {
                more = false;
                Bits suffix = avail;
                for (auto v = avail.find_first(); v != Bits::npos; v = avail.find_next(v)) {
                    std::optional<Embedding> got;
                    body_search.for_each_embedding_through(
                        static_cast<int>(v), suffix,
                        [&](const std::vector<int>& image) {
                            Embedding body = Embedding::from_map(ctx.hp.pattern.graph(), image);
                            if (!ctx.good_set(body.vertices, s_full, side_s.size())) return true;
                            got = std::move(body);
                            return false;
                        },
                        &rng);
                    suffix.reset(v);
                    if (got) {
                        for (int w : got->vertices) avail.reset(static_cast<size_t>(w));
                        pool.push_back(std::move(*got));
                        more = true;
                        break;
                    }
                }
            }
        }

        if (static_cast<int>(pool.size()) >= mprime && mprime >= 1) {
            for (int attempt = 0; attempt < params.retry_cap; ++attempt) {
                Rng rng(seed.derive(static_cast<std::uint64_t>(attempt) + 1));
                auto staged = [&]() -> std::optional<std::vector<Embedding>> {
                    // sample X subseteq S and M' from the pool
                    std::vector<int> x_members = detail::sample_subset(side_s.members, m, rng).members;
                    std::vector<int> pool_idx(pool.size());
                    std::iota(pool_idx.begin(), pool_idx.end(), 0);
                    rng.shuffle(pool_idx);
                    std::vector<const Embedding*> mprime_sets;
                    for (int i = 0; i < mprime; ++i)
                        mprime_sets.push_back(&pool[static_cast<size_t>(pool_idx[static_cast<size_t>(i)])]);

                    Bits x_bits(static_cast<size_t>(n));
                    for (int v : x_members) x_bits.set(static_cast<size_t>(v));
                    // early reject: when stage (a) must leave all of X uncovered,
                    // the closing matching is exactly K[X, M']
                    if (z == 0) {
                        std::vector<std::vector<int>> adj(static_cast<size_t>(m));
                        for (int i = 0; i < m; ++i)
                            for (int j = 0; j < mprime; ++j) {
                                bool all = true;
                                for (int w : mprime_sets[static_cast<size_t>(j)]->vertices)
                                    if (!host.has_edge(x_members[static_cast<size_t>(i)], w)) {
                                        all = false;
                                        break;
                                    }
                                if (all) adj[static_cast<size_t>(i)].push_back(j);
                            }
                        // quick Hall feasibility via greedy augmenting
                        std::vector<int> match_b(static_cast<size_t>(mprime), -1);
                        std::vector<bool> seen;
                        std::function<bool(int)> aug = [&](int i) -> bool {
                            for (int j : adj[static_cast<size_t>(i)]) {
                                if (seen[static_cast<size_t>(j)]) continue;
                                seen[static_cast<size_t>(j)] = true;
                                if (match_b[static_cast<size_t>(j)] < 0 || aug(match_b[static_cast<size_t>(j)])) {
                                    match_b[static_cast<size_t>(j)] = i;
                                    return true;
                                }
                            }
                            return false;
                        };
                        int matched = 0;
                        for (int i = 0; i < m && matched < mprime; ++i) {
                            seen.assign(static_cast<size_t>(mprime), false);
                            if (aug(i)) ++matched;
                        }
                        if (matched < mprime) return std::nullopt;
                    }

                    Bits mprime_vertices(static_cast<size_t>(n));
                    for (const auto* e : mprime_sets)
                        for (int w : e->vertices) mprime_vertices.set(static_cast<size_t>(w));
                    Bits t_work = t_full;
                    t_work -= mprime_vertices;

                    std::vector<Embedding> chosen;
                    Bits s_avail = s_full;
                    s_avail -= x_bits;
                    Bits t_avail = t_work;

                    int t_cnt = z / hh;
                    int z_rem = z - hh * t_cnt;

                    // T1: absorb body-side vertices poor towards X, pad for
                    // divisibility of what the balanced greedy must cover
                    std::vector<int> t1;
                    if (t_cnt > 0) {
                        for (auto v = t_work.find_first(); v != Bits::npos; v = t_work.find_next(v)) {
                            int deg = static_cast<int>((cross.neighbours(static_cast<int>(v)) & x_bits).count());
                            if (Rational(deg) < params.d1 * Rational(m)) t1.push_back(static_cast<int>(v));
                        }
                    }
                    int t_work_size = static_cast<int>(t_work.count());
                    int pad = (t_work_size - static_cast<int>(t1.size()) - t_cnt) % h.size();
                    if (pad < 0) pad += h.size();
                    if (pad > 0) {
                        std::vector<int> candidates;
                        Bits t1_bits(static_cast<size_t>(n));
                        for (int v : t1) t1_bits.set(static_cast<size_t>(v));
                        for (auto v = t_work.find_first(); v != Bits::npos; v = t_work.find_next(v))
                            if (!t1_bits.test(v)) candidates.push_back(static_cast<int>(v));
                        rng.shuffle(candidates);
                        for (int i = 0; i < pad && i < static_cast<int>(candidates.size()); ++i)
                            t1.push_back(candidates[static_cast<size_t>(i)]);
                        if (static_cast<int>(t1.size()) < pad) return std::nullopt;
                    }

                    // cover T1 with S-copies (body in S \ X, connector in T1)
                    for (int x : t1) {
                        Bits conn(static_cast<size_t>(n));
                        conn.set(static_cast<size_t>(x));
                        auto copy = ctx.find_copy(s_avail, conn, t_full, side_t.size(), rng);
                        if (!copy) return std::nullopt;
                        for (int w : copy->vertices)
                            if (w != x) s_avail.reset(static_cast<size_t>(w));
                        t_avail.reset(static_cast<size_t>(x));
                        chosen.push_back(std::move(*copy));
                    }

                    // T2: random t_cnt-subset of the remaining body side
                    std::vector<int> t_rest_members;
                    for (auto v = t_avail.find_first(); v != Bits::npos; v = t_avail.find_next(v))
                        t_rest_members.push_back(static_cast<int>(v));
                    if (static_cast<int>(t_rest_members.size()) < t_cnt) return std::nullopt;
                    rng.shuffle(t_rest_members);
                    Bits t2(static_cast<size_t>(n));
                    for (int i = 0; i < t_cnt; ++i)
                        t2.set(static_cast<size_t>(t_rest_members[static_cast<size_t>(i)]));
                    t_avail -= t2;

                    // Q' subseteq X re-enters the connector side
                    std::vector<int> q_members = x_members;
                    rng.shuffle(q_members);
                    for (int i = 0; i < z_rem; ++i) {
                        s_avail.set(static_cast<size_t>(q_members[static_cast<size_t>(i)]));
                        x_bits.reset(static_cast<size_t>(q_members[static_cast<size_t>(i)]));
                    }

                    // quotas solve hh*a + b = |S'|, a + hh*b = |T_rest|; the
                    // T2 vertices close against X afterwards, so no reserve is
                    // held back here. Integrality is automatic for hh = 2;
                    // larger templates fall back on failure.
                    long long s_prime = static_cast<long long>(s_avail.count());
                    long long t_rest = static_cast<long long>(t_avail.count());
                    if (s_prime % h.size() != 0 || t_rest % h.size() != 0) return std::nullopt;
                    long long denom = static_cast<long long>(hh) * hh - 1;
                    if ((hh * s_prime - t_rest) % denom != 0) return std::nullopt;
                    long long quota_s = (hh * s_prime - t_rest) / denom;  // bodies in S'
                    long long quota_t = (hh * t_rest - s_prime) / denom;  // bodies in T_rest
                    if (quota_s < 0 || quota_t < 0) return std::nullopt;

                    // balanced greedy: interleave by larger remaining quota
                    while (quota_s > 0 || quota_t > 0) {
                        bool do_s = quota_s > 0 && quota_s >= quota_t;
                        if (do_s) {
                            auto copy = ctx.find_copy(s_avail, t_avail, t_full, side_t.size(), rng);
                            if (!copy) return std::nullopt;
                            for (int w : copy->vertices) {
                                s_avail.reset(static_cast<size_t>(w));
                                t_avail.reset(static_cast<size_t>(w));
                            }
                            chosen.push_back(std::move(*copy));
                            --quota_s;
                        } else {
                            auto copy = ctx.find_copy(t_avail, s_avail, s_full, side_s.size(), rng);
                            if (!copy) return std::nullopt;
                            for (int w : copy->vertices) {
                                s_avail.reset(static_cast<size_t>(w));
                                t_avail.reset(static_cast<size_t>(w));
                            }
                            chosen.push_back(std::move(*copy));
                            --quota_t;
                        }
                    }
                    if (s_avail.any() || t_avail.any()) return std::nullopt;

                    // T2 leftovers close against X via S-copies
                    for (auto v = t2.find_first(); v != Bits::npos; v = t2.find_next(v)) {
                        Bits conn(static_cast<size_t>(n));
                        conn.set(v);
                        auto copy = ctx.find_copy(x_bits, conn, t_full, side_t.size(), rng);
                        if (!copy) return std::nullopt;
                        for (int w : copy->vertices)
                            if (w != static_cast<int>(v)) x_bits.reset(static_cast<size_t>(w));
                        chosen.push_back(std::move(*copy));
                    }

                    // closing matching: remaining X' against M'
                    std::vector<int> x_prime;
                    for (auto v = x_bits.find_first(); v != Bits::npos; v = x_bits.find_next(v))
                        x_prime.push_back(static_cast<int>(v));
                    if (static_cast<int>(x_prime.size()) != mprime) return std::nullopt;
                    std::vector<std::vector<int>> adj(x_prime.size());
                    for (size_t i = 0; i < x_prime.size(); ++i)
                        for (int j = 0; j < mprime; ++j) {
                            bool all = true;
                            for (int w : mprime_sets[static_cast<size_t>(j)]->vertices)
                                if (!host.has_edge(x_prime[i], w)) {
                                    all = false;
                                    break;
                                }
                            if (all) adj[i].push_back(j);
                        }
                    std::vector<int> match_b(static_cast<size_t>(mprime), -1);
                    std::vector<bool> seen;
                    std::function<bool(size_t)> aug = [&](size_t i) -> bool {
                        for (int j : adj[i]) {
                            if (seen[static_cast<size_t>(j)]) continue;
                            seen[static_cast<size_t>(j)] = true;
                            if (match_b[static_cast<size_t>(j)] < 0 ||
                                aug(static_cast<size_t>(match_b[static_cast<size_t>(j)]))) {
                                match_b[static_cast<size_t>(j)] = static_cast<int>(i);
                                return true;
                            }
                        }
                        return false;
                    };
                    int matched = 0;
                    for (size_t i = 0; i < x_prime.size(); ++i) {
                        seen.assign(static_cast<size_t>(mprime), false);
                        if (aug(i)) ++matched;
                    }
                    if (matched < mprime) return std::nullopt;
                    for (int j = 0; j < mprime; ++j)
                        chosen.push_back(ctx.lift(*mprime_sets[static_cast<size_t>(j)],
                                                  x_prime[static_cast<size_t>(match_b[static_cast<size_t>(j)])]));
                    return chosen;
                }();
                if (staged && finish_staged(std::move(*staged), attempt + 1)) return result;
            }
        }
    }

    // --- fallback: exact solver on the induced pair -------------------------
    auto sub = induced(host, s_u_t);
    auto solved = perfect_tiling(sub.graph, h, params.fallback_budget);
    result.attempts = params.retry_cap;
    if (solved.status == TilingStatus::Found) {
        std::vector<Embedding> lifted;
        for (const auto& e : solved.tiling.embeddings) {
            std::vector<int> image;
            image.reserve(e.image_map.size());
            for (int v : e.image_map) image.push_back(sub.to_parent[static_cast<size_t>(v)]);
            lifted.push_back(Embedding::from_map(h.graph(), image));
        }
        result.tiling = Tiling::of(std::move(lifted));
        std::string why;
        if (!validate_tiling(host, h, result.tiling, &why) || result.tiling.covered != s_u_t)
            throw std::logic_error("fallback completion produced an invalid tiling: " + why);
        result.status = TilingStatus::Found;
        result.route = CompletionRoute::Fallback;
        return result;
    }
    result.route = CompletionRoute::Fallback;
    result.status = solved.status;  // NoneExists is definitive, Unknown means budget
    return result;
}

}  // namespace tilelab
