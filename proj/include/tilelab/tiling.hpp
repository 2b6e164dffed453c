#pragma once

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tilelab/density.hpp"
#include "tilelab/graph.hpp"
#include "tilelab/random_models.hpp"

namespace tilelab {

// One copy of the template in a host graph. Copy identity is the pair
// (image vertex set, image edge set): embeddings differing by a template
// automorphism are the same copy.
struct Embedding {
    std::vector<int> image_map;    // template vertex -> host vertex
    std::vector<int> vertices;     // sorted image vertex set
    std::vector<Edge> edge_image;  // sorted host edges used by template edges

    static Embedding from_map(const Graph& h, std::vector<int> map) {
        Embedding e;
        e.image_map = std::move(map);
        e.vertices = e.image_map;
        std::sort(e.vertices.begin(), e.vertices.end());
        for (auto [u, v] : h.edges()) {
            int a = e.image_map[static_cast<size_t>(u)];
            int b = e.image_map[static_cast<size_t>(v)];
            e.edge_image.emplace_back(std::min(a, b), std::max(a, b));
        }
        std::sort(e.edge_image.begin(), e.edge_image.end());
        e.edge_image.erase(std::unique(e.edge_image.begin(), e.edge_image.end()),
                           e.edge_image.end());
        return e;
    }

    std::pair<std::vector<int>, std::vector<Edge>> key() const {
        return {vertices, edge_image};
    }
};

struct Tiling {
    std::vector<Embedding> embeddings;
    VertexSet covered;

    int covered_count() const { return covered.size(); }
    int size() const { return static_cast<int>(embeddings.size()); }

    static Tiling of(std::vector<Embedding> embeddings) {
        Tiling t;
        t.embeddings = std::move(embeddings);
        std::vector<int> all;
        for (const auto& e : t.embeddings)
            all.insert(all.end(), e.vertices.begin(), e.vertices.end());
        t.covered = VertexSet(std::move(all));
        return t;
    }
};

// Recomputes every certificate property from scratch; solvers call this
// before returning Found and tests call it again on their side.
inline bool validate_tiling(const Graph& host, const Pattern& pattern, const Tiling& tiling,
                            std::string* why = nullptr) {
    auto fail = [&](const std::string& reason) {
        if (why) *why = reason;
        return false;
    };
    long long covered_total = 0;
    Bits seen(static_cast<size_t>(host.vertex_count()));
    for (const auto& emb : tiling.embeddings) {
        if (static_cast<int>(emb.image_map.size()) != pattern.size())
            return fail("embedding arity mismatch");
        Bits mine(static_cast<size_t>(host.vertex_count()));
        for (int v : emb.image_map) {
            if (v < 0 || v >= host.vertex_count()) return fail("image vertex out of range");
            if (mine.test(static_cast<size_t>(v))) return fail("non-injective embedding");
            mine.set(static_cast<size_t>(v));
        }
        if ((mine & seen).any()) return fail("embeddings overlap");
        seen |= mine;
        covered_total += pattern.size();
        for (auto [u, v] : pattern.graph().edges()) {
            int a = emb.image_map[static_cast<size_t>(u)];
            int b = emb.image_map[static_cast<size_t>(v)];
            if (!host.has_edge(a, b)) return fail("template edge not present in host");
        }
    }
    if (tiling.covered != VertexSet::from_bits(seen)) return fail("covered set mismatch");
    if (covered_total != tiling.covered.size()) return fail("covered count mismatch");
    return true;
}

inline bool validate_perfect_tiling(const Graph& host, const Pattern& pattern,
                                    const Tiling& tiling, std::string* why = nullptr) {
    if (!validate_tiling(host, pattern, tiling, why)) return false;
    if (tiling.covered.size() != host.vertex_count()) {
        if (why) *why = "tiling is not perfect";
        return false;
    }
    return true;
}

namespace detail {

// Insertion order for embedding search, rooted at one pinned template vertex:
// prefer vertices with the most already-placed neighbours (connected expansion
// when possible), ties to the smaller index.
struct SearchOrder {
    std::vector<int> verts;
    std::vector<std::vector<int>> placed_nbrs;  // per position, indices into verts
};

inline SearchOrder make_search_order(const Graph& h, int root) {
    int k = h.vertex_count();
    SearchOrder order;
    std::vector<bool> placed(static_cast<size_t>(k), false);
    order.verts.push_back(root);
    placed[static_cast<size_t>(root)] = true;
    while (static_cast<int>(order.verts.size()) < k) {
        int best = -1, best_links = -1;
        for (int u = 0; u < k; ++u) {
            if (placed[static_cast<size_t>(u)]) continue;
            int links = 0;
            for (int w : order.verts)
                if (h.has_edge(u, w)) ++links;
            if (links > best_links) {
                best = u;
                best_links = links;
            }
        }
        order.verts.push_back(best);
        placed[static_cast<size_t>(best)] = true;
    }
    order.placed_nbrs.resize(order.verts.size());
    for (size_t i = 0; i < order.verts.size(); ++i)
        for (size_t j = 0; j < i; ++j)
            if (h.has_edge(order.verts[i], order.verts[j]))
                order.placed_nbrs[i].push_back(static_cast<int>(j));
    return order;
}

// Template vertices that are minimal in their automorphism orbit; pinning
// only these still reaches every copy through a fixed host vertex.
inline std::vector<int> pin_representatives(const Graph& h) {
    int k = h.vertex_count();
    std::vector<int> reps;
    if (k > 8) {
        for (int v = 0; v < k; ++v) reps.push_back(v);
        return reps;
    }
    std::vector<int> orbit(static_cast<size_t>(k));
    for (int v = 0; v < k; ++v) orbit[static_cast<size_t>(v)] = v;
    std::vector<int> perm(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) perm[static_cast<size_t>(i)] = i;
    do {
        bool automorphism = true;
        for (auto [u, v] : h.edges())
            if (!h.has_edge(perm[static_cast<size_t>(u)], perm[static_cast<size_t>(v)])) {
                automorphism = false;
                break;
            }
        if (automorphism) {
            // permutation preserves edge count, so edge->edge suffices
            for (int v = 0; v < k; ++v) {
                int a = v, b = perm[static_cast<size_t>(v)];
                int ra = orbit[static_cast<size_t>(a)], rb = orbit[static_cast<size_t>(b)];
                if (ra != rb) {
                    int lo = std::min(ra, rb);
                    for (auto& o : orbit)
                        if (o == ra || o == rb) o = lo;
                }
            }
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (int v = 0; v < k; ++v)
        if (orbit[static_cast<size_t>(v)] == v) reps.push_back(v);
    return reps;
}

struct CopySearch {
    const Graph& host;
    const Pattern& pattern;
    std::vector<int> pins;
    std::vector<SearchOrder> orders;

    CopySearch(const Graph& g, const Pattern& p) : host(g), pattern(p) {
        pins = pin_representatives(p.graph());
        for (int pin : pins) orders.push_back(make_search_order(p.graph(), pin));
    }

    // Calls fn for every embedding of the template with the pinned vertex at
    // `at`, every other vertex inside `allowed`. fn returning false stops the
    // search. Returns false when stopped early.
    template <class Fn>
    bool for_each_embedding_through(int at, const Bits& allowed, Fn&& fn,
                                    Rng* scramble = nullptr) const {
        std::vector<int> image(static_cast<size_t>(pattern.size()), -1);
        for (size_t pi = 0; pi < pins.size(); ++pi) {
            const auto& order = orders[pi];
            image.assign(image.size(), -1);
            image[static_cast<size_t>(order.verts[0])] = at;
            Bits used(static_cast<size_t>(host.vertex_count()));
            used.set(static_cast<size_t>(at));
            if (!extend(order, 1, allowed, used, image, fn, scramble)) return false;
        }
        return true;
    }

private:
    template <class Fn>
    bool extend(const SearchOrder& order, size_t pos, const Bits& allowed, Bits& used,
                std::vector<int>& image, Fn&& fn, Rng* scramble) const {
        if (pos == order.verts.size()) return fn(image);
        Bits candidates = allowed;
        candidates -= used;
        for (int j : order.placed_nbrs[pos])
            candidates &= host.neighbours(image[static_cast<size_t>(order.verts[static_cast<size_t>(j)])]);
        std::vector<int> cand_list;
        for (auto v = candidates.find_first(); v != Bits::npos; v = candidates.find_next(v))
            cand_list.push_back(static_cast<int>(v));
        if (scramble) scramble->shuffle(cand_list);
        int pv = order.verts[pos];
        for (int v : cand_list) {
            image[static_cast<size_t>(pv)] = v;
            used.set(static_cast<size_t>(v));
            bool keep_going = extend(order, pos + 1, allowed, used, image, fn, scramble);
            used.reset(static_cast<size_t>(v));
            image[static_cast<size_t>(pv)] = -1;
            if (!keep_going) return false;
        }
        return true;
    }
};

// Distinct copies through `at` inside `allowed`, keyed and sorted canonically.
inline std::vector<Embedding> copies_through(const CopySearch& search, int at,
                                             const Bits& allowed) {
    std::map<std::pair<std::vector<int>, std::vector<Edge>>, Embedding> dedup;
    search.for_each_embedding_through(at, allowed, [&](const std::vector<int>& image) {
        Embedding e = Embedding::from_map(search.pattern.graph(), image);
        dedup.emplace(e.key(), std::move(e));
        return true;
    });
    std::vector<Embedding> out;
    out.reserve(dedup.size());
    for (auto& [key, emb] : dedup) out.push_back(std::move(emb));
    return out;
}

inline std::optional<Embedding> find_one_copy_through(const CopySearch& search, int at,
                                                      const Bits& allowed,
                                                      Rng* scramble = nullptr) {
    std::optional<Embedding> found;
    search.for_each_embedding_through(
        at, allowed,
        [&](const std::vector<int>& image) {
            found = Embedding::from_map(search.pattern.graph(), image);
            return false;
        },
        scramble);
    return found;
}

}  // namespace detail

// One representative embedding per distinct copy of the template in the host,
// optionally restricted to `within` and/or to copies containing `through`.
inline std::vector<Embedding> enumerate_copies(const Graph& g, const Pattern& h,
                                               const std::optional<VertexSet>& within = {},
                                               std::optional<int> through = {}) {
    Bits allowed = within ? within->bits(g.vertex_count())
                          : VertexSet::full(g.vertex_count()).bits(g.vertex_count());
    if (through) {
        if (*through < 0 || *through >= g.vertex_count())
            throw std::invalid_argument("enumerate_copies: through out of range");
        if (!allowed.test(static_cast<size_t>(*through)))
            throw std::invalid_argument("enumerate_copies: through not inside within");
    }
    detail::CopySearch search(g, h);
    std::map<std::pair<std::vector<int>, std::vector<Edge>>, Embedding> dedup;
    auto gather = [&](int at, const Bits& mask) {
        search.for_each_embedding_through(at, mask, [&](const std::vector<int>& image) {
            Embedding e = Embedding::from_map(h.graph(), image);
            dedup.emplace(e.key(), std::move(e));
            return true;
        });
    };
    if (through) {
        gather(*through, allowed);
    } else {
        // each copy is collected at its minimum image vertex
        Bits suffix = allowed;
        for (auto v = allowed.find_first(); v != Bits::npos; v = allowed.find_next(v)) {
            gather(static_cast<int>(v), suffix);
            suffix.reset(v);
        }
    }
    std::vector<Embedding> out;
    out.reserve(dedup.size());
    for (auto& [key, emb] : dedup) out.push_back(std::move(emb));
    return out;
}

enum class TilingStatus { Found, NoneExists, Unknown };

inline std::string to_string(TilingStatus s) {
    switch (s) {
        case TilingStatus::Found: return "found";
        case TilingStatus::NoneExists: return "none_exists";
        case TilingStatus::Unknown: return "unknown";
    }
    return "?";
}

struct TilingResult {
    TilingStatus status = TilingStatus::Unknown;
    Tiling tiling;  // meaningful iff status == Found
    long long nodes_explored = 0;
    double elapsed_seconds = 0.0;
};

inline constexpr long long kDefaultBudget = 2'000'000;

namespace detail {

struct PerfectSearch {
    const Graph& host;
    const Pattern& pattern;
    CopySearch search;
    long long budget;
    long long nodes = 0;
    bool aborted = false;
    std::vector<Embedding> chosen;

    PerfectSearch(const Graph& g, const Pattern& p, long long budget)
        : host(g), pattern(p), search(g, p), budget(budget) {}

    bool run(Bits& uncovered) {
        ++nodes;
        if (nodes > budget) {
            aborted = true;
            return false;
        }
        auto first = uncovered.find_first();
        if (first == Bits::npos) return true;
        auto copies = copies_through(search, static_cast<int>(first), uncovered);
        for (const auto& copy : copies) {
            for (int v : copy.vertices) uncovered.reset(static_cast<size_t>(v));
            chosen.push_back(copy);
            if (run(uncovered)) return true;
            chosen.pop_back();
            for (int v : copy.vertices) uncovered.set(static_cast<size_t>(v));
            if (aborted) return false;
        }
        return false;
    }
};

}  // namespace detail

// Exact decision procedure: Found comes with a validated certificate,
// NoneExists only after exhausting the search tree, Unknown on budget.
inline TilingResult perfect_tiling(const Graph& g, const Pattern& h,
                                   long long budget = kDefaultBudget) {
    if (h.edge_count() < 1)
        throw std::invalid_argument("perfect_tiling: template needs at least one edge");
    auto start = std::chrono::steady_clock::now();
    TilingResult result;
    auto finish = [&](TilingStatus status) {
        result.status = status;
        result.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return result;
    };
    if (g.vertex_count() % h.size() != 0) return finish(TilingStatus::NoneExists);
    detail::PerfectSearch search(g, h, budget);
    Bits uncovered = VertexSet::full(g.vertex_count()).bits(g.vertex_count());
    bool found = search.run(uncovered);
    result.nodes_explored = search.nodes;
    if (found) {
        result.tiling = Tiling::of(search.chosen);
        std::string why;
        if (!validate_perfect_tiling(g, h, result.tiling, &why))
            throw std::logic_error("perfect_tiling produced an invalid certificate: " + why);
        return finish(TilingStatus::Found);
    }
    return finish(search.aborted ? TilingStatus::Unknown : TilingStatus::NoneExists);
}

// Maximal (non-extendable) tiling; randomized restarts keep the best pass.
inline Tiling max_tiling_greedy(const Graph& g, const Pattern& h, const Seed& seed,
                                int passes = 4) {
    if (h.edge_count() < 1)
        throw std::invalid_argument("max_tiling_greedy: template needs at least one edge");
    if (passes < 1) passes = 1;
    detail::CopySearch search(g, h);
    Tiling best;
    for (int pass = 0; pass < passes; ++pass) {
        Rng rng(seed.derive(static_cast<std::uint64_t>(pass)));
        std::vector<int> order(static_cast<size_t>(g.vertex_count()));
        for (int v = 0; v < g.vertex_count(); ++v) order[static_cast<size_t>(v)] = v;
        rng.shuffle(order);
        Bits uncovered = VertexSet::full(g.vertex_count()).bits(g.vertex_count());
        std::vector<Embedding> chosen;
        for (int v : order) {
            if (!uncovered.test(static_cast<size_t>(v))) continue;
            while (uncovered.test(static_cast<size_t>(v))) {
                auto copy = detail::find_one_copy_through(search, v, uncovered, &rng);
                if (!copy) break;
                for (int w : copy->vertices) uncovered.reset(static_cast<size_t>(w));
                chosen.push_back(std::move(*copy));
            }
        }
        // deterministic cleanup pass: once a vertex admits no copy inside the
        // shrinking uncovered set it never will again, so one sweep suffices
        for (int v = 0; v < g.vertex_count(); ++v) {
            while (uncovered.test(static_cast<size_t>(v))) {
                auto copy = detail::find_one_copy_through(search, v, uncovered);
                if (!copy) break;
                for (int w : copy->vertices) uncovered.reset(static_cast<size_t>(w));
                chosen.push_back(std::move(*copy));
            }
        }
        if (static_cast<int>(chosen.size()) * h.size() > best.covered.size() || pass == 0)
            best = Tiling::of(chosen);
        if (best.covered.size() == g.vertex_count()) break;
    }
    return best;
}

struct MaxTilingResult {
    int size = 0;  // number of disjoint copies
    Tiling tiling;
    bool exact = false;
    long long nodes_explored = 0;
};

namespace detail {

struct MaxSearch {
    const Graph& host;
    const Pattern& pattern;
    CopySearch search;
    long long budget;
    long long nodes = 0;
    bool aborted = false;
    int target;  // stop early once this many copies are found (-1: never)
    std::vector<Embedding> chosen;
    std::vector<Embedding> best;

    MaxSearch(const Graph& g, const Pattern& p, long long budget, int target)
        : host(g), pattern(p), search(g, p), budget(budget), target(target) {}

    void run(Bits available) {
        ++nodes;
        if (nodes > budget) {
            aborted = true;
            return;
        }
        if (static_cast<int>(chosen.size()) > static_cast<int>(best.size())) best = chosen;
        if (target >= 0 && static_cast<int>(best.size()) >= target) return;
        auto first = available.find_first();
        if (first == Bits::npos) return;
        int bound = static_cast<int>(chosen.size()) +
                    static_cast<int>(available.count()) / pattern.size();
        if (bound <= static_cast<int>(best.size())) return;
        auto copies = copies_through(search, static_cast<int>(first), available);
        for (const auto& copy : copies) {
            Bits next = available;
            for (int v : copy.vertices) next.reset(static_cast<size_t>(v));
            chosen.push_back(copy);
            run(next);
            chosen.pop_back();
            if (aborted || (target >= 0 && static_cast<int>(best.size()) >= target)) return;
        }
        available.reset(first);  // branch: leave the lowest vertex uncovered
        run(available);
    }
};

}  // namespace detail

// Branch-and-bound maximum tiling; exact iff the search completed. Exists as
// a test oracle and for coverage measurements.
inline MaxTilingResult max_tiling_exact(const Graph& g, const Pattern& h,
                                        long long budget = kDefaultBudget, int target = -1) {
    if (h.edge_count() < 1)
        throw std::invalid_argument("max_tiling_exact: template needs at least one edge");
    detail::MaxSearch search(g, h, budget, target);
    Bits available = VertexSet::full(g.vertex_count()).bits(g.vertex_count());
    search.run(available);
    MaxTilingResult result;
    result.tiling = Tiling::of(search.best);
    result.size = result.tiling.size();
    result.exact = !search.aborted &&
                   (target < 0 || result.size < target);  // early stop is not exhaustive
    result.nodes_explored = search.nodes;
    std::string why;
    if (!validate_tiling(g, h, result.tiling, &why))
        throw std::logic_error("max_tiling_exact produced an invalid tiling: " + why);
    return result;
}

// One-sided: true means a tiling covering >= (1-eps)|g| vertices was found.
inline bool almost_perfect_coverage(const Graph& g, const Pattern& h, const Rational& eps,
                                    long long budget = kDefaultBudget) {
    if (!(eps > Rational(0) && eps < Rational(1)))
        throw std::invalid_argument("almost_perfect_coverage: eps outside (0,1)");
    long long needed_vertices = ceil_of((Rational(1) - eps) * Rational(g.vertex_count()));
    if (needed_vertices <= 0) return true;
    int needed_copies =
        static_cast<int>((needed_vertices + h.size() - 1) / h.size());
    Tiling greedy = max_tiling_greedy(g, h, Seed{0}, 4);
    if (greedy.covered.size() >= needed_vertices) return true;
    auto exact = max_tiling_exact(g, h, budget, needed_copies);
    return static_cast<long long>(exact.size) * h.size() >= needed_vertices;
}

}  // namespace tilelab
