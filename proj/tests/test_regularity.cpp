#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>

#include "oracles.hpp"
#include "tilelab/regularity.hpp"

using namespace tilelab;

namespace {

// A = {0..7}, B = {8..15}: A1 complete to B1, A2 complete to B2, nothing else.
Graph split_pair_graph() {
    std::vector<Edge> edges;
    for (int u = 0; u < 4; ++u)
        for (int v = 8; v < 12; ++v) edges.emplace_back(u, v);
    for (int u = 4; u < 8; ++u)
        for (int v = 12; v < 16; ++v) edges.emplace_back(u, v);
    return Graph::from_edge_list(16, edges);
}

VertexSet range_set(int from, int to) {
    std::vector<int> v(static_cast<size_t>(to - from));
    std::iota(v.begin(), v.end(), from);
    return VertexSet(std::move(v));
}

Graph random_bipartite(int a, int b, double p, Seed seed) {
    std::vector<Edge> edges;
    for (int u = 0; u < a; ++u)
        for (int v = a; v < a + b; ++v)
            if (pair_uniform(seed, u, v) < p) edges.emplace_back(u, v);
    return Graph::from_edge_list(a + b, edges);
}

}  // namespace

TEST_CASE("pair density") {
    Graph kb = make_complete_bipartite(3, 4);
    CHECK(pair_density(kb, range_set(0, 3), range_set(3, 7)) == Rational(1));
    CHECK(pair_density(Graph::empty_graph(6), range_set(0, 3), range_set(3, 6)) == Rational(0));
    CHECK(pair_density(Graph::complete(4), VertexSet{0, 1}, VertexSet{2, 3}) == Rational(1));
    CHECK_THROWS_AS(pair_density(kb, VertexSet{}, range_set(3, 7)), std::invalid_argument);
    CHECK_THROWS_AS(pair_density(kb, VertexSet{0, 1}, VertexSet{1, 3}), std::invalid_argument);
}

TEST_CASE("exact regularity check") {
    Graph kb = make_complete_bipartite(6, 6);
    auto yes = check_eps_regular_exact(kb, range_set(0, 6), range_set(6, 12), Rational(1, 10));
    CHECK(yes.verdict == RegularityVerdict::Regular);
    CHECK(yes.checked_pairs > 0);

    Graph split = split_pair_graph();
    auto no = check_eps_regular_exact(split, range_set(0, 8), range_set(8, 16), Rational(1, 4));
    REQUIRE(no.verdict == RegularityVerdict::Irregular);
    CHECK(no.pair_value == Rational(1, 2));
    // witness re-verifies against the raw definition
    CHECK(Rational(no.witness_x.size()) >= Rational(1, 4) * Rational(8));
    CHECK(Rational(no.witness_y.size()) >= Rational(1, 4) * Rational(8));
    Rational dxy = pair_density(split, no.witness_x, no.witness_y);
    Rational gap = dxy > no.pair_value ? dxy - no.pair_value : no.pair_value - dxy;
    CHECK(gap >= Rational(1, 4));
    CHECK(dxy == no.witness_value);

    auto empty_pair =
        check_eps_regular_exact(Graph::empty_graph(8), range_set(0, 4), range_set(4, 8), Rational(1, 3));
    CHECK(empty_pair.verdict == RegularityVerdict::Regular);

    CHECK_THROWS_WITH_AS(
        check_eps_regular_exact(make_complete_bipartite(17, 17), range_set(0, 17), range_set(17, 34),
                                Rational(1, 4)),
        doctest::Contains("sampled"), std::invalid_argument);
}

TEST_CASE("sampled regularity check") {
    Graph split = split_pair_graph();
    VertexSet a = range_set(0, 8), b = range_set(8, 16);
    int found = 0;
    for (std::uint64_t s = 0; s < 30; ++s) {
        auto rep = check_eps_regular_sampled(split, a, b, Rational(1, 4), 10000, Seed{s});
        if (rep.verdict == RegularityVerdict::Irregular) {
            ++found;
            // sound witness: re-verify
            Rational dxy = pair_density(split, rep.witness_x, rep.witness_y);
            Rational gap = dxy > rep.pair_value ? dxy - rep.pair_value : rep.pair_value - dxy;
            CHECK(gap >= Rational(1, 4));
        }
    }
    CHECK(found == 30);

    auto plausible = check_eps_regular_sampled(make_complete_bipartite(8, 8), range_set(0, 8),
                                               range_set(8, 16), Rational(1, 4), 500, Seed{1});
    CHECK(plausible.verdict == RegularityVerdict::SampledPlausible);
}

TEST_CASE("super regularity") {
    Graph kb = make_complete_bipartite(8, 8);
    auto ok = check_super_regular(kb, range_set(0, 8), range_set(8, 16), Rational(1, 10),
                                  Rational(1, 2));
    CHECK(ok.ok);
    CHECK(ok.exact);

    // isolated vertex in A fails the degree bound and is reported
    std::vector<Edge> edges;
    for (int u = 0; u < 3; ++u)
        for (int v = 4; v < 8; ++v) edges.emplace_back(u, v);
    Graph iso = Graph::from_edge_list(8, edges);
    auto bad = check_super_regular(iso, range_set(0, 4), range_set(4, 8), Rational(1, 10),
                                   Rational(1, 10));
    CHECK_FALSE(bad.ok);
    REQUIRE(bad.failing_vertex.has_value());
    CHECK(*bad.failing_vertex == 3);
}

TEST_CASE("super regularity matches the exhaustive predicate") {
    std::vector<int> a_members(12), b_members(12);
    std::iota(a_members.begin(), a_members.end(), 0);
    std::iota(b_members.begin(), b_members.end(), 12);
    VertexSet a(a_members), b(b_members);
    int agreements = 0;
    for (std::uint64_t s = 0; s < 6; ++s) {
        Graph g = random_bipartite(12, 12, 0.5, Seed{90 + s});
        auto mine = check_super_regular(g, a, b, Rational(1, 3), Rational(1, 5));
        bool ref = oracle::oracle_super_regular(g, a_members, b_members, Rational(1, 3),
                                                Rational(1, 5));
        CHECK(mine.exact);
        CHECK(mine.ok == ref);
        if (!mine.ok && mine.witness) {
            CHECK_FALSE(pair_density(g, mine.witness->first, mine.witness->second) > Rational(1, 5));
        }
        ++agreements;
    }
    CHECK(agreements == 6);
}

TEST_CASE("superregularize") {
    Graph kb = make_complete_bipartite(10, 10);
    auto same = superregularize(kb, range_set(0, 10), range_set(10, 20), Rational(1, 5),
                                Rational(1, 2));
    CHECK(same.a_prime == range_set(0, 10));
    CHECK(same.b_prime == range_set(10, 20));
    CHECK(same.trimmed_a == 0);

    // complete bipartite with isolated vertices appended to A: those and only
    // those get trimmed
    std::vector<Edge> edges;
    for (int u = 0; u < 10; ++u)
        for (int v = 12; v < 22; ++v) edges.emplace_back(u, v);
    Graph padded = Graph::from_edge_list(22, edges);
    auto trimmed = superregularize(padded, range_set(0, 12), range_set(12, 22), Rational(1, 5),
                                   Rational(1, 2));
    CHECK(trimmed.a_prime == range_set(0, 10));
    CHECK(trimmed.trimmed_a == 2);
    CHECK(trimmed.trimmed_b == 0);

    // seeded random pair at the acceptance parameters
    Graph rnd = random_bipartite(14, 14, 0.6, Seed{4242});
    auto r = superregularize(rnd, range_set(0, 14), range_set(14, 28), Rational(1, 5),
                             Rational(1, 2));
    auto verify = check_super_regular(rnd, r.a_prime, r.b_prime, Rational(2, 5), Rational(-1, 10));
    CHECK(verify.ok);

    // a pair that was never eps-regular with density >= d gets rejected
    CHECK_THROWS_AS(superregularize(Graph::empty_graph(20), range_set(0, 10), range_set(10, 20),
                                    Rational(1, 5), Rational(1, 2)),
                    RegularityPromiseError);
}

TEST_CASE("greedy star tiling") {
    auto one = greedy_star_tiling(Graph::complete(4), 3, Rational(1, 10));
    CHECK(one.stars.size() == 1);
    CHECK(one.uncovered_count == 0);
    CHECK(one.meets_target);

    // low minimum degree: many uncovered vertices is fine, the report is honest
    auto path = greedy_star_tiling(make_path(12), 3, Rational(1, 10));
    CHECK(path.uncovered_count + path.covered.size() == 12);
    for (const auto& star : path.stars) {
        CHECK(static_cast<int>(star.leaves.size()) == 3);
        for (int leaf : star.leaves) CHECK(make_path(12).has_edge(star.centre, leaf));
    }

    // balanced complete bipartite needs both centre orientations
    auto kb = greedy_star_tiling(make_complete_bipartite(20, 20), 3, Rational(1, 10));
    CHECK(kb.uncovered_count <= 4);
}

TEST_CASE("hall matching dichotomy") {
    Graph k55 = make_complete_bipartite(5, 5);
    auto perfect = hall_perfect_matching(k55, range_set(0, 5), range_set(5, 10));
    CHECK(perfect.perfect);
    CHECK(perfect.matching.size() == 5);

    std::vector<Edge> edges;
    for (int u = 0; u < 3; ++u)
        for (int v = 4; v < 8; ++v) edges.emplace_back(u, v);
    Graph with_iso = Graph::from_edge_list(8, edges);  // vertex 3 isolated
    auto viol = hall_perfect_matching(with_iso, range_set(0, 4), range_set(4, 8));
    CHECK_FALSE(viol.perfect);
    CHECK(viol.violator.contains(3));
    CHECK(viol.violator_nbhd.size() < viol.violator.size());

    CHECK_THROWS_AS(hall_perfect_matching(k55, range_set(0, 4), range_set(5, 10)),
                    std::invalid_argument);

    // agreement with the exhaustive bijection oracle on seeded 4x4 instances
    for (std::uint64_t s = 0; s < 300; ++s) {
        Graph g = random_bipartite(4, 4, 0.4, Seed{700 + s});
        std::vector<int> a_m{0, 1, 2, 3}, b_m{4, 5, 6, 7};
        auto mine = hall_perfect_matching(g, VertexSet(a_m), VertexSet(b_m));
        bool ref = oracle::oracle_has_perfect_matching(g, a_m, b_m);
        CHECK(mine.perfect == ref);
        if (mine.perfect) {
            for (auto [u, v] : mine.matching) CHECK(g.has_edge(u, v));
        } else {
            // violator re-verifies: |N(W)| < |W|
            Bits nbhd(static_cast<size_t>(8));
            for (int w : mine.violator.members) nbhd |= g.neighbours(w);
            CHECK(static_cast<int>(nbhd.count()) < mine.violator.size());
        }
    }
}

TEST_CASE("F_H checker") {
    Pattern k3 = Pattern::named("k3");
    auto yes = check_F_H(Graph::complete(6), k3, Rational(1, 2), CheckMode::Exact);
    CHECK(yes.holds);
    CHECK(yes.exact);

    auto no = check_F_H(make_cycle(6), k3, Rational(1, 2), CheckMode::Exact);
    CHECK_FALSE(no.holds);
    REQUIRE(no.counterexample.has_value());
    auto sub = induced(make_cycle(6), *no.counterexample);
    CHECK(enumerate_copies(sub.graph, k3).empty());  // witness re-check

    // sampled counterexamples re-verify exactly
    auto sampled = check_F_H(make_cycle(12), k3, Rational(1, 3), CheckMode::Sampled, 200);
    CHECK_FALSE(sampled.holds);
    REQUIRE(sampled.counterexample.has_value());
    auto sub2 = induced(make_cycle(12), *sampled.counterexample);
    CHECK(enumerate_copies(sub2.graph, k3).empty());

    CHECK_THROWS_AS(check_F_H(sample_gnp(40, 0.5, Seed{1}), k3, Rational(1, 2), CheckMode::Exact),
                    std::invalid_argument);  // cap exceeded
}

TEST_CASE("F_H prime checker") {
    Pattern k3 = Pattern::named("k3");
    auto yes = check_F_H_prime(Graph::complete(6), k3, Rational(1, 3), CheckMode::Exact);
    CHECK(yes.holds);

    Graph two_triangles = Graph::from_edge_list(6, {{0, 1}, {1, 2}, {0, 2},
                                                    {3, 4}, {4, 5}, {3, 5}});
    auto no = check_F_H_prime(two_triangles, k3, Rational(1, 2), CheckMode::Exact);
    CHECK_FALSE(no.holds);
    REQUIRE(no.counterexample_pair.has_value());
    // witness re-verifies: no copy with exactly one vertex in A
    auto [wa, wb] = *no.counterexample_pair;
    bool any = false;
    for (int x : wa.members) {
        std::vector<int> within = wb.members;
        within.push_back(x);
        for (const auto& c : enumerate_copies(two_triangles, k3, VertexSet(within), x)) {
            (void)c;
            any = true;
        }
    }
    CHECK_FALSE(any);
}

TEST_CASE("F_H avoiding forbidden copies") {
    Pattern k3 = Pattern::named("k3");
    Graph k4 = Graph::complete(4);
    auto all_triangles = enumerate_copies(k4, k3);
    REQUIRE(all_triangles.size() == 4);

    // no forbidden copies: reduces to the plain checker
    for (const Rational& eta : {Rational(1, 2), Rational(3, 4)}) {
        auto plain = check_F_H(k4, k3, eta, CheckMode::Exact);
        auto avoiding = check_F_H_avoiding(k4, k3, eta, {}, CheckMode::Exact);
        CHECK(plain.holds == avoiding.holds);
    }

    auto none_left = check_F_H_avoiding(k4, k3, Rational(3, 4), all_triangles, CheckMode::Exact);
    CHECK_FALSE(none_left.holds);

    // one forbidden triangle: its own 3-subset carries no other copy, so the
    // property fails at gamma2 = 3/4 ...
    std::vector<Embedding> one{all_triangles.front()};
    auto strict = check_F_H_avoiding(k4, k3, Rational(3, 4), one, CheckMode::Exact);
    CHECK_FALSE(strict.holds);
    CHECK(strict.counterexample.has_value());
    // ... while the full host still has the three remaining copies
    auto whole = check_F_H_avoiding(k4, k3, Rational(7, 8), one, CheckMode::Exact);
    CHECK(whole.holds);
}
