#include <doctest.h>

#include "expsearch/oracle.hpp"
#include "test_util.hpp"

using namespace expsearch;
namespace tu = expsearch::testutil;

TEST_CASE("DP solves the tiny path") {
    oracle::DpResult r = oracle::optimal_search_dp(tu::small_path());
    CHECK(r.cost == doctest::Approx(1.5));
    CHECK(search_cost(tu::small_path(), r.search) == doctest::Approx(1.5));
}

TEST_CASE("DP finds the hub-first optimum of the ratio family") {
    Instance inst = tu::figure2(4, 3.0);
    oracle::DpResult r = oracle::optimal_search_dp(inst);
    CHECK(r.cost == doctest::Approx(5.5).epsilon(1e-12));
    // sigma* enters the hub first.
    CHECK(r.search.steps.front().second == 5);
}

TEST_CASE("DP equals exhaustive enumeration on random instances") {
    for (int seed = 0; seed < 25; ++seed) {
        Instance inst = tu::random_instance(5 + seed % 4, 0.6, 8800 + seed);
        oracle::DpResult dp = oracle::optimal_search_dp(inst);
        CHECK(dp.cost == doctest::Approx(tu::enumerate_optimum(inst)).epsilon(1e-9));
        CHECK(search_cost(inst, dp.search) == doctest::Approx(dp.cost).epsilon(1e-9));
    }
}

TEST_CASE("DP is invariant under relabeling") {
    Instance inst = tu::random_instance(8, 0.5, 99);
    // Relabel non-root vertices by reversing their ids.
    int n_total = inst.vertex_count();
    std::vector<double> probs(n_total, 0.0);
    std::vector<Edge> edges;
    auto map = [&](Vertex v) { return v == 0 ? 0 : n_total - v; };
    for (Vertex v = 1; v < n_total; ++v) probs[map(v)] = inst.prob(v);
    for (const Edge& e : inst.edges())
        edges.push_back({map(e.u), map(e.v), e.length});
    Instance relabeled(std::move(probs), std::move(edges));
    CHECK(oracle::optimal_search_dp(inst).cost ==
          doctest::Approx(oracle::optimal_search_dp(relabeled).cost).epsilon(1e-12));
}

TEST_CASE("DP refuses oversized instances") {
    CHECK_THROWS_AS(oracle::optimal_search_dp(tu::random_instance(12, 0.4, 1), 8),
                    LimitError);
}

TEST_CASE("MDSP brute force on the two-leaf star") {
    // Three rooted subtrees: {r,a} density 0.8/2, {r,b} 0.2/1, {r,a,b} 1/3.
    oracle::DensityResult r = oracle::max_density_subtree_bruteforce(tu::two_leaf_star());
    CHECK(r.density == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(r.tree.contains(1));
    CHECK_FALSE(r.tree.contains(2));
}

TEST_CASE("single-edge graph density") {
    Instance inst({0.0, 1.0}, {{0, 1, 4.0}});
    oracle::DensityResult r = oracle::max_density_subtree_bruteforce(inst);
    CHECK(r.density == doctest::Approx(0.25));
}

TEST_CASE("uniform cycle: single edges attain the maximum density") {
    int n = 6;
    std::vector<double> prob(n + 1, 1.0 / n);
    prob[0] = 0.0;
    std::vector<Edge> edges;
    for (int v = 0; v < n; ++v) edges.push_back({v, v + 1, 3.0});
    edges.push_back({0, n, 3.0});
    Instance inst(std::move(prob), std::move(edges));
    oracle::DensityResult r = oracle::max_density_subtree_bruteforce(inst);
    CHECK(r.density == doctest::Approx((1.0 / n) / 3.0).epsilon(1e-12));
}

TEST_CASE("PCST brute force degenerate penalty regimes") {
    Instance inst = tu::random_instance(7, 0.6, 31);
    std::vector<double> lengths(inst.edge_count());
    for (int id = 0; id < inst.edge_count(); ++id) lengths[id] = inst.edge(id).length;

    SUBCASE("zero penalties keep only the root") {
        std::vector<double> pen(7, 0.0);
        oracle::PcstResult r = oracle::pcst_bruteforce(inst, lengths, pen);
        CHECK(r.objective == doctest::Approx(0.0));
        CHECK(r.tree.vertex_count() == 1);
    }
    SUBCASE("huge penalties force a minimum spanning tree") {
        std::vector<double> pen(7, 1e7);
        oracle::PcstResult r = oracle::pcst_bruteforce(inst, lengths, pen);
        CHECK(r.tree.vertex_count() == 7);
        double mst = 0.0;
        for (int id : oracle::induced_mst(inst, (1u << 6) - 1, lengths))
            mst += lengths[id];
        CHECK(r.objective == doctest::Approx(mst));
    }
}

TEST_CASE("DP lower-bounds every feasible search") {
    for (int seed = 0; seed < 10; ++seed) {
        Instance inst = tu::random_instance(7, 0.5, 660 + seed);
        oracle::DpResult dp = oracle::optimal_search_dp(inst);
        // A few arbitrary feasible searches via randomized growth.
        std::mt19937_64 rng(seed);
        for (int trial = 0; trial < 5; ++trial) {
            ExpandingSearch sigma;
            std::vector<bool> visited(7, false);
            visited[0] = true;
            for (int k = 0; k < 6; ++k) {
                std::vector<std::pair<Vertex, Vertex>> frontier;
                for (int id = 0; id < inst.edge_count(); ++id) {
                    const Edge& e = inst.edge(id);
                    if (visited[e.u] != visited[e.v])
                        frontier.emplace_back(visited[e.u] ? e.u : e.v,
                                              visited[e.u] ? e.v : e.u);
                }
                auto [from, to] = frontier[rng() % frontier.size()];
                sigma.steps.emplace_back(from, to);
                visited[to] = true;
            }
            CHECK(search_cost(inst, sigma) >= dp.cost - 1e-9);
        }
    }
}
