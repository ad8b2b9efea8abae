#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "expsearch/graph.hpp"
#include "test_util.hpp"

using namespace expsearch;
namespace tu = expsearch::testutil;

TEST_CASE("instance construction validates its invariants") {
    CHECK_THROWS_AS(Instance({0.1, 0.9}, {{0, 1, 1.0}}), ValidationError);  // root mass
    CHECK_THROWS_AS(Instance({0.0, 1.0}, {{0, 0, 1.0}}), ValidationError);  // self loop
    CHECK_THROWS_AS(Instance({0.0, 1.0}, {{0, 1, 0.0}}), ValidationError);  // zero length
    CHECK_THROWS_AS(Instance({0.0, 0.5, 0.5}, {{0, 1, 1.0}}), ValidationError);  // split
    // Parallel edges collapse to the minimum length.
    Instance inst({0.0, 1.0}, {{0, 1, 3.0}, {1, 0, 2.0}});
    CHECK(inst.edge_count() == 1);
    CHECK(inst.edge(0).length == 2.0);
}

TEST_CASE("search cost on the two-vertex path") {
    Instance inst = tu::small_path();
    ExpandingSearch sigma{{{0, 1}, {1, 2}}};
    CHECK(search_cost(inst, sigma) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("search cost matches the worked ratio family") {
    Instance inst = tu::figure2(4, 3.0);
    int hub = 5;
    ExpandingSearch sigma1{{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, hub}}};
    CHECK(search_cost(inst, sigma1) == doctest::Approx(7.5).epsilon(1e-12));
    ExpandingSearch sigma_star{{{0, hub}, {hub, 1}, {hub, 2}, {hub, 3}, {hub, 4}}};
    CHECK(search_cost(inst, sigma_star) == doctest::Approx(5.5).epsilon(1e-12));
}

TEST_CASE("invalid sequences name the offending step") {
    Instance inst = tu::small_path();
    ExpandingSearch revisit{{{0, 1}, {0, 1}}};
    CHECK_THROWS_WITH_AS(arrival_lengths(inst, revisit),
                         doctest::Contains("step 2"), ValidationError);
    ExpandingSearch disconnected{{{1, 2}, {0, 1}}};
    CHECK_THROWS_WITH_AS(arrival_lengths(inst, disconnected),
                         doctest::Contains("step 1"), ValidationError);
    ExpandingSearch short_seq{{{0, 1}}};
    CHECK_THROWS_AS(arrival_lengths(inst, short_seq), ValidationError);
}

TEST_CASE("cost equals its step re-aggregation on random instances") {
    for (int seed = 0; seed < 20; ++seed) {
        Instance inst = tu::random_instance(7, 0.6, 900 + seed);
        // Any feasible order: BFS-ish greedy by vertex id.
        ExpandingSearch sigma;
        std::vector<bool> visited(inst.vertex_count(), false);
        visited[0] = true;
        for (int k = 0; k < inst.non_root_count(); ++k) {
            for (Vertex v = 1; v < inst.vertex_count(); ++v) {
                if (visited[v]) continue;
                int found = -1;
                for (auto [w, id] : inst.neighbors(v))
                    if (visited[w]) found = w;
                if (found >= 0) {
                    sigma.steps.emplace_back(found, v);
                    visited[v] = true;
                    break;
                }
            }
        }
        double direct = search_cost(inst, sigma);
        // Sum over steps of length times unvisited mass.
        double acc = 0.0, seen = 0.0;
        for (auto [a, b] : sigma.steps) {
            int id = inst.find_edge(a, b);
            acc += inst.edge(id).length * (inst.total_prob() - seen);
            seen += inst.prob(b);  // the fresh endpoint by construction
        }
        CHECK(direct == doctest::Approx(acc).epsilon(1e-9));
        // Arrivals are non-decreasing along the sequence.
        auto arrival = arrival_lengths(inst, sigma);
        double last = 0.0;
        for (auto [a, b] : sigma.steps) {
            CHECK(arrival[b] >= last - 1e-12);
            last = arrival[b];
        }
    }
}

TEST_CASE("metric closure of the 1,1,3 triangle") {
    Instance inst({0.0, 0.5, 0.5}, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 3.0}});
    MetricClosure closure = metric_closure(inst);
    CHECK(closure.graph.edge(closure.graph.find_edge(0, 2)).length ==
          doctest::Approx(2.0));
    CHECK(closure.path(0, 2) == std::vector<Vertex>{0, 1, 2});
}

TEST_CASE("metric closure is idempotent") {
    for (int seed = 0; seed < 10; ++seed) {
        Instance inst = tu::random_instance(8, 0.4, 100 + seed);
        MetricClosure once = metric_closure(inst);
        MetricClosure twice = metric_closure(once.graph);
        REQUIRE(once.graph.edge_count() == twice.graph.edge_count());
        for (int id = 0; id < once.graph.edge_count(); ++id)
            CHECK(once.graph.edge(id).length ==
                  doctest::Approx(twice.graph.edge(id).length).epsilon(1e-12));
    }
}

TEST_CASE("closure distance on the labeled cycle matches path enumeration") {
    // n = 4: vertices r,1..4; {r,2} via r-1-2 costs n+1, the long way more.
    Instance inst = tu::figure3(4);
    MetricClosure closure = metric_closure(inst);
    // All simple r-2 paths on the 5-cycle: r-1-2 and r-4-3-2.
    double via_short = 4.0 + 1.0;
    double via_long = 4.0 + 3.0 + 2.0;
    CHECK(closure.graph.edge(closure.graph.find_edge(0, 2)).length ==
          doctest::Approx(std::min(via_short, via_long)));
}

TEST_CASE("contraction of the root alone is the identity") {
    Instance inst = tu::random_instance(7, 0.5, 3);
    std::vector<bool> s(7, false);
    s[0] = true;
    Contraction ctr = contract(inst, s);
    REQUIRE(ctr.graph.vertex_count() == 7);
    REQUIRE(ctr.graph.edge_count() == inst.edge_count());
    for (int id = 0; id < inst.edge_count(); ++id) {
        const Edge& e = inst.edge(id);
        int cid = ctr.graph.find_edge(e.u, e.v);
        REQUIRE(cid >= 0);
        CHECK(ctr.graph.edge(cid).length == e.length);
    }
}

TEST_CASE("contracting the hub of the ratio family keeps unit spokes") {
    Instance inst = tu::figure2(4, 3.0);
    std::vector<bool> s(6, false);
    s[0] = true;
    s[5] = true;  // hub
    Contraction ctr = contract(inst, s);
    REQUIRE(ctr.graph.vertex_count() == 5);
    for (Vertex v = 1; v <= 4; ++v) {
        int cid = ctr.graph.find_edge(0, v);
        REQUIRE(cid >= 0);
        CHECK(ctr.graph.edge(cid).length == doctest::Approx(1.0));  // min(m, 1)
        // The witness is the original unit edge to the hub.
        const Edge& w = inst.edge(ctr.witness_edge[cid]);
        CHECK(w.length == doctest::Approx(1.0));
    }
}

TEST_CASE("contraction lengths equal brute-force minima on random instances") {
    for (int seed = 0; seed < 15; ++seed) {
        Instance inst = tu::random_instance(6, 0.7, 40 + seed);
        std::mt19937_64 rng(seed);
        std::vector<bool> s(6, false);
        s[0] = true;
        for (int v = 1; v < 6; ++v) s[v] = rng() % 2 == 0;
        int outside = 0;
        for (int v = 1; v < 6; ++v) outside += s[v] ? 0 : 1;
        if (outside == 0) s[5] = false;
        Contraction ctr = contract(inst, s);
        for (int v = 1; v < ctr.graph.vertex_count(); ++v) {
            int cid = ctr.graph.find_edge(0, v);
            Vertex orig = ctr.orig_of[v];
            double expected = std::numeric_limits<double>::infinity();
            for (auto [w, id] : inst.neighbors(orig))
                if (s[w]) expected = std::min(expected, inst.edge(id).length);
            if (cid < 0) {
                CHECK(expected == std::numeric_limits<double>::infinity());
            } else {
                CHECK(ctr.graph.edge(cid).length == doctest::Approx(expected));
            }
        }
    }
}

TEST_CASE("repeated contraction composes") {
    for (int seed = 0; seed < 10; ++seed) {
        Instance inst = tu::random_instance(8, 0.6, 70 + seed);
        std::vector<bool> s1(8, false), s2(8, false);
        s1[0] = s2[0] = true;
        s1[1] = s2[1] = true;
        s2[2] = s2[3] = true;  // s2 contains s1
        Contraction once = contract(inst, s2);
        Contraction first = contract(inst, s1);
        // Map s2 into the first contraction's id space.
        std::vector<bool> s2_mapped(first.graph.vertex_count(), false);
        for (int v = 0; v < first.graph.vertex_count(); ++v)
            s2_mapped[v] = s2[first.orig_of[v]];
        Contraction second = contract(first.graph, s2_mapped);
        REQUIRE(once.graph.vertex_count() == second.graph.vertex_count());
        REQUIRE(once.graph.edge_count() == second.graph.edge_count());
        for (int id = 0; id < once.graph.edge_count(); ++id) {
            const Edge& e = once.graph.edge(id);
            // Align by original vertex ids.
            Vertex ou = once.orig_of[e.u], ov = once.orig_of[e.v];
            int cu = -1, cv = -1;
            for (int v = 0; v < second.graph.vertex_count(); ++v) {
                if (first.orig_of[second.orig_of[v]] == ou) cu = v;
                if (first.orig_of[second.orig_of[v]] == ov) cv = v;
            }
            REQUIRE(cu >= 0);
            REQUIRE(cv >= 0);
            int cid = second.graph.find_edge(cu, cv);
            REQUIRE(cid >= 0);
            CHECK(second.graph.edge(cid).length == e.length);
        }
    }
}

TEST_CASE("contracting everything is an error") {
    Instance inst = tu::small_path();
    std::vector<bool> s(3, true);
    CHECK_THROWS_WITH_AS(contract(inst, s), doctest::Contains("nothing to contract"),
                         ValidationError);
}

TEST_CASE("fundamental cycles") {
    // Star tree plus a leaf-leaf edge: cycle of 3 edges.
    Instance star({0.0, 0.3, 0.7},
                  {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}});
    RootedTree tree = tree_from_edges(star, {0, 1});
    std::vector<int> cycle = fundamental_cycle(star, tree, 2);
    CHECK(cycle.size() == 3);
    CHECK(cycle.back() == 2);

    // Path tree r-a-b-c plus {r,c}: cycle of 4 edges.
    Instance path({0.0, 0.2, 0.3, 0.5},
                  {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {0, 3, 1.0}});
    RootedTree ptree = tree_from_edges(path, {0, 1, 2});
    CHECK(fundamental_cycle(path, ptree, 3).size() == 4);
    CHECK_THROWS_AS(fundamental_cycle(path, ptree, 1), ValidationError);
}

TEST_CASE("random fundamental cycles are degree-2 regular") {
    for (int seed = 0; seed < 10; ++seed) {
        Instance k6 = tu::random_instance(6, 1.0, 500 + seed);
        std::mt19937_64 rng(seed);
        // Random spanning tree of K6.
        std::vector<int> ids(k6.edge_count());
        for (int i = 0; i < k6.edge_count(); ++i) ids[i] = i;
        std::shuffle(ids.begin(), ids.end(), rng);
        std::vector<int> tree_ids;
        std::vector<int> comp(6);
        for (int v = 0; v < 6; ++v) comp[v] = v;
        auto find = [&](int v) {
            while (comp[v] != v) v = comp[v] = comp[comp[v]];
            return v;
        };
        for (int id : ids) {
            int a = find(k6.edge(id).u), b = find(k6.edge(id).v);
            if (a != b) {
                comp[a] = b;
                tree_ids.push_back(id);
            }
        }
        RootedTree tree = tree_from_edges(k6, tree_ids);
        for (int id = 0; id < k6.edge_count(); ++id) {
            if (std::find(tree_ids.begin(), tree_ids.end(), id) != tree_ids.end())
                continue;
            std::vector<int> cycle = fundamental_cycle(k6, tree, id);
            std::map<Vertex, int> degree;
            for (int cid : cycle) {
                degree[k6.edge(cid).u]++;
                degree[k6.edge(cid).v]++;
            }
            for (auto [v, d] : degree) CHECK(d == 2);
        }
    }
}
