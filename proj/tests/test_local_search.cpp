#include <doctest.h>

#include <numeric>
#include <random>

#include "expsearch/greedy.hpp"
#include "expsearch/local_search.hpp"
#include "expsearch/oracle.hpp"
#include "expsearch/tree_sequencer.hpp"
#include "test_util.hpp"

using namespace expsearch;
namespace tu = expsearch::testutil;

namespace {

RootedTree random_spanning_tree(const Instance& closure, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<int> ids(closure.edge_count());
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<int> comp(closure.vertex_count());
    std::iota(comp.begin(), comp.end(), 0);
    auto find = [&](int v) {
        while (comp[v] != v) v = comp[v] = comp[comp[v]];
        return v;
    };
    std::vector<int> tree_ids;
    for (int id : ids) {
        int a = find(closure.edge(id).u), b = find(closure.edge(id).v);
        if (a != b) {
            comp[a] = b;
            tree_ids.push_back(id);
        }
    }
    return tree_from_edges(closure, tree_ids);
}

}  // namespace

TEST_CASE("already-optimal star performs zero swaps") {
    Instance inst = tu::two_leaf_star();
    MetricClosure closure = metric_closure(inst);
    // The star itself, in closure ids.
    std::vector<int> ids{closure.graph.find_edge(0, 1), closure.graph.find_edge(0, 2)};
    LocalSearchResult r =
        edge_swap_local_search(inst, closure, tree_from_edges(closure.graph, ids));
    CHECK(r.swaps == 0);
    CHECK(r.tree_cost == doctest::Approx(2.2));
    CHECK(r.cost == doctest::Approx(2.2));
}

TEST_CASE("ratio-family spoke tree escapes through a transitive edge") {
    Instance inst = tu::figure2(4, 3.0);
    MetricClosure closure = metric_closure(inst);
    // Transitive leaf-leaf distance is 2 (through the hub), cheaper than 2m.
    CHECK(closure.graph.edge(closure.graph.find_edge(1, 2)).length ==
          doctest::Approx(2.0));
    std::vector<int> ids;
    for (Vertex v = 1; v <= 5; ++v) ids.push_back(closure.graph.find_edge(0, v));
    RootedTree t0 = tree_from_edges(closure.graph, ids);
    CHECK(c_star(closure.graph, t0) == doctest::Approx(7.5));
    LocalSearchResult r = edge_swap_local_search(inst, closure, t0);
    CHECK(r.swaps > 0);
    CHECK(r.tree_cost < 7.5 - 1e-9);
    CHECK(r.cost <= r.tree_cost + 1e-9);
    CHECK_NOTHROW(arrival_lengths(inst, r.search));
}

TEST_CASE("cycle instances reach the global optimum from any start") {
    for (int trial = 0; trial < 6; ++trial) {
        Instance inst = tu::random_cycle(5 + trial, 6200 + trial);
        MetricClosure closure = metric_closure(inst);
        oracle::DpResult dp = oracle::optimal_search_dp(inst);
        for (int s = 0; s < 3; ++s) {
            RootedTree t0 = random_spanning_tree(closure.graph, 100 * trial + s);
            LocalSearchResult r = edge_swap_local_search(inst, closure, t0);
            CHECK(r.tree_cost == doctest::Approx(dp.cost).epsilon(1e-9));
            CHECK(r.cost == doctest::Approx(dp.cost).epsilon(1e-9));
        }
    }
}

TEST_CASE("local optimality certificate: re-scan finds no improving swap") {
    Instance inst = tu::random_instance(7, 0.8, 6400);
    MetricClosure closure = metric_closure(inst);
    LocalSearchResult r =
        edge_swap_local_search(inst, closure, random_spanning_tree(closure.graph, 4));
    std::vector<int> tree_ids;
    for (Vertex v = 1; v < closure.graph.vertex_count(); ++v)
        tree_ids.push_back(r.tree.parent_edge_id(v));
    std::sort(tree_ids.begin(), tree_ids.end());
    for (int e = 0; e < closure.graph.edge_count(); ++e) {
        if (std::find(tree_ids.begin(), tree_ids.end(), e) != tree_ids.end()) continue;
        std::vector<int> cycle = fundamental_cycle(closure.graph, r.tree, e);
        cycle.pop_back();
        for (int out : cycle) {
            std::vector<int> ids = tree_ids;
            ids.erase(std::find(ids.begin(), ids.end(), out));
            ids.push_back(e);
            double cost =
                optimal_tree_search(closure.graph, tree_from_edges(closure.graph, ids))
                    .cost;
            CHECK(cost >= r.tree_cost - 1e-9);
        }
    }
}

TEST_CASE("conversion: identity when the closure sequence uses original edges") {
    Instance inst = tu::small_path();
    MetricClosure closure = metric_closure(inst);
    ExpandingSearch seq{{{0, 1}, {1, 2}}};
    ExpandingSearch converted = convert_to_graph_sequence(inst, closure, seq);
    CHECK(converted.steps == seq.steps);
}

TEST_CASE("conversion: transitive edge expands and intermediate arrives early") {
    // r - a - b path; closure edge {r,b} expands to r-a, a-b.
    Instance inst({0.0, 0.3, 0.7}, {{0, 1, 2.0}, {1, 2, 3.0}});
    MetricClosure closure = metric_closure(inst);
    ExpandingSearch seq{{{0, 2}, {0, 1}}};  // b first via the transitive edge
    ExpandingSearch converted = convert_to_graph_sequence(inst, closure, seq);
    REQUIRE(converted.size() == 2);
    auto arrival = arrival_lengths(inst, converted);
    // a is picked up on the way: arrival 2, not 5+2.
    CHECK(arrival[1] == doctest::Approx(2.0));
    CHECK(arrival[2] == doctest::Approx(5.0));
}

TEST_CASE("conversion soundness on random closure trees") {
    for (int trial = 0; trial < 20; ++trial) {
        Instance inst = tu::random_instance(8, 0.35, 6600 + trial);
        MetricClosure closure = metric_closure(inst);
        RootedTree t = random_spanning_tree(closure.graph, trial);
        TreeSearchResult seq = optimal_tree_search(closure.graph, t);
        ExpandingSearch converted = convert_to_graph_sequence(inst, closure, seq.search);
        CHECK_NOTHROW(arrival_lengths(inst, converted));
        CHECK(search_cost(inst, converted) <= seq.cost + 1e-9);
    }
}

TEST_CASE("clockwise permutation of the labeled cycle is an insertion fixed point") {
    for (int n = 5; n <= 8; ++n) {
        Instance inst = tu::figure3(n);
        MetricClosure closure = metric_closure(inst);
        std::vector<Vertex> clockwise{0};
        for (Vertex v = n; v >= 1; --v) clockwise.push_back(v);
        InsertionResult r = insertion_local_search(closure.graph, clockwise);
        CHECK(r.moves == 0);
        CHECK(r.permutation == clockwise);
        CHECK(r.cost ==
              doctest::Approx((n + 1.0) * (2.0 * n + 1.0) / 6.0).epsilon(1e-9));
    }
}

TEST_CASE("two-vertex insertion search returns the cheaper permutation") {
    Instance inst({0.0, 0.9, 0.1}, {{0, 1, 5.0}, {0, 2, 1.0}, {1, 2, 1.0}});
    MetricClosure closure = metric_closure(inst);
    InsertionResult a = insertion_local_search(closure.graph, {0, 1, 2});
    InsertionResult b = insertion_local_search(closure.graph, {0, 2, 1});
    double best = std::min(a.cost, b.cost);
    // Both permutations are enumerable; each run ends at a local optimum no
    // worse than the better of the two starts.
    CHECK(a.cost <= std::max(a.cost, b.cost) + 1e-12);
    CHECK(best <= a.cost);
}

TEST_CASE("insertion baseline vs edge swap on random instances") {
    int insertion_not_better = 0, trials = 10;
    for (int trial = 0; trial < trials; ++trial) {
        Instance inst = tu::random_instance(8, 0.6, 6800 + trial);
        MetricClosure closure = metric_closure(inst);
        oracle::DpResult dp = oracle::optimal_search_dp(inst);

        RootedTree t0 = random_spanning_tree(closure.graph, trial);
        LocalSearchResult swap = edge_swap_local_search(inst, closure, t0);

        std::vector<Vertex> pi{0};
        for (Vertex v = 1; v < inst.vertex_count(); ++v) pi.push_back(v);
        std::mt19937_64 rng(trial);
        std::shuffle(pi.begin() + 1, pi.end(), rng);
        InsertionResult ins = insertion_local_search(closure.graph, pi);

        CHECK(swap.tree_cost >= dp.cost - 1e-9);
        CHECK(ins.cost >= dp.cost - 1e-9);
        if (ins.cost >= swap.tree_cost - 1e-9) ++insertion_not_better;
    }
    // The spanning-tree neighborhood wins at least a majority of seeds.
    CHECK(insertion_not_better * 2 > trials);
}

TEST_CASE("monotone descent: accepted swaps strictly decrease the tree cost") {
    Instance inst = tu::random_instance(7, 0.7, 6900);
    MetricClosure closure = metric_closure(inst);
    RootedTree t0 = random_spanning_tree(closure.graph, 11);
    double start_cost = c_star(closure.graph, t0);
    LocalSearchResult r = edge_swap_local_search(inst, closure, t0);
    CHECK(r.tree_cost <= start_cost + 1e-12);
    if (r.swaps > 0) CHECK(r.tree_cost < start_cost - 1e-10);
}

TEST_CASE("worst-case ratio family at m=2 approaches two") {
    double prev_ratio = 0.0;
    for (int k = 3; k <= 12; ++k) {
        Instance inst = tu::figure2(k, 2.0);
        int hub = k + 1;
        ExpandingSearch sigma1, sigma_star;
        for (Vertex v = 1; v <= k; ++v) sigma1.steps.emplace_back(0, v);
        sigma1.steps.emplace_back(0, hub);
        sigma_star.steps.emplace_back(0, hub);
        for (Vertex v = 1; v <= k; ++v) sigma_star.steps.emplace_back(hub, v);

        double c1 = search_cost(inst, sigma1);
        double cs = search_cost(inst, sigma_star);
        CHECK(c1 == doctest::Approx(2.0 * (k + 1) / 2.0).epsilon(1e-12));
        CHECK(cs == doctest::Approx(2.0 + (k + 1) / 2.0).epsilon(1e-12));
        double ratio = c1 / cs;
        CHECK(ratio > prev_ratio);  // increases toward 2
        CHECK(ratio < 2.0);
        prev_ratio = ratio;
    }
    CHECK(prev_ratio > 1.7);
}

TEST_CASE("start tree must span the closure") {
    Instance inst = tu::random_instance(6, 0.5, 7000);
    MetricClosure closure = metric_closure(inst);
    RootedTree partial(closure.graph.vertex_count());
    partial.add_vertex(1, 0, 1.0, closure.graph.find_edge(0, 1));
    CHECK_THROWS_AS(edge_swap_local_search(inst, closure, partial), ValidationError);
}
