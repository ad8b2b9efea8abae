#pragma once

#include <vector>

#include "expsearch/graph.hpp"

namespace expsearch {

struct LocalSearchResult {
    RootedTree tree;         // final spanning tree in the closure
    double tree_cost = 0.0;  // c*(T)
    ExpandingSearch search;  // sigma^ls in the original graph
    double cost = 0.0;       // c(sigma^ls) <= c*(T)
    int swaps = 0;           // accepted moves
};

/// Edge-swap local search over spanning trees of the metric closure.
/// Pending edges are scanned by ascending (length, id); the best improving
/// removal inside the fundamental cycle is applied and the pending set reset.
/// The final tree's optimal sequence is expanded back into the original graph.
LocalSearchResult edge_swap_local_search(const Instance& original,
                                         const MetricClosure& closure,
                                         const RootedTree& t0);

/// Expands transitive closure edges into their witness shortest paths,
/// omitting edges between already-visited vertices. Arrivals never get later,
/// so the resulting cost is at most the closure sequence's cost.
ExpandingSearch convert_to_graph_sequence(const Instance& original,
                                          const MetricClosure& closure,
                                          const ExpandingSearch& closure_seq);

struct InsertionResult {
    std::vector<Vertex> permutation;  // (r, pi_1, ..., pi_n)
    double cost = 0.0;                // c*(T^pi)
    int moves = 0;
};

/// Insertion-based baseline: permutations evaluated through the tree T^pi
/// that connects each vertex by a minimum-length closure edge to its
/// predecessors; repeats any improving single-vertex insertion (i < j).
InsertionResult insertion_local_search(const Instance& closure_inst,
                                       std::vector<Vertex> pi0);

/// c*(T^pi) for a permutation, plus the tree itself.
std::pair<RootedTree, double> permutation_tree(const Instance& closure_inst,
                                               const std::vector<Vertex>& pi);

}  // namespace expsearch
