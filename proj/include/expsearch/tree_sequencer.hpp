#pragma once

#include <vector>

#include "expsearch/graph.hpp"

namespace expsearch {

struct TreeSearchResult {
    /// Non-root vertices in visiting order.
    std::vector<Vertex> vertex_order;
    /// The search realized on the tree's edges.
    ExpandingSearch search;
    double cost = 0.0;
};

/// Optimal expanding search on a rooted subtree: repeatedly merges the
/// maximum-density vertex cluster into its parent cluster. Density ties are
/// broken by the smallest vertex id contained in the cluster.
TreeSearchResult optimal_tree_search(const Instance& inst, const RootedTree& tree);

/// Convenience overload for instances whose edge set is itself a spanning
/// tree; throws ValidationError otherwise.
TreeSearchResult optimal_tree_search(const Instance& inst);

/// c*(T): cost of the optimal search on spanning tree T of closure_inst.
double c_star(const Instance& closure_inst, const RootedTree& tree);

}  // namespace expsearch
