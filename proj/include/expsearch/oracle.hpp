#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "expsearch/graph.hpp"

namespace expsearch {
namespace oracle {

struct DpResult {
    double cost = 0.0;
    ExpandingSearch search;
};

/// Exact optimum by dynamic programming over visited vertex subsets.
/// g(S u {v}) = g(S) + min-edge-length(S,v) * (mass not yet found).
/// Refuses instances with more than `cap` non-root vertices.
DpResult optimal_search_dp(const Instance& inst, int cap = 20);

/// Calls fn(mask) for every non-empty set of non-root vertices that induces,
/// together with the root, a connected subgraph. Bit k of mask = vertex k+1.
void for_each_rooted_set(const Instance& inst,
                         const std::function<void(std::uint32_t)>& fn);

/// Minimum spanning tree of the subgraph induced by the root plus the masked
/// vertices, under the given per-edge lengths. Returns the chosen edge ids.
std::vector<int> induced_mst(const Instance& inst, std::uint32_t mask,
                             const std::vector<double>& lengths);

struct DensityResult {
    RootedTree tree;
    double density = 0.0;
};

/// Exhaustive maximum-density subtree: every connected rooted vertex set,
/// densest tree per set given by the induced MST.
DensityResult max_density_subtree_bruteforce(const Instance& inst, int cap = 12);

struct PcstResult {
    RootedTree tree;
    double objective = 0.0;  // lambda(T) + penalties(V \ V[T])
};

/// Exact prize-collecting Steiner tree by vertex-set enumeration.
PcstResult pcst_bruteforce(const Instance& inst, const std::vector<double>& lengths,
                           const std::vector<double>& penalties, int cap = 12);

}  // namespace oracle
}  // namespace expsearch
