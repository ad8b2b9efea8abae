#pragma once

#include <vector>

#include "expsearch/graph.hpp"

namespace expsearch {

/// Accounting record of one greedy iteration (for the price analysis).
struct GreedyIteration {
    double length = 0.0;     // lambda^(i): tree length in the contracted graph
    double mass = 0.0;       // p(T_i)
    double remaining = 0.0;  // p(R_i): unvisited mass before the iteration
    double price = 0.0;      // phi_i = remaining * length / mass
    std::vector<Vertex> vertices;  // original ids searched this iteration
};

struct GreedyResult {
    ExpandingSearch search;
    double cost = 0.0;
    double epsilon = 0.0;
    std::vector<GreedyIteration> trace;
};

/// Iterated maximum-density-subtree extraction on contracted graphs. Each
/// tree is sequenced optimally, root edges of the contraction are replaced by
/// their recorded length-minimizing witnesses, and zero-probability leftovers
/// are appended in nearest-connection order. With the default epsilon
/// 1/(2n - 1) this is an 8-approximation.
GreedyResult greedy_search(const Instance& inst, double epsilon = -1.0);

/// Upper bound of the price analysis: Sum_i p(T_i) phi_i >= c(sigma^g).
double greedy_upper_bound(const std::vector<GreedyIteration>& trace);

}  // namespace expsearch
