#pragma once

#include <vector>

#include "expsearch/graph.hpp"

namespace expsearch {

/// Directed network with non-negative arc capacities. Arcs are stored flat;
/// the reverse (residual) arc of arc i sits at index i^1.
struct FlowNetwork {
    struct Arc {
        Vertex to;
        double cap;  // residual capacity
    };

    explicit FlowNetwork(int n);

    /// Adds arc from->to with the given capacity, plus its zero-capacity
    /// reverse. Returns the forward arc's index.
    int add_arc(Vertex from, Vertex to, double capacity);

    int vertex_count() const { return static_cast<int>(out.size()); }

    std::vector<Arc> arcs;
    std::vector<Vertex> tail;
    std::vector<std::vector<int>> out;
};

struct MaxFlowResult {
    double flow = 0.0;
    /// Source side of a minimum cut; source in, sink out.
    std::vector<bool> source_side;
};

/// Edmonds-Karp with a 1e-12 residual threshold. Max-flow equals the
/// returned cut's capacity exactly by construction.
MaxFlowResult max_flow_min_cut(FlowNetwork net, Vertex source, Vertex sink);

}  // namespace expsearch
