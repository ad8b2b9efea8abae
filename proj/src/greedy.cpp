#include "expsearch/greedy.hpp"

#include <algorithm>
#include <limits>

#include "expsearch/pcst.hpp"
#include "expsearch/tree_sequencer.hpp"

namespace expsearch {

GreedyResult greedy_search(const Instance& inst, double epsilon) {
    const int n_total = inst.vertex_count();
    GreedyResult result;
    result.epsilon = epsilon > 0.0 ? epsilon : default_epsilon(inst.non_root_count());

    std::vector<bool> visited(n_total, false);
    visited[Instance::root()] = true;
    double remaining = inst.total_prob();

    auto positive_left = [&]() {
        for (Vertex v = 1; v < n_total; ++v)
            if (!visited[v] && inst.prob(v) > 0.0) return true;
        return false;
    };

    while (positive_left()) {
        Contraction ctr = contract(inst, visited);
        ParametricResult pres = parametric_search(ctr.graph, result.epsilon);
        TreeSearchResult seq = optimal_tree_search(ctr.graph, pres.tree);

        GreedyIteration iter;
        iter.length = pres.tree.total_length();
        iter.mass = pres.tree.total_prob(ctr.graph);
        iter.remaining = remaining;
        iter.price = iter.remaining * iter.length / iter.mass;

        for (Vertex cv : seq.vertex_order) {
            int witness = ctr.witness_edge[pres.tree.parent_edge_id(cv)];
            const Edge& e = inst.edge(witness);
            Vertex fresh = ctr.orig_of[cv];
            result.search.steps.emplace_back(e.other(fresh), fresh);
            iter.vertices.push_back(fresh);
            visited[fresh] = true;
        }
        remaining -= iter.mass;
        result.trace.push_back(std::move(iter));
    }

    // Zero-probability leftovers: nearest connection first, so the appended
    // tail stays a valid expanding search.
    for (;;) {
        double best_len = std::numeric_limits<double>::infinity();
        int best_edge = -1;
        Vertex best_fresh = -1;
        for (int id = 0; id < inst.edge_count(); ++id) {
            const Edge& e = inst.edge(id);
            if (visited[e.u] == visited[e.v]) continue;
            Vertex fresh = visited[e.u] ? e.v : e.u;
            if (e.length < best_len ||
                (e.length == best_len &&
                 std::minmax(e.u, e.v) < std::minmax(inst.edge(best_edge).u,
                                                     inst.edge(best_edge).v))) {
                best_len = e.length;
                best_edge = id;
                best_fresh = fresh;
            }
        }
        if (best_edge < 0) break;
        const Edge& e = inst.edge(best_edge);
        result.search.steps.emplace_back(e.other(best_fresh), best_fresh);
        visited[best_fresh] = true;
    }

    result.cost = search_cost(inst, result.search);
    return result;
}

double greedy_upper_bound(const std::vector<GreedyIteration>& trace) {
    double bound = 0.0;
    for (const GreedyIteration& it : trace) bound += it.mass * it.price;
    return bound;
}

}  // namespace expsearch
