#include "expsearch/local_search.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "expsearch/tree_sequencer.hpp"

namespace expsearch {

namespace {
constexpr double kImprove = 1e-9;
}

LocalSearchResult edge_swap_local_search(const Instance& original,
                                         const MetricClosure& closure,
                                         const RootedTree& t0) {
    const Instance& g = closure.graph;
    if (!t0.spans(g)) throw ValidationError("start tree must span the closure");

    std::vector<int> tree_edges;
    for (Vertex v : t0.vertices())
        if (v != Instance::root()) tree_edges.push_back(t0.parent_edge_id(v));
    std::sort(tree_edges.begin(), tree_edges.end());

    std::map<std::vector<int>, double> memo;
    auto evaluate = [&](const std::vector<int>& sorted_ids) {
        auto it = memo.find(sorted_ids);
        if (it != memo.end()) return it->second;
        double cost = optimal_tree_search(g, tree_from_edges(g, sorted_ids)).cost;
        memo.emplace(sorted_ids, cost);
        return cost;
    };

    // Scan order over candidate edges: ascending (length, id).
    std::vector<int> scan(g.edge_count());
    std::iota(scan.begin(), scan.end(), 0);
    std::sort(scan.begin(), scan.end(), [&](int a, int b) {
        return g.edge(a).length < g.edge(b).length ||
               (g.edge(a).length == g.edge(b).length && a < b);
    });

    RootedTree tree = t0;
    double current = evaluate(tree_edges);
    std::vector<bool> pending(g.edge_count(), false);
    auto reset_pending = [&]() {
        std::fill(pending.begin(), pending.end(), true);
        for (int id : tree_edges) pending[id] = false;
    };
    reset_pending();

    int swaps = 0;
    for (;;) {
        int e = -1;
        for (int id : scan)
            if (pending[id]) {
                e = id;
                break;
            }
        if (e < 0) break;

        std::vector<int> cycle = fundamental_cycle(g, tree, e);
        cycle.pop_back();  // drop e itself; candidates are the tree-path edges
        double best_cost = std::numeric_limits<double>::infinity();
        int best_out = -1;
        std::vector<int> best_ids;
        for (int out : cycle) {
            std::vector<int> ids = tree_edges;
            ids.erase(std::find(ids.begin(), ids.end(), out));
            ids.insert(std::lower_bound(ids.begin(), ids.end(), e), e);
            double cost = evaluate(ids);
            if (cost < best_cost || (cost == best_cost && out < best_out)) {
                best_cost = cost;
                best_out = out;
                best_ids = std::move(ids);
            }
        }
        if (best_cost < current - kImprove) {
            tree_edges = std::move(best_ids);
            tree = tree_from_edges(g, tree_edges);
            current = best_cost;
            ++swaps;
            reset_pending();
        } else {
            pending[e] = false;
        }
    }

    LocalSearchResult res;
    res.tree_cost = current;
    res.swaps = swaps;
    TreeSearchResult seq = optimal_tree_search(g, tree);
    res.search = convert_to_graph_sequence(original, closure, seq.search);
    res.cost = search_cost(original, res.search);
    res.tree = std::move(tree);
    return res;
}

ExpandingSearch convert_to_graph_sequence(const Instance& original,
                                          const MetricClosure& closure,
                                          const ExpandingSearch& closure_seq) {
    std::vector<bool> visited(original.vertex_count(), false);
    visited[Instance::root()] = true;
    ExpandingSearch out;
    for (auto [a, b] : closure_seq.steps) {
        if (!visited[a] && !visited[b])
            throw ValidationError("closure sequence step disconnected");
        Vertex from = visited[a] ? a : b;
        Vertex to = visited[a] ? b : a;
        std::vector<Vertex> path = closure.path(from, to);
        for (size_t i = 0; i + 1 < path.size(); ++i) {
            if (visited[path[i + 1]]) continue;  // omit edges into searched ground
            out.steps.emplace_back(path[i], path[i + 1]);
            visited[path[i + 1]] = true;
        }
    }
    return out;
}

std::pair<RootedTree, double> permutation_tree(const Instance& closure_inst,
                                               const std::vector<Vertex>& pi) {
    const int n_total = closure_inst.vertex_count();
    if (static_cast<int>(pi.size()) != n_total || pi[0] != Instance::root())
        throw ValidationError("permutation must start at the root and cover all vertices");
    RootedTree tree(n_total);
    for (size_t k = 1; k < pi.size(); ++k) {
        Vertex v = pi[k];
        double best = std::numeric_limits<double>::infinity();
        Vertex attach = -1;
        int attach_edge = -1;
        for (size_t j = 0; j < k; ++j) {
            int id = closure_inst.find_edge(pi[j], v);
            if (id < 0) continue;
            double len = closure_inst.edge(id).length;
            if (len < best || (len == best && pi[j] < attach)) {
                best = len;
                attach = pi[j];
                attach_edge = id;
            }
        }
        if (attach < 0) throw ValidationError("closure instance must be complete");
        tree.add_vertex(v, attach, best, attach_edge);
    }
    double cost = optimal_tree_search(closure_inst, tree).cost;
    return {std::move(tree), cost};
}

InsertionResult insertion_local_search(const Instance& closure_inst,
                                       std::vector<Vertex> pi0) {
    InsertionResult res;
    res.permutation = std::move(pi0);
    res.cost = permutation_tree(closure_inst, res.permutation).second;

    const int n = closure_inst.non_root_count();
    bool improved = true;
    while (improved) {
        improved = false;
        for (int i = 1; i <= n && !improved; ++i) {
            for (int j = i + 1; j <= n && !improved; ++j) {
                // Insert pi_j at position i, shifting pi_i..pi_{j-1} back.
                std::vector<Vertex> cand = res.permutation;
                Vertex moved = cand[j];
                cand.erase(cand.begin() + j);
                cand.insert(cand.begin() + i, moved);
                double cost = permutation_tree(closure_inst, cand).second;
                if (cost < res.cost - kImprove) {
                    res.permutation = std::move(cand);
                    res.cost = cost;
                    ++res.moves;
                    improved = true;
                }
            }
        }
    }
    return res;
}

}  // namespace expsearch
