#include "expsearch/tree_sequencer.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace expsearch {

namespace {

struct Cluster {
    Vertex head = -1;            // topmost vertex; its tree parent lies outside
    double mass = 0.0;
    double length = 0.0;
    Vertex min_vertex = -1;      // deterministic tie-break key
    int version = 0;
    bool merged = false;
    std::vector<Vertex> order;   // visiting order within the cluster
};

struct QueueEntry {
    double density;
    Vertex min_vertex;
    int cluster;
    int version;

    // max-density first, then smallest contained vertex id
    bool operator<(const QueueEntry& o) const {
        if (density != o.density) return density < o.density;
        return min_vertex > o.min_vertex;
    }
};

}  // namespace

TreeSearchResult optimal_tree_search(const Instance& inst, const RootedTree& tree) {
    const int n = tree.vertex_count() - 1;
    std::vector<int> cluster_of(inst.vertex_count(), -1);
    std::vector<Cluster> clusters;
    clusters.reserve(2 * n + 1);

    // Cluster 0 holds the root and collects the final order.
    clusters.push_back(Cluster{Instance::root(), 0.0, 0.0, Instance::root(), 0, false, {}});
    cluster_of[Instance::root()] = 0;

    std::priority_queue<QueueEntry> queue;
    for (Vertex v : tree.vertices()) {
        if (v == Instance::root()) continue;
        if (!(tree.parent_length(v) > 0.0))
            throw ValidationError("tree edge lengths must be positive");
        int id = static_cast<int>(clusters.size());
        clusters.push_back(Cluster{v, inst.prob(v), tree.parent_length(v), v, 0, false, {v}});
        cluster_of[v] = id;
        queue.push(QueueEntry{clusters[id].mass / clusters[id].length, v, id, 0});
    }

    auto find = [&](Vertex v) {
        int c = cluster_of[v];
        while (clusters[c].merged) c = cluster_of[clusters[c].head];
        return c;
    };

    int merges_left = n;
    while (merges_left > 0) {
        QueueEntry top = queue.top();
        queue.pop();
        Cluster& c = clusters[top.cluster];
        if (c.merged || c.version != top.version) continue;

        int parent_cluster = find(tree.parent(c.head));
        Cluster& pc = clusters[parent_cluster];
        pc.mass += c.mass;
        pc.length += c.length;
        pc.min_vertex = std::min(pc.min_vertex, c.min_vertex);
        pc.order.insert(pc.order.end(), c.order.begin(), c.order.end());
        c.merged = true;
        for (Vertex v : c.order) cluster_of[v] = parent_cluster;
        cluster_of[c.head] = parent_cluster;
        --merges_left;
        if (parent_cluster != 0) {
            ++pc.version;
            queue.push(QueueEntry{pc.mass / pc.length, pc.min_vertex, parent_cluster,
                                  pc.version});
        }
    }

    TreeSearchResult result;
    result.vertex_order = std::move(clusters[0].order);
    double traveled = 0.0;
    for (Vertex v : result.vertex_order) {
        result.search.steps.emplace_back(tree.parent(v), v);
        traveled += tree.parent_length(v);
        result.cost += inst.prob(v) * traveled;
    }
    return result;
}

TreeSearchResult optimal_tree_search(const Instance& inst) {
    if (inst.edge_count() != inst.non_root_count())
        throw ValidationError("instance edge set is not a spanning tree");
    std::vector<int> ids(inst.edge_count());
    std::iota(ids.begin(), ids.end(), 0);
    return optimal_tree_search(inst, tree_from_edges(inst, ids));
}

double c_star(const Instance& closure_inst, const RootedTree& tree) {
    if (!tree.spans(closure_inst))
        throw ValidationError("tree must span the instance");
    return optimal_tree_search(closure_inst, tree).cost;
}

}  // namespace expsearch
