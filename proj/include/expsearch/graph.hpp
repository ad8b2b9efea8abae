#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace expsearch {

using Vertex = int;

/// Undirected edge with a strictly positive length.
struct Edge {
    Vertex u = -1;
    Vertex v = -1;
    double length = 0.0;

    Vertex other(Vertex w) const { return w == u ? v : u; }
};

class Error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Structural violation of an instance or search-sequence invariant.
class ValidationError : public Error {
    using Error::Error;
};

/// An exponential-time routine was asked to exceed its size cap.
class LimitError : public Error {
    using Error::Error;
};

/// Rooted edge-weighted graph with vertex probabilities. The root is always
/// vertex 0 internally; external ids live in the name table. Parallel edges
/// are collapsed to the minimum length at construction, self-loops rejected.
class Instance {
public:
    Instance() = default;
    Instance(std::vector<double> prob, std::vector<Edge> edges,
             std::vector<std::string> names = {});

    static constexpr Vertex root() { return 0; }

    int vertex_count() const { return static_cast<int>(prob_.size()); }
    /// The paper's n: number of non-root vertices.
    int non_root_count() const { return vertex_count() - 1; }

    double prob(Vertex v) const { return prob_[v]; }
    const std::vector<double>& probs() const { return prob_; }
    double total_prob() const { return total_prob_; }
    /// True when the probabilities form a distribution (sum 1 within 1e-9).
    bool has_unit_mass() const;

    const std::vector<Edge>& edges() const { return edges_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const Edge& edge(int id) const { return edges_[id]; }

    /// Adjacency of v as (neighbor, edge id) pairs, sorted by neighbor.
    const std::vector<std::pair<Vertex, int>>& neighbors(Vertex v) const {
        return adj_[v];
    }
    /// Edge id joining u and v, or -1.
    int find_edge(Vertex u, Vertex v) const;

    const std::string& name(Vertex v) const { return names_[v]; }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<double> prob_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<Vertex, int>>> adj_;
    std::vector<std::string> names_;
    double total_prob_ = 0.0;
};

/// Ordered edge sequence; when valid for an instance, step k connects an
/// unvisited vertex to the tree grown by steps 1..k-1.
struct ExpandingSearch {
    std::vector<std::pair<Vertex, Vertex>> steps;

    bool empty() const { return steps.empty(); }
    int size() const { return static_cast<int>(steps.size()); }
};

/// Per-vertex cumulative arrival lengths of a full expanding search.
/// Throws ValidationError naming the offending step when infeasible.
std::vector<double> arrival_lengths(const Instance& inst,
                                    const ExpandingSearch& sigma);

/// Expected length until the target is found, Sum_v p_v * lambda(v, sigma).
double search_cost(const Instance& inst, const ExpandingSearch& sigma);

/// Rooted subtree of an instance: parent pointers plus parent-edge data.
class RootedTree {
public:
    RootedTree() = default;
    explicit RootedTree(int n_total);

    /// Attach v below parent; parent must already be in the tree.
    void add_vertex(Vertex v, Vertex parent, double edge_length, int edge_id = -1);

    bool contains(Vertex v) const { return v >= 0 && v < size_ && parent_[v] != kAbsent; }
    Vertex parent(Vertex v) const { return parent_[v]; }
    double parent_length(Vertex v) const { return parent_len_[v]; }
    int parent_edge_id(Vertex v) const { return parent_edge_[v]; }

    /// Vertices in insertion order; the root comes first.
    const std::vector<Vertex>& vertices() const { return order_; }
    int vertex_count() const { return static_cast<int>(order_.size()); }
    int edge_count() const { return vertex_count() - 1; }
    bool spans(const Instance& inst) const {
        return vertex_count() == inst.vertex_count();
    }

    /// lambda(T): total parent-edge length.
    double total_length() const { return total_length_; }
    /// p(T): probability mass of the tree's vertex set.
    double total_prob(const Instance& inst) const;

    /// Edge ids of the tree path between a and b (both must be contained).
    std::vector<int> path_edges(Vertex a, Vertex b) const;

private:
    static constexpr Vertex kAbsent = -2;
    int size_ = 0;
    std::vector<Vertex> parent_;
    std::vector<double> parent_len_;
    std::vector<int> parent_edge_;
    std::vector<Vertex> order_;
    std::vector<int> depth_;
    double total_length_ = 0.0;
};

/// Builds a tree from instance edge ids, rooting at vertex 0 by BFS.
RootedTree tree_from_edges(const Instance& inst, const std::vector<int>& edge_ids);

/// C_{T,e}: tree-path edge ids between the endpoints of e, plus e itself
/// (last element). Throws if e is already a tree edge.
std::vector<int> fundamental_cycle(const Instance& inst, const RootedTree& tree,
                                   int edge_id);

/// Metric closure: complete graph with shortest-path lengths plus one
/// witnessing shortest path per vertex pair.
struct MetricClosure {
    Instance graph;
    /// next[u][v] = successor of u on the witnessing u-v path in the original.
    std::vector<std::vector<Vertex>> next;

    /// Witness path from u to v, both endpoints included.
    std::vector<Vertex> path(Vertex u, Vertex v) const;
};

MetricClosure metric_closure(const Instance& inst);

/// G/S: visited set S (root included) collapsed into the root, keeping the
/// minimum-length connecting edge per outside vertex.
struct Contraction {
    Instance graph;
    /// Contracted id -> original id. Index 0 maps to the original root.
    std::vector<Vertex> orig_of;
    /// Original edge id realizing each contracted edge (the length-minimizing
    /// witness for edges adjacent to the contracted root).
    std::vector<int> witness_edge;
};

Contraction contract(const Instance& inst, const std::vector<bool>& in_s);

}  // namespace expsearch
