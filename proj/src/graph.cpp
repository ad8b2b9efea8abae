#include "expsearch/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

namespace expsearch {

namespace {

void check_connected(int n, const std::vector<std::vector<std::pair<Vertex, int>>>& adj) {
    if (n == 0) throw ValidationError("instance has no vertices");
    std::vector<bool> seen(n, false);
    std::queue<Vertex> q;
    q.push(0);
    seen[0] = true;
    int reached = 1;
    while (!q.empty()) {
        Vertex u = q.front();
        q.pop();
        for (auto [v, id] : adj[u]) {
            if (!seen[v]) {
                seen[v] = true;
                ++reached;
                q.push(v);
            }
        }
    }
    if (reached != n)
        throw ValidationError("instance graph is not connected (" +
                              std::to_string(reached) + " of " + std::to_string(n) +
                              " vertices reachable from the root)");
}

}  // namespace

Instance::Instance(std::vector<double> prob, std::vector<Edge> edges,
                   std::vector<std::string> names)
    : prob_(std::move(prob)), names_(std::move(names)) {
    const int n = static_cast<int>(prob_.size());
    if (n == 0) throw ValidationError("instance has no vertices");
    if (names_.empty()) {
        names_.reserve(n);
        for (int v = 0; v < n; ++v) names_.push_back(std::to_string(v));
    }
    if (static_cast<int>(names_.size()) != n)
        throw ValidationError("name table size does not match vertex count");
    if (prob_[root()] != 0.0)
        throw ValidationError("root probability must be zero");
    for (int v = 0; v < n; ++v) {
        if (!(prob_[v] >= 0.0) || prob_[v] > 1.0 + 1e-12 || !std::isfinite(prob_[v]))
            throw ValidationError("probability of vertex " + names_[v] +
                                  " outside [0,1]");
        total_prob_ += prob_[v];
    }

    // Collapse parallel edges to the minimum length; longer copies are
    // dominated.
    std::map<std::pair<Vertex, Vertex>, Edge> collapsed;
    for (const Edge& e : edges) {
        if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
            throw ValidationError("edge endpoint out of range");
        if (e.u == e.v)
            throw ValidationError("self-loop at vertex " + names_[e.u]);
        if (!(e.length > 0.0) || !std::isfinite(e.length))
            throw ValidationError("edge {" + names_[e.u] + "," + names_[e.v] +
                                  "} has non-positive length");
        auto key = std::minmax(e.u, e.v);
        auto it = collapsed.find(key);
        if (it == collapsed.end() || e.length < it->second.length)
            collapsed[key] = Edge{key.first, key.second, e.length};
    }
    edges_.reserve(collapsed.size());
    adj_.assign(n, {});
    for (auto& [key, e] : collapsed) {
        int id = static_cast<int>(edges_.size());
        edges_.push_back(e);
        adj_[e.u].emplace_back(e.v, id);
        adj_[e.v].emplace_back(e.u, id);
    }
    check_connected(n, adj_);
}

bool Instance::has_unit_mass() const { return std::abs(total_prob_ - 1.0) <= 1e-9; }

int Instance::find_edge(Vertex u, Vertex v) const {
    if (u < 0 || u >= vertex_count() || v < 0 || v >= vertex_count()) return -1;
    const auto& a = adj_[u].size() <= adj_[v].size() ? adj_[u] : adj_[v];
    Vertex target = adj_[u].size() <= adj_[v].size() ? v : u;
    auto it = std::lower_bound(a.begin(), a.end(), std::make_pair(target, -1));
    if (it != a.end() && it->first == target) return it->second;
    return -1;
}

std::vector<double> arrival_lengths(const Instance& inst, const ExpandingSearch& sigma) {
    const int n = inst.vertex_count();
    if (sigma.size() != inst.non_root_count())
        throw ValidationError("search has " + std::to_string(sigma.size()) +
                              " steps, expected " + std::to_string(inst.non_root_count()));
    std::vector<double> arrival(n, 0.0);
    std::vector<bool> visited(n, false);
    visited[Instance::root()] = true;
    double traveled = 0.0;
    for (int k = 0; k < sigma.size(); ++k) {
        auto [a, b] = sigma.steps[k];
        int id = inst.find_edge(a, b);
        if (id < 0)
            throw ValidationError("step " + std::to_string(k + 1) + ": edge {" +
                                  std::to_string(a) + "," + std::to_string(b) +
                                  "} not in instance");
        bool va = visited[a], vb = visited[b];
        if (va && vb)
            throw ValidationError("step " + std::to_string(k + 1) +
                                  ": both endpoints already visited");
        if (!va && !vb)
            throw ValidationError("step " + std::to_string(k + 1) +
                                  ": edge disconnected from the searched region");
        Vertex fresh = va ? b : a;
        traveled += inst.edge(id).length;
        arrival[fresh] = traveled;
        visited[fresh] = true;
    }
    return arrival;
}

double search_cost(const Instance& inst, const ExpandingSearch& sigma) {
    std::vector<double> arrival = arrival_lengths(inst, sigma);
    double cost = 0.0;
    for (Vertex v = 0; v < inst.vertex_count(); ++v) cost += inst.prob(v) * arrival[v];
    return cost;
}

RootedTree::RootedTree(int n_total)
    : size_(n_total),
      parent_(n_total, kAbsent),
      parent_len_(n_total, 0.0),
      parent_edge_(n_total, -1),
      depth_(n_total, 0) {
    if (n_total <= 0) throw ValidationError("tree needs at least the root");
    parent_[0] = -1;
    order_.push_back(0);
}

void RootedTree::add_vertex(Vertex v, Vertex parent, double edge_length, int edge_id) {
    if (v < 0 || v >= size_ || parent < 0 || parent >= size_)
        throw ValidationError("tree vertex out of range");
    if (contains(v)) throw ValidationError("vertex already in tree");
    if (!contains(parent)) throw ValidationError("parent not in tree");
    parent_[v] = parent;
    parent_len_[v] = edge_length;
    parent_edge_[v] = edge_id;
    depth_[v] = depth_[parent] + 1;
    order_.push_back(v);
    total_length_ += edge_length;
}

double RootedTree::total_prob(const Instance& inst) const {
    double p = 0.0;
    for (Vertex v : order_) p += inst.prob(v);
    return p;
}

std::vector<int> RootedTree::path_edges(Vertex a, Vertex b) const {
    if (!contains(a) || !contains(b))
        throw ValidationError("path endpoints must be tree vertices");
    std::vector<int> left, right;
    while (a != b) {
        if (depth_[a] >= depth_[b]) {
            left.push_back(parent_edge_[a]);
            a = parent_[a];
        } else {
            right.push_back(parent_edge_[b]);
            b = parent_[b];
        }
    }
    left.insert(left.end(), right.rbegin(), right.rend());
    return left;
}

RootedTree tree_from_edges(const Instance& inst, const std::vector<int>& edge_ids) {
    std::vector<std::vector<std::pair<Vertex, int>>> adj(inst.vertex_count());
    for (int id : edge_ids) {
        const Edge& e = inst.edge(id);
        adj[e.u].emplace_back(e.v, id);
        adj[e.v].emplace_back(e.u, id);
    }
    RootedTree tree(inst.vertex_count());
    std::queue<Vertex> q;
    q.push(Instance::root());
    while (!q.empty()) {
        Vertex u = q.front();
        q.pop();
        for (auto [v, id] : adj[u]) {
            if (tree.contains(v)) continue;
            tree.add_vertex(v, u, inst.edge(id).length, id);
            q.push(v);
        }
    }
    if (tree.edge_count() != static_cast<int>(edge_ids.size()))
        throw ValidationError("edge set is not a tree reaching the root");
    return tree;
}

std::vector<int> fundamental_cycle(const Instance& inst, const RootedTree& tree,
                                   int edge_id) {
    const Edge& e = inst.edge(edge_id);
    if (!tree.contains(e.u) || !tree.contains(e.v))
        throw ValidationError("both endpoints of the closing edge must lie in the tree");
    for (Vertex w : {e.u, e.v})
        if (tree.parent_edge_id(w) == edge_id)
            throw ValidationError("edge already belongs to the tree");
    std::vector<int> cycle = tree.path_edges(e.u, e.v);
    cycle.push_back(edge_id);
    return cycle;
}

std::vector<Vertex> MetricClosure::path(Vertex u, Vertex v) const {
    std::vector<Vertex> p{u};
    while (u != v) {
        u = next[u][v];
        p.push_back(u);
    }
    return p;
}

MetricClosure metric_closure(const Instance& inst) {
    const int n = inst.vertex_count();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, inf));
    std::vector<std::vector<Vertex>> next(n, std::vector<Vertex>(n, -1));
    for (int v = 0; v < n; ++v) {
        dist[v][v] = 0.0;
        next[v][v] = v;
    }
    for (const Edge& e : inst.edges()) {
        dist[e.u][e.v] = e.length;
        dist[e.v][e.u] = e.length;
        next[e.u][e.v] = e.v;
        next[e.v][e.u] = e.u;
    }
    // Floyd-Warshall; strict improvement keeps witnesses deterministic.
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            if (dist[i][k] == inf) continue;
            for (int j = 0; j < n; ++j) {
                double through = dist[i][k] + dist[k][j];
                if (through < dist[i][j]) {
                    dist[i][j] = through;
                    next[i][j] = next[i][k];
                }
            }
        }
    std::vector<Edge> closure_edges;
    closure_edges.reserve(static_cast<size_t>(n) * (n - 1) / 2);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            closure_edges.push_back(Edge{u, v, dist[u][v]});
    return MetricClosure{Instance(inst.probs(), std::move(closure_edges), inst.names()),
                         std::move(next)};
}

Contraction contract(const Instance& inst, const std::vector<bool>& in_s) {
    const int n = inst.vertex_count();
    if (static_cast<int>(in_s.size()) != n)
        throw ValidationError("contraction set size mismatch");
    if (!in_s[Instance::root()])
        throw ValidationError("contraction set must contain the root");
    int outside = 0;
    for (int v = 0; v < n; ++v)
        if (!in_s[v]) ++outside;
    if (outside == 0) throw ValidationError("nothing to contract");

    Contraction result;
    result.orig_of.push_back(Instance::root());
    std::vector<int> new_id(n, -1);
    new_id[Instance::root()] = 0;
    for (int v = 0; v < n; ++v) {
        if (!in_s[v]) {
            new_id[v] = static_cast<int>(result.orig_of.size());
            result.orig_of.push_back(v);
        }
    }

    std::vector<double> prob(result.orig_of.size(), 0.0);
    std::vector<std::string> names;
    names.reserve(result.orig_of.size());
    for (size_t i = 0; i < result.orig_of.size(); ++i) {
        names.push_back(inst.name(result.orig_of[i]));
        if (i > 0) prob[i] = inst.prob(result.orig_of[i]);
    }

    // Minimum-length connecting edge per outside vertex; ties broken by the
    // smallest original endpoint pair.
    std::vector<int> root_witness(n, -1);
    std::vector<Edge> edges;
    std::vector<int> witness;
    auto better = [&](int lhs, int rhs) {
        const Edge& a = inst.edge(lhs);
        const Edge& b = inst.edge(rhs);
        auto ka = std::minmax(a.u, a.v);
        auto kb = std::minmax(b.u, b.v);
        return a.length < b.length || (a.length == b.length && ka < kb);
    };
    for (int id = 0; id < inst.edge_count(); ++id) {
        const Edge& e = inst.edge(id);
        bool su = in_s[e.u], sv = in_s[e.v];
        if (su && sv) continue;
        if (!su && !sv) {
            edges.push_back(Edge{new_id[e.u], new_id[e.v], e.length});
            witness.push_back(id);
            continue;
        }
        Vertex w = su ? e.v : e.u;
        if (root_witness[w] < 0 || better(id, root_witness[w])) root_witness[w] = id;
    }
    for (int v = 0; v < n; ++v) {
        if (root_witness[v] < 0) continue;
        edges.push_back(Edge{0, new_id[v], inst.edge(root_witness[v]).length});
        witness.push_back(root_witness[v]);
    }

    Instance contracted(std::move(prob), std::move(edges), std::move(names));
    // The instance constructor reorders edges canonically; remap witnesses.
    std::vector<int> remapped(contracted.edge_count(), -1);
    for (size_t k = 0; k < witness.size(); ++k) {
        const Edge& orig = inst.edge(witness[k]);
        Vertex cu = in_s[orig.u] ? 0 : new_id[orig.u];
        Vertex cv = in_s[orig.v] ? 0 : new_id[orig.v];
        int cid = contracted.find_edge(cu, cv);
        remapped[cid] = witness[k];
    }
    result.graph = std::move(contracted);
    result.witness_edge = std::move(remapped);
    return result;
}

}  // namespace expsearch
