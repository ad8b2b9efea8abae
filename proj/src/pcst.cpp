#include "expsearch/pcst.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace expsearch {

namespace {

constexpr double kEventEps = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Component {
    bool active = false;
    bool has_root = false;
    double budget = 0.0;  // remaining penalty slack
    std::vector<Vertex> members;
};

struct GwState {
    std::vector<int> comp_of;        // vertex -> live component id
    std::vector<Component> comps;

    int find(Vertex v) const { return comp_of[v]; }
};

}  // namespace

RootedTree gw_pcst(const Instance& inst, const std::vector<double>& lengths,
                   const std::vector<double>& penalties) {
    const int n_total = inst.vertex_count();
    if (static_cast<int>(lengths.size()) != inst.edge_count())
        throw ValidationError("length vector size mismatch");
    if (static_cast<int>(penalties.size()) != n_total)
        throw ValidationError("penalty vector size mismatch");
    for (double len : lengths)
        if (!(len > 0.0)) throw ValidationError("GW lengths must be positive");
    for (Vertex v = 1; v < n_total; ++v)
        if (!(penalties[v] >= 0.0)) throw ValidationError("GW penalties must be >= 0");

    GwState st;
    st.comp_of.resize(n_total);
    st.comps.reserve(2 * n_total);
    for (Vertex v = 0; v < n_total; ++v) {
        Component c;
        c.has_root = (v == Instance::root());
        c.active = !c.has_root;
        c.budget = c.has_root ? 0.0 : penalties[v];
        c.members = {v};
        st.comp_of[v] = v;
        st.comps.push_back(std::move(c));
    }

    std::vector<double> slack(lengths);  // remaining edge slack
    std::vector<int> picked;             // edges of the growth forest
    std::vector<std::vector<Vertex>> deactivated_sets;
    int active_count = n_total - 1;

    auto edge_rate = [&](int id) {
        int cu = st.find(inst.edge(id).u);
        int cv = st.find(inst.edge(id).v);
        if (cu == cv) return 0;
        return int(st.comps[cu].active) + int(st.comps[cv].active);
    };

    while (active_count > 0) {
        // Next event: tightest edge vs. earliest deactivation.
        double dt = kInf;
        for (int id = 0; id < inst.edge_count(); ++id) {
            int rate = edge_rate(id);
            if (rate > 0) dt = std::min(dt, std::max(slack[id], 0.0) / rate);
        }
        for (const Component& c : st.comps)
            if (c.active) dt = std::min(dt, std::max(c.budget, 0.0));
        if (dt == kInf)
            throw Error("GW growth stalled with active components");

        for (int id = 0; id < inst.edge_count(); ++id)
            slack[id] -= dt * edge_rate(id);
        for (Component& c : st.comps)
            if (c.active) c.budget -= dt;

        // Edge events first; among edges, smallest id.
        int tight = -1;
        for (int id = 0; id < inst.edge_count(); ++id)
            if (edge_rate(id) > 0 && slack[id] <= kEventEps) {
                tight = id;
                break;
            }
        if (tight >= 0) {
            int ca = st.find(inst.edge(tight).u);
            int cb = st.find(inst.edge(tight).v);
            picked.push_back(tight);
            Component merged;
            merged.has_root = st.comps[ca].has_root || st.comps[cb].has_root;
            merged.budget = st.comps[ca].budget + st.comps[cb].budget;
            merged.active = !merged.has_root;
            merged.members = std::move(st.comps[ca].members);
            merged.members.insert(merged.members.end(), st.comps[cb].members.begin(),
                                  st.comps[cb].members.end());
            active_count -= int(st.comps[ca].active) + int(st.comps[cb].active);
            active_count += int(merged.active);
            st.comps[ca].active = st.comps[cb].active = false;
            int id = static_cast<int>(st.comps.size());
            for (Vertex v : merged.members) st.comp_of[v] = id;
            st.comps.push_back(std::move(merged));
            continue;
        }
        for (size_t i = 0; i < st.comps.size(); ++i) {
            Component& c = st.comps[i];
            if (c.active && c.budget <= kEventEps) {
                c.active = false;
                --active_count;
                deactivated_sets.push_back(c.members);
                break;  // one event per step keeps the edge-first rule exact
            }
        }
    }

    // Root component of the growth forest.
    std::vector<std::vector<std::pair<Vertex, int>>> adj(n_total);
    for (int id : picked) {
        adj[inst.edge(id).u].emplace_back(inst.edge(id).v, id);
        adj[inst.edge(id).v].emplace_back(inst.edge(id).u, id);
    }
    std::vector<bool> in_tree(n_total, false);
    in_tree[Instance::root()] = true;
    std::queue<Vertex> bfs;
    bfs.push(Instance::root());
    while (!bfs.empty()) {
        Vertex u = bfs.front();
        bfs.pop();
        for (auto [v, id] : adj[u])
            if (!in_tree[v]) {
                in_tree[v] = true;
                bfs.push(v);
            }
    }

    // GW pruning: repeatedly drop any deactivated set lying inside the tree
    // with exactly one tree edge crossing it.
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = deactivated_sets.rbegin(); it != deactivated_sets.rend(); ++it) {
            const std::vector<Vertex>& set = *it;
            bool inside = true;
            for (Vertex v : set)
                if (!in_tree[v]) {
                    inside = false;
                    break;
                }
            if (!inside) continue;
            std::vector<bool> in_set(n_total, false);
            for (Vertex v : set) in_set[v] = true;
            int crossing = 0;
            for (int id : picked) {
                const Edge& e = inst.edge(id);
                if (!in_tree[e.u] || !in_tree[e.v]) continue;
                if (in_set[e.u] != in_set[e.v]) ++crossing;
            }
            if (crossing == 1) {
                for (Vertex v : set) in_tree[v] = false;
                changed = true;
            }
        }
    }

    std::vector<int> final_edges;
    for (int id : picked)
        if (in_tree[inst.edge(id).u] && in_tree[inst.edge(id).v])
            final_edges.push_back(id);

    RootedTree tree(n_total);
    std::queue<Vertex> q;
    q.push(Instance::root());
    std::vector<std::vector<std::pair<Vertex, int>>> tadj(n_total);
    for (int id : final_edges) {
        tadj[inst.edge(id).u].emplace_back(inst.edge(id).v, id);
        tadj[inst.edge(id).v].emplace_back(inst.edge(id).u, id);
    }
    while (!q.empty()) {
        Vertex u = q.front();
        q.pop();
        for (auto [v, id] : tadj[u])
            if (!tree.contains(v)) {
                tree.add_vertex(v, u, lengths[id], id);
                q.push(v);
            }
    }
    return tree;
}

RootedTree initial_tree(const Instance& inst) {
    const int n_total = inst.vertex_count();
    std::vector<double> dist(n_total, kInf);
    std::vector<Vertex> parent(n_total, -1);
    std::vector<int> parent_edge(n_total, -1);
    dist[Instance::root()] = 0.0;
    using Item = std::pair<double, Vertex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    heap.emplace(0.0, Instance::root());
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (auto [v, id] : inst.neighbors(u)) {
            double nd = d + inst.edge(id).length;
            if (nd < dist[v]) {
                dist[v] = nd;
                parent[v] = u;
                parent_edge[v] = id;
                heap.emplace(nd, v);
            }
        }
    }

    std::vector<bool> keep(n_total, false);
    keep[Instance::root()] = true;
    for (Vertex v = 1; v < n_total; ++v) {
        if (inst.prob(v) <= 0.0) continue;
        for (Vertex w = v; !keep[w]; w = parent[w]) keep[w] = true;
    }
    RootedTree tree(n_total);
    // Attach kept vertices in distance order so parents precede children.
    std::vector<Vertex> by_dist;
    for (Vertex v = 1; v < n_total; ++v)
        if (keep[v]) by_dist.push_back(v);
    std::sort(by_dist.begin(), by_dist.end(), [&](Vertex a, Vertex b) {
        return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
    });
    for (Vertex v : by_dist)
        tree.add_vertex(v, parent[v], inst.edge(parent_edge[v]).length, parent_edge[v]);
    return tree;
}

double default_epsilon(int non_root_count) {
    return 1.0 / (2.0 * non_root_count - 1.0);
}

ParametricResult parametric_search(const Instance& inst, double epsilon) {
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    const int n = inst.non_root_count();
    bool any_positive = false;
    for (Vertex v = 1; v < inst.vertex_count(); ++v)
        if (inst.prob(v) > 0.0) any_positive = true;
    if (!any_positive) throw ValidationError("undefined density: all probabilities zero");

    const double factor = 2.0 - 1.0 / n;
    ParametricResult res;
    res.tree = initial_tree(inst);
    double alpha = factor * res.tree.total_prob(inst) / res.tree.total_length();
    double beta = 0.0;
    for (const Edge& e : inst.edges()) {
        if (e.u != Instance::root()) beta = std::max(beta, inst.prob(e.u) / e.length);
        if (e.v != Instance::root()) beta = std::max(beta, inst.prob(e.v) / e.length);
    }

    std::vector<double> scaled(inst.edge_count());
    int guard = 0;
    while (beta > (1.0 + epsilon) * alpha) {
        if (++guard > 200) throw Error("parametric search failed to converge");
        double rho = (alpha + beta) / 2.0;
        res.trace.push_back(
            ParametricIteration{alpha, beta, rho,
                                res.tree.total_prob(inst) / res.tree.total_length()});
        for (int id = 0; id < inst.edge_count(); ++id)
            scaled[id] = rho * inst.edge(id).length;
        RootedTree t = gw_pcst(inst, scaled, inst.probs());
        // Re-express the GW tree under the instance's own lengths.
        RootedTree unscaled(inst.vertex_count());
        for (Vertex v : t.vertices()) {
            if (v == Instance::root()) continue;
            int id = t.parent_edge_id(v);
            unscaled.add_vertex(v, t.parent(v), inst.edge(id).length, id);
        }
        double mass = unscaled.total_prob(inst);
        double length = unscaled.total_length();
        if (factor * mass <= rho * length) {
            // Guess too high: no tree reaches density rho / factor.
            beta = rho;
        } else {
            alpha = factor * mass / length;
            res.tree = std::move(unscaled);
        }
    }
    res.alpha = alpha;
    res.beta = beta;
    return res;
}

}  // namespace expsearch
