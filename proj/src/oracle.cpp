#include "expsearch/oracle.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace expsearch {
namespace oracle {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Disjoint-set over at most 32 elements.
struct Dsu {
    int parent[33];
    void init(int n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    bool join(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};
}  // namespace

DpResult optimal_search_dp(const Instance& inst, int cap) {
    const int n = inst.non_root_count();
    if (n > cap || n > 20)
        throw LimitError("subset DP refused: " + std::to_string(n) +
                         " non-root vertices exceeds the cap of " +
                         std::to_string(std::min(cap, 20)));
    const double total = inst.total_prob();
    const std::uint32_t full = (n == 0) ? 0 : ((1u << n) - 1);

    std::vector<double> g(full + 1, kInf);
    std::vector<std::int8_t> chosen(full + 1, -1);
    std::vector<double> mass(full + 1, 0.0);
    for (std::uint32_t m = 1; m <= full && n > 0; ++m) {
        int low = std::countr_zero(m);
        mass[m] = mass[m & (m - 1)] + inst.prob(low + 1);
    }
    g[0] = 0.0;

    auto min_connecting = [&](std::uint32_t visited, Vertex v) {
        double best = kInf;
        for (auto [w, id] : inst.neighbors(v)) {
            bool in = (w == Instance::root()) || (visited >> (w - 1)) & 1u;
            if (in) best = std::min(best, inst.edge(id).length);
        }
        return best;
    };

    for (std::uint32_t m = 0; m < full; ++m) {
        if (g[m] == kInf) continue;
        double pending = total - mass[m];
        for (Vertex v = 1; v <= n; ++v) {
            if ((m >> (v - 1)) & 1u) continue;
            double len = min_connecting(m, v);
            if (len == kInf) continue;
            std::uint32_t next = m | (1u << (v - 1));
            double cand = g[m] + len * pending;
            if (cand < g[next]) {
                g[next] = cand;
                chosen[next] = static_cast<std::int8_t>(v);
            }
        }
    }

    DpResult result;
    result.cost = g[full];
    std::vector<Vertex> order;
    for (std::uint32_t m = full; m != 0;) {
        Vertex v = chosen[m];
        order.push_back(v);
        m &= ~(1u << (v - 1));
    }
    std::reverse(order.begin(), order.end());

    std::uint32_t visited = 0;
    for (Vertex v : order) {
        // Recover the minimum connecting edge, smallest neighbor id on ties.
        double best = kInf;
        Vertex from = -1;
        for (auto [w, id] : inst.neighbors(v)) {
            bool in = (w == Instance::root()) || (visited >> (w - 1)) & 1u;
            if (in && (inst.edge(id).length < best ||
                       (inst.edge(id).length == best && w < from)))
                best = inst.edge(id).length, from = w;
        }
        result.search.steps.emplace_back(from, v);
        visited |= 1u << (v - 1);
    }
    return result;
}

void for_each_rooted_set(const Instance& inst,
                         const std::function<void(std::uint32_t)>& fn) {
    const int n = inst.non_root_count();
    if (n > 25) throw LimitError("rooted-set enumeration cap exceeded");
    const std::uint32_t full = (n == 0) ? 0 : ((1u << n) - 1);

    // Adjacency masks: bit k of nbr[v] is vertex k+1; root tracked separately.
    std::vector<std::uint32_t> nbr(n + 1, 0);
    std::vector<bool> root_adjacent(n + 1, false);
    for (const Edge& e : inst.edges()) {
        if (e.u == Instance::root())
            root_adjacent[e.v] = true;
        else if (e.v == Instance::root())
            root_adjacent[e.u] = true;
        else {
            nbr[e.u] |= 1u << (e.v - 1);
            nbr[e.v] |= 1u << (e.u - 1);
        }
    }

    for (std::uint32_t m = 1; m <= full; ++m) {
        // Connectivity of {root} + mask: flood from the root-adjacent members.
        std::uint32_t seed = 0;
        for (Vertex v = 1; v <= n; ++v)
            if (((m >> (v - 1)) & 1u) && root_adjacent[v]) seed |= 1u << (v - 1);
        if (seed == 0) continue;
        std::uint32_t reach = seed;
        for (;;) {
            std::uint32_t grown = reach;
            std::uint32_t scan = reach;
            while (scan) {
                int v = std::countr_zero(scan) + 1;
                scan &= scan - 1;
                grown |= nbr[v] & m;
            }
            if (grown == reach) break;
            reach = grown;
        }
        if (reach == m) fn(m);
    }
}

std::vector<int> induced_mst(const Instance& inst, std::uint32_t mask,
                             const std::vector<double>& lengths) {
    auto inside = [&](Vertex v) {
        return v == Instance::root() || ((mask >> (v - 1)) & 1u);
    };
    std::vector<int> ids;
    for (int id = 0; id < inst.edge_count(); ++id)
        if (inside(inst.edge(id).u) && inside(inst.edge(id).v)) ids.push_back(id);
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
        return lengths[a] < lengths[b] || (lengths[a] == lengths[b] && a < b);
    });
    Dsu dsu;
    dsu.init(inst.vertex_count());
    std::vector<int> tree;
    for (int id : ids)
        if (dsu.join(inst.edge(id).u, inst.edge(id).v)) tree.push_back(id);
    return tree;
}

DensityResult max_density_subtree_bruteforce(const Instance& inst, int cap) {
    const int n = inst.non_root_count();
    if (n > cap)
        throw LimitError("MDSP brute force refused: n=" + std::to_string(n) +
                         " exceeds cap " + std::to_string(cap));
    std::vector<double> lengths(inst.edge_count());
    for (int id = 0; id < inst.edge_count(); ++id) lengths[id] = inst.edge(id).length;

    double best_density = -1.0;
    std::vector<int> best_edges;
    for_each_rooted_set(inst, [&](std::uint32_t mask) {
        std::vector<int> tree = induced_mst(inst, mask, lengths);
        double length = 0.0, mass = 0.0;
        for (int id : tree) length += lengths[id];
        for (Vertex v = 1; v <= n; ++v)
            if ((mask >> (v - 1)) & 1u) mass += inst.prob(v);
        double density = mass / length;
        if (density > best_density) {
            best_density = density;
            best_edges = std::move(tree);
        }
    });
    if (best_density < 0.0) throw ValidationError("instance has no rooted subtree");
    return DensityResult{tree_from_edges(inst, best_edges), best_density};
}

PcstResult pcst_bruteforce(const Instance& inst, const std::vector<double>& lengths,
                           const std::vector<double>& penalties, int cap) {
    const int n = inst.non_root_count();
    if (n > cap)
        throw LimitError("PCST brute force refused: n=" + std::to_string(n) +
                         " exceeds cap " + std::to_string(cap));
    double all_penalties = 0.0;
    for (Vertex v = 1; v <= n; ++v) all_penalties += penalties[v];

    // Root-only tree is a candidate: pay every penalty.
    double best = all_penalties;
    std::vector<int> best_edges;
    for_each_rooted_set(inst, [&](std::uint32_t mask) {
        std::vector<int> tree = induced_mst(inst, mask, lengths);
        double objective = all_penalties;
        for (int id : tree) objective += lengths[id];
        for (Vertex v = 1; v <= n; ++v)
            if ((mask >> (v - 1)) & 1u) objective -= penalties[v];
        if (objective < best) {
            best = objective;
            best_edges = std::move(tree);
        }
    });
    RootedTree tree(inst.vertex_count());
    if (!best_edges.empty()) {
        tree = tree_from_edges(inst, best_edges);
        // Rebuild with the caller's lengths so total_length matches.
        RootedTree rebuilt(inst.vertex_count());
        for (Vertex v : tree.vertices()) {
            if (v == Instance::root()) continue;
            rebuilt.add_vertex(v, tree.parent(v), lengths[tree.parent_edge_id(v)],
                               tree.parent_edge_id(v));
        }
        tree = std::move(rebuilt);
    }
    return PcstResult{std::move(tree), best};
}

}  // namespace oracle
}  // namespace expsearch
