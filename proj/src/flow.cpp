#include "expsearch/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace expsearch {

namespace {
constexpr double kResidualEps = 1e-12;
}

FlowNetwork::FlowNetwork(int n) : out(n) {
    if (n <= 0) throw ValidationError("flow network needs at least one vertex");
}

int FlowNetwork::add_arc(Vertex from, Vertex to, double capacity) {
    if (from < 0 || from >= vertex_count() || to < 0 || to >= vertex_count())
        throw ValidationError("arc endpoint out of range");
    if (!(capacity >= 0.0) || !std::isfinite(capacity))
        throw ValidationError("arc capacity must be finite and non-negative");
    int id = static_cast<int>(arcs.size());
    arcs.push_back(Arc{to, capacity});
    tail.push_back(from);
    out[from].push_back(id);
    arcs.push_back(Arc{from, 0.0});
    tail.push_back(to);
    out[to].push_back(id + 1);
    return id;
}

MaxFlowResult max_flow_min_cut(FlowNetwork net, Vertex source, Vertex sink) {
    const int n = net.vertex_count();
    if (source < 0 || source >= n || sink < 0 || sink >= n || source == sink)
        throw ValidationError("invalid source/sink");

    std::vector<double> original_cap(net.arcs.size());
    for (size_t i = 0; i < net.arcs.size(); ++i) original_cap[i] = net.arcs[i].cap;

    std::vector<int> parent_arc(n);
    auto bfs = [&]() {
        std::fill(parent_arc.begin(), parent_arc.end(), -1);
        parent_arc[source] = -2;
        std::queue<Vertex> q;
        q.push(source);
        while (!q.empty()) {
            Vertex u = q.front();
            q.pop();
            for (int id : net.out[u]) {
                Vertex v = net.arcs[id].to;
                if (parent_arc[v] == -1 && net.arcs[id].cap > kResidualEps) {
                    parent_arc[v] = id;
                    if (v == sink) return true;
                    q.push(v);
                }
            }
        }
        return false;
    };

    while (bfs()) {
        double bottleneck = std::numeric_limits<double>::infinity();
        for (Vertex v = sink; v != source;) {
            int id = parent_arc[v];
            bottleneck = std::min(bottleneck, net.arcs[id].cap);
            v = net.tail[id];
        }
        for (Vertex v = sink; v != source;) {
            int id = parent_arc[v];
            net.arcs[id].cap -= bottleneck;
            net.arcs[id ^ 1].cap += bottleneck;
            v = net.tail[id];
        }
    }

    MaxFlowResult result;
    result.source_side.assign(n, false);
    result.source_side[source] = true;
    std::queue<Vertex> q;
    q.push(source);
    while (!q.empty()) {
        Vertex u = q.front();
        q.pop();
        for (int id : net.out[u]) {
            Vertex v = net.arcs[id].to;
            if (!result.source_side[v] && net.arcs[id].cap > kResidualEps) {
                result.source_side[v] = true;
                q.push(v);
            }
        }
    }
    // Reporting the cut's capacity keeps flow == cut exact.
    double cut_capacity = 0.0;
    for (size_t id = 0; id < net.arcs.size(); ++id)
        if (result.source_side[net.tail[id]] && !result.source_side[net.arcs[id].to])
            cut_capacity += original_cap[id];
    result.flow = cut_capacity;
    return result;
}

}  // namespace expsearch
