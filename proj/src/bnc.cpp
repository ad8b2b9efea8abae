#include "expsearch/bnc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>

#include "expsearch/flow.hpp"
#include "expsearch/greedy.hpp"
#include "expsearch/local_search.hpp"
#include "expsearch/tree_sequencer.hpp"

namespace expsearch {
namespace bnc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCutViolationTol = 1e-7;
constexpr double kIntegralityTol = 1e-6;
constexpr double kObjectiveTol = 1e-9;
constexpr int kMaxCutsPerRound = 50;

double now_s() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

}  // namespace

Relaxation build_relaxation(const Instance& inst, const RelaxationConfig& config) {
    const int n_total = inst.vertex_count();
    Relaxation relax;
    MipIndex& ix = relax.index;
    lp::LpModel& model = relax.model;
    ix.n_total = n_total;

    for (int id = 0; id < inst.edge_count(); ++id) {
        const Edge& e = inst.edge(id);
        if (e.v != Instance::root()) ix.arcs.push_back(Arc{e.u, e.v, id});
        if (e.u != Instance::root()) ix.arcs.push_back(Arc{e.v, e.u, id});
    }

    ix.delta.assign(n_total, std::vector<int>(n_total, -1));
    for (int i = 0; i < n_total; ++i)
        for (int j = 0; j < n_total; ++j)
            if (i != j) ix.delta[i][j] = model.add_column(0.0, 1.0, 0.0);
    ix.z.resize(n_total);
    for (int i = 0; i < n_total; ++i) ix.z[i] = model.add_column(0.0, 1.0, 0.0);
    for (size_t a = 0; a < ix.arcs.size(); ++a)
        ix.x.push_back(model.add_column(0.0, 1.0, 0.0));
    for (size_t a = 0; a < ix.arcs.size(); ++a)
        ix.y.push_back(model.add_column(0.0, 1.0, inst.edge(ix.arcs[a].edge_id).length));

    // delta_ij + delta_ji = 1
    for (int i = 0; i < n_total; ++i)
        for (int j = i + 1; j < n_total; ++j)
            model.add_row({{ix.delta[i][j], 1.0}, {ix.delta[j][i], 1.0}}, lp::Sense::EQ,
                          1.0);

    if (n_total <= config.full_triangle_max_n) {
        for (int i = 0; i < n_total; ++i)
            for (int j = i + 1; j < n_total; ++j)
                for (int k = j + 1; k < n_total; ++k) {
                    model.add_row({{ix.delta[i][j], 1.0},
                                   {ix.delta[j][k], 1.0},
                                   {ix.delta[k][i], 1.0}},
                                  lp::Sense::GE, 1.0);
                    model.add_row({{ix.delta[i][k], 1.0},
                                   {ix.delta[k][j], 1.0},
                                   {ix.delta[j][i], 1.0}},
                                  lp::Sense::GE, 1.0);
                }
    }

    // p_i + sum_j p_j delta_ij = z_i
    for (int i = 0; i < n_total; ++i) {
        std::vector<lp::RowCoef> coefs;
        for (int j = 0; j < n_total; ++j)
            if (j != i && inst.prob(j) != 0.0)
                coefs.push_back({ix.delta[i][j], inst.prob(j)});
        coefs.push_back({ix.z[i], -1.0});
        model.add_row(std::move(coefs), lp::Sense::EQ, -inst.prob(i));
    }

    // One in-arc per non-root vertex; inflow matches the arrival probability.
    for (Vertex j = 1; j < n_total; ++j) {
        std::vector<lp::RowCoef> deg, flow;
        for (size_t a = 0; a < ix.arcs.size(); ++a) {
            if (ix.arcs[a].to != j) continue;
            deg.push_back({ix.x[a], 1.0});
            flow.push_back({ix.y[a], 1.0});
        }
        model.add_row(std::move(deg), lp::Sense::EQ, 1.0);
        flow.push_back({ix.z[j], -1.0});
        model.add_row(std::move(flow), lp::Sense::EQ, 0.0);
    }

    // 0 <= y <= x <= delta
    for (size_t a = 0; a < ix.arcs.size(); ++a) {
        model.add_row({{ix.y[a], 1.0}, {ix.x[a], -1.0}}, lp::Sense::LE, 0.0);
        model.add_row({{ix.x[a], 1.0}, {ix.delta[ix.arcs[a].from][ix.arcs[a].to], -1.0}},
                      lp::Sense::LE, 0.0);
    }

    // z_j >= p_j + y_jk, the strengthened residual-mass rows
    if (config.inflow_strengthening) {
        for (size_t a = 0; a < ix.arcs.size(); ++a) {
            Vertex j = ix.arcs[a].from;
            model.add_row({{ix.z[j], 1.0}, {ix.y[a], -1.0}}, lp::Sense::GE,
                          inst.prob(j));
        }
    }
    return relax;
}

namespace {

lp::Row cut_row_from_side(const MipIndex& ix, const std::vector<bool>& s_side,
                          Vertex k, double rhs) {
    lp::Row row;
    for (size_t a = 0; a < ix.arcs.size(); ++a)
        if (s_side[ix.arcs[a].from] && !s_side[ix.arcs[a].to])
            row.coefs.push_back({ix.y[a], 1.0});
    if (k >= 0) row.coefs.push_back({ix.z[k], -1.0});
    row.sense = lp::Sense::GE;
    row.rhs = rhs;
    return row;
}

}  // namespace

std::vector<Cut> separate_c1(const Instance&, const MipIndex& ix,
                             const std::vector<double>& values) {
    std::vector<Cut> cuts;
    for (Vertex k = 1; k < ix.n_total; ++k) {
        double zk = values[ix.z[k]];
        if (zk <= kCutViolationTol) continue;
        FlowNetwork net(ix.n_total);
        for (size_t a = 0; a < ix.arcs.size(); ++a)
            net.add_arc(ix.arcs[a].from, ix.arcs[a].to,
                        std::max(values[ix.y[a]], 0.0));
        MaxFlowResult mf = max_flow_min_cut(std::move(net), Instance::root(), k);
        if (mf.flow < zk - kCutViolationTol) {
            Cut cut;
            cut.family = CutFamily::C1;
            cut.s_side = mf.source_side;
            cut.k = k;
            cut.violation = zk - mf.flow;
            cut.row = cut_row_from_side(ix, cut.s_side, k, 0.0);
            cuts.push_back(std::move(cut));
        }
    }
    return cuts;
}

std::vector<Cut> separate_c2(const Instance& inst, const MipIndex& ix,
                             const std::vector<double>& values) {
    const int n_total = ix.n_total;
    const Vertex sink = n_total;
    FlowNetwork net(n_total + 1);
    for (size_t a = 0; a < ix.arcs.size(); ++a)
        net.add_arc(ix.arcs[a].from, ix.arcs[a].to, std::max(values[ix.y[a]], 0.0));
    for (Vertex i = 0; i < n_total; ++i)
        if (inst.prob(i) > 0.0) net.add_arc(i, sink, inst.prob(i));
    MaxFlowResult mf = max_flow_min_cut(std::move(net), Instance::root(), sink);
    std::vector<Cut> cuts;
    if (mf.flow < inst.total_prob() - kCutViolationTol) {
        Cut cut;
        cut.family = CutFamily::C2;
        cut.s_side.assign(mf.source_side.begin(), mf.source_side.begin() + n_total);
        double outside_mass = 0.0;
        for (Vertex i = 0; i < n_total; ++i)
            if (!cut.s_side[i]) outside_mass += inst.prob(i);
        cut.violation = inst.total_prob() - mf.flow;
        cut.row = cut_row_from_side(ix, cut.s_side, -1, outside_mass);
        cuts.push_back(std::move(cut));
    }
    return cuts;
}

std::vector<lp::Row> violated_triangles(const MipIndex& ix,
                                        const std::vector<double>& values, int limit) {
    struct Candidate {
        double violation;
        int i, j, k;
    };
    std::vector<Candidate> found;
    const int n = ix.n_total;
    auto d = [&](int a, int b) { return values[ix.delta[a][b]]; };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                double lhs1 = d(i, j) + d(j, k) + d(k, i);
                if (lhs1 < 1.0 - kCutViolationTol)
                    found.push_back({1.0 - lhs1, i, j, k});
                double lhs2 = d(i, k) + d(k, j) + d(j, i);
                if (lhs2 < 1.0 - kCutViolationTol)
                    found.push_back({1.0 - lhs2, i, k, j});
            }
    std::stable_sort(found.begin(), found.end(), [](const Candidate& a,
                                                    const Candidate& b) {
        return a.violation > b.violation;
    });
    if (static_cast<int>(found.size()) > limit) found.resize(limit);
    std::vector<lp::Row> rows;
    for (const Candidate& c : found)
        rows.push_back(lp::Row{{{ix.delta[c.i][c.j], 1.0},
                                {ix.delta[c.j][c.k], 1.0},
                                {ix.delta[c.k][c.i], 1.0}},
                               lp::Sense::GE,
                               1.0});
    return rows;
}

bool CutPool::insert(const Cut& cut) {
    long h = cut.family == CutFamily::C1 ? 1 : 2;
    h = h * 131 + cut.k;
    for (size_t i = 0; i < cut.s_side.size(); ++i)
        if (cut.s_side[i]) h = h * 1000003 + static_cast<long>(i);
    for (size_t i = 0; i < hashes_.size(); ++i) {
        if (hashes_[i] != h) continue;
        if (seen_keys_[i] == cut.s_side) return false;
    }
    hashes_.push_back(h);
    seen_keys_.push_back(cut.s_side);
    return true;
}

CuttingPlaneResult cutting_plane_loop(const Instance& inst, Relaxation& relax,
                                      const CutSelection& selection, CutPool& pool,
                                      lp::Basis& warm, CutCounters& counters,
                                      double deadline_s) {
    CuttingPlaneResult result;
    double last_obj = -kInf;
    int stall = 0;
    for (;;) {
        lp::LpSolution sol = lp::solve(relax.model, warm.empty() ? nullptr : &warm);
        if (sol.status == lp::Status::Infeasible) {
            result.infeasible = true;
            result.solution = std::move(sol);
            return result;
        }
        if (sol.status != lp::Status::Optimal)
            throw Error("cutting-plane LP hit its iteration limit");
        warm = sol.basis;
        ++result.rounds;

        std::vector<lp::Row> to_add;
        if (selection.c1) {
            for (Cut& cut : separate_c1(inst, relax.index, sol.values)) {
                if (static_cast<int>(to_add.size()) >= kMaxCutsPerRound) break;
                if (!pool.insert(cut)) continue;
                to_add.push_back(std::move(cut.row));
                ++counters.c1;
            }
        }
        if (selection.c2 && static_cast<int>(to_add.size()) < kMaxCutsPerRound) {
            for (Cut& cut : separate_c2(inst, relax.index, sol.values)) {
                if (!pool.insert(cut)) continue;
                to_add.push_back(std::move(cut.row));
                ++counters.c2;
            }
        }
        if (static_cast<int>(to_add.size()) < kMaxCutsPerRound) {
            std::vector<lp::Row> tri = violated_triangles(
                relax.index, sol.values,
                kMaxCutsPerRound - static_cast<int>(to_add.size()));
            counters.triangle += static_cast<long>(tri.size());
            for (lp::Row& r : tri) to_add.push_back(std::move(r));
        }

        if (to_add.empty()) {
            result.solution = std::move(sol);
            return result;
        }
        stall = sol.objective - last_obj < kObjectiveTol ? stall + 1 : 0;
        last_obj = sol.objective;
        if (stall >= 3) {
            result.solution = std::move(sol);
            return result;
        }
        relax.model.add_rows(to_add);
        if (deadline_s > 0 && now_s() > deadline_s) {
            result.solution = std::move(sol);
            return result;
        }
    }
}

lp::LpModel build_tree_lp(const Instance& inst) {
    if (inst.edge_count() != inst.non_root_count())
        throw ValidationError("tree LP needs a spanning-tree instance");
    std::vector<int> ids(inst.edge_count());
    for (int i = 0; i < inst.edge_count(); ++i) ids[i] = i;
    RootedTree tree = tree_from_edges(inst, ids);

    const int n_total = inst.vertex_count();
    lp::LpModel model;
    std::vector<std::vector<int>> delta(n_total, std::vector<int>(n_total, -1));
    for (int i = 0; i < n_total; ++i)
        for (int j = 0; j < n_total; ++j)
            if (i != j) delta[i][j] = model.add_column(0.0, 1.0, 0.0);
    std::vector<int> z(n_total);
    for (Vertex i = 0; i < n_total; ++i)
        z[i] = model.add_column(0.0, 1.0,
                                i == Instance::root() ? 0.0 : tree.parent_length(i));

    for (int i = 0; i < n_total; ++i)
        for (int j = i + 1; j < n_total; ++j)
            model.add_row({{delta[i][j], 1.0}, {delta[j][i], 1.0}}, lp::Sense::EQ, 1.0);
    for (int i = 0; i < n_total; ++i)
        for (int j = i + 1; j < n_total; ++j)
            for (int k = j + 1; k < n_total; ++k) {
                model.add_row(
                    {{delta[i][j], 1.0}, {delta[j][k], 1.0}, {delta[k][i], 1.0}},
                    lp::Sense::GE, 1.0);
                model.add_row(
                    {{delta[i][k], 1.0}, {delta[k][j], 1.0}, {delta[j][i], 1.0}},
                    lp::Sense::GE, 1.0);
            }
    // Precedence: parent before child along every tree arc.
    for (Vertex v = 1; v < n_total; ++v)
        model.set_bounds(delta[tree.parent(v)][v], 1.0, 1.0);
    for (int i = 0; i < n_total; ++i) {
        std::vector<lp::RowCoef> coefs;
        for (int j = 0; j < n_total; ++j)
            if (j != i && inst.prob(j) != 0.0) coefs.push_back({delta[i][j], inst.prob(j)});
        coefs.push_back({z[i], -1.0});
        model.add_row(std::move(coefs), lp::Sense::EQ, -inst.prob(i));
    }
    return model;
}

double tree_lp_optimum(const Instance& inst) {
    lp::LpModel model = build_tree_lp(inst);
    lp::LpSolution sol = lp::solve(model);
    if (sol.status != lp::Status::Optimal) throw Error("tree LP did not solve");
    return sol.objective;
}

std::vector<double> integral_point(const Instance& inst, const MipIndex& ix,
                                   const ExpandingSearch& search) {
    const int n_total = inst.vertex_count();
    std::vector<int> position(n_total, -1);
    position[Instance::root()] = 0;
    std::vector<std::pair<Vertex, Vertex>> oriented;  // (from, to) per step
    {
        std::vector<bool> visited(n_total, false);
        visited[Instance::root()] = true;
        int pos = 1;
        for (auto [a, b] : search.steps) {
            Vertex from = visited[a] ? a : b;
            Vertex to = visited[a] ? b : a;
            oriented.emplace_back(from, to);
            position[to] = pos++;
            visited[to] = true;
        }
    }
    int columns = static_cast<int>(ix.y.back()) + 1;
    std::vector<double> v(columns, 0.0);
    for (int i = 0; i < n_total; ++i)
        for (int j = 0; j < n_total; ++j)
            if (i != j) v[ix.delta[i][j]] = position[i] < position[j] ? 1.0 : 0.0;
    for (int i = 0; i < n_total; ++i) {
        double zi = 0.0;
        for (int j = 0; j < n_total; ++j)
            if (position[j] >= position[i]) zi += inst.prob(j);
        v[ix.z[i]] = zi;
    }
    for (auto [from, to] : oriented) {
        for (size_t a = 0; a < ix.arcs.size(); ++a) {
            if (ix.arcs[a].from == from && ix.arcs[a].to == to) {
                v[ix.x[a]] = 1.0;
                v[ix.y[a]] = v[ix.z[to]];
            }
        }
    }
    return v;
}

namespace {

struct Node {
    double bound;
    int depth;
    long id;
    std::vector<std::pair<int, bool>> decisions;  // (arc index, fixed to one)

    bool operator>(const Node& o) const {
        if (bound != o.bound) return bound > o.bound;
        if (depth != o.depth) return depth < o.depth;
        return id > o.id;
    }
};

// Arcs at x=1 into a rooted tree; empty optional when they do not form one.
std::optional<RootedTree> extract_tree(const Instance& inst, const MipIndex& ix,
                                       const std::vector<double>& values) {
    const int n_total = inst.vertex_count();
    std::vector<int> in_arc(n_total, -1);
    for (size_t a = 0; a < ix.arcs.size(); ++a) {
        if (values[ix.x[a]] < 0.5) continue;
        if (in_arc[ix.arcs[a].to] >= 0) return std::nullopt;
        in_arc[ix.arcs[a].to] = static_cast<int>(a);
    }
    RootedTree tree(n_total);
    std::vector<Vertex> frontier{Instance::root()};
    std::vector<std::vector<Vertex>> children(n_total);
    for (Vertex v = 1; v < n_total; ++v) {
        if (in_arc[v] < 0) return std::nullopt;
        children[ix.arcs[in_arc[v]].from].push_back(v);
    }
    while (!frontier.empty()) {
        Vertex u = frontier.back();
        frontier.pop_back();
        for (Vertex v : children[u]) {
            const Arc& a = ix.arcs[in_arc[v]];
            tree.add_vertex(v, u, inst.edge(a.edge_id).length, a.edge_id);
            frontier.push_back(v);
        }
    }
    if (!tree.spans(inst)) return std::nullopt;
    return tree;
}

bool is_integral(const MipIndex& ix, const std::vector<double>& values) {
    for (int col : ix.x) {
        double x = values[col];
        if (std::min(x, 1.0 - x) > kIntegralityTol) return false;
    }
    return true;
}

}  // namespace

SolveReport branch_and_cut(const Instance& inst, const SolveOptions& options) {
    const double start = now_s();
    const double deadline = start + options.time_limit_s;
    SolveReport report;

    Relaxation relax = build_relaxation(inst, RelaxationConfig{});
    CutPool pool;
    CutCounters counters;
    lp::Basis warm;

    double ub = kInf;
    ExpandingSearch best_search;
    if (options.incumbent) {
        ub = search_cost(inst, *options.incumbent);
        best_search = *options.incumbent;
    } else if (options.warm_start) {
        GreedyResult greedy = greedy_search(inst, options.epsilon);
        MetricClosure closure = metric_closure(inst);
        std::vector<int> closure_ids;
        for (auto [a, b] : greedy.search.steps)
            closure_ids.push_back(closure.graph.find_edge(a, b));
        LocalSearchResult ls = edge_swap_local_search(
            inst, closure, tree_from_edges(closure.graph, closure_ids));
        if (ls.cost <= greedy.cost) {
            ub = ls.cost;
            best_search = ls.search;
        } else {
            ub = greedy.cost;
            best_search = greedy.search;
        }
    }

    auto prune_threshold = [&]() {
        return ub - kObjectiveTol * std::max(1.0, std::abs(ub));
    };

    std::priority_queue<Node, std::vector<Node>, std::greater<Node>> open;
    long next_id = 0;
    open.push(Node{-kInf, 0, next_id++, {}});
    double lb_at_timeout = -kInf;
    bool timed_out = false;

    while (!open.empty()) {
        if (now_s() > deadline) {
            timed_out = true;
            lb_at_timeout = open.top().bound;
            break;
        }
        Node node = open.top();
        open.pop();
        if (node.bound >= prune_threshold()) {
            // Best-bound order: every remaining node is fathomed too.
            break;
        }

        // Apply the node's arc fixings.
        for (int col : relax.index.x) relax.model.set_bounds(col, 0.0, 1.0);
        for (auto [arc, one] : node.decisions)
            relax.model.set_bounds(relax.index.x[arc], one ? 1.0 : 0.0,
                                   one ? 1.0 : 0.0);

        CuttingPlaneResult cpl = cutting_plane_loop(inst, relax, CutSelection{}, pool,
                                                    warm, counters, deadline);
        ++report.nodes;
        if (cpl.infeasible) continue;
        double bound = std::max(node.bound, cpl.solution.objective);
        if (bound >= prune_threshold()) continue;

        if (is_integral(relax.index, cpl.solution.values)) {
            std::optional<RootedTree> tree =
                extract_tree(inst, relax.index, cpl.solution.values);
            int repairs = 0;
            while (!tree && repairs < 50) {
                // Integral x that is not an arborescence implies a violated
                // ordering triangle; add and re-solve.
                std::vector<lp::Row> tri =
                    violated_triangles(relax.index, cpl.solution.values, kMaxCutsPerRound);
                if (tri.empty()) break;
                counters.triangle += static_cast<long>(tri.size());
                relax.model.add_rows(tri);
                cpl = cutting_plane_loop(inst, relax, CutSelection{}, pool, warm,
                                         counters, deadline);
                ++repairs;
                if (cpl.infeasible) break;
                if (!is_integral(relax.index, cpl.solution.values)) break;
                tree = extract_tree(inst, relax.index, cpl.solution.values);
            }
            if (cpl.infeasible) continue;
            if (tree) {
                TreeSearchResult seq = optimal_tree_search(inst, *tree);
                if (seq.cost < ub - kObjectiveTol) {
                    ub = seq.cost;
                    best_search = seq.search;
                }
                continue;
            }
            bound = std::max(bound, cpl.solution.objective);
            if (bound >= prune_threshold()) continue;
            if (is_integral(relax.index, cpl.solution.values))
                throw Error("integral node could not be interpreted as a tree");
        }

        // Branch on the most fractional arc, smallest index on ties.
        int branch_arc = -1;
        double best_frac = kIntegralityTol;
        for (size_t a = 0; a < relax.index.arcs.size(); ++a) {
            double x = cpl.solution.values[relax.index.x[a]];
            double frac = std::min(x, 1.0 - x);
            if (frac > best_frac) {
                best_frac = frac;
                branch_arc = static_cast<int>(a);
            }
        }
        if (branch_arc < 0) throw Error("no fractional arc to branch on");
        for (bool one : {true, false}) {
            Node child;
            child.bound = bound;
            child.depth = node.depth + 1;
            child.id = next_id++;
            child.decisions = node.decisions;
            child.decisions.emplace_back(branch_arc, one);
            open.push(std::move(child));
        }
    }

    report.upper_bound = ub;
    report.incumbent = best_search;
    if (timed_out) {
        report.lower_bound = std::min(lb_at_timeout, ub);
        report.proved_optimal = false;
    } else {
        report.lower_bound = ub;
        report.proved_optimal = ub < kInf;
    }
    if (report.lower_bound == -kInf) report.lower_bound = 0.0;
    report.gap = ub > 0 && ub < kInf
                     ? std::clamp((ub - report.lower_bound) / ub, 0.0, 1.0)
                     : (report.proved_optimal ? 0.0 : 1.0);
    report.cuts_c1 = counters.c1;
    report.cuts_c2 = counters.c2;
    report.cuts_triangle = counters.triangle;
    report.wall_ms = (now_s() - start) * 1000.0;
    return report;
}

double lp_lower_bound(const Instance& inst, CutConfig config) {
    RelaxationConfig rconfig;
    rconfig.inflow_strengthening =
        config == CutConfig::C2 || config == CutConfig::C1C2;
    Relaxation relax = build_relaxation(inst, rconfig);
    CutSelection selection;
    selection.c1 = config == CutConfig::C1 || config == CutConfig::C1C2;
    selection.c2 = config == CutConfig::C2 || config == CutConfig::C1C2;
    CutPool pool;
    CutCounters counters;
    lp::Basis warm;
    CuttingPlaneResult cpl =
        cutting_plane_loop(inst, relax, selection, pool, warm, counters);
    if (cpl.infeasible) throw Error("root relaxation infeasible");
    return cpl.solution.objective;
}

}  // namespace bnc
}  // namespace expsearch
