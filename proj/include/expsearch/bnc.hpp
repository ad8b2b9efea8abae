#pragma once

#include <optional>
#include <vector>

#include "expsearch/graph.hpp"
#include "expsearch/lp.hpp"

namespace expsearch {
namespace bnc {

struct Arc {
    Vertex from, to;
    int edge_id;
};

/// Column layout of the relaxation. Arcs into the root are omitted: no
/// search travels into the root, minimization drives their y to zero, and no
/// directed cut C(S) with r in S contains them.
struct MipIndex {
    int n_total = 0;
    std::vector<Arc> arcs;
    std::vector<std::vector<int>> delta;  // delta[i][j], -1 on the diagonal
    std::vector<int> z;
    std::vector<int> x, y;  // per arc
};

struct RelaxationConfig {
    bool inflow_strengthening = true;  // the z_j >= p_j + y_jk rows
    int full_triangle_max_n = 0;       // materialize all triangle rows up to this
                                       // vertex count; otherwise separate lazily
};

struct Relaxation {
    lp::LpModel model;
    MipIndex index;
};

/// Objective, degree/flow coupling, ordering rows and bounds of the mixed
/// integer program's LP relaxation.
Relaxation build_relaxation(const Instance& inst, const RelaxationConfig& config = {});

enum class CutFamily { C1, C2 };

struct Cut {
    CutFamily family;
    std::vector<bool> s_side;  // root side S
    Vertex k = -1;             // target vertex (C1 only)
    lp::Row row;
    double violation = 0.0;
};

/// Directed-cut separation: one min-cut per target vertex k with positive z.
std::vector<Cut> separate_c1(const Instance& inst, const MipIndex& index,
                             const std::vector<double>& values);

/// Residual-mass separation via a dummy sink collecting each vertex's
/// probability; at most one cut.
std::vector<Cut> separate_c2(const Instance& inst, const MipIndex& index,
                             const std::vector<double>& values);

/// Most violated ordering triangles, at most `limit`.
std::vector<lp::Row> violated_triangles(const MipIndex& index,
                                        const std::vector<double>& values, int limit);

struct CutSelection {
    bool c1 = true;
    bool c2 = true;
};

struct CutCounters {
    long c1 = 0, c2 = 0, triangle = 0;
};

/// Deduplication of (family, S, k) across a whole solve.
class CutPool {
public:
    bool insert(const Cut& cut);

private:
    std::vector<std::vector<bool>> seen_keys_;  // flattened keys, linear scan
    std::vector<long> hashes_;
};

struct CuttingPlaneResult {
    lp::LpSolution solution;
    bool infeasible = false;
    int rounds = 0;
};

/// Solve / separate (C1, then C2, then triangles) / add rows, until no
/// violation remains or the objective stalls for three rounds.
CuttingPlaneResult cutting_plane_loop(const Instance& inst, Relaxation& relax,
                                      const CutSelection& selection, CutPool& pool,
                                      lp::Basis& warm, CutCounters& counters,
                                      double deadline_s = -1.0);

struct SolveOptions {
    double time_limit_s = 1200.0;  // the paper's 20-minute default
    double epsilon = -1.0;         // greedy epsilon; -1 picks 1/(2n-1)
    bool warm_start = true;
    std::optional<ExpandingSearch> incumbent;
};

struct SolveReport {
    double upper_bound = 0.0;
    ExpandingSearch incumbent;
    double lower_bound = 0.0;
    double gap = 0.0;  // (UB - LB) / UB
    long nodes = 0;
    long cuts_c1 = 0, cuts_c2 = 0, cuts_triangle = 0;
    double wall_ms = 0.0;
    bool proved_optimal = false;
};

/// Exact solver: best-bound branch and bound on arcs over the cutting-plane
/// relaxation; integral nodes are evaluated combinatorially.
SolveReport branch_and_cut(const Instance& inst, const SolveOptions& options = {});

enum class CutConfig { None, C1, C2, C1C2 };

/// Root cutting-plane bound under the selected cut families. The C2
/// configurations include the static strengthening rows.
double lp_lower_bound(const Instance& inst, CutConfig config);

/// The tree linear program: ordering variables and arrival probabilities
/// over the arcs of a spanning-tree instance.
lp::LpModel build_tree_lp(const Instance& inst);
double tree_lp_optimum(const Instance& inst);

/// Column values induced by a feasible search (for validity checks).
std::vector<double> integral_point(const Instance& inst, const MipIndex& index,
                                   const ExpandingSearch& search);

}  // namespace bnc
}  // namespace expsearch
