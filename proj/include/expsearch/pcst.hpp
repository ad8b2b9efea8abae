#pragma once

#include <vector>

#include "expsearch/graph.hpp"

namespace expsearch {

/// Rooted Goemans-Williamson prize-collecting Steiner tree. The root's
/// component never grows dual; active components deactivate when their
/// penalty budget is exhausted. Simultaneous events are processed edge-first,
/// ties among edges by smallest edge id. Satisfies
///   lambda(T) + (2 - 1/n) pen(V \ V[T]) <= (2 - 1/n) (lambda(T') + pen(V \ V[T']))
/// for every rooted tree T'.
RootedTree gw_pcst(const Instance& inst, const std::vector<double>& lengths,
                   const std::vector<double>& penalties);

/// Deterministic seed tree: union of shortest paths from the root to every
/// positive-probability vertex.
RootedTree initial_tree(const Instance& inst);

/// The epsilon of Corollary 1: 1/(2n - 1).
double default_epsilon(int non_root_count);

struct ParametricIteration {
    double alpha;        // at the loop head
    double beta;         // at the loop head
    double rho;          // the guess tested this iteration
    double incumbent_density;  // rho(T^s) at the loop head
};

struct ParametricResult {
    RootedTree tree;     // T^s
    double alpha = 0.0;  // final bracket
    double beta = 0.0;
    std::vector<ParametricIteration> trace;

    double density(const Instance& inst) const {
        return tree.total_prob(inst) / tree.total_length();
    }
};

/// Bisection on the density guess rho, testing each guess with a GW run on
/// rho-scaled lengths. Guarantees rho* <= (1+eps)(2 - 1/n) rho(T^s).
ParametricResult parametric_search(const Instance& inst, double epsilon);

}  // namespace expsearch
