#pragma once

#include <optional>
#include <span>
#include <string>

#include "gmesp/exact.hpp"

namespace gmesp {

// Eigenvector mass rounding: weight each index by its share of the top-t
// eigenvector mass of C and keep the s heaviest, ties toward the larger
// diagonal entry and then the smaller index.
Selection round_continuous(const SymMatrix& c, int s, int t);

// Forward greedy: grow from the empty set, each step adding the index whose
// augmented set has the best log-sum over its min(t, size) greatest
// eigenvalues. Ties keep the smallest index.
Selection greedy(const SymMatrix& c, int s, int t);

// Backward greedy: shrink from the full ground set, each step dropping the
// index whose reduced set scores best on the t greatest eigenvalues.
Selection dual_greedy(const SymMatrix& c, int s, int t);

// First-improvement 1-swap descent from s0, scanning exits and entries in
// index order and restarting after each accepted swap. A swap must beat the
// incumbent by more than 1e-10 to be taken.
Selection local_search(const SymMatrix& c, const Selection& s0, int t);

// Best binary selection under the linear proxy objective x_hat . x, subject
// to the instance constraints: depth-first search ordered by descending
// proxy weight, pruned by the cardinality-relaxation bound and by exact
// minimum-completion feasibility sums. Returns nullopt when no feasible
// selection exists.
std::optional<Selection> ilp_round(std::span<const double> x_hat, const Instance& inst);

struct HeuristicReport {
    Selection best;
    std::string method;
    bool improved_by_local_search = false;
};

// Runs every constructor that applies, local-searches each result on
// unconstrained instances, discards anything infeasible, and keeps the best
// value (first method wins ties). relax_point, when given, feeds ilp_round.
HeuristicReport best_heuristic(const Instance& inst,
                               std::span<const double> relax_point = {});

}  // namespace gmesp
