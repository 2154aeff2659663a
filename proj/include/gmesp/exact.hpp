#pragma once

#include <span>
#include <vector>

#include "gmesp/gamma.hpp"
#include "gmesp/instance.hpp"

namespace gmesp {

// A candidate answer: ascending 0-based indices and the objective value.
// value is -infinity for infeasible or rank-deficient selections; every
// comparison already orders that below any finite value.
struct Selection {
    std::vector<int> indices;
    double value = neg_infinity;
};

// Log-sum of the t greatest eigenvalues of C[S,S]; -infinity when the t-th
// one falls inside the rank cutoff. S ascending, 0-based.
double exact_objective(const SymMatrix& c, std::span<const int> sel, int t);

// Exhaustive optimum over all feasible s-subsets, ties broken toward the
// lexicographically smallest index set. Refuses n > 22. The unqualified
// version walks disjoint chunks of the enumeration in parallel and merges
// per-thread bests with the same tie-break, so it returns exactly the
// serial answer.
Selection brute_force(const Instance& inst);
Selection brute_force_serial(const Instance& inst);

// Same search restricted to selections inside a 0/1 box.
Selection brute_force_in_box(const Instance& inst, const BoxBounds& box);

// Helpers shared with the enumeration tools: C(n,k) and the combination at a
// given lexicographic rank.
unsigned long long binomial(int n, int k);
std::vector<int> combination_at(int n, int k, unsigned long long rank);

}  // namespace gmesp
