#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "gmesp/gamma.hpp"
#include "gmesp/instance.hpp"

namespace gmesp {

// Fractional feasible region {x : e.x = s, A x <= b, l <= x <= c}.
struct Polytope {
    int s = 0;
    BoxBounds box;
    Matrix A;               // empty when unconstrained
    std::vector<double> b;

    static Polytope from(const Instance& inst, BoxBounds box) {
        return Polytope{inst.s, std::move(box), inst.A, inst.b};
    }

    int n() const { return box.n(); }
    int m() const { return static_cast<int>(b.size()); }
};

// Vertex maximizing g . x. Unconstrained regions reduce to a greedy fill of
// the free coordinates in descending-g order; with side constraints the
// problem is handed to the two-phase simplex on the slack form. Returns
// nullopt when the region is empty.
std::optional<std::vector<double>> lp_oracle(std::span<const double> g, const Polytope& p);

enum class RelaxStatus {
    ok,
    infeasible,       // the continuous region is empty
    no_finite_start,  // every sampled start had rank below t
};

struct RelaxOptions {
    double tol = 1e-6;
    int max_iters = 5000;
    std::uint64_t seed = 0x9e3779b97f4a7c15ULL;  // start-vertex sampling only
    bool record_history = false;
};

struct RelaxResult {
    RelaxStatus status = RelaxStatus::ok;
    std::vector<double> x_hat;
    double value = neg_infinity;
    double fw_gap = 0.0;
    int iterations = 0;
    std::vector<double> history;  // accepted values when recorded
};

// Maximizes the concave surrogate over the polytope with away-step
// Frank-Wolfe and golden-section line search. Accepted iterates never
// decrease the objective; at return fw_gap is the linearized gap
// max_v g(x).(v - x) at x_hat. An optional warm point is clamped into the
// box and budget-repaired (unconstrained regions only).
RelaxResult solve_ddgfact(const Factor& f, const Polytope& p, int t,
                          const RelaxOptions& opts = {},
                          std::span<const double> warm = {});

// Convenience wrapper: factorizes C (pivoted Cholesky) and solves over the
// full unit box of the instance.
RelaxResult solve_ddgfact(const Instance& inst, const RelaxOptions& opts = {});

}  // namespace gmesp
