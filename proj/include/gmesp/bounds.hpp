#pragma once

#include <span>

#include "gmesp/gamma.hpp"
#include "gmesp/instance.hpp"
#include "gmesp/relax.hpp"

namespace gmesp {

// Log-sum of the t greatest eigenvalues of the whole matrix. Every feasible
// selection's objective sits below this by eigenvalue interlacing.
double spectral_bound(const SymMatrix& c, int t);

// Lagrangian form of the spectral bound: constraints are priced into a
// diagonal scaling D(pi) = Diag(exp(-0.5 * pi . a_j)), giving
//   v(pi) = logsum_t(D C D) + pi . b - min over (s-t)-subsets of the priced
//           column costs,
// an upper bound for every pi >= 0. Exposed for weak-duality checks.
double lagrangian_value(const Instance& inst, std::span<const double> pi);

// min over pi >= 0 of v(pi), by 200 projected subgradient steps with step
// size 1/(10+k) and best-value tracking. Collapses to spectral_bound when
// the instance has no side constraints.
double lagrangian_spectral_bound(const Instance& inst);

struct certification_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Feasible point of the dual program built from the spectrum at x_hat.
// zeta is its objective value: a valid upper bound on every selection in
// the box, whatever x_hat was. upsilon/nu price the lower/upper coordinate
// bounds, pi the side constraints, tau the budget row.
struct DualCertificate {
    SymMatrix theta;  // k x k, positive definite
    std::vector<double> upsilon, nu, pi;
    double tau = 0.0;
    double zeta = neg_infinity;
    double gamma_value = neg_infinity;  // surrogate value at x_hat
};

// Certificate from an existing evaluation at x_hat. Unconstrained instances
// use the sorted-diagonal closed form ("zero gap at an exact optimizer");
// constrained ones solve the pricing program by simplex. Throws
// std::domain_error when the evaluation is -infinity and
// certification_error when the pricing program misbehaves.
DualCertificate certify(const Factor& f, const GammaEval& ge, const Instance& inst,
                        const BoxBounds& box);
DualCertificate certify_point(const Factor& f, std::span<const double> x_hat,
                              const Instance& inst, const BoxBounds& box);

// Indices safe to pin: fixing them the other way would push the certified
// bound below lb. Only free coordinates of the box are reported.
struct FixResult {
    std::vector<int> fix_to_zero, fix_to_one;
};
FixResult fix_variables(const DualCertificate& cert, double lb, const BoxBounds& box);

}  // namespace gmesp
