#pragma once

#include <limits>
#include <optional>
#include <span>

#include "gmesp/matrix.hpp"

namespace gmesp {

constexpr double neg_infinity = -std::numeric_limits<double>::infinity();

// Split point of a descending nonnegative eigenvalue vector: the unique
// iota in [0, t) with lambda_iota > tail_mean >= lambda_{iota+1}, where
// tail_mean averages the k - iota trailing values over t - iota slots and
// lambda_0 is taken as +infinity. Returns nullopt when the vector sums to
// zero, in which case no split with a positive tail exists.
struct IotaResult {
    int iota;
    double tail_mean;
};
std::optional<IotaResult> iota_index(std::span<const double> lam, int t);

// Sum of logs of the iota leading values plus (t - iota) * log(tail_mean).
// Collapses to the plain top-t log-sum when t equals the count of positive
// values, and to -infinity when fewer than t values are positive.
double phi_t(std::span<const double> lam, int t);

struct GammaEval {
    double value = neg_infinity;
    SpectralDecomposition decomp;  // of F^T Diag(x) F, eigenvalues clamped
    std::optional<IotaResult> split;
    int rank = 0;
};

// Concave surrogate evaluated at fractional weights x in [0,1]^n: phi_t of
// the spectrum of F^T Diag(x) F. Throws std::invalid_argument when x leaves
// the unit box by more than 1e-9 or has the wrong length.
GammaEval gamma_eval(const Factor& f, std::span<const double> x, int t);

// Exact objective through the factor: log-sum of the t greatest eigenvalues
// of F^T Diag(x) F, -infinity when the rank falls short of t.
double f_exact(const Factor& f, std::span<const double> x, int t);

// Gradient of gamma at x (a supergradient where the split is degenerate).
// Throws std::domain_error when gamma is -infinity at x.
std::vector<double> gamma_gradient(const Factor& f, std::span<const double> x, int t);

// Same gradient computed from an existing evaluation, saving the eigensolve.
std::vector<double> gradient_from(const Factor& f, const GammaEval& ge);

}  // namespace gmesp
