#pragma once

#include <span>

#include "gmesp/matrix.hpp"

namespace gmesp {

// Weighted Gram matrix F^T Diag(x) F, k x k. The parallel version splits the
// output entries across threads; each entry is summed in the same index order
// as the serial reference, so the two results are bitwise identical.
SymMatrix gram_weighted(const Matrix& f, std::span<const double> x);
SymMatrix gram_weighted_serial(const Matrix& f, std::span<const double> x);

// diag(F Theta F^T), length n. Same bitwise-agreement contract.
std::vector<double> diag_congruence(const Matrix& f, const SymMatrix& theta);
std::vector<double> diag_congruence_serial(const Matrix& f, const SymMatrix& theta);

}  // namespace gmesp
