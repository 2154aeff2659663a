#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "gmesp/instance.hpp"
#include "gmesp/matrix.hpp"
#include "gmesp/rng.hpp"

namespace testutil {

using namespace gmesp;

// PSD matrix G G^T with G n x r of uniform[-1,1] entries; full rank when r=n.
inline SymMatrix random_psd(int n, int r, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Matrix g(n, r);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < r; ++j) g(i, j) = uniform_pm1(rng);
    return SymMatrix::from_gram(g);
}

inline SymMatrix diag_matrix(std::initializer_list<double> d) {
    std::vector<double> v(d);
    return SymMatrix::diag(v);
}

inline double rel_frobenius_diff(const SymMatrix& a, const SymMatrix& b) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < a.order(); ++i)
        for (int j = 0; j < a.order(); ++j) {
            num += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
            den += a(i, j) * a(i, j);
        }
    return std::sqrt(num) / std::max(1.0, std::sqrt(den));
}

// F F^T as a SymMatrix, for reconstruction checks.
inline SymMatrix gram_of(const Matrix& f) { return SymMatrix::from_gram(f); }

}  // namespace testutil
