#include "gmesp/kernels.hpp"

#include <cstdint>
#include <stdexcept>

namespace gmesp {

namespace {

double gram_entry(const Matrix& f, std::span<const double> x, int a, int b) {
    int n = f.rows();
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += f(i, a) * x[i] * f(i, b);
    return v;
}

double diag_entry(const Matrix& f, const SymMatrix& theta, int i) {
    int k = f.cols();
    double v = 0.0;
    for (int a = 0; a < k; ++a) {
        const double fia = f(i, a);
        for (int b = 0; b < k; ++b) v += fia * theta(a, b) * f(i, b);
    }
    return v;
}

}  // namespace

SymMatrix gram_weighted_serial(const Matrix& f, std::span<const double> x) {
    if (static_cast<int>(x.size()) != f.rows())
        throw std::invalid_argument("gram_weighted: weight length mismatch");
    int k = f.cols();
    SymMatrix g(k);
    for (int a = 0; a < k; ++a)
        for (int b = a; b < k; ++b) g.set(a, b, gram_entry(f, x, a, b));
    return g;
}

SymMatrix gram_weighted(const Matrix& f, std::span<const double> x) {
    if (static_cast<int>(x.size()) != f.rows())
        throw std::invalid_argument("gram_weighted: weight length mismatch");
    int k = f.cols();
    SymMatrix g(k);
    const std::int64_t work = static_cast<std::int64_t>(f.rows()) * k * k;
#pragma omp parallel for schedule(static) if (work > 1 << 20)
    for (int a = 0; a < k; ++a)
        for (int b = a; b < k; ++b) g.set(a, b, gram_entry(f, x, a, b));
    return g;
}

std::vector<double> diag_congruence_serial(const Matrix& f, const SymMatrix& theta) {
    if (theta.order() != f.cols())
        throw std::invalid_argument("diag_congruence: inner dimension mismatch");
    int n = f.rows();
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = diag_entry(f, theta, i);
    return d;
}

std::vector<double> diag_congruence(const Matrix& f, const SymMatrix& theta) {
    if (theta.order() != f.cols())
        throw std::invalid_argument("diag_congruence: inner dimension mismatch");
    int n = f.rows();
    std::vector<double> d(n);
    const std::int64_t work = static_cast<std::int64_t>(n) * f.cols() * f.cols();
#pragma omp parallel for schedule(static) if (work > 1 << 20)
    for (int i = 0; i < n; ++i) d[i] = diag_entry(f, theta, i);
    return d;
}

}  // namespace gmesp
