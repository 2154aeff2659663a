#include "gmesp/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace gmesp {

SymMatrix SymMatrix::identity(int n) {
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
    return m;
}

SymMatrix SymMatrix::diag(std::span<const double> d) {
    SymMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.order(); ++i) m.set(i, i, d[i]);
    return m;
}

SymMatrix SymMatrix::from_rows(int n, std::span<const double> row_major) {
    if (static_cast<std::size_t>(n) * n != row_major.size())
        throw std::invalid_argument("SymMatrix::from_rows: size mismatch");
    SymMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double v = 0.5 * (row_major[static_cast<std::size_t>(i) * n + j] +
                              row_major[static_cast<std::size_t>(j) * n + i]);
            m.set(i, j, v);
        }
    return m;
}

SymMatrix SymMatrix::from_gram(const Matrix& g) {
    int n = g.rows(), k = g.cols();
    SymMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double v = 0.0;
            for (int p = 0; p < k; ++p) v += g(i, p) * g(j, p);
            m.set(i, j, v);
        }
    return m;
}

double SymMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

namespace {

double offdiag_frobenius(const Matrix& a) {
    int n = a.rows();
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
}

}  // namespace

namespace {

// Cyclic Jacobi. Diagonalizes a in place; accumulates rotations into v when
// given. Skipping v changes no arithmetic on a, so eigenvalues agree
// bitwise between the two entry points below.
void jacobi(Matrix& a, Matrix* v, double norm) {
    int n = a.rows();
    const double stop = 1e-12 * norm;
    const int max_sweeps = 64;

    int sweep = 0;
    while (offdiag_frobenius(a) > stop && norm > 0.0) {
        if (++sweep > max_sweeps)
            throw std::runtime_error("eigh: Jacobi sweeps failed to converge");
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (apq == 0.0) continue;
                // Classic two-sided rotation choosing the smaller angle root.
                double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                double tau = s / (1.0 + c);

                double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (int i = 0; i < n; ++i) {
                    if (i != p && i != q) {
                        double aip = a(i, p), aiq = a(i, q);
                        a(i, p) = aip - s * (aiq + tau * aip);
                        a(p, i) = a(i, p);
                        a(i, q) = aiq + s * (aip - tau * aiq);
                        a(q, i) = a(i, q);
                    }
                    if (v) {
                        double vip = (*v)(i, p), viq = (*v)(i, q);
                        (*v)(i, p) = vip - s * (viq + tau * vip);
                        (*v)(i, q) = viq + s * (vip - tau * viq);
                    }
                }
            }
    }
}

Matrix load_checked(const SymMatrix& m) {
    int n = m.order();
    for (double v : m.data())
        if (!std::isfinite(v)) throw std::invalid_argument("eigh: non-finite entry");
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = m(i, j);
    return a;
}

}  // namespace

SpectralDecomposition eigh(const SymMatrix& m) {
    int n = m.order();
    Matrix a = load_checked(m);
    Matrix v(n, n);
    for (int i = 0; i < n; ++i) v(i, i) = 1.0;
    jacobi(a, &v, m.frobenius_norm());

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return a(x, x) > a(y, y); });

    SpectralDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n);
    for (int l = 0; l < n; ++l) {
        out.eigenvalues[l] = a(order[l], order[l]);
        for (int i = 0; i < n; ++i) out.eigenvectors(i, l) = v(i, order[l]);
    }
    return out;
}

std::vector<double> eigh_values(const SymMatrix& m) {
    int n = m.order();
    Matrix a = load_checked(m);
    jacobi(a, nullptr, m.frobenius_norm());
    std::vector<double> lam(n);
    for (int i = 0; i < n; ++i) lam[i] = a(i, i);
    std::sort(lam.begin(), lam.end(), std::greater<double>());
    return lam;
}

double rank_tolerance(std::span<const double> eigenvalues) {
    double lmax = 0.0;
    for (double v : eigenvalues) lmax = std::max(lmax, v);
    return 1e-10 * std::max(1.0, lmax);
}

int numerical_rank(std::span<const double> eigenvalues) {
    double tol = rank_tolerance(eigenvalues);
    int r = 0;
    for (double v : eigenvalues)
        if (v > tol) ++r;
    return r;
}

Factor factorize(const SymMatrix& c, FactorMethod method) {
    int n = c.order();
    SpectralDecomposition d = eigh(c);
    double lmax = d.eigenvalues.empty() ? 0.0 : std::max(0.0, d.eigenvalues.front());
    double lmin = d.eigenvalues.empty() ? 0.0 : d.eigenvalues.back();
    if (lmin < -1e-6 * lmax)
        throw not_psd_error("factorize: matrix is not positive semidefinite");

    double tol = rank_tolerance(d.eigenvalues);
    int r = numerical_rank(d.eigenvalues);

    Factor out;
    switch (method) {
    case FactorMethod::spectral: {
        out.f = Matrix(n, r);
        for (int l = 0; l < r; ++l) {
            double s = std::sqrt(d.eigenvalues[l]);
            for (int i = 0; i < n; ++i) out.f(i, l) = s * d.eigenvectors(i, l);
        }
        break;
    }
    case FactorMethod::sqrt: {
        out.f = Matrix(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double v = 0.0;
                for (int l = 0; l < n; ++l) {
                    double lam = d.eigenvalues[l] > tol ? d.eigenvalues[l] : 0.0;
                    v += std::sqrt(lam) * d.eigenvectors(i, l) * d.eigenvectors(j, l);
                }
                out.f(i, j) = v;
                out.f(j, i) = v;
            }
        break;
    }
    case FactorMethod::cholesky_pivoted: {
        // Diagonal-pivoted outer-product Cholesky, run exactly rank steps so
        // the column count always matches the spectral rank above.
        Matrix w(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) w(i, j) = c(i, j);
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        out.f = Matrix(n, r);
        for (int k = 0; k < r; ++k) {
            int piv = k;
            for (int i = k + 1; i < n; ++i)
                if (w(perm[i], perm[i]) > w(perm[piv], perm[piv])) piv = i;
            std::swap(perm[k], perm[piv]);
            double dkk = w(perm[k], perm[k]);
            if (dkk <= 0.0) continue;  // residual at roundoff level; leave column zero
            double root = std::sqrt(dkk);
            out.f(perm[k], k) = root;
            for (int i = k + 1; i < n; ++i) out.f(perm[i], k) = w(perm[i], perm[k]) / root;
            for (int i = k + 1; i < n; ++i)
                for (int j = k + 1; j < n; ++j)
                    w(perm[i], perm[j]) -= out.f(perm[i], k) * out.f(perm[j], k);
        }
        break;
    }
    }
    return out;
}

SymMatrix submatrix(const SymMatrix& c, std::span<const int> s) {
    int k = static_cast<int>(s.size());
    if (k == 0) throw std::invalid_argument("submatrix: empty index set");
    for (int i = 0; i < k; ++i) {
        if (s[i] < 0 || s[i] >= c.order())
            throw std::out_of_range("submatrix: index out of range");
        if (i > 0 && s[i] <= s[i - 1])
            throw std::invalid_argument("submatrix: indices must be strictly ascending");
    }
    SymMatrix out(k);
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) out.set(i, j, c(s[i], s[j]));
    return out;
}

}  // namespace gmesp
