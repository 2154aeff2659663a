#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmesp {

// Dense row-major matrix. No ownership tricks, just a sized vector.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative dimension");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double operator()(int i, int j) const { return a_[idx(i, j)]; }
    double& operator()(int i, int j) { return a_[idx(i, j)]; }

    const double* row(int i) const { return a_.data() + static_cast<std::size_t>(i) * cols_; }
    double* row(int i) { return a_.data() + static_cast<std::size_t>(i) * cols_; }

    const std::vector<double>& data() const { return a_; }

private:
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * cols_ + j; }
    int rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

// Symmetric matrix of order n. Stored dense; the symmetric setter keeps
// entries(i,j) == entries(j,i) exact, and from_rows averages away any
// asymmetry in its input.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {
        if (n <= 0) throw std::invalid_argument("SymMatrix: order must be positive");
    }

    static SymMatrix identity(int n);
    static SymMatrix diag(std::span<const double> d);
    // Averages (M + M^T)/2 entrywise so the invariant holds for any input.
    static SymMatrix from_rows(int n, std::span<const double> row_major);
    // G G^T for an arbitrary rectangular G; symmetric by construction.
    static SymMatrix from_gram(const Matrix& g);

    int order() const { return n_; }

    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    void set(int i, int j, double v) {
        a_[static_cast<std::size_t>(i) * n_ + j] = v;
        a_[static_cast<std::size_t>(j) * n_ + i] = v;
    }

    const std::vector<double>& data() const { return a_; }
    double frobenius_norm() const;

private:
    int n_ = 0;
    std::vector<double> a_;
};

// Eigenvalues sorted descending; eigenvectors(., l) is the unit eigenvector
// paired with eigenvalues[l]. The basis is orthonormal to solver tolerance.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Sweeps rotate every
// off-diagonal pair until the off-diagonal Frobenius mass falls below
// 1e-12 * ||M||_F. Throws std::invalid_argument on non-finite entries.
SpectralDecomposition eigh(const SymMatrix& m);

// Eigenvalues only, descending; bitwise-identical to eigh's, cheaper by the
// skipped rotation accumulation.
std::vector<double> eigh_values(const SymMatrix& m);

// Count of eigenvalues above the shared rank cutoff 1e-10 * max(1, lambda_max).
// Expects the descending eigenvalue vector of a PSD matrix.
int numerical_rank(std::span<const double> eigenvalues);

// Shared cutoff used for ranks and for clamping near-zero eigenvalues.
double rank_tolerance(std::span<const double> eigenvalues);

struct not_psd_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class FactorMethod { cholesky_pivoted, spectral, sqrt };

// F with C = F F^T. Column count depends on the method: the rank-revealing
// methods return n x rank, sqrt returns the full symmetric square root n x n.
struct Factor {
    Matrix f;
    int n() const { return f.rows(); }
    int k() const { return f.cols(); }
};

// Throws not_psd_error when some eigenvalue dips below -1e-6 * lambda_max.
// Eigenvalues inside the rank cutoff are treated as exact zeros.
Factor factorize(const SymMatrix& c, FactorMethod method);

// Principal submatrix C[S,S]; S must be sorted ascending, 0-based, in range.
SymMatrix submatrix(const SymMatrix& c, std::span<const int> s);

}  // namespace gmesp
