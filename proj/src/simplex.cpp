#include "gmesp/simplex.hpp"

#include <cmath>
#include <stdexcept>

namespace gmesp {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;

// Tableau in canonical form: `rows` constraint rows plus a reduced-cost row,
// basis columns reduced to unit vectors. Column layout: structural vars,
// then artificials, then the right-hand side.
struct Tableau {
    int rows, cols;  // cols excludes the rhs column
    std::vector<double> t;
    std::vector<int> basis;

    Tableau(int r, int c) : rows(r), cols(c), t((r + 1) * (c + 1), 0.0), basis(r, -1) {}

    double& at(int i, int j) { return t[static_cast<std::size_t>(i) * (cols + 1) + j]; }
    double at(int i, int j) const { return t[static_cast<std::size_t>(i) * (cols + 1) + j]; }
    double& rhs(int i) { return at(i, cols); }
    double& cost(int j) { return at(rows, j); }

    void pivot(int pr, int pc) {
        double p = at(pr, pc);
        for (int j = 0; j <= cols; ++j) at(pr, j) /= p;
        for (int i = 0; i <= rows; ++i) {
            if (i == pr) continue;
            double f = at(i, pc);
            if (f == 0.0) continue;
            for (int j = 0; j <= cols; ++j) at(i, j) -= f * at(pr, j);
            at(i, pc) = 0.0;
        }
        basis[pr] = pc;
    }

    // Bland: smallest eligible entering column from [0, limit); then the
    // ratio test with ties toward the smallest basis variable.
    // Returns optimal / unbounded / iteration as -2 / -1 / pivot done.
    int step(int limit) {
        int enter = -1;
        for (int j = 0; j < limit; ++j)
            if (cost(j) < -kPivotTol) {
                enter = j;
                break;
            }
        if (enter < 0) return -2;

        int leave = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < rows; ++i) {
            double a = at(i, enter);
            if (a <= kPivotTol) continue;
            double ratio = rhs(i) / a;
            if (leave < 0 || ratio < best_ratio - 1e-12 ||
                (std::abs(ratio - best_ratio) <= 1e-12 && basis[i] < basis[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave < 0) return -1;
        pivot(leave, enter);
        return 0;
    }
};

}  // namespace

LpResult simplex_solve(const Matrix& e, std::vector<double> f, const std::vector<double>& cost) {
    int r = e.rows(), nv = e.cols();
    if (static_cast<int>(f.size()) != r || static_cast<int>(cost.size()) != nv)
        throw std::invalid_argument("simplex_solve: dimension mismatch");

    Tableau tab(r, nv + r);
    for (int i = 0; i < r; ++i) {
        double sign = (f[i] < 0.0) ? -1.0 : 1.0;
        for (int j = 0; j < nv; ++j) tab.at(i, j) = sign * e(i, j);
        tab.at(i, nv + i) = 1.0;
        tab.rhs(i) = sign * f[i];
        tab.basis[i] = nv + i;
    }
    // Phase-one reduced costs: artificials cost 1, structurals 0.
    for (int j = 0; j < nv; ++j) {
        double s = 0.0;
        for (int i = 0; i < r; ++i) s += tab.at(i, j);
        tab.cost(j) = -s;
    }
    double rhs_sum = 0.0;
    for (int i = 0; i < r; ++i) rhs_sum += tab.rhs(i);
    tab.rhs(r) = -rhs_sum;

    const long max_iters = 200000;
    long iters = 0;
    while (true) {
        if (++iters > max_iters) throw std::runtime_error("simplex_solve: phase one stalled");
        int st = tab.step(nv + r);
        if (st == -2) break;
        if (st == -1) throw std::runtime_error("simplex_solve: phase one unbounded");
    }
    if (-tab.rhs(r) > kFeasTol) return LpResult{LpStatus::infeasible, {}, 0.0};

    // Drive leftover artificials out of the basis; a row with no structural
    // pivot available is a redundant equality and is neutralized.
    for (int i = 0; i < r; ++i) {
        if (tab.basis[i] < nv) continue;
        int pc = -1;
        for (int j = 0; j < nv; ++j)
            if (std::abs(tab.at(i, j)) > kPivotTol) {
                pc = j;
                break;
            }
        if (pc >= 0) {
            tab.pivot(i, pc);
        } else {
            for (int j = 0; j <= tab.cols; ++j) tab.at(i, j) = 0.0;
            tab.basis[i] = nv + i;  // empty row keeps its artificial, never pivots again
        }
    }

    // Phase two: real costs, artificial columns frozen out of the pricing.
    for (int j = 0; j < nv; ++j) tab.cost(j) = cost[j];
    for (int j = nv; j < nv + r; ++j) tab.cost(j) = 0.0;
    tab.rhs(r) = 0.0;
    for (int i = 0; i < r; ++i) {
        int b = tab.basis[i];
        if (b >= nv) continue;
        double cb = tab.cost(b);
        if (cb == 0.0) continue;
        for (int j = 0; j <= tab.cols; ++j) tab.at(r, j) -= cb * tab.at(i, j);
    }

    while (true) {
        if (++iters > 2 * max_iters) throw std::runtime_error("simplex_solve: phase two stalled");
        int st = tab.step(nv);
        if (st == -2) break;
        if (st == -1) return LpResult{LpStatus::unbounded, {}, 0.0};
    }

    LpResult out;
    out.status = LpStatus::optimal;
    out.z.assign(nv, 0.0);
    for (int i = 0; i < r; ++i)
        if (tab.basis[i] < nv) out.z[tab.basis[i]] = tab.rhs(i);
    out.value = 0.0;
    for (int j = 0; j < nv; ++j) out.value += cost[j] * out.z[j];
    return out;
}

}  // namespace gmesp
