#include "gmesp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gmesp/kernels.hpp"
#include "gmesp/simplex.hpp"

namespace gmesp {

double spectral_bound(const SymMatrix& c, int t) {
    if (t < 1 || t > c.order()) throw std::invalid_argument("spectral_bound: t out of range");
    SpectralDecomposition d = eigh(c);
    double tol = rank_tolerance(d.eigenvalues);
    if (d.eigenvalues[t - 1] <= tol) return neg_infinity;
    double v = 0.0;
    for (int l = 0; l < t; ++l) v += std::log(d.eigenvalues[l]);
    return v;
}

namespace {

struct PricedParts {
    double value;
    std::vector<double> topmass;  // per column: top-t eigenvector mass of D C D
    std::vector<int> cheapest;    // the s-t columns with the smallest priced cost
};

PricedParts priced_value(const Instance& inst, std::span<const double> pi) {
    int n = inst.n(), m = inst.m(), t = inst.t;
    std::vector<double> w(n, 0.0);  // priced column costs pi . a_j
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) w[j] += pi[i] * inst.A(i, j);

    SymMatrix scaled(n);
    {
        std::vector<double> dg(n);
        for (int j = 0; j < n; ++j) dg[j] = std::exp(-0.5 * w[j]);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) scaled.set(i, j, inst.C(i, j) * dg[i] * dg[j]);
    }
    SpectralDecomposition d = eigh(scaled);
    double tol = rank_tolerance(d.eigenvalues);

    PricedParts out;
    out.value = 0.0;
    for (int l = 0; l < t; ++l) {
        if (d.eigenvalues[l] <= tol) {
            out.value = neg_infinity;
            return out;
        }
        out.value += std::log(d.eigenvalues[l]);
    }
    for (int i = 0; i < m; ++i) out.value += pi[i] * inst.b[i];

    out.cheapest.resize(n);
    std::iota(out.cheapest.begin(), out.cheapest.end(), 0);
    std::stable_sort(out.cheapest.begin(), out.cheapest.end(),
                     [&](int a, int b) { return w[a] < w[b]; });
    out.cheapest.resize(inst.s - t);
    for (int j : out.cheapest) out.value -= w[j];

    out.topmass.assign(n, 0.0);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < t; ++l) out.topmass[j] += d.eigenvectors(j, l) * d.eigenvectors(j, l);
    return out;
}

}  // namespace

double lagrangian_value(const Instance& inst, std::span<const double> pi) {
    if (static_cast<int>(pi.size()) != inst.m())
        throw std::invalid_argument("lagrangian_value: multiplier length mismatch");
    for (double v : pi)
        if (v < 0.0) throw std::invalid_argument("lagrangian_value: multipliers must be >= 0");
    if (inst.m() == 0) return spectral_bound(inst.C, inst.t);
    return priced_value(inst, pi).value;
}

double lagrangian_spectral_bound(const Instance& inst) {
    int m = inst.m();
    if (m == 0) return spectral_bound(inst.C, inst.t);

    std::vector<double> pi(m, 0.0);
    double best = priced_value(inst, pi).value;

    for (int k = 0; k < 200; ++k) {
        PricedParts parts = priced_value(inst, pi);
        best = std::min(best, parts.value);

        // Subgradient of v: the eigenvalue term contributes the negated
        // priced column masses, the subset term the chosen cheap columns.
        std::vector<double> sg(m);
        for (int i = 0; i < m; ++i) {
            double acc = inst.b[i];
            for (int j = 0; j < inst.n(); ++j) acc -= inst.A(i, j) * parts.topmass[j];
            for (int j : parts.cheapest) acc -= inst.A(i, j);
            sg[i] = acc;
        }
        double step = 1.0 / (10.0 + k);
        for (int i = 0; i < m; ++i) pi[i] = std::max(0.0, pi[i] - step * sg[i]);
    }
    best = std::min(best, priced_value(inst, pi).value);
    return best;
}

namespace {

// Pricing by the sorted diagonal: indices with the heaviest certificate
// diagonal are driven to their caps, the rest to their floors, the pivot
// sets tau.
void closed_form_prices(std::span<const double> d, const BoxBounds& box, int s,
                        std::vector<double>& upsilon, std::vector<double>& nu, double& tau) {
    int n = static_cast<int>(d.size());
    std::vector<int> sigma(n);
    std::iota(sigma.begin(), sigma.end(), 0);
    std::stable_sort(sigma.begin(), sigma.end(), [&](int a, int b) { return d[a] > d[b]; });

    std::vector<double> cap_prefix(n + 1, 0.0), floor_suffix(n + 1, 0.0);
    for (int j = 0; j < n; ++j) cap_prefix[j + 1] = cap_prefix[j] + box.c[sigma[j]];
    for (int j = n - 1; j >= 0; --j) floor_suffix[j] = floor_suffix[j + 1] + box.l[sigma[j]];

    int phi = 0;
    for (int j = 1; j <= n; ++j)
        if (cap_prefix[j] + floor_suffix[j] <= s) phi = j;

    tau = (phi < n) ? d[sigma[phi]] : 0.0;
    upsilon.assign(n, 0.0);
    nu.assign(n, 0.0);
    for (int j = 0; j < phi; ++j) nu[sigma[j]] = std::max(0.0, d[sigma[j]] - tau);
    for (int j = phi + 1; j < n; ++j) upsilon[sigma[j]] = std::max(0.0, tau - d[sigma[j]]);
}

}  // namespace

DualCertificate certify(const Factor& f, const GammaEval& ge, const Instance& inst,
                        const BoxBounds& box) {
    if (ge.value == neg_infinity)
        throw std::domain_error("certify: surrogate is -infinity at x_hat");
    int n = inst.n(), m = inst.m(), t = inst.t, k = f.k();
    if (box.n() != n) throw std::invalid_argument("certify: box size mismatch");

    int iot = ge.split->iota;
    double tail_mean = ge.split->tail_mean;
    int rank = ge.rank;

    // Dual spectrum: reciprocal head, tail mean on the positive tail, and a
    // null-direction weight nudged above the tail weight to keep theta
    // definite.  The nudge must stay tiny: the priced diagonal picks up
    // (weight - 1/tail_mean) times the null mass of each row, and any O(1)
    // excess would hold the certified gap away from zero at converged points.
    std::vector<double> beta(k);
    for (int l = 0; l < iot; ++l) beta[l] = 1.0 / ge.decomp.eigenvalues[l];
    for (int l = iot; l < rank; ++l) beta[l] = 1.0 / tail_mean;
    for (int l = rank; l < k; ++l) beta[l] = (1.0 + 1e-10) / tail_mean;

    DualCertificate cert;
    cert.gamma_value = ge.value;
    cert.theta = SymMatrix(k);
    for (int a = 0; a < k; ++a)
        for (int bcol = a; bcol < k; ++bcol) {
            double v = 0.0;
            for (int l = 0; l < k; ++l)
                v += beta[l] * ge.decomp.eigenvectors(a, l) * ge.decomp.eigenvectors(bcol, l);
            cert.theta.set(a, bcol, v);
        }

    std::vector<double> diag = diag_congruence(f.f, cert.theta);

    double gap;
    if (m == 0) {
        cert.pi.clear();
        closed_form_prices(diag, box, inst.s, cert.upsilon, cert.nu, cert.tau);
        gap = cert.tau * inst.s - static_cast<double>(t);
        for (int j = 0; j < n; ++j) gap += cert.nu[j] * box.c[j] - cert.upsilon[j] * box.l[j];
    } else {
        // min -upsilon.l + nu.c + pi.b + tau s - t
        // s.t. upsilon - nu - A^T pi - tau e = -diag, upsilon, nu, pi >= 0.
        int cols = 2 * n + m + 2;
        Matrix e(n, cols);
        std::vector<double> rhs(n), cost(cols, 0.0);
        for (int j = 0; j < n; ++j) {
            e(j, j) = 1.0;
            e(j, n + j) = -1.0;
            for (int i = 0; i < m; ++i) e(j, 2 * n + i) = -inst.A(i, j);
            e(j, 2 * n + m) = -1.0;
            e(j, 2 * n + m + 1) = 1.0;
            rhs[j] = -diag[j];
            cost[j] = -static_cast<double>(box.l[j]);
            cost[n + j] = static_cast<double>(box.c[j]);
        }
        for (int i = 0; i < m; ++i) cost[2 * n + i] = inst.b[i];
        cost[2 * n + m] = static_cast<double>(inst.s);
        cost[2 * n + m + 1] = -static_cast<double>(inst.s);

        LpResult lp = simplex_solve(e, rhs, cost);
        if (lp.status == LpStatus::unbounded)
            throw certification_error("certify: pricing program is unbounded");
        if (lp.status != LpStatus::optimal)
            throw certification_error("certify: pricing program unexpectedly infeasible");

        cert.upsilon.assign(n, 0.0);
        cert.nu.assign(n, 0.0);
        cert.pi.assign(m, 0.0);
        for (int j = 0; j < n; ++j) cert.upsilon[j] = std::max(0.0, lp.z[j]);
        for (int j = 0; j < n; ++j) cert.nu[j] = std::max(0.0, lp.z[n + j]);
        for (int i = 0; i < m; ++i) cert.pi[i] = std::max(0.0, lp.z[2 * n + i]);
        cert.tau = lp.z[2 * n + m] - lp.z[2 * n + m + 1];
        gap = lp.value - static_cast<double>(t);
    }

    cert.zeta = ge.value + gap;
    return cert;
}

DualCertificate certify_point(const Factor& f, std::span<const double> x_hat,
                              const Instance& inst, const BoxBounds& box) {
    GammaEval ge = gamma_eval(f, x_hat, inst.t);
    return certify(f, ge, inst, box);
}

FixResult fix_variables(const DualCertificate& cert, double lb, const BoxBounds& box) {
    FixResult out;
    if (lb == neg_infinity) return out;
    double slack = cert.zeta - lb;
    for (int j = 0; j < box.n(); ++j) {
        if (!box.free(j)) continue;
        if (slack < cert.upsilon[j]) out.fix_to_zero.push_back(j);
        else if (slack < cert.nu[j]) out.fix_to_one.push_back(j);
    }
    return out;
}

}  // namespace gmesp
