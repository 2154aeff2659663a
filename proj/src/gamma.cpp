#include "gmesp/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gmesp/kernels.hpp"

namespace gmesp {

std::optional<IotaResult> iota_index(std::span<const double> lam, int t) {
    int k = static_cast<int>(lam.size());
    if (t < 1 || t > k) throw std::invalid_argument("iota_index: t out of range");
    for (int l = 0; l + 1 < k; ++l)
        if (lam[l] < lam[l + 1]) throw std::invalid_argument("iota_index: not descending");
    if (!lam.empty() && lam[k - 1] < 0.0)
        throw std::invalid_argument("iota_index: negative eigenvalue");

    double total = 0.0;
    for (double v : lam) total += v;
    if (total <= 0.0) return std::nullopt;

    // First index whose tail mean reaches the next eigenvalue. This is the
    // unique split with lambda_iota strictly above the tail mean: once the
    // mean covers lambda_i it keeps covering every later one, and at the
    // first such index the preceding eigenvalue still exceeds the mean.
    // Guaranteed to fire by i = t - 1, where the tail contains lambda_t.
    double tail = total;
    double mean = 0.0;
    for (int i = 0; i < t; ++i) {
        if (i > 0) tail -= lam[i - 1];
        mean = tail / (t - i);
        if (mean >= lam[i]) return IotaResult{i, mean};
    }
    return IotaResult{t - 1, mean};
}

double phi_t(std::span<const double> lam, int t) {
    auto split = iota_index(lam, t);
    if (!split) return neg_infinity;
    if (split->tail_mean <= 0.0) return neg_infinity;
    double v = 0.0;
    for (int l = 0; l < split->iota; ++l) v += std::log(lam[l]);
    v += (t - split->iota) * std::log(split->tail_mean);
    return v;
}

namespace {

void check_weights(const Factor& f, std::span<const double> x) {
    if (static_cast<int>(x.size()) != f.n())
        throw std::invalid_argument("gamma: weight length mismatch");
    for (double v : x)
        if (!(v > -1e-9 && v < 1.0 + 1e-9))
            throw std::invalid_argument("gamma: weight outside the unit box");
}

std::vector<double> clamped_weights(std::span<const double> x) {
    std::vector<double> w(x.begin(), x.end());
    for (double& v : w) v = std::clamp(v, 0.0, 1.0);
    return w;
}

void clamp_spectrum(std::vector<double>& lam) {
    double tol = rank_tolerance(lam);
    for (double& v : lam)
        if (v <= tol) v = 0.0;
}

}  // namespace

GammaEval gamma_eval(const Factor& f, std::span<const double> x, int t) {
    check_weights(f, x);
    if (t < 1 || t > f.k()) throw std::invalid_argument("gamma: t out of range");
    std::vector<double> w = clamped_weights(x);

    GammaEval out;
    out.decomp = eigh(gram_weighted(f.f, w));
    clamp_spectrum(out.decomp.eigenvalues);
    out.rank = numerical_rank(out.decomp.eigenvalues);
    out.split = iota_index(out.decomp.eigenvalues, t);
    if (!out.split || out.split->tail_mean <= 0.0) {
        out.value = neg_infinity;
        return out;
    }
    double v = 0.0;
    for (int l = 0; l < out.split->iota; ++l) v += std::log(out.decomp.eigenvalues[l]);
    v += (t - out.split->iota) * std::log(out.split->tail_mean);
    out.value = v;
    return out;
}

double f_exact(const Factor& f, std::span<const double> x, int t) {
    check_weights(f, x);
    if (t < 1 || t > f.k()) throw std::invalid_argument("f_exact: t out of range");
    std::vector<double> w = clamped_weights(x);

    SpectralDecomposition d = eigh(gram_weighted(f.f, w));
    clamp_spectrum(d.eigenvalues);
    if (d.eigenvalues[t - 1] <= 0.0) return neg_infinity;
    double v = 0.0;
    for (int l = 0; l < t; ++l) v += std::log(d.eigenvalues[l]);
    return v;
}

std::vector<double> gradient_from(const Factor& f, const GammaEval& ge) {
    if (ge.value == neg_infinity)
        throw std::domain_error("gamma_gradient: gamma is -infinity at x");
    int n = f.n(), k = f.k();
    int iot = ge.split->iota;
    double tail_mean = ge.split->tail_mean;

    // Per-eigenvalue weights: 1/lambda_l on the head, 1/tail_mean on the tail.
    std::vector<double> coef(k);
    for (int l = 0; l < iot; ++l) coef[l] = 1.0 / ge.decomp.eigenvalues[l];
    for (int l = iot; l < k; ++l) coef[l] = 1.0 / tail_mean;

    std::vector<double> g(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int l = 0; l < k; ++l) {
            double dot = 0.0;
            for (int a = 0; a < k; ++a) dot += f.f(j, a) * ge.decomp.eigenvectors(a, l);
            acc += coef[l] * dot * dot;
        }
        g[j] = acc;
    }
    return g;
}

std::vector<double> gamma_gradient(const Factor& f, std::span<const double> x, int t) {
    GammaEval ge = gamma_eval(f, x, t);
    return gradient_from(f, ge);
}

}  // namespace gmesp
