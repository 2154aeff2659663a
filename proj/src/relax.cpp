#include "gmesp/relax.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "gmesp/kernels.hpp"
#include "gmesp/rng.hpp"
#include "gmesp/simplex.hpp"

namespace gmesp {

namespace {

std::optional<std::vector<double>> oracle_knapsack(std::span<const double> g, const Polytope& p) {
    int n = p.n();
    double budget = p.s - p.box.sum_l();
    if (budget < 0.0 || p.box.sum_c() < p.s) return std::nullopt;

    std::vector<double> x(n);
    for (int j = 0; j < n; ++j) x[j] = p.box.l[j];

    std::vector<int> free;
    for (int j = 0; j < n; ++j)
        if (p.box.free(j)) free.push_back(j);
    std::sort(free.begin(), free.end(), [&](int a, int b) {
        if (g[a] != g[b]) return g[a] > g[b];
        return a < b;
    });
    for (int j : free) {
        if (budget <= 0.0) break;
        double take = std::min(budget, 1.0);
        x[j] += take;
        budget -= take;
    }
    return x;
}

std::optional<std::vector<double>> oracle_simplex(std::span<const double> g, const Polytope& p) {
    int n = p.n(), m = p.m();
    std::vector<int> free;
    for (int j = 0; j < n; ++j)
        if (p.box.free(j)) free.push_back(j);
    int nf = static_cast<int>(free.size());

    double budget = p.s - p.box.sum_l();
    if (budget < 0.0 || budget > nf) return std::nullopt;

    // Variables: y (free coords above l), slack w per side constraint, cap
    // slack u per free coord. Rows: budget, side constraints, caps.
    int rows = 1 + m + nf;
    int cols = nf + m + nf;
    Matrix e(rows, cols);
    std::vector<double> f(rows, 0.0), cost(cols, 0.0);

    for (int q = 0; q < nf; ++q) e(0, q) = 1.0;
    f[0] = budget;
    for (int i = 0; i < m; ++i) {
        double base = 0.0;
        for (int j = 0; j < n; ++j) base += p.A(i, j) * p.box.l[j];
        for (int q = 0; q < nf; ++q) e(1 + i, q) = p.A(i, free[q]);
        e(1 + i, nf + i) = 1.0;
        f[1 + i] = p.b[i] - base;
    }
    for (int q = 0; q < nf; ++q) {
        e(1 + m + q, q) = 1.0;
        e(1 + m + q, nf + m + q) = 1.0;
        f[1 + m + q] = 1.0;
    }
    for (int q = 0; q < nf; ++q) cost[q] = -g[free[q]];

    LpResult lp = simplex_solve(e, f, cost);
    if (lp.status == LpStatus::infeasible) return std::nullopt;
    if (lp.status != LpStatus::optimal)
        throw std::runtime_error("lp_oracle: bounded polytope reported unbounded");

    std::vector<double> x(n);
    for (int j = 0; j < n; ++j) x[j] = p.box.l[j];
    for (int q = 0; q < nf; ++q) x[free[q]] += std::clamp(lp.z[q], 0.0, 1.0);
    return x;
}

}  // namespace

std::optional<std::vector<double>> lp_oracle(std::span<const double> g, const Polytope& p) {
    if (static_cast<int>(g.size()) != p.n())
        throw std::invalid_argument("lp_oracle: objective length mismatch");
    for (int j = 0; j < p.n(); ++j)
        if (p.box.l[j] > p.box.c[j]) return std::nullopt;
    return p.m() == 0 ? oracle_knapsack(g, p) : oracle_simplex(g, p);
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Clamp into the box, then repair the budget over the free coordinates,
// saturating greedily until e.x = s. Used for warm starts only.
std::vector<double> repair_to_budget(std::vector<double> x, const Polytope& p) {
    int n = p.n();
    for (int j = 0; j < n; ++j)
        x[j] = std::clamp(x[j], static_cast<double>(p.box.l[j]), static_cast<double>(p.box.c[j]));
    for (int round = 0; round < n + 2; ++round) {
        double delta = p.s - std::accumulate(x.begin(), x.end(), 0.0);
        if (std::abs(delta) <= 1e-12) break;
        double room = 0.0;
        for (int j = 0; j < n; ++j)
            room += (delta > 0.0) ? (p.box.c[j] - x[j]) : (x[j] - p.box.l[j]);
        if (room <= 0.0) break;
        double scale = delta / room;
        for (int j = 0; j < n; ++j) {
            double h = (delta > 0.0) ? (p.box.c[j] - x[j]) : (x[j] - p.box.l[j]);
            x[j] += scale * h;
        }
    }
    return x;
}

struct Segment {
    // Spectrum of F^T Diag(x + gamma d) F evaluated lazily along a ray.
    SymMatrix m0, m1;
    int t;

    double value(double gamma) const {
        int k = m0.order();
        SymMatrix m(k);
        for (int i = 0; i < k; ++i)
            for (int j = i; j < k; ++j) m.set(i, j, m0(i, j) + gamma * m1(i, j));
        std::vector<double> lam = eigh_values(m);
        double tol = rank_tolerance(lam);
        for (double& v : lam)
            if (v <= tol) v = 0.0;
        return phi_t(lam, t);
    }
};

// Golden-section maximization on [0, hi]; returns the best sampled point.
std::pair<double, double> golden_max(const Segment& seg, double hi, double v0) {
    const double inv_phi = 0.6180339887498949;
    double a = 0.0, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = seg.value(x1), f2 = seg.value(x2);
    double best_g = 0.0, best_v = v0;
    auto track = [&](double g, double v) {
        if (v > best_v) {
            best_v = v;
            best_g = g;
        }
    };
    track(x1, f1);
    track(x2, f2);
    track(b, seg.value(b));
    for (int it = 0; it < 40 && (b - a) > 1e-10 * std::max(1.0, hi); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = seg.value(x2);
            track(x2, f2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = seg.value(x1);
            track(x1, f1);
        }
    }
    return {best_g, best_v};
}

struct Atom {
    std::vector<double> x;
    double w;
};

bool same_point(std::span<const double> a, std::span<const double> b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > 1e-12) return false;
    return true;
}

}  // namespace

RelaxResult solve_ddgfact(const Factor& f, const Polytope& p, int t, const RelaxOptions& opts,
                          std::span<const double> warm) {
    int n = p.n();
    if (f.n() != n) throw std::invalid_argument("solve_ddgfact: factor/polytope mismatch");

    RelaxResult out;
    bool crossed = false;
    for (int j = 0; j < n; ++j) crossed = crossed || p.box.l[j] > p.box.c[j];
    if (crossed || !p.box.admits(p.s)) {
        out.status = RelaxStatus::infeasible;
        return out;
    }

    std::vector<Atom> atoms;
    std::vector<double> x;

    if (p.m() == 0) {
        int nf = 0;
        for (int j = 0; j < n; ++j) nf += p.box.free(j);
        double rho = nf > 0 ? (p.s - p.box.sum_l()) / static_cast<double>(nf) : 0.0;
        x.resize(n);
        for (int j = 0; j < n; ++j)
            x[j] = p.box.l[j] + (p.box.free(j) ? rho : 0.0);
        if (!warm.empty()) {
            std::vector<double> w = repair_to_budget({warm.begin(), warm.end()}, p);
            if (std::abs(std::accumulate(w.begin(), w.end(), 0.0) - p.s) <= 1e-9 &&
                gamma_eval(f, w, t).value > neg_infinity)
                x = std::move(w);
        }
        atoms.push_back({x, 1.0});
    } else {
        // A warm point that is already feasible here (typical when resuming
        // the same region) is taken as-is; anything else falls back to
        // vertex sampling.
        bool warm_ok = static_cast<int>(warm.size()) == n;
        if (warm_ok) {
            double sum = 0.0;
            for (int j = 0; j < n; ++j) {
                warm_ok = warm_ok && warm[j] >= p.box.l[j] && warm[j] <= p.box.c[j];
                sum += warm[j];
            }
            warm_ok = warm_ok && std::abs(sum - p.s) <= 1e-9;
            for (int i = 0; warm_ok && i < p.m(); ++i) {
                double lhs = 0.0;
                for (int j = 0; j < n; ++j) lhs += p.A(i, j) * warm[j];
                warm_ok = warm_ok && lhs <= p.b[i] + 1e-9;
            }
            if (warm_ok) {
                x.assign(warm.begin(), warm.end());
                if (gamma_eval(f, x, t).value > neg_infinity)
                    atoms.push_back({x, 1.0});
                else
                    warm_ok = false;
            }
        }
        std::mt19937_64 rng(opts.seed);
        std::vector<double> g(n);
        for (int draw = 0; !warm_ok && draw < 50; ++draw) {
            for (double& v : g) v = uniform_pm1(rng);
            auto vtx = lp_oracle(g, p);
            if (!vtx) {
                out.status = RelaxStatus::infeasible;
                return out;
            }
            bool dup = false;
            for (const Atom& a : atoms) dup = dup || same_point(a.x, *vtx);
            if (!dup) atoms.push_back({*vtx, 0.0});
            x.assign(n, 0.0);
            for (Atom& a : atoms) {
                a.w = 1.0 / atoms.size();
                for (int j = 0; j < n; ++j) x[j] += a.w * a.x[j];
            }
            if (gamma_eval(f, x, t).value > neg_infinity) break;
            if (draw == 49) {
                out.status = RelaxStatus::no_finite_start;
                out.x_hat = x;
                return out;
            }
        }
    }

    GammaEval ge = gamma_eval(f, x, t);
    if (ge.value == neg_infinity) {
        out.status = RelaxStatus::no_finite_start;
        out.x_hat = x;
        return out;
    }
    if (opts.record_history) out.history.push_back(ge.value);

    double gap = 0.0;
    int iter = 0;
    for (; iter < opts.max_iters; ++iter) {
        std::vector<double> g = gradient_from(f, ge);
        auto vtx = lp_oracle(g, p);
        if (!vtx) throw std::runtime_error("solve_ddgfact: oracle failed on nonempty polytope");

        std::vector<double> d_fw(n);
        for (int j = 0; j < n; ++j) d_fw[j] = (*vtx)[j] - x[j];
        gap = dot(g, d_fw);
        if (gap <= opts.tol) break;

        // Away atom: the active atom the gradient likes least.
        std::size_t worst = 0;
        double worst_score = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            double sc = dot(g, atoms[i].x);
            if (sc < worst_score) {
                worst_score = sc;
                worst = i;
            }
        }
        double away_gap = dot(g, x) - worst_score;

        bool use_away = away_gap > gap && atoms.size() > 1 && atoms[worst].w < 1.0 - 1e-12;
        std::vector<double> dir(n);
        double gamma_max = 1.0;
        if (use_away) {
            for (int j = 0; j < n; ++j) dir[j] = x[j] - atoms[worst].x[j];
            gamma_max = atoms[worst].w / (1.0 - atoms[worst].w);
            if (gamma_max <= 0.0) use_away = false;
        }
        if (!use_away) {
            dir = d_fw;
            gamma_max = 1.0;
        }

        auto search = [&](const std::vector<double>& dd, double gm) {
            Segment seg{gram_weighted(f.f, x), gram_weighted(f.f, dd), t};
            return golden_max(seg, gm, ge.value);
        };
        auto [step, step_value] = search(dir, gamma_max);
        if (use_away && (step <= 0.0 || step_value <= ge.value)) {
            // A low-weight away atom can cap the step below measurable
            // improvement; the toward direction still carries the gap.
            use_away = false;
            dir = d_fw;
            gamma_max = 1.0;
            std::tie(step, step_value) = search(dir, gamma_max);
        }
        if (step <= 0.0 || step_value < ge.value) break;  // numerically stalled

        for (int j = 0; j < n; ++j)
            x[j] = std::clamp(x[j] + step * dir[j], static_cast<double>(p.box.l[j]),
                              static_cast<double>(p.box.c[j]));

        if (use_away) {
            double wgt = 1.0 + step;
            for (Atom& a : atoms) a.w *= wgt;
            atoms[worst].w -= step;
        } else {
            for (Atom& a : atoms) a.w *= 1.0 - step;
            bool merged = false;
            for (Atom& a : atoms)
                if (same_point(a.x, *vtx)) {
                    a.w += step;
                    merged = true;
                    break;
                }
            if (!merged) atoms.push_back({*vtx, step});
        }
        std::erase_if(atoms, [](const Atom& a) { return a.w <= 1e-12; });
        double wsum = 0.0;
        for (Atom& a : atoms) wsum += a.w;
        for (Atom& a : atoms) a.w /= wsum;

        ge = gamma_eval(f, x, t);
        if (opts.record_history) out.history.push_back(ge.value);
    }

    if (iter == opts.max_iters) {
        std::vector<double> g = gradient_from(f, ge);
        auto vtx = lp_oracle(g, p);
        if (vtx) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += g[j] * ((*vtx)[j] - x[j]);
            gap = acc;
        }
    }

    out.status = RelaxStatus::ok;
    out.x_hat = std::move(x);
    out.value = ge.value;
    out.fw_gap = std::max(0.0, gap);
    out.iterations = iter;
    return out;
}

RelaxResult solve_ddgfact(const Instance& inst, const RelaxOptions& opts) {
    Factor f = factorize(inst.C, FactorMethod::cholesky_pivoted);
    Polytope p = Polytope::from(inst, BoxBounds::full(inst.n()));
    return solve_ddgfact(f, p, inst.t, opts);
}

}  // namespace gmesp
