#include "gmesp/exact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gmesp {

double exact_objective(const SymMatrix& c, std::span<const int> sel, int t) {
    if (t < 1 || t > static_cast<int>(sel.size()))
        throw std::invalid_argument("exact_objective: t out of range");
    SpectralDecomposition d = eigh(submatrix(c, sel));
    double tol = rank_tolerance(d.eigenvalues);
    if (d.eigenvalues[t - 1] <= tol) return neg_infinity;
    double v = 0.0;
    for (int l = 0; l < t; ++l) v += std::log(d.eigenvalues[l]);
    return v;
}

unsigned long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::vector<int> combination_at(int n, int k, unsigned long long rank) {
    std::vector<int> out;
    out.reserve(k);
    int start = 0;
    for (int slot = k; slot > 0; --slot) {
        for (int v = start; v <= n - slot; ++v) {
            unsigned long long block = binomial(n - v - 1, slot - 1);
            if (rank < block) {
                out.push_back(v);
                start = v + 1;
                break;
            }
            rank -= block;
        }
    }
    return out;
}

namespace {

bool next_combination(std::vector<int>& s, int n) {
    int k = static_cast<int>(s.size());
    for (int i = k - 1; i >= 0; --i) {
        if (s[i] < n - k + i) {
            ++s[i];
            for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
            return true;
        }
    }
    return false;
}

// Strictly better under the (value desc, lexicographic asc) order.
bool improves(const Selection& cand, const Selection& best) {
    if (cand.value != best.value) return cand.value > best.value;
    return !best.indices.empty() && cand.indices < best.indices;
}

void consider(const Instance& inst, const BoxBounds* box, const std::vector<int>& sel,
              Selection& best) {
    if (box && !box->contains(sel)) return;
    if (!selection_feasible(inst, sel)) return;
    Selection cand{sel, exact_objective(inst.C, sel, inst.t)};
    if (best.indices.empty() || improves(cand, best)) best = std::move(cand);
}

Selection enumerate_serial(const Instance& inst, const BoxBounds* box) {
    std::vector<int> sel(inst.s);
    for (int i = 0; i < inst.s; ++i) sel[i] = i;
    Selection best;
    do {
        consider(inst, box, sel, best);
    } while (next_combination(sel, inst.n()));
    if (best.indices.empty()) best.value = neg_infinity;
    return best;
}

void check_size(const Instance& inst) {
    if (inst.n() > 22)
        throw std::invalid_argument("brute_force: refusing n > 22 (enumeration too large)");
}

}  // namespace

Selection brute_force_serial(const Instance& inst) {
    check_size(inst);
    return enumerate_serial(inst, nullptr);
}

Selection brute_force_in_box(const Instance& inst, const BoxBounds& box) {
    check_size(inst);
    return enumerate_serial(inst, &box);
}

Selection brute_force(const Instance& inst) {
    check_size(inst);
#ifndef _OPENMP
    return enumerate_serial(inst, nullptr);
#else
    const unsigned long long total = binomial(inst.n(), inst.s);
    const int pieces = std::max(1, std::min<int>(omp_get_max_threads() * 8,
                                                 static_cast<int>(std::min<unsigned long long>(total, 1024))));
    std::vector<Selection> piece_best(pieces);

#pragma omp parallel for schedule(dynamic)
    for (int p = 0; p < pieces; ++p) {
        unsigned long long lo = total * p / pieces;
        unsigned long long hi = total * (p + 1) / pieces;
        if (lo >= hi) continue;
        std::vector<int> sel = combination_at(inst.n(), inst.s, lo);
        Selection best;
        for (unsigned long long r = lo; r < hi; ++r) {
            consider(inst, nullptr, sel, best);
            if (r + 1 < hi) next_combination(sel, inst.n());
        }
        piece_best[p] = std::move(best);
    }

    // Deterministic merge: chunk results in index order, same tie-break as
    // the serial scan.
    Selection best;
    for (Selection& cand : piece_best) {
        if (cand.indices.empty()) continue;
        if (best.indices.empty() || improves(cand, best)) best = std::move(cand);
    }
    if (best.indices.empty()) best.value = neg_infinity;
    return best;
#endif
}

}  // namespace gmesp
