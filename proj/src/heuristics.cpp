#include "gmesp/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gmesp {

namespace {

std::vector<int> sorted_insert(const std::vector<int>& s, int j) {
    std::vector<int> out(s);
    out.insert(std::upper_bound(out.begin(), out.end(), j), j);
    return out;
}

std::vector<int> sorted_erase(const std::vector<int>& s, int j) {
    std::vector<int> out(s);
    out.erase(std::find(out.begin(), out.end(), j));
    return out;
}

}  // namespace

Selection round_continuous(const SymMatrix& c, int s, int t) {
    int n = c.order();
    if (s < 1 || s >= n || t < 1 || t > s)
        throw std::invalid_argument("round_continuous: bad parameters");
    SpectralDecomposition d = eigh(c);

    std::vector<double> mass(n, 0.0);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < t; ++l) mass[j] += d.eigenvectors(j, l) * d.eigenvectors(j, l);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        if (mass[x] != mass[y]) return mass[x] > mass[y];
        if (c(x, x) != c(y, y)) return c(x, x) > c(y, y);
        return x < y;
    });

    Selection out;
    out.indices.assign(order.begin(), order.begin() + s);
    std::sort(out.indices.begin(), out.indices.end());
    out.value = exact_objective(c, out.indices, t);
    return out;
}

Selection greedy(const SymMatrix& c, int s, int t) {
    int n = c.order();
    if (s < 1 || s >= n || t < 1 || t > s)
        throw std::invalid_argument("greedy: bad parameters");

    std::vector<int> cur;
    std::vector<char> used(n, 0);
    while (static_cast<int>(cur.size()) < s) {
        int tt = std::min<int>(t, static_cast<int>(cur.size()) + 1);
        int pick = -1;
        double best = neg_infinity;
        for (int j = 0; j < n; ++j) {
            if (used[j]) continue;
            double v = exact_objective(c, sorted_insert(cur, j), tt);
            if (pick < 0 || v > best) {
                pick = j;
                best = v;
            }
        }
        cur = sorted_insert(cur, pick);
        used[pick] = 1;
    }
    return Selection{cur, exact_objective(c, cur, t)};
}

Selection dual_greedy(const SymMatrix& c, int s, int t) {
    int n = c.order();
    if (s < 1 || s >= n || t < 1 || t > s)
        throw std::invalid_argument("dual_greedy: bad parameters");

    std::vector<int> cur(n);
    std::iota(cur.begin(), cur.end(), 0);
    while (static_cast<int>(cur.size()) > s) {
        int pick = -1;
        double best = neg_infinity;
        for (int j : cur) {
            double v = exact_objective(c, sorted_erase(cur, j), t);
            if (pick < 0 || v > best) {
                pick = j;
                best = v;
            }
        }
        cur = sorted_erase(cur, pick);
    }
    return Selection{cur, exact_objective(c, cur, t)};
}

Selection local_search(const SymMatrix& c, const Selection& s0, int t) {
    int n = c.order();
    std::vector<int> cur(s0.indices);
    std::sort(cur.begin(), cur.end());
    double val = exact_objective(c, cur, t);

    std::vector<char> in(n, 0);
    for (int j : cur) in[j] = 1;

    bool moved = true;
    while (moved) {
        moved = false;
        for (std::size_t ii = 0; ii < cur.size() && !moved; ++ii) {
            int i = cur[ii];
            for (int j = 0; j < n && !moved; ++j) {
                if (in[j]) continue;
                std::vector<int> cand = sorted_insert(sorted_erase(cur, i), j);
                double v = exact_objective(c, cand, t);
                if (v > val + 1e-10) {
                    in[i] = 0;
                    in[j] = 1;
                    cur = std::move(cand);
                    val = v;
                    moved = true;
                }
            }
        }
    }
    return Selection{cur, val};
}

std::optional<Selection> ilp_round(std::span<const double> x_hat, const Instance& inst) {
    int n = inst.n(), s = inst.s, m = inst.m();
    if (static_cast<int>(x_hat.size()) != n)
        throw std::invalid_argument("ilp_round: weight length mismatch");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        if (x_hat[x] != x_hat[y]) return x_hat[x] > x_hat[y];
        return x < y;
    });

    if (m == 0) {
        Selection out;
        out.indices.assign(order.begin(), order.begin() + s);
        std::sort(out.indices.begin(), out.indices.end());
        out.value = exact_objective(inst.C, out.indices, inst.t);
        return out;
    }

    // suffix_best[p][r]: largest proxy mass from r picks within order[p..].
    // min_need[i][p][r]: smallest constraint-i mass any r picks within
    // order[p..] must incur. Both support exact pruning below.
    std::vector<std::vector<double>> suffix_best(n + 1, std::vector<double>(s + 1, 0.0));
    for (int p = n - 1; p >= 0; --p)
        for (int r = 1; r <= s; ++r) {
            double take = x_hat[order[p]] + suffix_best[p + 1][r - 1];
            double skip = (n - p - 1 >= r) ? suffix_best[p + 1][r] : neg_infinity;
            suffix_best[p][r] = std::max(take, skip);
        }
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<std::vector<double>>> min_need(
        m, std::vector<std::vector<double>>(n + 1, std::vector<double>(s + 1, inf)));
    for (int i = 0; i < m; ++i) {
        for (int p = 0; p <= n; ++p) min_need[i][p][0] = 0.0;
        for (int p = n - 1; p >= 0; --p)
            for (int r = 1; r <= s; ++r) {
                double take = inst.A(i, order[p]) + min_need[i][p + 1][r - 1];
                double skip = min_need[i][p + 1][r];
                min_need[i][p][r] = std::min(take, skip);
            }
    }

    std::vector<int> chosen;
    std::vector<double> lhs(m, 0.0);
    Selection best;
    bool found = false;

    auto dfs = [&](auto&& self, int pos, double obj) -> void {
        int need = s - static_cast<int>(chosen.size());
        if (need == 0) {
            for (int i = 0; i < m; ++i)
                if (lhs[i] > inst.b[i] + 1e-9) return;
            if (!found || obj > best.value + 1e-12) {
                best.indices = chosen;
                std::sort(best.indices.begin(), best.indices.end());
                best.value = obj;
                found = true;
            }
            return;
        }
        if (pos >= n || n - pos < need) return;
        if (found && obj + suffix_best[pos][need] <= best.value + 1e-12) return;
        for (int i = 0; i < m; ++i)
            if (lhs[i] + min_need[i][pos][need] > inst.b[i] + 1e-9) return;

        int j = order[pos];
        chosen.push_back(j);
        for (int i = 0; i < m; ++i) lhs[i] += inst.A(i, j);
        self(self, pos + 1, obj + x_hat[j]);
        chosen.pop_back();
        for (int i = 0; i < m; ++i) lhs[i] -= inst.A(i, j);

        self(self, pos + 1, obj);
    };
    dfs(dfs, 0, 0.0);

    if (!found) return std::nullopt;
    best.value = exact_objective(inst.C, best.indices, inst.t);
    return best;
}

HeuristicReport best_heuristic(const Instance& inst, std::span<const double> relax_point) {
    struct Candidate {
        Selection sel;
        std::string method;
        bool improved = false;
    };
    std::vector<Candidate> cands;

    auto add = [&](Selection sel, const std::string& method) {
        if (inst.m() == 0) {
            Selection polished = local_search(inst.C, sel, inst.t);
            bool improved = polished.value > sel.value + 1e-10;
            cands.push_back({std::move(polished), method, improved});
        } else if (selection_feasible(inst, sel.indices)) {
            cands.push_back({std::move(sel), method, false});
        }
    };

    add(round_continuous(inst.C, inst.s, inst.t), "round_continuous");
    add(greedy(inst.C, inst.s, inst.t), "greedy");
    add(dual_greedy(inst.C, inst.s, inst.t), "dual_greedy");
    if (inst.m() > 0 && !relax_point.empty()) {
        if (auto sel = ilp_round(relax_point, inst)) add(std::move(*sel), "ilp_round");
    }

    HeuristicReport out;
    out.best.value = neg_infinity;
    for (Candidate& c : cands) {
        if (c.sel.value > out.best.value) {
            out.best = std::move(c.sel);
            out.method = c.method;
            out.improved_by_local_search = c.improved;
        }
    }
    if (out.method.empty()) out.method = "none";
    return out;
}

}  // namespace gmesp
