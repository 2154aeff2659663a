#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "gmesp/exact.hpp"
#include "gmesp/heuristics.hpp"
#include "gmesp/instance.hpp"
#include "gmesp/relax.hpp"
#include "gmesp/rng.hpp"
#include "helpers.hpp"

using namespace gmesp;
using testutil::diag_matrix;
using testutil::random_psd;

namespace {

Selection enumerate_optimum(const SymMatrix& c, int s, int t) {
    Instance inst;
    inst.C = c;
    inst.s = s;
    inst.t = t;
    return brute_force(inst);
}

}  // namespace

TEST_CASE("eigenvector rounding keeps the heaviest spectral rows") {
    SymMatrix c = diag_matrix({1.0, 2.0, 3.0, 4.0});
    // Top eigenvector is e_3; the s=2 pick pairs it with the largest
    // remaining diagonal entry under the zero-mass tie rule.
    Selection sel = round_continuous(c, 2, 1);
    CHECK(sel.indices == std::vector<int>{2, 3});
    CHECK(sel.value == doctest::Approx(std::log(4.0)));
}

TEST_CASE("eigenvector rounding reports the recomputed objective") {
    SymMatrix c = random_psd(7, 7, 71);
    Selection sel = round_continuous(c, 3, 2);
    CHECK(static_cast<int>(sel.indices.size()) == 3);
    CHECK(std::is_sorted(sel.indices.begin(), sel.indices.end()));
    CHECK(sel.value == doctest::Approx(exact_objective(c, sel.indices, 2)).epsilon(1e-12));
}

TEST_CASE("rounding rejects bad parameters") {
    SymMatrix c = SymMatrix::identity(4);
    CHECK_THROWS_AS(round_continuous(c, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(round_continuous(c, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(round_continuous(c, 2, 3), std::invalid_argument);
}

TEST_CASE("forward greedy ties keep the smallest index") {
    SymMatrix c = diag_matrix({1.0, 2.0, 3.0, 4.0});
    // t=1: after index 3, every partner leaves the top eigenvalue at 4, so
    // the tie rule fills in index 0.
    Selection sel = greedy(c, 2, 1);
    CHECK(sel.indices == std::vector<int>{0, 3});
    CHECK(sel.value == doctest::Approx(std::log(4.0)));
}

TEST_CASE("forward greedy finds the diagonal optimum at t=s") {
    SymMatrix c = diag_matrix({1.0, 2.0, 3.0, 4.0});
    Selection sel = greedy(c, 2, 2);
    CHECK(sel.indices == std::vector<int>{2, 3});
    CHECK(sel.value == doctest::Approx(std::log(12.0)));
}

TEST_CASE("backward greedy peels down to the best diagonal pair") {
    SymMatrix c = diag_matrix({1.0, 2.0, 3.0, 4.0});
    Selection sel = dual_greedy(c, 2, 2);
    CHECK(sel.indices == std::vector<int>{2, 3});
    CHECK(sel.value == doctest::Approx(std::log(12.0)));
}

TEST_CASE("greedy values never exceed the enumerated optimum") {
    for (unsigned seed : {401u, 402u, 403u}) {
        SymMatrix c = random_psd(8, 8, seed);
        Selection opt = enumerate_optimum(c, 4, 3);
        CHECK(greedy(c, 4, 3).value <= opt.value + 1e-9);
        CHECK(dual_greedy(c, 4, 3).value <= opt.value + 1e-9);
        CHECK(round_continuous(c, 4, 3).value <= opt.value + 1e-9);
    }
}

TEST_CASE("local search leaves the enumerated optimum alone") {
    SymMatrix c = random_psd(7, 7, 411);
    Selection opt = enumerate_optimum(c, 3, 2);
    Selection polished = local_search(c, opt, 2);
    CHECK(polished.indices == opt.indices);
    CHECK(polished.value == doctest::Approx(opt.value));
}

TEST_CASE("local search climbs from the worst diagonal pair to the best") {
    SymMatrix c = diag_matrix({1.0, 2.0, 3.0, 4.0});
    Selection start{{0, 1}, std::log(2.0)};
    Selection sel = local_search(c, start, 2);
    CHECK(sel.indices == std::vector<int>{2, 3});
    CHECK(sel.value == doctest::Approx(std::log(12.0)));
}

TEST_CASE("local search never loses value") {
    std::mt19937_64 rng(421);
    for (int trial = 0; trial < 5; ++trial) {
        SymMatrix c = random_psd(8, 8, 430 + trial);
        std::vector<int> start;
        while (static_cast<int>(start.size()) < 4) {
            int j = static_cast<int>(bounded_int(rng, 7));
            if (std::find(start.begin(), start.end(), j) == start.end()) start.push_back(j);
        }
        std::sort(start.begin(), start.end());
        Selection s0{start, exact_objective(c, start, 3)};
        Selection polished = local_search(c, s0, 3);
        CHECK(polished.value >= s0.value - 1e-12);
        CHECK(polished.value == doctest::Approx(exact_objective(c, polished.indices, 3)));
    }
}

TEST_CASE("proxy rounding without constraints takes the top weights") {
    Instance inst;
    inst.C = diag_matrix({1.0, 2.0, 3.0, 4.0});
    inst.s = 2;
    inst.t = 2;
    std::vector<double> x_hat{0.1, 0.9, 0.5, 0.5};
    auto sel = ilp_round(x_hat, inst);
    REQUIRE(sel.has_value());
    // Weight tie between 2 and 3 resolves toward the smaller index.
    CHECK(sel->indices == std::vector<int>{1, 2});
    CHECK(sel->value == doctest::Approx(std::log(6.0)));
}

TEST_CASE("proxy rounding maximizes the proxy mass among feasible selections") {
    Instance inst = generate_instance(9, 4, 3, 3, 441);
    RelaxResult rel = solve_ddgfact(inst);
    REQUIRE(rel.status == RelaxStatus::ok);
    auto sel = ilp_round(rel.x_hat, inst);
    REQUIRE(sel.has_value());
    CHECK(selection_feasible(inst, sel->indices));

    auto mass = [&](std::span<const int> idx) {
        double v = 0.0;
        for (int j : idx) v += rel.x_hat[j];
        return v;
    };
    // Enumerate every feasible 4-subset and confirm none carries more mass.
    double best_mass = mass(sel->indices);
    std::vector<int> comb;
    long total = binomial(9, 4);
    for (long r = 0; r < total; ++r) {
        comb = combination_at(9, 4, r);
        if (!selection_feasible(inst, comb)) continue;
        CHECK(mass(comb) <= best_mass + 1e-9);
    }
}

TEST_CASE("proxy rounding returns a binary feasible point unchanged") {
    Instance inst = generate_instance(8, 3, 2, 2, 451);
    Selection opt = brute_force(inst);
    REQUIRE(!opt.indices.empty());
    std::vector<double> x_hat(8, 0.0);
    for (int j : opt.indices) x_hat[j] = 1.0;
    auto sel = ilp_round(x_hat, inst);
    REQUIRE(sel.has_value());
    CHECK(sel->indices == opt.indices);
}

TEST_CASE("proxy rounding detects an empty feasible region") {
    Instance inst;
    inst.C = SymMatrix::identity(5);
    inst.s = 3;
    inst.t = 2;
    inst.A = Matrix(1, 5);
    for (int j = 0; j < 5; ++j) inst.A(0, j) = 1.0;
    inst.b = {2.0};
    std::vector<double> x_hat(5, 0.5);
    CHECK(!ilp_round(x_hat, inst).has_value());
}

TEST_CASE("proxy rounding validates the weight length") {
    Instance inst;
    inst.C = SymMatrix::identity(4);
    inst.s = 2;
    inst.t = 1;
    std::vector<double> x_hat(3, 0.5);
    CHECK_THROWS_AS(ilp_round(x_hat, inst), std::invalid_argument);
}

TEST_CASE("heuristic portfolio beats each raw constructor") {
    Instance inst;
    inst.C = random_psd(8, 8, 461);
    inst.s = 4;
    inst.t = 3;
    HeuristicReport rep = best_heuristic(inst);
    CHECK(rep.best.value >= greedy(inst.C, 4, 3).value - 1e-12);
    CHECK(rep.best.value >= dual_greedy(inst.C, 4, 3).value - 1e-12);
    CHECK(rep.best.value >= round_continuous(inst.C, 4, 3).value - 1e-12);
    CHECK(rep.best.value ==
          doctest::Approx(exact_objective(inst.C, rep.best.indices, inst.t)).epsilon(1e-12));
    std::set<std::string> methods{"round_continuous", "greedy", "dual_greedy", "ilp_round"};
    CHECK(methods.count(rep.method) == 1);
}

TEST_CASE("heuristic portfolio only reports feasible selections when constrained") {
    for (unsigned seed : {471u, 472u, 473u}) {
        Instance inst = generate_instance(9, 4, 3, 3, seed);
        RelaxResult rel = solve_ddgfact(inst);
        REQUIRE(rel.status == RelaxStatus::ok);
        HeuristicReport rep = best_heuristic(inst, rel.x_hat);
        if (rep.method == "none") continue;
        CHECK(selection_feasible(inst, rep.best.indices));
        CHECK(rep.best.value ==
              doctest::Approx(exact_objective(inst.C, rep.best.indices, inst.t)).epsilon(1e-12));
        Selection opt = brute_force(inst);
        CHECK(rep.best.value <= opt.value + 1e-9);
    }
}

TEST_CASE("heuristic portfolio flags a genuine local-search improvement") {
    // Unconstrained portfolios polish every constructor, so the reported
    // value can only move up relative to the raw selections.
    SymMatrix c = random_psd(9, 9, 481);
    Instance inst;
    inst.C = c;
    inst.s = 4;
    inst.t = 4;
    HeuristicReport rep = best_heuristic(inst);
    double raw_best = std::max({greedy(c, 4, 4).value, dual_greedy(c, 4, 4).value,
                                round_continuous(c, 4, 4).value});
    CHECK(rep.best.value >= raw_best - 1e-12);
    if (rep.improved_by_local_search) CHECK(rep.best.value > raw_best - 1e-9);
}
