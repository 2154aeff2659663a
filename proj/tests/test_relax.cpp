#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "gmesp/exact.hpp"
#include "gmesp/instance.hpp"
#include "gmesp/relax.hpp"
#include "helpers.hpp"

using namespace gmesp;
using testutil::diag_matrix;
using testutil::random_psd;

namespace {

Polytope plain_polytope(int n, int s) { return Polytope{s, BoxBounds::full(n), Matrix(), {}}; }

double budget_error(std::span<const double> x, int s) {
    return std::abs(std::accumulate(x.begin(), x.end(), 0.0) - s);
}

}  // namespace

TEST_CASE("vertex oracle fills the largest gradients") {
    std::vector<double> g{3.0, 2.0, 1.0};
    auto v = lp_oracle(g, plain_polytope(3, 2));
    REQUIRE(v.has_value());
    CHECK(*v == std::vector<double>{1.0, 1.0, 0.0});
}

TEST_CASE("vertex oracle honors pinned coordinates") {
    std::vector<double> g{3.0, 2.0, 1.0};
    Polytope p = plain_polytope(3, 2);
    p.box.l[2] = 1;  // index 2 pinned in
    auto v = lp_oracle(g, p);
    REQUIRE(v.has_value());
    CHECK(*v == std::vector<double>{1.0, 0.0, 1.0});

    p = plain_polytope(3, 2);
    p.box.c[0] = 0;  // index 0 pinned out
    v = lp_oracle(g, p);
    REQUIRE(v.has_value());
    CHECK(*v == std::vector<double>{0.0, 1.0, 1.0});
}

TEST_CASE("vertex oracle detects empty regions") {
    Polytope p = plain_polytope(3, 2);
    p.box.c = {0, 0, 1};  // capacity 1 < s
    std::vector<double> g{1.0, 1.0, 1.0};
    CHECK_FALSE(lp_oracle(g, p).has_value());

    // A side constraint nobody can satisfy.
    p = plain_polytope(3, 2);
    p.A = Matrix(1, 3, 1.0);
    p.b = {1.0};
    CHECK_FALSE(lp_oracle(g, p).has_value());
}

TEST_CASE("constrained vertex oracle matches exhaustive enumeration") {
    // With one side constraint a maximizer exists with at most one
    // fractional pair; compare against a fine scan over candidate supports.
    Instance inst = generate_instance(5, 2, 2, 1, 101);
    Polytope p = Polytope::from(inst, BoxBounds::full(5));
    std::vector<double> g{0.9, -0.2, 0.4, 1.3, 0.1};
    auto v = lp_oracle(g, p);
    REQUIRE(v.has_value());
    double got = std::inner_product(v->begin(), v->end(), g.begin(), 0.0);

    // Feasibility of the returned vertex.
    CHECK(budget_error(*v, 2) <= 1e-8);
    for (double xv : *v) {
        CHECK(xv >= -1e-9);
        CHECK(xv <= 1.0 + 1e-9);
    }
    for (int i = 0; i < p.m(); ++i) {
        double lhs = 0.0;
        for (int j = 0; j < 5; ++j) lhs += p.A(i, j) * (*v)[j];
        CHECK(lhs <= p.b[i] + 1e-7);
    }

    // No binary selection beats the LP vertex.
    double best_binary = -1e300;
    for (int a = 0; a < 5; ++a)
        for (int bb = a + 1; bb < 5; ++bb) {
            std::vector<int> sel{a, bb};
            if (!selection_feasible(inst, sel)) continue;
            best_binary = std::max(best_binary, g[a] + g[bb]);
        }
    CHECK(got >= best_binary - 1e-8);
}

TEST_CASE("relaxation of the identity hits the closed form") {
    Instance inst;
    inst.C = SymMatrix::identity(4);
    inst.s = 2;
    inst.t = 1;
    RelaxResult r = solve_ddgfact(inst);
    REQUIRE(r.status == RelaxStatus::ok);
    // max phi_1 over the budget-2 box is log 2, reached at any permutation
    // of (1,1,0,0) and on the uniform point alike.
    CHECK(r.value == doctest::Approx(std::log(2.0)).epsilon(1e-5));
    CHECK(r.fw_gap >= 0.0);
    CHECK(r.fw_gap <= 1e-4);
}

TEST_CASE("relaxation dominates the best binary point") {
    Selection ref;
    Instance inst;
    inst.C = diag_matrix({1.0, 2.0, 3.0, 4.0});
    inst.s = 2;
    inst.t = 2;
    ref = brute_force(inst);
    RelaxResult r = solve_ddgfact(inst);
    REQUIRE(r.status == RelaxStatus::ok);
    CHECK(r.value >= ref.value - 1e-6);

    for (std::uint64_t seed : {201, 202, 203}) {
        Instance g = generate_instance(9, 4, 3, 0, seed);
        Selection best = brute_force(g);
        RelaxResult rr = solve_ddgfact(g);
        REQUIRE(rr.status == RelaxStatus::ok);
        CHECK(rr.value >= best.value - 1e-6);
    }
}

TEST_CASE("relaxation dominates the constrained optimum too") {
    for (std::uint64_t seed : {211, 212}) {
        Instance g = generate_instance(8, 3, 2, 2, seed);
        Selection best = brute_force(g);
        RelaxResult rr = solve_ddgfact(g);
        REQUIRE(rr.status == RelaxStatus::ok);
        CHECK(rr.value >= best.value - 1e-6);
    }
}

TEST_CASE("relaxation value is factorization independent") {
    Instance inst = generate_instance(7, 3, 2, 0, 221);
    Polytope p = Polytope::from(inst, BoxBounds::full(7));
    RelaxOptions opts;
    opts.tol = 1e-8;
    double v1 = solve_ddgfact(factorize(inst.C, FactorMethod::cholesky_pivoted), p, 2, opts).value;
    double v2 = solve_ddgfact(factorize(inst.C, FactorMethod::spectral), p, 2, opts).value;
    double v3 = solve_ddgfact(factorize(inst.C, FactorMethod::sqrt), p, 2, opts).value;
    CHECK(v1 == doctest::Approx(v2).epsilon(1e-5));
    CHECK(v1 == doctest::Approx(v3).epsilon(1e-5));
}

TEST_CASE("relaxation value shifts by t log scale") {
    Instance inst = generate_instance(7, 3, 2, 0, 231);
    Instance scaled = inst;
    SymMatrix cs(7);
    for (int i = 0; i < 7; ++i)
        for (int j = i; j < 7; ++j) cs.set(i, j, 5.0 * inst.C(i, j));
    scaled.C = cs;
    double base = solve_ddgfact(inst).value;
    double shifted = solve_ddgfact(scaled).value;
    CHECK(shifted == doctest::Approx(base + 2.0 * std::log(5.0)).epsilon(1e-5));
}

TEST_CASE("relaxation value is concave in t") {
    Instance inst = generate_instance(8, 4, 1, 0, 241);
    std::vector<double> v;
    for (int t = 1; t <= 4; ++t) {
        Instance it = inst;
        it.t = t;
        v.push_back(solve_ddgfact(it).value);
    }
    for (int t = 1; t + 1 < 4; ++t)
        CHECK(v[t] - v[t - 1] >= v[t + 1] - v[t] - 1e-5);
}

TEST_CASE("accepted iterates never decrease") {
    Instance inst = generate_instance(8, 4, 3, 0, 251);
    RelaxOptions opts;
    opts.record_history = true;
    RelaxResult r = solve_ddgfact(inst, opts);
    REQUIRE(r.status == RelaxStatus::ok);
    REQUIRE(!r.history.empty());
    for (std::size_t i = 1; i < r.history.size(); ++i)
        CHECK(r.history[i] >= r.history[i - 1] - 1e-12);
    CHECK(r.history.back() == doctest::Approx(r.value));
}

TEST_CASE("solution stays inside the region") {
    Instance inst = generate_instance(8, 3, 2, 2, 261);
    RelaxResult r = solve_ddgfact(inst);
    REQUIRE(r.status == RelaxStatus::ok);
    CHECK(budget_error(r.x_hat, 3) <= 1e-9);
    for (double xv : r.x_hat) {
        CHECK(xv >= -1e-9);
        CHECK(xv <= 1.0 + 1e-9);
    }
    for (int i = 0; i < inst.m(); ++i) {
        double lhs = 0.0;
        for (int j = 0; j < 8; ++j) lhs += inst.A(i, j) * r.x_hat[j];
        CHECK(lhs <= inst.b[i] + 1e-7);
    }
}

TEST_CASE("crossed boxes report infeasibility") {
    Instance inst = generate_instance(6, 3, 2, 0, 271);
    BoxBounds box = BoxBounds::full(6);
    box.l = {1, 1, 1, 1, 0, 0};  // forces four ones against budget three
    Factor f = factorize(inst.C, FactorMethod::cholesky_pivoted);
    RelaxResult r = solve_ddgfact(f, Polytope{3, box, Matrix(), {}}, 2);
    CHECK(r.status == RelaxStatus::infeasible);
}

TEST_CASE("warm start from the optimum keeps its value") {
    Instance inst = generate_instance(8, 4, 3, 0, 281);
    RelaxResult cold = solve_ddgfact(inst);
    REQUIRE(cold.status == RelaxStatus::ok);
    Factor f = factorize(inst.C, FactorMethod::cholesky_pivoted);
    Polytope p = Polytope::from(inst, BoxBounds::full(8));
    RelaxResult warm = solve_ddgfact(f, p, 3, {}, cold.x_hat);
    REQUIRE(warm.status == RelaxStatus::ok);
    // Accepted iterates never decrease, so the warm run can only match or
    // improve the start's value; both sit at the same maximum.
    CHECK(warm.value >= cold.value - 1e-9);
    CHECK(warm.value == doctest::Approx(cold.value).epsilon(1e-6));
}

TEST_CASE("fw gap certifies near-optimality on an exactly solvable case") {
    // On the identity the surrogate is symmetric and the optimum is known:
    // a tight gap must place the value within gap of log 2.
    Instance inst;
    inst.C = SymMatrix::identity(5);
    inst.s = 2;
    inst.t = 1;
    RelaxOptions opts;
    opts.tol = 1e-8;
    RelaxResult r = solve_ddgfact(inst, opts);
    REQUIRE(r.status == RelaxStatus::ok);
    CHECK(std::log(2.0) - r.value <= r.fw_gap + 1e-9);
}
