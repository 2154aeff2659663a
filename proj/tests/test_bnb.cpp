#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "gmesp/bnb.hpp"
#include "gmesp/exact.hpp"
#include "gmesp/instance.hpp"
#include "helpers.hpp"

using namespace gmesp;
using testutil::diag_matrix;
using testutil::random_psd;

namespace {

bool contains(const std::vector<int>& v, int j) {
    return std::find(v.begin(), v.end(), j) != v.end();
}

}  // namespace

TEST_CASE("solver proves the diagonal optimum") {
    Instance inst;
    inst.C = diag_matrix({1.0, 2.0, 3.0, 4.0});
    inst.s = 2;
    inst.t = 1;
    SolveResult res = branch_and_bound(inst);
    CHECK(res.proven_optimal);
    CHECK(res.best.value == doctest::Approx(std::log(4.0)).epsilon(1e-9));
    CHECK(contains(res.best.indices, 3));
    CHECK(res.global_upper_bound >= res.best.value - 1e-9);
}

TEST_CASE("a side constraint cutting the top index lowers the optimum") {
    Instance inst;
    inst.C = diag_matrix({1.0, 2.0, 3.0, 4.0});
    inst.s = 2;
    inst.t = 1;
    inst.A = Matrix(1, 4);
    inst.A(0, 3) = 1.0;
    inst.b = {0.0};
    SolveResult res = branch_and_bound(inst);
    CHECK(res.proven_optimal);
    CHECK(res.best.value == doctest::Approx(std::log(3.0)).epsilon(1e-9));
    CHECK(!contains(res.best.indices, 3));
    CHECK(selection_feasible(inst, res.best.indices));
}

TEST_CASE("solver matches enumeration on random instances") {
    struct Case {
        int n, s, t, m;
        unsigned seed;
    };
    for (Case tc : {Case{8, 3, 2, 0, 501u}, Case{9, 4, 3, 0, 502u}, Case{8, 4, 4, 0, 503u},
                    Case{8, 3, 2, 2, 511u}, Case{9, 4, 3, 2, 512u}}) {
        Instance inst = generate_instance(tc.n, tc.s, tc.t, tc.m, tc.seed);
        Selection opt = brute_force(inst);
        SolveResult res = branch_and_bound(inst);
        CHECK(res.proven_optimal);
        CHECK(res.best.value == doctest::Approx(opt.value).epsilon(1e-6));
        if (tc.m > 0) CHECK(selection_feasible(inst, res.best.indices));
    }
}

TEST_CASE("identity root report shows the closed-form gap") {
    Instance inst;
    inst.C = SymMatrix::identity(4);
    inst.s = 2;
    inst.t = 1;
    RootReport rep = root_report(inst, 0.0);
    // Every heuristic selection scores 0 on the identity, while the
    // continuous bound sits at t log(s/t).
    CHECK(rep.heuristic_value == doctest::Approx(0.0));
    CHECK(rep.root_bound == doctest::Approx(std::log(2.0)).epsilon(1e-4));
    CHECK(rep.root_gap == doctest::Approx(std::log(2.0)).epsilon(1e-4));
    REQUIRE(rep.heur_gap.has_value());
    CHECK(*rep.heur_gap == doctest::Approx(0.0));
}

TEST_CASE("root report never puts the bound below the heuristic") {
    Instance inst;
    inst.C = diag_matrix({1.0, 2.0, 3.0, 4.0, 5.0});
    inst.s = 2;
    inst.t = 2;
    RootReport rep = root_report(inst);
    CHECK(rep.root_gap >= -1e-6);
    CHECK(rep.root_bound >= rep.heuristic_value - 1e-6);
    CHECK(!rep.heur_gap.has_value());
}

TEST_CASE("search statistics stay internally consistent") {
    Instance inst = generate_instance(9, 4, 3, 0, 521);
    SolveResult res = branch_and_bound(inst);
    CHECK(res.stats.nodes >= 1);
    CHECK(res.stats.int_prun <= res.stats.tot_prun);
    CHECK(res.stats.int_prun <= res.stats.tot_int);
    CHECK(res.stats.wall_time >= 0.0);
    CHECK(res.stats.var_fix_0 >= 0);
    CHECK(res.stats.var_fix_1 >= 0);
    if (res.stats.tot_int > 0) CHECK(res.stats.rel_avg >= -1e-9);
}

TEST_CASE("two single-threaded runs replay the same search") {
    Instance inst = generate_instance(8, 3, 2, 2, 531);
    BnbOptions opts;
    opts.keep_node_log = true;
    SolveResult a = branch_and_bound(inst, opts);
    SolveResult b = branch_and_bound(inst, opts);
    CHECK(a.best.indices == b.best.indices);
    CHECK(a.best.value == b.best.value);
    CHECK(a.stats.nodes == b.stats.nodes);
    REQUIRE(a.node_log.size() == b.node_log.size());
    for (std::size_t i = 0; i < a.node_log.size(); ++i) {
        CHECK(a.node_log[i].id == b.node_log[i].id);
        CHECK(a.node_log[i].action == b.node_log[i].action);
        CHECK(a.node_log[i].zeta == b.node_log[i].zeta);
    }
}

TEST_CASE("journal incumbents never move backward") {
    Instance inst = generate_instance(9, 4, 3, 0, 541);
    BnbOptions opts;
    opts.keep_node_log = true;
    SolveResult res = branch_and_bound(inst, opts);
    REQUIRE(!res.node_log.empty());
    double lb = neg_infinity;
    for (const NodeRecord& rec : res.node_log) {
        CHECK(rec.lb >= lb - 1e-12);
        lb = std::max(lb, rec.lb);
    }
    CHECK(lb == doctest::Approx(res.best.value));
}

TEST_CASE("pruned boxes hold nothing better than their recorded bound") {
    Instance inst = generate_instance(8, 4, 3, 0, 555);
    BnbOptions opts;
    opts.keep_node_log = true;
    SolveResult res = branch_and_bound(inst, opts);
    REQUIRE(res.proven_optimal);
    int replayed = 0;
    for (const NodeRecord& rec : res.node_log) {
        if (rec.action != NodeAction::prune_bound) continue;
        Selection boxed = brute_force_in_box(inst, rec.box);
        if (!boxed.indices.empty()) {
            CHECK(boxed.value <= rec.zeta + 1e-6);
            CHECK(boxed.value <= res.best.value + 1e-6);
        }
        ++replayed;
    }
    CHECK(replayed >= 1);
}

TEST_CASE("recorded fixes never cut an improving selection") {
    Instance inst = generate_instance(9, 4, 3, 0, 561);
    BnbOptions opts;
    opts.keep_node_log = true;
    SolveResult res = branch_and_bound(inst, opts);
    for (const FixEvent& ev : res.fix_log) {
        Selection boxed = brute_force_in_box(inst, ev.box);
        if (boxed.indices.empty() || boxed.value <= ev.lb + 1e-9) continue;
        for (int j : ev.zeros) CHECK(!contains(boxed.indices, j));
        for (int j : ev.ones) CHECK(contains(boxed.indices, j));
    }
}

TEST_CASE("a second worker thread reaches the same value") {
    Instance inst = generate_instance(8, 4, 3, 0, 571);
    SolveResult serial = branch_and_bound(inst);
    BnbOptions opts;
    opts.threads = 2;
    SolveResult parallel = branch_and_bound(inst, opts);
    CHECK(parallel.proven_optimal);
    CHECK(parallel.best.value == doctest::Approx(serial.best.value).epsilon(1e-9));
}

TEST_CASE("a zero time budget reports the truncation honestly") {
    Instance inst = generate_instance(9, 4, 3, 0, 581);
    Selection opt = brute_force(inst);
    BnbOptions opts;
    opts.time_limit = 0.0;
    SolveResult res = branch_and_bound(inst, opts);
    CHECK(res.hit_time_limit);
    CHECK(!res.proven_optimal);
    // The root work already ran, so the incumbent and bound still sandwich
    // the optimum.
    CHECK(res.global_upper_bound >= opt.value - 1e-6);
    if (!res.best.indices.empty()) CHECK(res.best.value <= opt.value + 1e-9);
}

TEST_CASE("node actions translate to distinct labels") {
    std::vector<NodeAction> all{NodeAction::branch, NodeAction::prune_bound,
                                NodeAction::prune_int, NodeAction::leaf_eval,
                                NodeAction::infeasible};
    std::vector<std::string> seen;
    for (NodeAction a : all) {
        std::string s = to_string(a);
        CHECK(!s.empty());
        CHECK(std::find(seen.begin(), seen.end(), s) == seen.end());
        seen.push_back(s);
    }
}
