#pragma once

#include <optional>
#include <string>

#include "gmesp/bounds.hpp"
#include "gmesp/exact.hpp"
#include "gmesp/heuristics.hpp"
#include "gmesp/relax.hpp"

namespace gmesp {

enum class NodeAction { branch, prune_bound, prune_int, leaf_eval, infeasible };
const char* to_string(NodeAction a);

// One line of the search journal. zeta is the certified bound that justified
// the action (the evaluated value for leaves), lb the incumbent value the
// moment the action was decided, box the node's bounds before any fixing.
struct NodeRecord {
    long id = 0, parent = -1;
    int depth = 0;
    double zeta = neg_infinity;
    double lb = neg_infinity;
    NodeAction action = NodeAction::branch;
    BoxBounds box;
};

// A variable-fixing decision, kept replayable: the box it acted on, the
// incumbent it compared against, and the indices pinned each way.
struct FixEvent {
    long node_id = 0;
    double lb = neg_infinity;
    BoxBounds box;
    std::vector<int> zeros, ones;
};

struct BBStats {
    long nodes = 0;       // relaxations solved
    long tot_prun = 0;    // nodes discarded by certified bound
    long int_prun = 0;    // of those, with an integer relaxation point
    long tot_int = 0;     // relaxations that came out integer
    double rel_avg = 0.0; // mean of (relaxation value - true value) there
    double rel_std = 0.0; // sample standard deviation of the same
    long var_fix_0 = 0;
    long var_fix_1 = 0;
    long lb_improvements = 0;
    double wall_time = 0.0;  // seconds
};

struct RootReport {
    double root_bound = neg_infinity;     // certified bound at the root
    double heuristic_value = neg_infinity;
    std::string heuristic_method;
    double root_gap = 0.0;                // root_bound - heuristic_value
    std::optional<double> heur_gap;       // optimum - heuristic, when known
};

struct BnbOptions {
    double opt_tol = 1e-6;
    double time_limit = std::numeric_limits<double>::infinity();  // seconds
    bool keep_node_log = false;
    int threads = 1;  // >1 trades reproducible logs for parallel node work
    FactorMethod factor_method = FactorMethod::cholesky_pivoted;
    RelaxOptions relax;
};

struct SolveResult {
    Selection best;               // empty indices when nothing feasible found
    bool proven_optimal = false;
    double global_upper_bound = neg_infinity;  // certified bound on the optimum
    bool hit_time_limit = false;
    BBStats stats;
    RootReport root;
    std::vector<NodeRecord> node_log;  // filled when keep_node_log
    std::vector<FixEvent> fix_log;
};

// Exact solver: certified-bound pruning on a best-bound-first queue, one
// convex relaxation per node, safe variable fixing, most-fractional
// branching with single-completion children evaluated in place.
SolveResult branch_and_bound(const Instance& inst, const BnbOptions& opts = {});

// Root relaxation, certificate and heuristic portfolio only; optimum, when
// supplied, also yields the heuristic's absolute gap.
RootReport root_report(const Instance& inst, std::optional<double> optimum = std::nullopt,
                       const BnbOptions& opts = {});

}  // namespace gmesp
