#include "gmesp/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <limits>
#include <mutex>
#include <queue>
#include <thread>
#include <vector>

namespace gmesp {

const char* to_string(NodeAction a) {
    switch (a) {
        case NodeAction::branch: return "branch";
        case NodeAction::prune_bound: return "prune_bound";
        case NodeAction::prune_int: return "prune_int";
        case NodeAction::leaf_eval: return "leaf_eval";
        case NodeAction::infeasible: return "infeasible";
    }
    return "?";
}

namespace {

using clock_type = std::chrono::steady_clock;

constexpr double kIntTol = 1e-5;       // coordinate counts as integer within this
constexpr int kProbeIters = 120;      // cheap first pass before the full solve

struct OpenNode {
    long id = 0, parent = -1;
    int depth = 0;
    double ub = std::numeric_limits<double>::infinity();  // inherited bound
    BoxBounds box;
    std::vector<double> warm;  // parent relaxation point, may be empty
};

// Max-heap on the inherited bound, oldest node first among equals.
struct NodeOrder {
    bool operator()(const OpenNode& a, const OpenNode& b) const {
        if (a.ub != b.ub) return a.ub < b.ub;
        return a.id > b.id;
    }
};

struct Welford {
    long n = 0;
    double mean = 0.0, m2 = 0.0;
    void push(double v) {
        ++n;
        double d = v - mean;
        mean += d / n;
        m2 += d * (v - mean);
    }
    double avg() const { return n ? mean : std::numeric_limits<double>::quiet_NaN(); }
    double stddev() const {
        if (n < 2) return std::numeric_limits<double>::quiet_NaN();
        return std::sqrt(m2 / (n - 1));
    }
};

struct SearchState {
    const Instance* inst = nullptr;
    const Factor* factor = nullptr;
    BnbOptions opts;

    std::mutex mx;
    std::condition_variable cv;
    std::priority_queue<OpenNode, std::vector<OpenNode>, NodeOrder> open;
    Selection best;
    double lb = neg_infinity;
    long next_id = 0;
    int active = 0;
    bool out_of_time = false;

    BBStats stats;
    Welford rel;
    std::vector<NodeRecord> log;
    std::vector<FixEvent> fixes;
    clock_type::time_point started;

    double elapsed() const {
        return std::chrono::duration<double>(clock_type::now() - started).count();
    }
    long claim_id() { return next_id++; }  // caller holds mx

    void record(NodeRecord rec) {  // caller holds mx
        if (opts.keep_node_log) log.push_back(std::move(rec));
    }

    // Strictly better value replaces the incumbent; an exact tie keeps the
    // lexicographically smaller support so reruns agree on the witness.
    bool offer(const std::vector<int>& sel, double value) {  // caller holds mx
        if (!std::isfinite(value) || sel.empty()) return false;
        if (value > lb) {
            lb = value;
            best.indices = sel;
            best.value = value;
            ++stats.lb_improvements;
            return true;
        }
        if (value == lb && !best.indices.empty() && sel < best.indices) best.indices = sel;
        return false;
    }
};

std::vector<int> support_of(const std::vector<double>& x) {
    std::vector<int> s;
    for (int j = 0; j < static_cast<int>(x.size()); ++j)
        if (x[j] > 0.5) s.push_back(j);
    return s;
}

bool is_integral(const std::vector<double>& x) {
    for (double v : x)
        if (std::min(v, 1.0 - v) > kIntTol) return false;
    return true;
}

// The box pins every coordinate, or its budget forces all free ones one way.
std::optional<std::vector<int>> forced_completion(const BoxBounds& box, int s) {
    if (box.sum_l() == s) {
        std::vector<int> sel;
        for (int j = 0; j < static_cast<int>(box.l.size()); ++j)
            if (box.l[j] == 1) sel.push_back(j);
        return sel;
    }
    if (box.sum_c() == s) {
        std::vector<int> sel;
        for (int j = 0; j < static_cast<int>(box.c.size()); ++j)
            if (box.c[j] == 1) sel.push_back(j);
        return sel;
    }
    return std::nullopt;
}

struct NodeEval {
    RelaxResult relax;
    std::optional<DualCertificate> cert;
    double zeta = neg_infinity;  // tightest certified bound seen for the node
};

// Solve the node relaxation with an early certification probe: a short run
// often already proves the node prunable, and its certificate stays valid
// regardless of how far the solve went.
NodeEval evaluate_node(SearchState& st, const OpenNode& node, double lb_snapshot) {
    NodeEval ev;
    Polytope poly = Polytope::from(*st.inst, node.box);
    RelaxOptions ro = st.opts.relax;

    if (ro.max_iters > kProbeIters) {
        RelaxOptions probe = ro;
        probe.max_iters = kProbeIters;
        RelaxResult first = solve_ddgfact(*st.factor, poly, st.inst->t, probe, node.warm);
        if (first.status != RelaxStatus::ok) {
            ev.relax = std::move(first);
            return ev;
        }
        DualCertificate cert = certify_point(*st.factor, first.x_hat, *st.inst, node.box);
        ev.zeta = cert.zeta;
        if (first.fw_gap <= ro.tol || cert.zeta <= lb_snapshot + st.opts.opt_tol) {
            ev.relax = std::move(first);
            ev.cert = std::move(cert);
            return ev;
        }
        // Not settled yet: resume from the probe's point with the full budget.
        RelaxResult second = solve_ddgfact(*st.factor, poly, st.inst->t, ro, first.x_hat);
        if (second.status != RelaxStatus::ok) {  // defensive; warm point was feasible
            ev.relax = std::move(first);
            ev.cert = std::move(cert);
            return ev;
        }
        DualCertificate cert2 = certify_point(*st.factor, second.x_hat, *st.inst, node.box);
        ev.zeta = std::min(ev.zeta, cert2.zeta);
        ev.relax = std::move(second);
        ev.cert = std::move(cert2);
        return ev;
    }

    ev.relax = solve_ddgfact(*st.factor, poly, st.inst->t, ro, node.warm);
    if (ev.relax.status == RelaxStatus::ok) {
        ev.cert = certify_point(*st.factor, ev.relax.x_hat, *st.inst, node.box);
        ev.zeta = ev.cert->zeta;
    }
    return ev;
}

// Evaluate a fully determined child in place of queueing it.
void eval_leaf(SearchState& st, long id, long parent, int depth, const BoxBounds& box,
               const std::vector<int>& sel) {
    double value = neg_infinity;
    if (selection_feasible(*st.inst, sel)) value = exact_objective(st.inst->C, sel, st.inst->t);
    std::lock_guard<std::mutex> lk(st.mx);
    st.offer(sel, value);
    st.record({id, parent, depth, value, st.lb, NodeAction::leaf_eval, box});
}

// Full treatment of one dequeued node. Returns child nodes to enqueue.
std::vector<OpenNode> process_node(SearchState& st, const OpenNode& node,
                                   std::optional<NodeEval> pre) {
    const Instance& inst = *st.inst;
    const int n = inst.n();

    double lb_snapshot;
    {
        std::lock_guard<std::mutex> lk(st.mx);
        lb_snapshot = st.lb;
    }

    NodeEval ev = pre ? std::move(*pre) : evaluate_node(st, node, lb_snapshot);

    if (ev.relax.status == RelaxStatus::infeasible) {
        std::lock_guard<std::mutex> lk(st.mx);
        st.record({node.id, node.parent, node.depth, neg_infinity, st.lb,
                   NodeAction::infeasible, node.box});
        return {};
    }

    {
        std::lock_guard<std::mutex> lk(st.mx);
        ++st.stats.nodes;
    }

    if (ev.relax.status == RelaxStatus::no_finite_start) {
        // Every point tried had fewer than t active directions; the node's
        // objective is identically -inf, which never beats any incumbent.
        std::lock_guard<std::mutex> lk(st.mx);
        ++st.stats.tot_prun;
        st.record({node.id, node.parent, node.depth, neg_infinity, st.lb,
                   NodeAction::prune_bound, node.box});
        return {};
    }

    const std::vector<double>& x_hat = ev.relax.x_hat;
    bool integral = is_integral(x_hat);

    {
        std::lock_guard<std::mutex> lk(st.mx);
        lb_snapshot = st.lb;
        if (ev.zeta <= lb_snapshot + st.opts.opt_tol) {
            ++st.stats.tot_prun;
            NodeAction act = NodeAction::prune_bound;
            if (integral) {
                ++st.stats.int_prun;
                ++st.stats.tot_int;
                act = NodeAction::prune_int;
            }
            st.record({node.id, node.parent, node.depth, ev.zeta, st.lb, act, node.box});
            return {};
        }
    }

    if (integral) {
        std::vector<int> sel = support_of(x_hat);
        double value = neg_infinity;
        if (static_cast<int>(sel.size()) == inst.s && selection_feasible(inst, sel))
            value = exact_objective(inst.C, sel, inst.t);
        std::lock_guard<std::mutex> lk(st.mx);
        ++st.stats.tot_int;
        if (std::isfinite(value)) st.rel.push(ev.relax.value - value);
        st.offer(sel, value);
        if (ev.zeta <= st.lb + st.opts.opt_tol) {
            ++st.stats.tot_prun;
            ++st.stats.int_prun;
            st.record({node.id, node.parent, node.depth, ev.zeta, st.lb,
                       NodeAction::prune_int, node.box});
            return {};
        }
        // The bound still exceeds the incumbent: the relaxation point being
        // integer does not certify node optimality, so branching continues.
    }

    // Certificate-driven fixing, sound against the incumbent at fix time.
    BoxBounds box = node.box;
    if (ev.cert) {
        std::lock_guard<std::mutex> lk(st.mx);
        FixResult fr = fix_variables(*ev.cert, st.lb, box);
        if (!fr.fix_to_zero.empty() || !fr.fix_to_one.empty()) {
            st.fixes.push_back({node.id, st.lb, box, fr.fix_to_zero, fr.fix_to_one});
            for (int j : fr.fix_to_zero) box.c[j] = 0;
            for (int j : fr.fix_to_one) box.l[j] = 1;
            st.stats.var_fix_0 += static_cast<long>(fr.fix_to_zero.size());
            st.stats.var_fix_1 += static_cast<long>(fr.fix_to_one.size());
        }
    }
    if (!box.admits(inst.s)) {
        std::lock_guard<std::mutex> lk(st.mx);
        st.record({node.id, node.parent, node.depth, ev.zeta, st.lb,
                   NodeAction::infeasible, node.box});
        return {};
    }
    if (auto forced = forced_completion(box, inst.s)) {
        // Fixing may leave a single candidate; score it and close the node.
        double value = neg_infinity;
        if (selection_feasible(inst, *forced)) value = exact_objective(inst.C, *forced, inst.t);
        std::lock_guard<std::mutex> lk(st.mx);
        st.offer(*forced, value);
        st.record({node.id, node.parent, node.depth, value, st.lb,
                   NodeAction::leaf_eval, node.box});
        return {};
    }

    int pick = -1;
    double score = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        if (!box.free(j)) continue;
        double d = std::fabs(x_hat[j] - 0.5);
        if (d < score - 1e-15) {
            score = d;
            pick = j;
        }
    }
    if (pick < 0) {  // unreachable: admits(s) plus no forced completion needs free coords
        std::lock_guard<std::mutex> lk(st.mx);
        st.record({node.id, node.parent, node.depth, ev.zeta, st.lb,
                   NodeAction::infeasible, node.box});
        return {};
    }

    {
        std::lock_guard<std::mutex> lk(st.mx);
        st.record({node.id, node.parent, node.depth, ev.zeta, st.lb, NodeAction::branch,
                   node.box});
    }

    std::vector<OpenNode> out;
    double child_ub = std::min(node.ub, ev.zeta);
    for (int side = 0; side < 2; ++side) {
        BoxBounds cb = box;
        if (side == 0) cb.l[pick] = 1;  // take pick
        else cb.c[pick] = 0;            // drop pick

        std::unique_lock<std::mutex> lk(st.mx);
        long cid = st.claim_id();
        if (!cb.admits(inst.s)) {
            st.record({cid, node.id, node.depth + 1, child_ub, st.lb,
                       NodeAction::infeasible, cb});
            continue;
        }
        if (auto forced = forced_completion(cb, inst.s)) {
            lk.unlock();
            eval_leaf(st, cid, node.id, node.depth + 1, cb, *forced);
            continue;
        }
        OpenNode child;
        child.id = cid;
        child.parent = node.id;
        child.depth = node.depth + 1;
        child.ub = child_ub;
        child.box = std::move(cb);
        child.warm = x_hat;
        out.push_back(std::move(child));
    }
    return out;
}

void worker(SearchState& st, std::optional<NodeEval>& root_eval) {
    std::unique_lock<std::mutex> lk(st.mx);
    for (;;) {
        st.cv.wait(lk, [&] { return !st.open.empty() || st.active == 0 || st.out_of_time; });
        if (st.out_of_time) return;
        if (st.open.empty()) {
            if (st.active == 0) return;
            continue;
        }
        if (st.elapsed() > st.opts.time_limit) {
            st.out_of_time = true;
            st.cv.notify_all();
            return;
        }
        OpenNode node = st.open.top();
        st.open.pop();
        if (node.id != 0 && std::isfinite(st.lb) && node.ub <= st.lb + st.opts.opt_tol) {
            // The inherited certificate already closes this subtree. The
            // root is exempt so its own evaluation is always journaled.
            ++st.stats.tot_prun;
            st.record({node.id, node.parent, node.depth, node.ub, st.lb,
                       NodeAction::prune_bound, node.box});
            continue;
        }
        ++st.active;
        std::optional<NodeEval> pre;
        if (node.id == 0 && root_eval) pre = std::move(*root_eval), root_eval.reset();
        lk.unlock();

        std::vector<OpenNode> children = process_node(st, node, std::move(pre));

        lk.lock();
        for (OpenNode& c : children) st.open.push(std::move(c));
        --st.active;
        st.cv.notify_all();
    }
}

}  // namespace

SolveResult branch_and_bound(const Instance& inst, const BnbOptions& opts) {
    SolveResult res;
    SearchState st;
    st.inst = &inst;
    st.opts = opts;
    st.started = clock_type::now();

    Factor factor = factorize(inst.C, opts.factor_method);
    st.factor = &factor;

    OpenNode root;
    root.id = 0;
    root.parent = -1;
    root.depth = 0;
    root.box = BoxBounds::full(inst.n());
    st.next_id = 1;

    std::optional<NodeEval> root_eval;
    {
        NodeEval ev;
        Polytope poly = Polytope::from(inst, root.box);
        ev.relax = solve_ddgfact(factor, poly, inst.t, opts.relax);
        if (ev.relax.status == RelaxStatus::ok) {
            ev.cert = certify_point(factor, ev.relax.x_hat, inst, root.box);
            ev.zeta = ev.cert->zeta;
        }

        std::vector<double> guide =
            (inst.m() > 0 && ev.relax.status == RelaxStatus::ok) ? ev.relax.x_hat
                                                                 : std::vector<double>{};
        HeuristicReport heur = best_heuristic(inst, guide);
        if (!heur.best.indices.empty()) {
            st.best = heur.best;
            st.lb = heur.best.value;
        }
        res.root.root_bound = ev.zeta;
        res.root.heuristic_value = heur.best.value;
        res.root.heuristic_method = heur.method;
        res.root.root_gap = ev.zeta - heur.best.value;
        root_eval = std::move(ev);
    }

    root.ub = root_eval->zeta;
    st.open.push(root);  // even an infeasible root gets its journal entry

    int threads = std::max(1, opts.threads);
    if (threads == 1) {
        worker(st, root_eval);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int i = 0; i < threads; ++i)
            pool.emplace_back([&] { worker(st, root_eval); });
        for (auto& th : pool) th.join();
    }

    res.best = st.best;
    res.hit_time_limit = st.out_of_time;
    double open_ub = neg_infinity;
    while (!st.open.empty()) {
        open_ub = std::max(open_ub, st.open.top().ub);
        st.open.pop();
    }
    res.global_upper_bound = std::max(st.lb, open_ub);
    res.proven_optimal = !st.out_of_time && res.global_upper_bound <= st.lb + opts.opt_tol;
    if (st.best.indices.empty() && !st.out_of_time)
        res.proven_optimal = true;  // exhausted search with nothing feasible

    res.stats = st.stats;
    res.stats.rel_avg = st.rel.avg();
    res.stats.rel_std = st.rel.stddev();
    res.stats.wall_time = st.elapsed();
    res.node_log = std::move(st.log);
    res.fix_log = std::move(st.fixes);
    return res;
}

RootReport root_report(const Instance& inst, std::optional<double> optimum,
                       const BnbOptions& opts) {
    RootReport rep;
    Factor factor = factorize(inst.C, opts.factor_method);
    Polytope poly = Polytope::from(inst, BoxBounds::full(inst.n()));
    RelaxResult relax = solve_ddgfact(factor, poly, inst.t, opts.relax);
    double zeta = neg_infinity;
    if (relax.status == RelaxStatus::ok)
        zeta = certify_point(factor, relax.x_hat, inst, BoxBounds::full(inst.n())).zeta;

    std::vector<double> guide = (inst.m() > 0 && relax.status == RelaxStatus::ok)
                                    ? relax.x_hat
                                    : std::vector<double>{};
    HeuristicReport heur = best_heuristic(inst, guide);
    rep.root_bound = zeta;
    rep.heuristic_value = heur.best.value;
    rep.heuristic_method = heur.method;
    rep.root_gap = zeta - heur.best.value;
    if (optimum) rep.heur_gap = *optimum - heur.best.value;
    return rep;
}

}  // namespace gmesp
