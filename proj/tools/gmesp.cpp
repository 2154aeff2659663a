// Command-line front end: instance generation, exact solving, bound
// computation, and the CSV gap sweep.
//
// Exit codes: 0 success, 2 bad input, 3 time limit, 4 numerical failure.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "gmesp/bnb.hpp"
#include "gmesp/bounds.hpp"
#include "gmesp/exact.hpp"
#include "gmesp/heuristics.hpp"
#include "gmesp/instance.hpp"
#include "gmesp/relax.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace gmesp;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitTimeLimit = 3;
constexpr int kExitNumerical = 4;

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string one_based(const std::vector<int>& idx) {
    std::string s;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(idx[i] + 1);
    }
    return s;
}

void write_trace(const std::string& path, const std::vector<NodeRecord>& log) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open trace file: " + path);
    for (const NodeRecord& r : log)
        out << r.id << ' ' << r.parent << ' ' << r.depth << ' ' << fmt17(r.zeta) << ' '
            << fmt17(r.lb) << ' ' << to_string(r.action) << '\n';
}

int cmd_generate(int n, int s, int t, int m, std::uint64_t seed, const std::string& out) {
    Instance inst = generate_instance(n, s, t, m, seed);
    write_instance(inst, out);
    return kExitOk;
}

int cmd_solve(const std::string& path, const std::string& algo, double time_limit, double tol,
              const std::string& trace, int threads) {
    Instance inst = read_instance(path);

    if (algo == "brute") {
        Selection best = brute_force(inst);
        std::cout << "set=" << one_based(best.indices) << '\n'
                  << "value=" << fmt6(best.value) << '\n'
                  << "optimal=true\n";
        return kExitOk;
    }

    BnbOptions opts;
    opts.opt_tol = tol;
    opts.time_limit = time_limit;
    opts.threads = threads;
    opts.keep_node_log = !trace.empty();
    SolveResult res = branch_and_bound(inst, opts);
    if (!trace.empty()) write_trace(trace, res.node_log);

    std::cout << "set=" << one_based(res.best.indices) << '\n'
              << "value=" << fmt6(res.best.value) << '\n'
              << "optimal=" << (res.proven_optimal ? "true" : "false") << '\n'
              << "global_upper_bound=" << fmt6(res.global_upper_bound) << '\n'
              << "node_order=best_first\n"
              << "nodes=" << res.stats.nodes << '\n'
              << "tot_prun=" << res.stats.tot_prun << '\n'
              << "int_prun=" << res.stats.int_prun << '\n'
              << "tot_int=" << res.stats.tot_int << '\n'
              << "rel_avg=" << fmt6(res.stats.rel_avg) << '\n'
              << "rel_std=" << fmt6(res.stats.rel_std) << '\n'
              << "var_fix_0=" << res.stats.var_fix_0 << '\n'
              << "var_fix_1=" << res.stats.var_fix_1 << '\n'
              << "lb_improvements=" << res.stats.lb_improvements << '\n'
              << "wall_time=" << fmt6(res.stats.wall_time) << '\n';
    return res.hit_time_limit ? kExitTimeLimit : kExitOk;
}

int cmd_bound(const std::string& path, const std::vector<std::string>& methods) {
    Instance inst = read_instance(path);
    for (const std::string& method : methods) {
        double v = 0.0;
        if (method == "spectral") {
            v = spectral_bound(inst.C, inst.t);
        } else if (method == "lagrangian") {
            v = lagrangian_spectral_bound(inst);
        } else if (method == "gfact") {
            Factor f = factorize(inst.C, FactorMethod::cholesky_pivoted);
            Polytope poly = Polytope::from(inst, BoxBounds::full(inst.n()));
            RelaxResult rr = solve_ddgfact(f, poly, inst.t);
            if (rr.status != RelaxStatus::ok) {
                v = neg_infinity;
            } else {
                v = certify_point(f, rr.x_hat, inst, poly.box).zeta;
            }
        } else {
            throw std::invalid_argument("unknown bound method: " + method);
        }
        std::cout << fmt6(v) << '\n';
    }
    return kExitOk;
}

struct SweepRow {
    int s = 0, t = 0;
    bool skipped = false;
    std::string note;
    double lb = neg_infinity, spectral = neg_infinity, gfact = neg_infinity;
};

SweepRow sweep_row(const Instance& base, const Factor& f, int s, int t) {
    SweepRow row;
    row.s = s;
    row.t = t;

    Instance inst = base;
    inst.s = s;
    inst.t = t;

    row.spectral = spectral_bound(inst.C, t);

    std::vector<double> guide;
    if (t <= f.k()) {  // above the rank every selection scores -inf
        Polytope poly = Polytope::from(inst, BoxBounds::full(inst.n()));
        RelaxResult rr = solve_ddgfact(f, poly, t);
        if (rr.status == RelaxStatus::ok) {
            row.gfact = certify_point(f, rr.x_hat, inst, poly.box).zeta;
            if (inst.m() > 0) guide = rr.x_hat;
        }
    }
    row.lb = best_heuristic(inst, guide).best.value;
    return row;
}

int cmd_sweep(const std::string& path, const std::string& vary, int kappa,
              const std::string& out_path) {
    Instance base = read_instance(path);
    int n = base.n();
    Factor f = factorize(base.C, FactorMethod::cholesky_pivoted);

    std::vector<std::pair<int, int>> grid;  // (s, t) in output order
    if (vary == "t") {
        for (int t = 1; t <= base.s; ++t) grid.emplace_back(base.s, t);
    } else {
        for (int s = 2; s < n; ++s) grid.emplace_back(s, s - kappa);
    }

    std::vector<SweepRow> rows(grid.size());
    std::string row_error;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto [s, t] = grid[i];
        if (t < 1 || t > s) {
            rows[i].s = s;
            rows[i].t = t;
            rows[i].skipped = true;
            rows[i].note = "t out of range";
            continue;
        }
        try {
            rows[i] = sweep_row(base, f, s, t);
        } catch (const std::exception& e) {  // exceptions must not cross the region
#ifdef _OPENMP
#pragma omp critical
#endif
            if (row_error.empty()) row_error = e.what();
        }
    }
    if (!row_error.empty()) throw std::runtime_error(row_error);

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw std::runtime_error("cannot open output file: " + out_path);
        os = &file;
    }

    *os << "s,t,lb,spectral,gfact,spectral_gap,gfact_gap,ub_on_gfact_gap\n";
    for (const SweepRow& r : rows) {
        if (r.skipped) {
            *os << "# skipped s=" << r.s << " t=" << r.t << ": " << r.note << '\n';
            continue;
        }
        double spectral_gap = r.spectral - r.lb;
        double gfact_gap = r.gfact - r.lb;
        double ub_on = spectral_gap + r.t * std::log(static_cast<double>(r.s) / r.t);
        *os << r.s << ',' << r.t << ',' << fmt17(r.lb) << ',' << fmt17(r.spectral) << ','
            << fmt17(r.gfact) << ',' << fmt17(spectral_gap) << ',' << fmt17(gfact_gap) << ','
            << fmt17(ub_on) << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Maximum-entropy sampling laboratory"};
    app.require_subcommand(1);

    int g_n = 8, g_s = 3, g_t = 2, g_m = 0;
    std::uint64_t g_seed = 1;
    std::string g_out;
    CLI::App* gen = app.add_subcommand("generate", "Write a random instance file");
    gen->add_option("--n", g_n, "ground set size");
    gen->add_option("--s", g_s, "selection size");
    gen->add_option("--t", g_t, "eigenvalues counted");
    gen->add_option("--m", g_m, "side constraints");
    gen->add_option("--seed", g_seed, "RNG seed");
    gen->add_option("--out", g_out, "output file")->required();

    std::string s_file, s_algo = "bnb", s_trace;
    double s_time = std::numeric_limits<double>::infinity(), s_tol = 1e-6;
    int s_threads = 1;
    CLI::App* solve = app.add_subcommand("solve", "Solve an instance to proven optimality");
    solve->add_option("file", s_file, "instance file")->required();
    solve->add_option("--algo", s_algo, "bnb or brute")
        ->check(CLI::IsMember({"bnb", "brute"}));
    solve->add_option("--time-limit", s_time, "seconds before giving up");
    solve->add_option("--tol", s_tol, "optimality tolerance");
    solve->add_option("--trace", s_trace, "write the node journal here");
    solve->add_option("--threads", s_threads, "worker threads (>1 drops determinism)");

    std::string b_file;
    std::vector<std::string> b_methods;
    CLI::App* bound = app.add_subcommand("bound", "Print upper bounds, one per line");
    bound->add_option("file", b_file, "instance file")->required();
    bound->add_option("--method", b_methods, "gfact, spectral or lagrangian")
        ->check(CLI::IsMember({"gfact", "spectral", "lagrangian"}));

    std::string w_file, w_vary = "t", w_out;
    int w_kappa = 0;
    CLI::App* sweep = app.add_subcommand("sweep", "Bound-vs-heuristic gap table (CSV)");
    sweep->add_option("file", w_file, "instance file")->required();
    sweep->add_option("--vary", w_vary, "t: sweep t at fixed s; s: sweep s with t=s-kappa")
        ->check(CLI::IsMember({"t", "s"}));
    sweep->add_option("--kappa", w_kappa, "offset for --vary s");
    sweep->add_option("--out", w_out, "CSV file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (gen->parsed()) return cmd_generate(g_n, g_s, g_t, g_m, g_seed, g_out);
        if (solve->parsed()) return cmd_solve(s_file, s_algo, s_time, s_tol, s_trace, s_threads);
        if (bound->parsed()) {
            if (b_methods.empty()) b_methods.push_back("gfact");
            return cmd_bound(b_file, b_methods);
        }
        if (sweep->parsed()) return cmd_sweep(w_file, w_vary, w_kappa, w_out);
    } catch (const certification_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const generation_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}
