#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gmesp/matrix.hpp"

namespace gmesp {

// One problem: pick s of n indices maximizing the log-sum of the t greatest
// eigenvalues of the chosen principal submatrix of C, subject to the m
// optional linear constraints A x <= b over the selector x.
struct Instance {
    SymMatrix C;
    int s = 0;
    int t = 0;
    Matrix A;               // m x n, empty when unconstrained
    std::vector<double> b;  // length m
    std::string comment;    // carried into the file header, one '#' line

    int n() const { return C.order(); }
    int m() const { return static_cast<int>(b.size()); }
};

struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct generation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structural checks: dimensions, 0 < t <= s < n, finite data, symmetry,
// PSD within tolerance and t within the numerical rank (one eigensolve).
void validate_instance(const Instance& inst);

// Random instance: C = G G^T with G i.i.d. uniform on [-1,1], constraint
// rows i.i.d. uniform integers in {0..5}, and each b_i set one unit below
// the constraint value of the unconstrained greedy solution (clipped from
// below at ceil(s * median(a_i) / 2)). Rows are redrawn, at most 100 times,
// until the greedy solution is cut off while some feasible selection
// survives. Identical arguments give identical instances.
Instance generate_instance(int n, int s, int t, int m, std::uint64_t seed);

// Text round trip. Layout: '#' comment lines, then "n s t m", then n matrix
// rows, then m constraint rows holding a_i and b_i. Numbers are written with
// 17 significant digits so write-then-read is the identity.
Instance read_instance(const std::string& path);
void write_instance(const Instance& inst, const std::string& path);
std::string instance_to_string(const Instance& inst);
Instance instance_from_string(const std::string& text);

// Does the 0-based ascending selection satisfy the cardinality and the
// linear constraints (within 1e-9)?
bool selection_feasible(const Instance& inst, std::span<const int> sel);

// Per-coordinate 0/1 bounds carved out by branching decisions. l <= c
// everywhere and the budget s must stay reachable: sum(l) <= s <= sum(c).
struct BoxBounds {
    std::vector<int> l, c;

    static BoxBounds full(int n) { return BoxBounds{std::vector<int>(n, 0), std::vector<int>(n, 1)}; }

    int n() const { return static_cast<int>(l.size()); }
    bool free(int j) const { return l[j] < c[j]; }
    int sum_l() const;
    int sum_c() const;
    bool admits(int s) const { return sum_l() <= s && s <= sum_c(); }
    bool contains(std::span<const int> sel) const;  // selection as index set
};

}  // namespace gmesp
