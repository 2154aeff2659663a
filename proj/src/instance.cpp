#include "gmesp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gmesp/heuristics.hpp"
#include "gmesp/rng.hpp"

namespace gmesp {

int BoxBounds::sum_l() const {
    int s = 0;
    for (int v : l) s += v;
    return s;
}

int BoxBounds::sum_c() const {
    int s = 0;
    for (int v : c) s += v;
    return s;
}

bool BoxBounds::contains(std::span<const int> sel) const {
    std::vector<char> in(l.size(), 0);
    for (int j : sel) in[j] = 1;
    for (int j = 0; j < n(); ++j)
        if (in[j] < l[j] || in[j] > c[j]) return false;
    return true;
}

void validate_instance(const Instance& inst) {
    int n = inst.n();
    if (n < 2) throw parse_error("instance: n must be at least 2");
    if (inst.t < 1 || inst.t > inst.s || inst.s >= n)
        throw parse_error("instance: require 0 < t <= s < n");
    if (inst.A.rows() != inst.m() || (inst.m() > 0 && inst.A.cols() != n))
        throw parse_error("instance: constraint dimensions inconsistent");
    for (double v : inst.C.data())
        if (!std::isfinite(v)) throw parse_error("instance: non-finite matrix entry");
    for (double v : inst.A.data())
        if (!std::isfinite(v)) throw parse_error("instance: non-finite constraint entry");
    for (double v : inst.b)
        if (!std::isfinite(v)) throw parse_error("instance: non-finite constraint bound");

    SpectralDecomposition d = eigh(inst.C);
    double lmax = std::max(0.0, d.eigenvalues.front());
    if (d.eigenvalues.back() < -1e-6 * lmax)
        throw parse_error("instance: covariance is not positive semidefinite");
    if (numerical_rank(d.eigenvalues) < inst.t)
        throw parse_error("instance: t exceeds the numerical rank of the covariance");
}

bool selection_feasible(const Instance& inst, std::span<const int> sel) {
    if (static_cast<int>(sel.size()) != inst.s) return false;
    for (std::size_t i = 0; i < sel.size(); ++i) {
        if (sel[i] < 0 || sel[i] >= inst.n()) return false;
        if (i > 0 && sel[i] <= sel[i - 1]) return false;
    }
    for (int i = 0; i < inst.m(); ++i) {
        double lhs = 0.0;
        for (int j : sel) lhs += inst.A(i, j);
        if (lhs > inst.b[i] + 1e-9) return false;
    }
    return true;
}

namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

Instance generate_instance(int n, int s, int t, int m, std::uint64_t seed) {
    if (n < 2 || s < 1 || s >= n || t < 1 || t > s || m < 0)
        throw std::invalid_argument("generate_instance: bad parameters");

    std::mt19937_64 rng(seed);

    Matrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = uniform_pm1(rng);

    Instance inst;
    inst.C = SymMatrix::from_gram(g);
    inst.s = s;
    inst.t = t;
    {
        std::ostringstream c;
        c << "generated n=" << n << " s=" << s << " t=" << t << " m=" << m << " seed=" << seed;
        inst.comment = c.str();
    }
    if (m == 0) return inst;

    // The greedy selection anchors the right-hand sides: each bound sits one
    // unit below the greedy selection's constraint value, so the constraints
    // bite, while the clip keeps enough room for some other selection.
    Selection xh = greedy(inst.C, s, t);

    for (int attempt = 0; attempt < 100; ++attempt) {
        Matrix a(m, n);
        std::vector<double> b(m);
        for (int i = 0; i < m; ++i) {
            std::vector<double> row(n);
            for (int j = 0; j < n; ++j) row[j] = static_cast<double>(bounded_int(rng, 5));
            for (int j = 0; j < n; ++j) a(i, j) = row[j];
            double dot = 0.0;
            for (int j : xh.indices) dot += row[j];
            double clip = std::ceil(s * median_of(row) / 2.0);
            b[i] = std::max(dot - 1.0, clip);
        }

        inst.A = a;
        inst.b = b;
        bool cuts_greedy = !selection_feasible(inst, xh.indices);
        if (!cuts_greedy) continue;
        std::vector<double> zeros(n, 0.0);
        if (!ilp_round(zeros, inst)) continue;
        return inst;
    }
    throw generation_error("generate_instance: no feasible constrained instance in 100 attempts");
}

namespace {

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string instance_to_string(const Instance& inst) {
    std::ostringstream out;
    if (!inst.comment.empty()) out << "# " << inst.comment << "\n";
    out << inst.n() << ' ' << inst.s << ' ' << inst.t << ' ' << inst.m() << "\n";
    for (int i = 0; i < inst.n(); ++i) {
        for (int j = 0; j < inst.n(); ++j) {
            if (j) out << ' ';
            out << format_value(inst.C(i, j));
        }
        out << "\n";
    }
    for (int i = 0; i < inst.m(); ++i) {
        for (int j = 0; j < inst.n(); ++j) out << format_value(inst.A(i, j)) << ' ';
        out << format_value(inst.b[i]) << "\n";
    }
    return out.str();
}

void write_instance(const Instance& inst, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_instance: cannot open " + path);
    f << instance_to_string(inst);
    if (!f) throw std::runtime_error("write_instance: write failed on " + path);
}

namespace {

struct LineReader {
    std::istringstream in;
    int lineno = 0;
    std::string first_comment;

    explicit LineReader(const std::string& text) : in(text) {}

    // Next content line, comments and blanks skipped. The first comment's
    // text is kept so the round trip preserves it.
    bool next(std::string& line) {
        while (std::getline(in, line)) {
            ++lineno;
            std::size_t pos = line.find_first_not_of(" \t\r");
            if (pos == std::string::npos) continue;
            if (line[pos] == '#') {
                if (first_comment.empty()) {
                    std::size_t text = line.find_first_not_of(" \t", pos + 1);
                    if (text != std::string::npos) {
                        first_comment = line.substr(text);
                        while (!first_comment.empty() &&
                               (first_comment.back() == '\r' || first_comment.back() == ' '))
                            first_comment.pop_back();
                    }
                }
                continue;
            }
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw parse_error("line " + std::to_string(lineno) + ": " + what);
    }
};

std::vector<double> parse_numbers(LineReader& r, const std::string& line, std::size_t expect) {
    std::istringstream ss(line);
    std::vector<double> out;
    double v;
    while (ss >> v) out.push_back(v);
    std::string rest;
    if (ss >> rest) r.fail("unexpected token '" + rest + "'");
    if (out.size() != expect)
        r.fail("expected " + std::to_string(expect) + " numbers, found " + std::to_string(out.size()));
    return out;
}

}  // namespace

Instance instance_from_string(const std::string& text) {
    LineReader r(text);
    std::string line;
    if (!r.next(line)) throw parse_error("line 0: empty instance");

    long n, s, t, m;
    {
        std::istringstream ss(line);
        if (!(ss >> n >> s >> t >> m)) r.fail("header must be 'n s t m'");
        std::string rest;
        if (ss >> rest) r.fail("unexpected token '" + rest + "' in header");
    }
    if (n < 2 || n > 10000) r.fail("n out of range");
    if (s < 1 || s >= n) r.fail("require 1 <= s < n");
    if (t < 1 || t > s) r.fail("require 1 <= t <= s");
    if (m < 0) r.fail("m must be nonnegative");

    std::vector<double> rows;
    std::vector<int> row_line(n);
    rows.reserve(static_cast<std::size_t>(n) * n);
    for (long i = 0; i < n; ++i) {
        if (!r.next(line)) r.fail("missing matrix row " + std::to_string(i + 1));
        row_line[i] = r.lineno;
        auto vals = parse_numbers(r, line, static_cast<std::size_t>(n));
        rows.insert(rows.end(), vals.begin(), vals.end());
    }
    for (long i = 0; i < n; ++i)
        for (long j = i + 1; j < n; ++j) {
            double d = std::abs(rows[i * n + j] - rows[j * n + i]);
            if (!(d <= 1e-12))
                throw parse_error("line " + std::to_string(row_line[j]) + ": matrix entry (" +
                                  std::to_string(j + 1) + "," + std::to_string(i + 1) +
                                  ") breaks symmetry by " + format_value(d));
        }

    Instance inst;
    inst.C = SymMatrix::from_rows(static_cast<int>(n), rows);
    inst.s = static_cast<int>(s);
    inst.t = static_cast<int>(t);
    if (m > 0) {
        inst.A = Matrix(static_cast<int>(m), static_cast<int>(n));
        inst.b.resize(m);
        for (long i = 0; i < m; ++i) {
            if (!r.next(line)) r.fail("missing constraint row " + std::to_string(i + 1));
            auto vals = parse_numbers(r, line, static_cast<std::size_t>(n) + 1);
            for (long j = 0; j < n; ++j) inst.A(static_cast<int>(i), static_cast<int>(j)) = vals[j];
            inst.b[i] = vals[n];
        }
    }
    if (r.next(line)) r.fail("trailing content after instance");
    inst.comment = r.first_comment;

    validate_instance(inst);
    return inst;
}

Instance read_instance(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw parse_error("cannot open " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return instance_from_string(buf.str());
}

}  // namespace gmesp
