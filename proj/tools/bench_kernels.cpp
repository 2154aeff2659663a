// Timing comparison of the parallel kernels against their serial references,
// plus the chunked exhaustive search. Prints one table row per case with the
// speedup and a bitwise-agreement check.

#include <chrono>
#include <cstdio>
#include <random>
#include <span>
#include <vector>

#include "gmesp/exact.hpp"
#include "gmesp/instance.hpp"
#include "gmesp/kernels.hpp"
#include "gmesp/matrix.hpp"
#include "gmesp/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace gmesp;
using clock_type = std::chrono::steady_clock;

template <typename Fn>
double time_best_of(int reps, Fn&& fn) {
    double best = 1e100;
    for (int r = 0; r < reps; ++r) {
        auto t0 = clock_type::now();
        fn();
        auto t1 = clock_type::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

Matrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = uniform_pm1(rng);
    return m;
}

void row(const char* name, double serial, double parallel, bool same) {
    std::printf("%-28s %10.4f ms %10.4f ms %8.2fx   %s\n", name, serial * 1e3, parallel * 1e3,
                serial / parallel, same ? "bitwise-equal" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (compiled without OpenMP)\n");
#endif
    std::printf("%-28s %13s %13s %9s   %s\n", "kernel", "serial", "parallel", "speedup",
                "agreement");

    std::mt19937_64 rng(7);

    {
        const int n = 384, k = 256;
        Matrix f = random_matrix(n, k, rng);
        std::vector<double> x(n);
        for (double& v : x) v = uniform01(rng);
        SymMatrix a(1), b(1);
        double ts = time_best_of(3, [&] { a = gram_weighted_serial(f, x); });
        double tp = time_best_of(3, [&] { b = gram_weighted(f, x); });
        bool same = true;
        for (int i = 0; i < k && same; ++i)
            for (int j = 0; j < k && same; ++j) same = a(i, j) == b(i, j);
        row("gram_weighted 384x256", ts, tp, same);
    }

    {
        const int n = 512, k = 256;
        Matrix f = random_matrix(n, k, rng);
        Matrix g = random_matrix(k, k, rng);
        SymMatrix theta = SymMatrix::from_gram(g);
        std::vector<double> a, b;
        double ts = time_best_of(3, [&] { a = diag_congruence_serial(f, theta); });
        double tp = time_best_of(3, [&] { b = diag_congruence(f, theta); });
        bool same = a == b;
        row("diag_congruence 512x256", ts, tp, same);
    }

    {
        Instance inst = generate_instance(18, 6, 4, 0, 99);
        Selection a, b;
        double ts = time_best_of(1, [&] { a = brute_force_serial(inst); });
        double tp = time_best_of(1, [&] { b = brute_force(inst); });
        bool same = a.indices == b.indices && a.value == b.value;
        row("brute_force n=18 s=6", ts, tp, same);
    }

    return 0;
}
