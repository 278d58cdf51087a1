// Benchmark: serial reference matvec vs the OpenMP kernel on a realistic
// Hamiltonian, plus a bitwise agreement check between the two.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qrabi/kernels.hpp"
#include "qrabi/model.hpp"

using namespace qrabi;

namespace {

double time_loop(const SparseOperator& H, const std::vector<double>& x,
                 std::vector<double>& y, int reps, bool serial) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) {
        if (serial)
            matvec_serial(H, x.data(), y.data());
        else
            matvec(H, x.data(), y.data());
    }
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
    int n1 = 24, n2 = 127, reps = 50;
    if (argc > 1) n1 = std::atoi(argv[1]);
    if (argc > 2) n2 = std::atoi(argv[2]);
    if (argc > 3) reps = std::atoi(argv[3]);

    ModelParams p;
    p.alpha = 0.8;
    p.beta = 1.2;
    p.R = 0.75;
    p.eta = 200.0;
    TruncationSpec t;
    t.n1_max = n1;
    t.n2_max = n2;
    const SparseOperator H = build_hamiltonian(p, t);
    std::printf("dim=%zu nnz=%zu\n", H.dimension, H.nnz());

    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    std::vector<double> x(H.dimension), ys(H.dimension), yp(H.dimension);
    for (double& v : x) v = nd(rng);

    // warmup + bitwise agreement
    matvec_serial(H, x.data(), ys.data());
    matvec(H, x.data(), yp.data());
    const bool same =
        std::memcmp(ys.data(), yp.data(), H.dimension * sizeof(double)) == 0;
    std::printf("bitwise serial==parallel: %s\n", same ? "yes" : "NO");

    const double ts = time_loop(H, x, ys, reps, true);
    const double tp = time_loop(H, x, yp, reps, false);
    const double gflops = 2.0 * H.nnz() * 1e-9;
#ifdef _OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    std::printf("serial:   %10.3f us/op  %.3f GFLOP/s\n", ts * 1e6, gflops / ts);
    std::printf("parallel: %10.3f us/op  %.3f GFLOP/s  (%d threads)\n", tp * 1e6,
                gflops / tp, threads);
    std::printf("speedup:  %.2fx\n", ts / tp);
    return same ? 0 : 1;
}
