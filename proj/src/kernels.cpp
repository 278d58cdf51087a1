#include "qrabi/kernels.hpp"

#include <cmath>

namespace qrabi {

namespace {
constexpr std::size_t kChunk = 4096;
}

void matvec_serial(const SparseOperator& A, const double* x, double* y) {
    const std::size_t n = A.dimension;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
            acc += A.val[k] * x[A.col[k]];
        y[i] = acc;
    }
}

void matvec(const SparseOperator& A, const double* x, double* y) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(A.dimension);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
            acc += A.val[k] * x[A.col[k]];
        y[i] = acc;
    }
}

double dot(const double* a, const double* b, std::size_t n) {
    const std::size_t nchunks = (n + kChunk - 1) / kChunk;
    if (nchunks <= 1) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
        return acc;
    }
    std::vector<double> partial(nchunks);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nchunks); ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
        const std::size_t hi = lo + kChunk < n ? lo + kChunk : n;
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) acc += a[i] * b[i];
        partial[c] = acc;
    }
    double total = 0.0;
    for (std::size_t c = 0; c < nchunks; ++c) total += partial[c];
    return total;
}

double norm2(const double* a, std::size_t n) { return std::sqrt(dot(a, a, n)); }

void axpy(double c, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += c * x[i];
}

void scale(double c, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= c;
}

}  // namespace qrabi
