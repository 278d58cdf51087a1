#pragma once
// Low-level linear-algebra kernels. The parallel variants partition work so
// that every floating-point sum is accumulated in a fixed order regardless of
// thread count: matvec assigns whole rows (each row summed serially), and the
// dot product reduces fixed-size chunks whose partials are combined serially.
// Results are therefore bitwise identical for any OMP_NUM_THREADS.

#include <cstddef>
#include <vector>

#include "qrabi/model.hpp"

namespace qrabi {

// y = A x, single-threaded reference implementation.
void matvec_serial(const SparseOperator& A, const double* x, double* y);

// y = A x, OpenMP row-parallel. Bitwise identical to matvec_serial.
void matvec(const SparseOperator& A, const double* x, double* y);

inline void matvec(const SparseOperator& A, const std::vector<double>& x,
                   std::vector<double>& y) {
    y.resize(A.dimension);
    matvec(A, x.data(), y.data());
}

// Deterministic dot product: serial accumulation within 4096-element chunks,
// chunk partials summed in chunk order.
double dot(const double* a, const double* b, std::size_t n);

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return dot(a.data(), b.data(), a.size());
}

double norm2(const double* a, std::size_t n);

inline double norm2(const std::vector<double>& a) { return norm2(a.data(), a.size()); }

// y += c * x
void axpy(double c, const double* x, double* y, std::size_t n);

void scale(double c, double* x, std::size_t n);

}  // namespace qrabi
