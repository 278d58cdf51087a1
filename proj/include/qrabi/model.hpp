#pragma once
// Core representations of the two-mode three-level quantum Rabi model:
// dimensionless parameter set, Fock-basis truncation, sparse Hamiltonian
// and parity operators, and the classical (eta -> infinity) energy surface.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace qrabi {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dimensionless couplings and ratios defining one Hamiltonian instance.
//   alpha = omega2/omega1, beta = g2/g1, delta = (eps2-eps1)/Delta,
//   R = 2 g1 / sqrt(omega1 Delta), eta = Delta/omega1.
struct ModelParams {
    double alpha = 1.0;
    double beta = 1.0;
    double delta = 0.0;
    double R = 0.0;
    double eta = 1.0;

    double gamma() const { return alpha / (beta * beta); }

    void validate() const;

    // Convenience constructor from the pre-scaling physical inputs.
    // Level energies eps1 <= eps2 < eps3; Delta = eps3 - eps1.
    static ModelParams from_physical(double omega1, double omega2, double g1,
                                     double g2, double eps1, double eps2,
                                     double eps3);
};

// Per-mode Fock cutoffs (inclusive). Basis dimension 3*(n1_max+1)*(n2_max+1).
// Ordering: atom index in {1,2,3} slowest, then n1, then n2 (lexicographic).
struct TruncationSpec {
    int n1_max = 0;
    int n2_max = 0;

    int n1_states() const { return n1_max + 1; }
    int n2_states() const { return n2_max + 1; }
    std::size_t dimension() const {
        return 3u * static_cast<std::size_t>(n1_states()) *
               static_cast<std::size_t>(n2_states());
    }
    void validate() const;
};

// Real symmetric sparse operator. Both triangles are materialized and the
// entries are kept in compressed-row layout with ascending column indices
// per row, so the matvec is branch-free and its summation order is fixed.
struct SparseOperator {
    std::size_t dimension = 0;
    std::vector<std::size_t> row_ptr;  // size dimension+1
    std::vector<std::uint32_t> col;    // size nnz
    std::vector<double> val;           // size nnz

    std::size_t nnz() const { return val.size(); }
};

// Point on the classical energy surface E(y1, y2) of the degenerate model.
struct EnergySurfacePoint {
    double y1 = 0.0;
    double y2 = 0.0;
    double energy = 0.0;
};

// Flat index of basis state |atom, m1, m2> under the documented ordering.
inline std::size_t basis_index(int atom, int m1, int m2, const TruncationSpec& t) {
    return (static_cast<std::size_t>(atom) * t.n1_states() + m1) * t.n2_states() + m2;
}

// Matrix of H' = delta|2><2| + |3><3| + (1/eta)(n1 + alpha n2)
//              + (R/(2 sqrt(eta))) [ A1 (a1^dag + a1) + beta A2 (a2^dag + a2) ]
// in the truncated product basis. A1 flips |1><->|3| with the mode-1 ladder,
// A2 flips |2><->|3| with the mode-2 ladder; element (R/(2 sqrt(eta))) sqrt(n+1),
// times beta for mode 2. Throws ConfigError when the dimension exceeds max_dimension.
SparseOperator build_hamiltonian(const ModelParams& params, const TruncationSpec& trunc,
                                 std::size_t max_dimension = 64u * 1024u * 1024u);

// Parity Pi = (-1)^(n1+n2) (x) diag(+1,+1,-1); diagonal, entries +-1,
// commutes with build_hamiltonian output exactly (entrywise zero commutator).
SparseOperator build_parity(const TruncationSpec& trunc);

// Diagonal of the parity operator as a dense vector of +-1.
std::vector<double> parity_diagonal(const TruncationSpec& trunc);

// Classical ground-state energy surface of the degenerate (delta = 0) model:
//   E(y1,y2) = (y1^2 + alpha y2^2)/2 + [1 - sqrt(1 + 2R^2(y1^2 + beta^2 y2^2))]/2.
// Throws ConfigError for delta != 0 (closed form valid only when |1>,|2> are degenerate).
double energy_surface(const ModelParams& params, double y1, double y2);

// 3x3 symmetric atomic matrix at displacement (y1, y2): zero diagonal except
// M33 = 2, with M13 = sqrt(2) R y1 and M23 = sqrt(2) beta R y2. delta = 0 only.
Eigen::Matrix3d build_m_matrix(const ModelParams& params, double y1, double y2);

// Exact symmetry check: every stored entry (i,j,v) has a matching (j,i,v).
bool is_symmetric(const SparseOperator& op);

}  // namespace qrabi
