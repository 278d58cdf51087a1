#pragma once
// Ground-state solver: thick-restart Lanczos on the sparse Hamiltonian with
// optional parity-sector projection and adaptive Fock-space truncation.

#include <cstdint>
#include <optional>
#include <vector>

#include "qrabi/model.hpp"

namespace qrabi {

enum class ParityMode {
    Auto,  // delta == 0: even sector; otherwise solve both sectors, keep lower
    Even,
    Odd,
    Full,
};

struct SolverConfig {
    double tol_energy = 1e-10;    // Ritz-value stagnation threshold
    int max_krylov = 64;          // Krylov block size per restart
    int max_restarts = 200;
    double trunc_growth = 1.5;    // Fock-cutoff multiplier between refinements
    double trunc_tol = 1e-6;      // relative observable change accepted as converged
    std::uint64_t seed = 1234;    // start-vector RNG seed
    ParityMode parity = ParityMode::Auto;
    int keep = 8;                 // Ritz pairs retained across restarts
    TruncationSpec trunc_init{15, 15};
    double tail_mass_max = 1e-10; // occupancy allowed in the top two Fock bins
    std::size_t max_dimension = 4u * 1024u * 1024u;
};

struct GroundStateResult {
    double energy = 0.0;
    std::vector<double> vector;   // unit norm; largest-magnitude component positive
    double n1 = 0.0;              // <a1^dag a1>
    double n2 = 0.0;
    double parity = 0.0;          // <Pi>
    double tail1 = 0.0;           // probability mass in the top two n1 bins
    double tail2 = 0.0;
    TruncationSpec trunc_used;
    long iterations = 0;          // total matrix-vector products
    bool converged = false;
    double residual = 0.0;        // ||H v - E v||_2, recomputed explicitly
};

// Thick-restart Lanczos on a generic sparse symmetric operator. The zero
// pattern of the start vector defines an invariant sector: reinjected
// vectors (on Krylov breakdown) are masked to the same pattern, so a
// parity-projected start keeps the whole iteration inside its sector.
struct LanczosOptions {
    int max_krylov = 64;
    int keep = 8;
    int max_restarts = 200;
    double tol_res = 1e-9;     // residual bound, scaled by max(1, |theta|)
    double tol_theta = 1e-13;  // Ritz-value stagnation between restarts
};

struct LanczosOutcome {
    double theta = 0.0;
    std::vector<double> vec;
    long matvecs = 0;
    int restarts = 0;
    double res = 0.0;
    bool converged = false;
};

LanczosOutcome lanczos_ground(const SparseOperator& H, const std::vector<double>& start,
                              const LanczosOptions& opt);

// Ground state at a fixed truncation. warm_start (same basis ordering, any
// truncation up to trunc) seeds the Krylov start vector after zero padding.
GroundStateResult solve_at_truncation(const ModelParams& params,
                                      const TruncationSpec& trunc,
                                      const SolverConfig& config,
                                      const std::vector<double>* warm_start = nullptr);

// Ground state with truncation refinement: starting from config.trunc_init,
// cutoffs grow (per mode, driven by the tail masses) until the energy and
// photon numbers are stable to config.trunc_tol and both tails are below
// config.tail_mass_max. Throws NonConvergence when config.max_dimension
// would be exceeded before stabilizing.
GroundStateResult solve_ground_state(const ModelParams& params,
                                     const SolverConfig& config);

// <v| op |v> for the stored ground vector.
double observe(const GroundStateResult& result, const SparseOperator& op);

// Zero-pads a coefficient vector from one truncation into a larger one,
// preserving the basis ordering.
std::vector<double> pad_vector(const std::vector<double>& v, const TruncationSpec& from,
                               const TruncationSpec& to);

// SplitMix64 step; used to derive independent per-task seeds from a base seed.
std::uint64_t split_seed(std::uint64_t base, std::uint64_t salt);

}  // namespace qrabi
