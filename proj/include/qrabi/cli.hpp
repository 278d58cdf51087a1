#pragma once
// Subcommand implementations behind the qrabi executable. Each cmd_* function
// validates its options, produces its output files plus a manifest, and
// throws ConfigError (usage/validation) or NonConvergence (numerics) on
// failure; the wrapper in main() maps those to exit codes 2 and 3.

#include <cstdint>
#include <string>
#include <vector>

#include "qrabi/eigensolver.hpp"
#include "qrabi/scaling.hpp"

namespace qrabi {

// Inclusive numeric range start:stop:step (stop included when within half a
// step). Parses "a:b:c" or a single scalar "a".
std::vector<double> parse_range(const std::string& text);

// Comma-separated list whose elements are scalars or ranges,
// e.g. "25,50,100:400:100".
std::vector<double> parse_value_list(const std::string& text);

struct PhaseDiagramOptions {
    std::vector<double> gamma_range;  // scanned as alpha with beta = 1
    std::vector<double> R_range;
    std::string out_dir = ".";
    std::string command_line;  // verbatim invocation, recorded in the manifest
    std::string config_file;   // optional config file, hashed into the manifest
};
// phase_diagram.csv: gamma, R, label, y1, y2, energy.
void cmd_phase_diagram(const PhaseDiagramOptions& opt);

struct MeanPhotonOptions {
    std::vector<double> alpha_range;  // gamma varies with alpha at fixed beta
    double beta = 1.0;
    std::vector<double> R_range;
    std::string mode = "both";  // "both" | "n1" | "n2" (column selection)
    std::string out_dir = ".";
    std::string command_line;
    std::string config_file;
};
// mean_photon.csv: gamma, R, n1_over_eta, n2_over_eta, flag. Rows at the
// U(1) boundary gamma = 1 carry empty values and flag "u1-boundary".
void cmd_mean_photon(const MeanPhotonOptions& opt);

struct SolveOptions {
    ModelParams params;
    SolverConfig solver;
    std::string out_dir = ".";
    bool dump_vector = false;
    std::string command_line;
    std::string config_file;
};
// ground_state.json (+ optional vector.csv).
GroundStateResult cmd_solve(const SolveOptions& opt);

struct ScalingOptions {
    double alpha = 0.8;
    double beta = 1.2;
    std::vector<double> eta_list;
    std::vector<double> R_range;
    SolverConfig solver;
    int workers = 1;
    bool synthetic = false;     // substitute the known-form synthetic dataset
    std::string out_dir = ".";
    // Truncation seeds for the sweep; grown automatically when tails exceed
    // the solver tail budget. <= 0 selects the built-in schedule.
    int spectator_states = 0;
    int soft_states = 0;
    std::string command_line;
    std::string config_file;
};
struct ScalingOutput {
    SweepDataset data;
    ScalingFit fit;
};
// sweep_raw.csv, collapsed.csv, fit_report.json. Non-converged grid points
// abort the run with a per-point diagnostic listing (exit code 3).
ScalingOutput cmd_scaling(const ScalingOptions& opt);

struct UniversalFOptions {
    Branch branch = Branch::Mode2;
    double alpha = 0.8;
    double beta = 1.2;
    std::vector<double> rprime_range;
    int trunc_1d = 160;
    std::string out_dir = ".";
    std::string command_line;
    std::string config_file;
};
// universal_f.csv: rprime, f.
void cmd_universal_f(const UniversalFOptions& opt);

// Dataset generation for cmd_scaling; exposed for tests (worker invariance).
SweepDataset run_sweep(const ScalingOptions& opt);

}  // namespace qrabi
