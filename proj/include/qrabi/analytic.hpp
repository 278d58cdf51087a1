#pragma once
// Closed-form results for the degenerate (delta = 0) model in the classical
// limit: phase boundaries, order parameters, ground energy and derivatives,
// the atomic ground eigenvector, and mean photon numbers.
//
// Phase structure in terms of gamma = alpha/beta^2:
//   gamma > 1: mode 1 condenses beyond Rc = 1;
//   gamma < 1: mode 2 condenses beyond Rc = sqrt(alpha)/beta;
//   gamma = 1: both directions degenerate (U(1) valley) beyond Rc = 1.

#include <array>
#include <string>

#include "qrabi/model.hpp"

namespace qrabi {

enum class Regime { AlphaLessBetaSq, AlphaGreaterBetaSq, AlphaEqualsBetaSq };

struct CriticalPoint {
    Regime regime = Regime::AlphaGreaterBetaSq;
    double Rc = 1.0;
};

// Critical coupling of the degenerate model: sqrt(alpha)/beta when
// alpha < beta^2, otherwise 1. Regimes compare alpha against beta^2 exactly.
CriticalPoint critical_coupling(double alpha, double beta);

// With a level splitting the mode-2 boundary shifts to sqrt(alpha(1-delta))/beta
// while the mode-1 boundary stays at 1; requires delta < 1.
CriticalPoint critical_coupling(double alpha, double beta, double delta);

enum class PhaseLabel { Normal, SuperradiantY1, SuperradiantY2, BoundaryU1 };

std::string to_string(PhaseLabel label);

struct PhaseClassification {
    PhaseLabel label = PhaseLabel::Normal;
    double y1 = 0.0;  // non-negative representative displacements
    double y2 = 0.0;
    double energy = 0.0;
    // Ground-configuration multiplicity: 1 (normal), 2 (+- pair in either
    // superradiant phase), 0 for the continuous U(1) ring, where (y1, y2)
    // is the canonical representative (y1 = sqrt((R^4-1)/(2R^2)), y2 = 0).
    int multiplicity = 1;
};

// Phase of the classical ground state at the given parameters (delta = 0).
PhaseClassification classify_phase(const ModelParams& params);

// Brute-force minimizer of energy_surface over the square grid
// [-half_width, half_width]^2 with spacing step, followed by one local
// quadratic refinement. Independent oracle for tests, not for production.
EnergySurfacePoint grid_minimize_surface(const ModelParams& params,
                                         double half_width, double step);

struct GroundDerivatives {
    double d2E_dR2 = 0.0;    // curvature of the ground energy in R
    double dE_dgamma = 0.0;  // sensitivity to gamma at fixed R
};

// Closed-form derivatives of the classical ground energy. Zeros in the
// normal phase; exactly at Rc the superradiant-side one-sided values are
// reported; exactly at gamma = 1 the gamma > 1 side is reported.
GroundDerivatives ground_energy_derivatives(const ModelParams& params);

struct EigenstatePair {
    std::array<double, 3> plus{};   // at displacement +y
    std::array<double, 3> minus{};  // at displacement -y
};

// Atomic part of the classical ground state at the minimizing displacements,
// unit norm, component 3 non-negative. The component on the undisplaced
// level vanishes (dark-state structure): component 1 for alpha < beta^2,
// component 2 for alpha > beta^2. Requires a superradiant phase away from
// the U(1) boundary; throws ConfigError otherwise.
EigenstatePair analytic_eigenstate(const ModelParams& params);

struct MeanPhotons {
    double n1_over_eta = 0.0;
    double n2_over_eta = 0.0;
};

// Leading-order mean photon numbers per eta: (0,0) up to the critical point,
// then n2/eta = (beta^4 R^4 - alpha^2)/(4 alpha^2 beta^2 R^2) for
// alpha < beta^2 or n1/eta = (R^4 - 1)/(4 R^2) for alpha > beta^2.
// Throws ConfigError at alpha = beta^2, where the condensate direction is
// not unique.
MeanPhotons mean_photon_analytic(const ModelParams& params);

}  // namespace qrabi
