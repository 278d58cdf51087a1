#pragma once
// Effective one-dimensional quartic Hamiltonians governing the soft mode
// near criticality, one per superradiant branch:
//   mode-1 branch:  h = (1/2) p^2         - r' z^2        + (1/4) z^4
//   mode-2 branch:  h = (alpha/2) p^2     - alpha r' z^2  + (alpha^2/4) z^4
// Built in a harmonic-oscillator basis of tunable length scale; the ground
// state yields the universal scaling function f = <z^2>/2.

#include "qrabi/model.hpp"

namespace qrabi {

enum class Branch { Mode1, Mode2 };

// Coefficients (c_p, c_2, c_4) of h = c_p p^2 + c_2 z^2 + c_4 z^4 for the
// given branch at detuning r'. c_2 = -c_p_factor * r' (negative past critical).
struct QuarticCoeffs {
    double cp = 0.5;
    double c2 = 0.0;
    double c4 = 0.25;
};

QuarticCoeffs quartic_coeffs(const ModelParams& params, Branch branch, double rprime);

// Pentadiagonal matrix of c_p p^2 + c_2 z^2 + c_4 z^4 in the lowest trunc_1d
// oscillator states of length scale l (z = l (b + b^dag)/sqrt(2)).
// quartic_scale multiplies c_4; setting it to zero reduces the operator to an
// exactly solvable harmonic form used as a correctness hook in the tests.
// length_scale <= 0 selects the variational default (c_p / (3 c_4))^(1/6),
// widened to 0.6 sqrt(2 r') inside the double-well region r' > 0.
SparseOperator build_quartic_hamiltonian(const ModelParams& params, Branch branch,
                                         int trunc_1d, double rprime,
                                         double quartic_scale = 1.0,
                                         double length_scale = 0.0);

struct QuarticGround {
    double energy = 0.0;
    double z2 = 0.0;  // <z^2>
    double p2 = 0.0;  // <p^2>
};

// Ground state of c_p p^2 + c_2 z^2 + c_4 z^4 at fixed basis size and length
// scale. The potential is symmetric, so the ground state is even; the solve
// is restricted to the even-index oscillator sector.
QuarticGround quartic_ground(double cp, double c2, double c4, int trunc_1d,
                             double length_scale);

// f(r') = <z^2>/2 for the requested branch, at a basis size chosen internally
// by doubling trunc_1d until the energy and f agree between successive sizes.
QuarticGround quartic_ground_adaptive(const ModelParams& params, Branch branch,
                                      double rprime, int trunc_1d);

}  // namespace qrabi
