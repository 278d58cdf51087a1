#pragma once
// Finite-size scaling analysis: power-law fits of the order-parameter photon
// number across an (eta, R) grid, critical-point location, data collapse for
// the correlation-length exponent, and the universal scaling function from
// the effective one-dimensional quartic model.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qrabi/model.hpp"
#include "qrabi/quartic.hpp"

namespace qrabi {

// Rectangular sweep of the order-parameter photon number: one value of
// n_mode/eta per (R, eta) pair, R-major. regime names the condensing mode.
struct SweepDataset {
    Branch regime = Branch::Mode2;
    double alpha = 1.0;
    double beta = 1.0;
    double delta = 0.0;
    std::vector<double> etas;  // ascending
    std::vector<double> Rs;    // ascending
    std::vector<double> n_over_eta;  // size Rs.size()*etas.size(), index ir*netas+ie

    double at(std::size_t ir, std::size_t ie) const {
        return n_over_eta[ir * etas.size() + ie];
    }
    void validate() const;
};

struct LocateResult {
    double Rc_est = 0.0;
    double slope = 0.0;            // d ln N / d ln eta at the critical point
    double linfit_residual = 0.0;  // SSR of the log-log fit at the best slice
    double eta_min = 0.0;          // smallest eta retained by the window rule
    std::vector<double> slice_slopes;  // per-R fitted slopes (diagnostics)
    std::vector<double> slice_ssr;     // per-R fit residuals (diagnostics)
};

// Critical coupling from the straightest power law: per-R ordinary least
// squares of ln N on ln eta, low-eta window chosen by a drop-from-the-left
// rule (stop dropping once the slope changes by < slope_thresh, keep at
// least min_keep points), SSR minimized over R with a three-point quadratic
// refinement. The refinement requires the SSR minimum to sit strictly inside
// the R grid; otherwise a NonConvergence is thrown naming the offending edge.
LocateResult locate_critical(const SweepDataset& data, int min_keep = 4,
                             double slope_thresh = 0.01);

struct CollapseResult {
    double nu = 0.0;
    double collapse_cost = 0.0;  // mean squared deviation from the pooled fit
};

// Correlation-length exponent by data collapse: points are mapped to
// x = eta^(1/nu) (R - Rc)/Rc, y = N eta^(kappa/nu) with kappa/nu = -slope,
// the pooled monotone reference is the isotonic regression of y on x, and nu
// minimizes the mean squared vertical deviation (coarse scan then golden
// section to 1e-7).
CollapseResult collapse_nu(const SweepDataset& data, double Rc, double slope,
                           double nu_lo = 1.0, double nu_hi = 2.2);

struct ScalingFit {
    double Rc_est = 0.0;
    double slope = 0.0;
    double nu = 0.0;
    double kappa = 0.0;  // -slope * nu (slope is the fitted -kappa/nu)
    double linfit_residual = 0.0;
    double collapse_cost = 0.0;
    double eta_min = 0.0;
};

ScalingFit fit_scaling(const SweepDataset& data, double nu_lo = 1.0, double nu_hi = 2.2);

// Universal scaling function f(r') = <z^2>/2 of the branch's quartic model,
// evaluated on the given r' grid with internal basis-size doubling.
std::vector<std::pair<double, double>> universal_f(Branch branch,
                                                   const ModelParams& params,
                                                   const std::vector<double>& rprime_grid,
                                                   int trunc_1d);

// Synthetic sweep with a known smooth scaling form
//   N(eta, R) = eta^slope_true * g(eta^(1/nu_true) (R - Rc_true)/Rc_true),
//   g(x) = 0.05 + 0.2 (x + sqrt(1 + x^2)),
// used to validate the estimator pipeline end to end.
SweepDataset synthetic_dataset(double alpha, double beta,
                               const std::vector<double>& etas,
                               const std::vector<double>& Rs, double Rc_true,
                               double slope_true = -2.0 / 3.0,
                               double nu_true = 1.5);

// Isotonic regression (pool-adjacent-violators), nondecreasing fit in place.
std::vector<double> isotonic_fit(const std::vector<double>& y);

// Mean squared deviation of the collapsed cloud from its monotone fit at a
// trial nu. Exposed for tests.
double collapse_cost_at(const SweepDataset& data, double Rc, double kappa_over_nu,
                        double nu);

}  // namespace qrabi
