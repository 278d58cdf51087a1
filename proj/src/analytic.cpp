#include "qrabi/analytic.hpp"

#include <cmath>
#include <limits>

namespace qrabi {

CriticalPoint critical_coupling(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw ConfigError("critical_coupling requires alpha > 0 and beta > 0");
    CriticalPoint cp;
    const double b2 = beta * beta;
    if (alpha < b2) {
        cp.regime = Regime::AlphaLessBetaSq;
        cp.Rc = std::sqrt(alpha / b2);
    } else if (alpha > b2) {
        cp.regime = Regime::AlphaGreaterBetaSq;
        cp.Rc = 1.0;
    } else {
        cp.regime = Regime::AlphaEqualsBetaSq;
        cp.Rc = 1.0;
    }
    return cp;
}

CriticalPoint critical_coupling(double alpha, double beta, double delta) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw ConfigError("critical_coupling requires alpha > 0 and beta > 0");
    if (!(delta >= 0.0 && delta < 1.0))
        throw ConfigError("critical_coupling requires 0 <= delta < 1");
    // The mode-2 instability is reached at sqrt(alpha(1-delta))/beta, the
    // mode-1 one at 1; whichever is smaller wins.
    const double a_eff = alpha * (1.0 - delta);
    const double b2 = beta * beta;
    CriticalPoint cp;
    if (a_eff < b2) {
        cp.regime = Regime::AlphaLessBetaSq;
        cp.Rc = std::sqrt(a_eff / b2);
    } else if (a_eff > b2) {
        cp.regime = Regime::AlphaGreaterBetaSq;
        cp.Rc = 1.0;
    } else {
        cp.regime = Regime::AlphaEqualsBetaSq;
        cp.Rc = 1.0;
    }
    return cp;
}

std::string to_string(PhaseLabel label) {
    switch (label) {
        case PhaseLabel::Normal: return "Normal";
        case PhaseLabel::SuperradiantY1: return "SuperradiantY1";
        case PhaseLabel::SuperradiantY2: return "SuperradiantY2";
        case PhaseLabel::BoundaryU1: return "BoundaryU1";
    }
    return "?";
}

PhaseClassification classify_phase(const ModelParams& params) {
    params.validate();
    if (params.delta != 0.0)
        throw ConfigError("classify_phase requires delta = 0");
    const double a = params.alpha;
    const double b2 = params.beta * params.beta;
    const double R = params.R;
    const double R2 = R * R;
    PhaseClassification out;
    if (a < b2) {
        const double Rc = std::sqrt(a / b2);
        if (R <= Rc) return out;  // Normal, zeros
        out.label = PhaseLabel::SuperradiantY2;
        out.multiplicity = 2;
        const double g = a / b2;  // gamma
        out.y2 = std::sqrt((b2 * b2 * R2 * R2 - a * a) / (2.0 * a * a * b2 * R2));
        out.energy = 0.5 - 0.25 * (g / R2 + R2 / g);
        return out;
    }
    if (R <= 1.0) return out;  // Normal for both remaining regimes
    out.y1 = std::sqrt((R2 * R2 - 1.0) / (2.0 * R2));
    out.energy = 0.5 - 0.25 * (R2 + 1.0 / R2);
    if (a > b2) {
        out.label = PhaseLabel::SuperradiantY1;
        out.multiplicity = 2;
    } else {
        out.label = PhaseLabel::BoundaryU1;  // canonical point of the ring
        out.multiplicity = 0;
    }
    return out;
}

EnergySurfacePoint grid_minimize_surface(const ModelParams& params,
                                         double half_width, double step) {
    params.validate();
    if (params.delta != 0.0)
        throw ConfigError("grid_minimize_surface requires delta = 0");
    if (!(step > 0.0)) throw ConfigError("step must be > 0");
    const long n = static_cast<long>(std::floor(half_width / step));
    if (n < 0 || !(half_width >= 0.0)) throw ConfigError("empty grid");

    const double a = params.alpha;
    const double b2 = params.beta * params.beta;
    const double twoR2 = 2.0 * params.R * params.R;

    double best = std::numeric_limits<double>::infinity();
    long bi = 0, bj = 0;
    for (long i = -n; i <= n; ++i) {
        const double y1 = i * step;
        const double q1 = 0.5 * y1 * y1;
        const double s1 = twoR2 * y1 * y1;
        for (long j = -n; j <= n; ++j) {
            const double y2 = j * step;
            const double e = q1 + 0.5 * a * y2 * y2 +
                             0.5 * (1.0 - std::sqrt(1.0 + s1 + twoR2 * b2 * y2 * y2));
            if (e < best) {
                best = e;
                bi = i;
                bj = j;
            }
        }
    }

    auto E = [&](double y1, double y2) { return energy_surface(params, y1, y2); };
    double y1 = bi * step, y2 = bj * step;
    // One quadratic refinement per axis where the minimum is interior.
    if (bi > -n && bi < n) {
        const double fm = E(y1 - step, y2), f0 = E(y1, y2), fp = E(y1 + step, y2);
        const double den = fp - 2.0 * f0 + fm;
        if (den > 0.0) y1 -= 0.5 * step * (fp - fm) / den;
    }
    if (bj > -n && bj < n) {
        const double fm = E(y1, y2 - step), f0 = E(y1, y2), fp = E(y1, y2 + step);
        const double den = fp - 2.0 * f0 + fm;
        if (den > 0.0) y2 -= 0.5 * step * (fp - fm) / den;
    }
    EnergySurfacePoint p;
    p.y1 = y1;
    p.y2 = y2;
    p.energy = E(y1, y2);
    return p;
}

GroundDerivatives ground_energy_derivatives(const ModelParams& params) {
    params.validate();
    if (params.delta != 0.0)
        throw ConfigError("ground_energy_derivatives requires delta = 0");
    const double a = params.alpha;
    const double b2 = params.beta * params.beta;
    const double g = a / b2;
    const double R = params.R;
    const double R2 = R * R;
    GroundDerivatives d;
    if (a < b2) {
        const double Rc = std::sqrt(g);
        if (R < Rc) return d;  // normal: E identically 0
        // E = 1/2 - (gamma/R^2 + R^2/gamma)/4
        d.d2E_dR2 = -1.5 * g / (R2 * R2) - 0.5 / g;
        d.dE_dgamma = -0.25 * (1.0 / R2 - R2 / (g * g));
        return d;
    }
    if (R < 1.0) return d;
    // E = 1/2 - (R^2 + 1/R^2)/4, independent of gamma on this side
    d.d2E_dR2 = -0.5 * (1.0 + 3.0 / (R2 * R2));
    d.dE_dgamma = 0.0;
    return d;
}

EigenstatePair analytic_eigenstate(const ModelParams& params) {
    const PhaseClassification ph = classify_phase(params);
    if (ph.label == PhaseLabel::Normal)
        throw ConfigError("analytic_eigenstate requires a superradiant phase");
    if (ph.label == PhaseLabel::BoundaryU1)
        throw ConfigError("analytic_eigenstate is undefined on the U(1) boundary");
    const double R2 = params.R * params.R;
    EigenstatePair out;
    if (ph.label == PhaseLabel::SuperradiantY2) {
        const double b2R2 = params.beta * params.beta * R2;
        const double c2 = std::sqrt((b2R2 + params.alpha) / (2.0 * b2R2));
        const double c3 = std::sqrt((b2R2 - params.alpha) / (2.0 * b2R2));
        out.plus = {0.0, -c2, c3};
        out.minus = {0.0, c2, c3};
    } else {
        const double c1 = std::sqrt((R2 + 1.0) / (2.0 * R2));
        const double c3 = std::sqrt((R2 - 1.0) / (2.0 * R2));
        out.plus = {-c1, 0.0, c3};
        out.minus = {c1, 0.0, c3};
    }
    return out;
}

MeanPhotons mean_photon_analytic(const ModelParams& params) {
    params.validate();
    if (params.delta != 0.0)
        throw ConfigError("mean_photon_analytic requires delta = 0");
    const double a = params.alpha;
    const double b2 = params.beta * params.beta;
    if (a == b2)
        throw ConfigError("mean_photon_analytic is undefined at alpha = beta^2");
    const double R2 = params.R * params.R;
    MeanPhotons mp;
    if (a < b2) {
        const double Rc = std::sqrt(a / b2);
        if (params.R <= Rc) return mp;
        mp.n2_over_eta = (b2 * b2 * R2 * R2 - a * a) / (4.0 * a * a * b2 * R2);
        return mp;
    }
    if (params.R <= 1.0) return mp;
    mp.n1_over_eta = (R2 * R2 - 1.0) / (4.0 * R2);
    return mp;
}

}  // namespace qrabi
