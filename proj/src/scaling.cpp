#include "qrabi/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace qrabi {

void SweepDataset::validate() const {
    if (etas.size() < 2 || Rs.size() < 3)
        throw ConfigError("sweep dataset needs >= 2 eta values and >= 3 R slices");
    if (n_over_eta.size() != etas.size() * Rs.size())
        throw ConfigError("sweep dataset is not rectangular");
    if (!std::is_sorted(etas.begin(), etas.end()) ||
        !std::is_sorted(Rs.begin(), Rs.end()))
        throw ConfigError("sweep axes must be ascending");
    for (double e : etas)
        if (!(e > 0.0)) throw ConfigError("eta values must be positive");
    for (double v : n_over_eta)
        if (!(v > 0.0))
            throw ConfigError("order parameter must be positive for log fits");
}

namespace {

struct Ols {
    double slope = 0.0, intercept = 0.0, ssr = 0.0;
};

Ols ols(const double* x, const double* y, std::size_t n) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    Ols o;
    o.slope = sxy / sxx;
    o.intercept = my - o.slope * mx;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - o.slope * x[i] - o.intercept;
        o.ssr += r * r;
    }
    return o;
}

// eta_min window: drop points from the left until removing one more changes
// the slope by less than thresh; the surviving leftmost point is kept.
std::size_t window_rule(const std::vector<double>& lne, const std::vector<double>& lnN,
                        int min_keep, double thresh) {
    const std::size_t m = lne.size();
    std::size_t k = 0;
    while (m - (k + 1) >= static_cast<std::size_t>(min_keep)) {
        const Ols cur = ols(lne.data() + k, lnN.data() + k, m - k);
        const Ols nxt = ols(lne.data() + k + 1, lnN.data() + k + 1, m - k - 1);
        if (std::abs(nxt.slope - cur.slope) < thresh) break;
        ++k;
    }
    return k;
}

}  // namespace

LocateResult locate_critical(const SweepDataset& data, int min_keep,
                             double slope_thresh) {
    data.validate();
    const std::size_t ne = data.etas.size();
    const std::size_t nR = data.Rs.size();
    if (ne < static_cast<std::size_t>(min_keep))
        throw ConfigError("locate_critical needs at least min_keep eta values");

    std::vector<double> lne(ne);
    for (std::size_t i = 0; i < ne; ++i) lne[i] = std::log(data.etas[i]);
    std::vector<double> lnN(ne);
    auto fill_lnN = [&](std::size_t ir) {
        for (std::size_t j = 0; j < ne; ++j) lnN[j] = std::log(data.at(ir, j));
    };

    // Pass 1: straightest slice on the full window fixes the eta_min window.
    std::size_t i0 = 0;
    double best0 = std::numeric_limits<double>::infinity();
    for (std::size_t ir = 0; ir < nR; ++ir) {
        fill_lnN(ir);
        const double s = ols(lne.data(), lnN.data(), ne).ssr;
        if (s < best0) {
            best0 = s;
            i0 = ir;
        }
    }
    fill_lnN(i0);
    const std::size_t k = window_rule(lne, lnN, min_keep, slope_thresh);

    // Pass 2: per-R fits on the fixed window.
    LocateResult out;
    out.slice_slopes.resize(nR);
    out.slice_ssr.resize(nR);
    for (std::size_t ir = 0; ir < nR; ++ir) {
        fill_lnN(ir);
        const Ols o = ols(lne.data() + k, lnN.data() + k, ne - k);
        out.slice_slopes[ir] = o.slope;
        out.slice_ssr[ir] = o.ssr;
    }
    std::size_t i1 = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t ir = 0; ir < nR; ++ir)
        if (out.slice_ssr[ir] < best) {
            best = out.slice_ssr[ir];
            i1 = ir;
        }
    if (i1 == 0 || i1 == nR - 1)
        throw NonConvergence(
            "power-law residual minimum sits on the " +
            std::string(i1 == 0 ? "lower" : "upper") +
            " edge of the R grid; widen the R range around the critical point");

    const double x0 = data.Rs[i1 - 1], x1 = data.Rs[i1], x2 = data.Rs[i1 + 1];
    const double f0 = out.slice_ssr[i1 - 1], f1 = out.slice_ssr[i1],
                 f2 = out.slice_ssr[i1 + 1];
    const double d1 = (f2 - f0) / (x2 - x0);
    const double d2 = ((f2 - f1) / (x2 - x1) - (f1 - f0) / (x1 - x0)) /
                      (0.5 * (x2 - x0));
    double Rc = (d2 > 0.0) ? x1 - d1 / d2 : x1;
    Rc = std::min(std::max(Rc, x0), x2);
    out.Rc_est = Rc;
    if (Rc >= x1) {
        const double t = (Rc - x1) / (x2 - x1);
        out.slope = (1.0 - t) * out.slice_slopes[i1] + t * out.slice_slopes[i1 + 1];
    } else {
        const double t = (x1 - Rc) / (x1 - x0);
        out.slope = (1.0 - t) * out.slice_slopes[i1] + t * out.slice_slopes[i1 - 1];
    }
    out.linfit_residual = out.slice_ssr[i1];
    out.eta_min = data.etas[k];
    return out;
}

std::vector<double> isotonic_fit(const std::vector<double>& y) {
    const std::size_t n = y.size();
    std::vector<double> vals, wts;
    std::vector<std::size_t> ends;
    vals.reserve(n);
    wts.reserve(n);
    ends.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double cv = y[i], cw = 1.0;
        while (!vals.empty() && vals.back() > cv) {
            cv = (vals.back() * wts.back() + cv * cw) / (wts.back() + cw);
            cw += wts.back();
            vals.pop_back();
            wts.pop_back();
            ends.pop_back();
        }
        vals.push_back(cv);
        wts.push_back(cw);
        ends.push_back(i);
    }
    std::vector<double> out(n);
    std::size_t start = 0;
    for (std::size_t b = 0; b < vals.size(); ++b) {
        for (std::size_t i = start; i <= ends[b]; ++i) out[i] = vals[b];
        start = ends[b] + 1;
    }
    return out;
}

double collapse_cost_at(const SweepDataset& data, double Rc, double kappa_over_nu,
                        double nu) {
    const std::size_t ne = data.etas.size();
    const std::size_t nR = data.Rs.size();
    const std::size_t n = ne * nR;
    std::vector<double> x(n), y(n);
    std::size_t p = 0;
    for (std::size_t ir = 0; ir < nR; ++ir) {
        const double r = (data.Rs[ir] - Rc) / Rc;
        for (std::size_t je = 0; je < ne; ++je, ++p) {
            const double eta = data.etas[je];
            x[p] = std::pow(eta, 1.0 / nu) * r;
            y[p] = data.at(ir, je) * std::pow(eta, kappa_over_nu);
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
    const std::vector<double> fit = isotonic_fit(ys);
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = ys[i] - fit[i];
        cost += d * d;
    }
    return cost / n;
}

CollapseResult collapse_nu(const SweepDataset& data, double Rc, double slope,
                           double nu_lo, double nu_hi) {
    data.validate();
    if (!(nu_lo > 0.0) || !(nu_hi > nu_lo))
        throw ConfigError("invalid nu search range");
    if (!(Rc > 0.0) || !std::isfinite(Rc))
        throw ConfigError("collapse_nu needs a positive finite Rc");
    const double rmin = (data.Rs.front() - Rc) / Rc;
    const double rmax = (data.Rs.back() - Rc) / Rc;
    if (rmax - rmin <= 0.0)
        throw ConfigError("degenerate reduced-coupling range for collapse");
    const double kon = -slope;
    constexpr int nscan = 41;
    double best = std::numeric_limits<double>::infinity();
    int ibest = 0;
    std::vector<double> grid(nscan);
    for (int i = 0; i < nscan; ++i) {
        grid[i] = nu_lo + (nu_hi - nu_lo) * i / (nscan - 1);
        const double c = collapse_cost_at(data, Rc, kon, grid[i]);
        if (c < best) {
            best = c;
            ibest = i;
        }
    }
    double a = grid[std::max(ibest - 1, 0)];
    double b = grid[std::min(ibest + 1, nscan - 1)];
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = collapse_cost_at(data, Rc, kon, c);
    double fd = collapse_cost_at(data, Rc, kon, d);
    for (int it = 0; it < 80 && b - a >= 1e-7; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = collapse_cost_at(data, Rc, kon, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = collapse_cost_at(data, Rc, kon, d);
        }
    }
    CollapseResult out;
    out.nu = 0.5 * (a + b);
    out.collapse_cost = collapse_cost_at(data, Rc, kon, out.nu);
    return out;
}

ScalingFit fit_scaling(const SweepDataset& data, double nu_lo, double nu_hi) {
    const LocateResult loc = locate_critical(data);
    const CollapseResult col = collapse_nu(data, loc.Rc_est, loc.slope, nu_lo, nu_hi);
    ScalingFit fit;
    fit.Rc_est = loc.Rc_est;
    fit.slope = loc.slope;
    fit.nu = col.nu;
    fit.kappa = -loc.slope * col.nu;
    fit.linfit_residual = loc.linfit_residual;
    fit.collapse_cost = col.collapse_cost;
    fit.eta_min = loc.eta_min;
    return fit;
}

std::vector<std::pair<double, double>> universal_f(Branch branch,
                                                   const ModelParams& params,
                                                   const std::vector<double>& rprime_grid,
                                                   int trunc_1d) {
    std::vector<std::pair<double, double>> out;
    out.reserve(rprime_grid.size());
    for (double rp : rprime_grid) {
        const QuarticGround g = quartic_ground_adaptive(params, branch, rp, trunc_1d);
        out.emplace_back(rp, 0.5 * g.z2);
    }
    return out;
}

SweepDataset synthetic_dataset(double alpha, double beta,
                               const std::vector<double>& etas,
                               const std::vector<double>& Rs, double Rc_true,
                               double slope_true, double nu_true) {
    SweepDataset d;
    d.regime = (alpha < beta * beta) ? Branch::Mode2 : Branch::Mode1;
    d.alpha = alpha;
    d.beta = beta;
    d.etas = etas;
    d.Rs = Rs;
    d.n_over_eta.resize(etas.size() * Rs.size());
    for (std::size_t ir = 0; ir < Rs.size(); ++ir) {
        const double r = (Rs[ir] - Rc_true) / Rc_true;
        for (std::size_t je = 0; je < etas.size(); ++je) {
            const double eta = etas[je];
            const double x = std::pow(eta, 1.0 / nu_true) * r;
            const double g = 0.05 + 0.2 * (x + std::sqrt(1.0 + x * x));
            d.n_over_eta[ir * etas.size() + je] = std::pow(eta, slope_true) * g;
        }
    }
    d.validate();
    return d;
}

}  // namespace qrabi
