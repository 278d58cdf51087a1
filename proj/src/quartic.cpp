#include "qrabi/quartic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "qrabi/eigensolver.hpp"
#include "qrabi/kernels.hpp"

namespace qrabi {

QuarticCoeffs quartic_coeffs(const ModelParams& params, Branch branch, double rprime) {
    params.validate();
    if (params.delta != 0.0)
        throw ConfigError("quartic model requires delta = 0");
    QuarticCoeffs c;
    if (branch == Branch::Mode1) {
        c.cp = 0.5;
        c.c2 = -rprime;
        c.c4 = 0.25;
    } else {
        c.cp = 0.5 * params.alpha;
        c.c2 = -params.alpha * rprime;
        c.c4 = 0.25 * params.alpha * params.alpha;
    }
    return c;
}

namespace {

// Oscillator-basis bands of c_p p^2 + c_2 z^2 + c_4 z^4 with z = l(b+b^dag)/sqrt(2).
// In units of w = b + b^dag: <n|w^2|n> = 2n+1, <n|w^2|n+2> = sqrt((n+1)(n+2)),
// <n|w^4|n> = 6n^2+6n+3, <n|w^4|n+2> = (4n+6) sqrt((n+1)(n+2)),
// <n|w^4|n+4> = sqrt((n+1)(n+2)(n+3)(n+4)); p^2 has the w^2 pattern with the
// off-diagonal sign flipped and scale 1/(2 l^2).
struct Bands {
    std::vector<double> d0, d2, d4;  // n<->n, n<->n+2, n<->n+4
};

Bands quartic_bands(double cp, double c2, double c4, int K, double l) {
    const double zf = 0.5 * l * l;         // z^2 scale l^2/2
    const double pf = 0.5 / (l * l);       // p^2 scale 1/(2 l^2)
    const double qf = zf * zf;             // z^4 scale
    Bands b;
    b.d0.resize(K);
    b.d2.assign(K, 0.0);
    b.d4.assign(K, 0.0);
    for (int n = 0; n < K; ++n) {
        const double w2d = 2.0 * n + 1.0;
        const double w4d = 6.0 * double(n) * n + 6.0 * n + 3.0;
        b.d0[n] = cp * pf * w2d + c2 * zf * w2d + c4 * qf * w4d;
        if (n + 2 < K) {
            const double s2 = std::sqrt(double(n + 1) * (n + 2));
            b.d2[n] = -cp * pf * s2 + c2 * zf * s2 + c4 * qf * (4.0 * n + 6.0) * s2;
        }
        if (n + 4 < K) {
            const double s4 =
                std::sqrt(double(n + 1) * (n + 2) * (n + 3) * (n + 4));
            b.d4[n] = c4 * qf * s4;
        }
    }
    return b;
}

SparseOperator banded_operator(const Bands& b, int K) {
    SparseOperator op;
    op.dimension = K;
    op.row_ptr.resize(K + 1);
    op.row_ptr[0] = 0;
    for (int i = 0; i < K; ++i) {
        auto push = [&](int jcol, double v) {
            if (v != 0.0) {
                op.col.push_back(static_cast<std::uint32_t>(jcol));
                op.val.push_back(v);
            }
        };
        if (i - 4 >= 0) push(i - 4, b.d4[i - 4]);
        if (i - 2 >= 0) push(i - 2, b.d2[i - 2]);
        push(i, b.d0[i]);
        if (i + 2 < K) push(i + 2, b.d2[i]);
        if (i + 4 < K) push(i + 4, b.d4[i]);
        op.row_ptr[i + 1] = op.col.size();
    }
    return op;
}

double one_norm(const SparseOperator& H) {
    double nrm = 0.0;
    for (std::size_t i = 0; i < H.dimension; ++i) {
        double s = 0.0;
        for (std::size_t k = H.row_ptr[i]; k < H.row_ptr[i + 1]; ++k)
            s += std::abs(H.val[k]);
        nrm = std::max(nrm, s);
    }
    return nrm;
}

double auto_length_scale(double cp, double c2, double c4, double rprime) {
    double l;
    if (c4 > 0.0) {
        l = std::pow(cp / (3.0 * c4), 1.0 / 6.0);
        if (rprime > 0.0) l = std::max(l, 0.6 * std::sqrt(2.0 * rprime));
    } else if (c2 > 0.0) {
        l = std::pow(cp / c2, 0.25);
    } else {
        l = 1.0;
    }
    return l;
}

}  // namespace

SparseOperator build_quartic_hamiltonian(const ModelParams& params, Branch branch,
                                         int trunc_1d, double rprime,
                                         double quartic_scale, double length_scale) {
    if (trunc_1d < 2) throw ConfigError("trunc_1d must be >= 2");
    QuarticCoeffs c = quartic_coeffs(params, branch, rprime);
    c.c4 *= quartic_scale;
    const double l = length_scale > 0.0
                         ? length_scale
                         : auto_length_scale(c.cp, c.c2, c.c4, rprime);
    return banded_operator(quartic_bands(c.cp, c.c2, c.c4, trunc_1d, l), trunc_1d);
}

QuarticGround quartic_ground(double cp, double c2, double c4, int trunc_1d,
                             double length_scale) {
    if (trunc_1d < 2) throw ConfigError("trunc_1d must be >= 2");
    if (!(length_scale > 0.0)) throw ConfigError("length_scale must be > 0");
    const int K = trunc_1d;
    const Bands hb = quartic_bands(cp, c2, c4, K, length_scale);
    const SparseOperator H = banded_operator(hb, K);

    // Even potential: the ground state lives on even oscillator indices.
    std::vector<double> v0(K, 0.0);
    std::mt19937_64 rng(20260816ULL);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int i = 0; i < K; i += 2) v0[i] = nd(rng);

    LanczosOptions lopt;
    lopt.max_krylov = 64;
    lopt.keep = 8;
    lopt.max_restarts = 4000;
    // The widened-basis operator norm grows like K^2, and the attainable
    // residual floor grows with it; keep the gates above that floor.
    const double nrm = one_norm(H);
    lopt.tol_res = std::max(1e-11, 5e-15 * nrm);
    lopt.tol_theta = std::max(1e-14, 5e-15 * nrm);
    LanczosOutcome lz = lanczos_ground(H, v0, lopt);
    if (!lz.converged)
        throw NonConvergence("quartic ground state did not converge at K=" +
                             std::to_string(K));

    const SparseOperator Z2 =
        banded_operator(quartic_bands(0.0, 1.0, 0.0, K, length_scale), K);
    const SparseOperator P2 =
        banded_operator(quartic_bands(1.0, 0.0, 0.0, K, length_scale), K);
    std::vector<double> w(K);
    QuarticGround g;
    g.energy = lz.theta;
    matvec(Z2, lz.vec.data(), w.data());
    g.z2 = dot(lz.vec.data(), w.data(), K);
    matvec(P2, lz.vec.data(), w.data());
    g.p2 = dot(lz.vec.data(), w.data(), K);
    return g;
}

QuarticGround quartic_ground_adaptive(const ModelParams& params, Branch branch,
                                      double rprime, int trunc_1d) {
    if (trunc_1d < 2) throw ConfigError("trunc_1d must be >= 2");
    const QuarticCoeffs c = quartic_coeffs(params, branch, rprime);
    const double l = auto_length_scale(c.cp, c.c2, c.c4, rprime);
    int K = std::max(trunc_1d, 8);
    QuarticGround prev = quartic_ground(c.cp, c.c2, c.c4, K, l);
    for (int pass = 0; pass < 8; ++pass) {
        K *= 2;
        QuarticGround cur = quartic_ground(c.cp, c.c2, c.c4, K, l);
        const bool e_ok = std::abs(cur.energy - prev.energy) <=
                          std::max(1e-10, 1e-8 * std::abs(cur.energy));
        const bool z_ok = std::abs(cur.z2 - prev.z2) <=
                          std::max(1e-8, 1e-6 * std::abs(cur.z2));
        if (e_ok && z_ok) return cur;
        prev = cur;
    }
    throw NonConvergence("quartic basis doubling did not converge at r' = " +
                         std::to_string(rprime));
}

}  // namespace qrabi
