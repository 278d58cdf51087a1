#include "qrabi/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "qrabi/kernels.hpp"

namespace qrabi {

std::uint64_t split_seed(std::uint64_t base, std::uint64_t salt) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

using RowMajorMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<double> ritz_vector(const Eigen::Map<RowMajorMat>& V, int rows,
                                const Eigen::MatrixXd& Y) {
    Eigen::VectorXd u = V.topRows(rows).transpose() * Y.col(0);
    const double nrm = u.norm();
    std::vector<double> out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = u[i] / nrm;
    return out;
}

}  // namespace

LanczosOutcome lanczos_ground(const SparseOperator& H, const std::vector<double>& start,
                              const LanczosOptions& opt) {
    const std::size_t dim = H.dimension;
    if (start.size() != dim) throw ConfigError("start vector length mismatch");
    if (dim == 0) throw ConfigError("empty operator");
    if (dim == 1) {
        LanczosOutcome out;
        out.theta = H.nnz() ? H.val[0] : 0.0;
        out.vec = {1.0};
        out.converged = true;
        return out;
    }

    const int m = static_cast<int>(std::min<std::size_t>(opt.max_krylov, dim));
    const int keep = std::max(1, std::min(opt.keep, m - 2));

    std::vector<double> Vbuf(static_cast<std::size_t>(m + 1) * dim);
    Eigen::Map<RowMajorMat> V(Vbuf.data(), m + 1, static_cast<Eigen::Index>(dim));
    std::vector<double> w(dim);
    Eigen::Map<Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(dim));

    const double start_norm = norm2(start);
    if (!(start_norm > 0.0)) throw ConfigError("start vector must be nonzero");
    std::vector<char> sector_zero(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        Vbuf[i] = start[i] / start_norm;
        sector_zero[i] = (start[i] == 0.0);
    }

    Eigen::MatrixXd T(m, m);
    Eigen::VectorXd thetas(keep), svec(keep);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    int k0 = 0;
    double e_prev = std::numeric_limits<double>::infinity();
    LanczosOutcome out;

    double last_res = std::numeric_limits<double>::quiet_NaN();
    Eigen::MatrixXd last_Y;
    double last_theta = std::numeric_limits<double>::quiet_NaN();

    for (int it = 0; it < opt.max_restarts; ++it) {
        T.setZero();
        if (k0 > 0) {
            for (int i = 0; i < k0; ++i) {
                T(i, i) = thetas(i);
                T(i, k0) = svec(i);
                T(k0, i) = svec(i);
            }
        }
        int j = k0;
        double beta_last = 0.0;
        while (j < m) {
            matvec(H, &Vbuf[static_cast<std::size_t>(j) * dim], w.data());
            ++out.matvecs;
            const double a = dot(&Vbuf[static_cast<std::size_t>(j) * dim], w.data(), dim);
            T(j, j) = a;
            auto Vtop = V.topRows(j + 1);
            Eigen::VectorXd c = Vtop * wv;
            wv.noalias() -= Vtop.transpose() * c;
            c = Vtop * wv;
            wv.noalias() -= Vtop.transpose() * c;
            double b = norm2(w.data(), dim);
            if (b < 1e-13 * std::max(1.0, std::abs(a))) {
                // Krylov breakdown: reinject a random vector from the same
                // sector, orthogonal to everything built so far.
                std::mt19937_64 rng(977ULL + 13ULL * static_cast<std::uint64_t>(it) +
                                    static_cast<std::uint64_t>(j));
                std::normal_distribution<double> nd(0.0, 1.0);
                for (std::size_t i = 0; i < dim; ++i)
                    w[i] = sector_zero[i] ? 0.0 : nd(rng);
                c = Vtop * wv;
                wv.noalias() -= Vtop.transpose() * c;
                b = norm2(w.data(), dim);
                if (b < 1e-12) {
                    // The sector is exhausted: the span is invariant and the
                    // lowest Ritz pair is exact.
                    const int m_eff = j + 1;
                    es.compute(T.topLeftCorner(m_eff, m_eff));
                    out.theta = es.eigenvalues()(0);
                    out.vec = ritz_vector(V, m_eff, es.eigenvectors());
                    out.restarts = it;
                    out.res = 0.0;
                    out.converged = true;
                    return out;
                }
            }
            scale(1.0 / b, w.data(), dim);
            std::copy(w.begin(), w.end(), Vbuf.begin() + static_cast<std::size_t>(j + 1) * dim);
            if (j + 1 < m) {
                T(j, j + 1) = b;
                T(j + 1, j) = b;
            }
            beta_last = b;
            ++j;
        }
        es.compute(T);
        const Eigen::VectorXd& th = es.eigenvalues();
        const Eigen::MatrixXd& Y = es.eigenvectors();
        const double res0 = std::abs(beta_last * Y(m - 1, 0));
        last_res = res0;
        last_Y = Y;
        last_theta = th(0);
        if (res0 <= opt.tol_res * std::max(1.0, std::abs(th(0))) &&
            std::abs(th(0) - e_prev) <= opt.tol_theta) {
            out.theta = th(0);
            out.vec = ritz_vector(V, m, Y);
            out.restarts = it;
            out.res = res0;
            out.converged = true;
            return out;
        }
        e_prev = th(0);
        Eigen::MatrixXd U = Y.leftCols(keep).transpose() * V.topRows(m);
        for (int i = 0; i < keep; ++i) {
            svec(i) = beta_last * Y(m - 1, i);
            thetas(i) = th(i);
        }
        V.topRows(keep) = U;
        V.row(keep) = V.row(m);
        k0 = keep;
    }
    out.theta = last_theta;
    out.vec = ritz_vector(V, m, last_Y);
    out.restarts = opt.max_restarts;
    out.res = last_res;
    out.converged = false;
    return out;
}

std::vector<double> pad_vector(const std::vector<double>& v, const TruncationSpec& from,
                               const TruncationSpec& to) {
    if (v.size() != from.dimension()) throw ConfigError("pad_vector: size mismatch");
    if (to.n1_max < from.n1_max || to.n2_max < from.n2_max)
        throw ConfigError("pad_vector: target truncation must not shrink");
    std::vector<double> out(to.dimension(), 0.0);
    const int N1o = from.n1_states(), N2o = from.n2_states();
    for (int a = 0; a < 3; ++a)
        for (int m1 = 0; m1 < N1o; ++m1) {
            const std::size_t src = (static_cast<std::size_t>(a) * N1o + m1) * N2o;
            const std::size_t dst = basis_index(a, m1, 0, to);
            std::copy(v.begin() + src, v.begin() + src + N2o, out.begin() + dst);
        }
    return out;
}

namespace {

struct Marginals {
    double n1 = 0.0, n2 = 0.0, parity = 0.0, tail1 = 0.0, tail2 = 0.0;
};

Marginals marginals(const std::vector<double>& v, const TruncationSpec& t) {
    const int N1 = t.n1_states(), N2 = t.n2_states();
    std::vector<double> P1(N1, 0.0), P2(N2, 0.0);
    Marginals out;
    std::size_t i = 0;
    for (int a = 0; a < 3; ++a) {
        const double atom_sign = (a == 2) ? -1.0 : 1.0;
        for (int m1 = 0; m1 < N1; ++m1)
            for (int m2 = 0; m2 < N2; ++m2, ++i) {
                const double p = v[i] * v[i];
                P1[m1] += p;
                P2[m2] += p;
                out.parity += (((m1 + m2) & 1) ? -atom_sign : atom_sign) * p;
            }
    }
    for (int m1 = 0; m1 < N1; ++m1) out.n1 += m1 * P1[m1];
    for (int m2 = 0; m2 < N2; ++m2) out.n2 += m2 * P2[m2];
    for (int m1 = std::max(0, N1 - 2); m1 < N1; ++m1) out.tail1 += P1[m1];
    for (int m2 = std::max(0, N2 - 2); m2 < N2; ++m2) out.tail2 += P2[m2];
    return out;
}

enum class Sector { Even, Odd, Full };

std::vector<double> sector_start(const TruncationSpec& t, Sector s, std::uint64_t seed,
                                 const std::vector<double>* warm) {
    const std::size_t dim = t.dimension();
    std::vector<double> v0(dim);
    if (warm && warm->size() == dim && norm2(*warm) > 0.0) {
        v0 = *warm;
    } else {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd(0.0, 1.0);
        for (std::size_t i = 0; i < dim; ++i) v0[i] = nd(rng);
    }
    if (s != Sector::Full) {
        const std::vector<double> par = parity_diagonal(t);
        const double want = (s == Sector::Even) ? 1.0 : -1.0;
        for (std::size_t i = 0; i < dim; ++i)
            if (par[i] != want) v0[i] = 0.0;
        if (norm2(v0) == 0.0) {
            std::mt19937_64 rng(split_seed(seed, 0x5ec70e));
            std::normal_distribution<double> nd(0.0, 1.0);
            for (std::size_t i = 0; i < dim; ++i)
                v0[i] = (par[i] == want) ? nd(rng) : 0.0;
        }
    }
    return v0;
}

struct SectorSolve {
    LanczosOutcome lz;
    Sector sector = Sector::Even;
};

}  // namespace

GroundStateResult solve_at_truncation(const ModelParams& params,
                                      const TruncationSpec& trunc,
                                      const SolverConfig& config,
                                      const std::vector<double>* warm_start) {
    params.validate();
    trunc.validate();
    const SparseOperator H = build_hamiltonian(params, trunc, config.max_dimension);

    LanczosOptions lopt;
    lopt.max_krylov = config.max_krylov;
    lopt.keep = config.keep;
    lopt.max_restarts = config.max_restarts;
    lopt.tol_res = 10.0 * config.tol_energy;
    lopt.tol_theta = std::max(1e-3 * config.tol_energy, 1e-15);

    std::vector<Sector> sectors;
    switch (config.parity) {
        case ParityMode::Even: sectors = {Sector::Even}; break;
        case ParityMode::Odd: sectors = {Sector::Odd}; break;
        case ParityMode::Full: sectors = {Sector::Full}; break;
        case ParityMode::Auto:
            if (params.delta == 0.0)
                sectors = {Sector::Even};
            else
                sectors = {Sector::Even, Sector::Odd};
            break;
    }

    SectorSolve best;
    bool have = false;
    long total_mv = 0;
    for (Sector s : sectors) {
        const std::vector<double> v0 = sector_start(trunc, s, config.seed, warm_start);
        LanczosOutcome lz = lanczos_ground(H, v0, lopt);
        total_mv += lz.matvecs;
        if (!have || lz.theta < best.lz.theta) {
            best.lz = std::move(lz);
            best.sector = s;
            have = true;
        }
    }

    GroundStateResult r;
    r.energy = best.lz.theta;
    r.vector = std::move(best.lz.vec);
    r.trunc_used = trunc;
    r.iterations = total_mv;
    r.converged = best.lz.converged;

    // Exact unit norm, then fix the overall sign: largest-magnitude
    // component positive (first such index on ties).
    const double nrm = norm2(r.vector);
    scale(1.0 / nrm, r.vector.data(), r.vector.size());
    std::size_t imax = 0;
    double amax = 0.0;
    for (std::size_t i = 0; i < r.vector.size(); ++i) {
        const double a = std::abs(r.vector[i]);
        if (a > amax) {
            amax = a;
            imax = i;
        }
    }
    if (r.vector[imax] < 0.0) scale(-1.0, r.vector.data(), r.vector.size());

    const Marginals mg = marginals(r.vector, trunc);
    r.n1 = mg.n1;
    r.n2 = mg.n2;
    r.parity = mg.parity;
    r.tail1 = mg.tail1;
    r.tail2 = mg.tail2;

    // Explicit residual ||H v - E v||.
    std::vector<double> w(r.vector.size());
    matvec(H, r.vector.data(), w.data());
    ++r.iterations;
    axpy(-r.energy, r.vector.data(), w.data(), w.size());
    r.residual = norm2(w);
    if (r.residual > 10.0 * config.tol_energy * std::max(1.0, std::abs(r.energy)))
        r.converged = false;
    return r;
}

GroundStateResult solve_ground_state(const ModelParams& params,
                                     const SolverConfig& config) {
    params.validate();
    TruncationSpec t = config.trunc_init;
    t.validate();

    GroundStateResult prev;
    bool have_prev = false;
    std::vector<double> warm;
    long total_mv = 0;

    for (int pass = 0; pass < 100; ++pass) {
        if (t.dimension() > config.max_dimension)
            throw NonConvergence(
                "truncation refinement exceeded max_dimension = " +
                std::to_string(config.max_dimension) + " at n1_max=" +
                std::to_string(t.n1_max) + ", n2_max=" + std::to_string(t.n2_max));
        GroundStateResult r =
            solve_at_truncation(params, t, config, have_prev ? &warm : nullptr);
        total_mv += r.iterations;
        const bool tails_ok =
            r.tail1 <= config.tail_mass_max && r.tail2 <= config.tail_mass_max;
        if (have_prev && tails_ok) {
            const double de =
                std::abs(r.energy - prev.energy) / std::max(1.0, std::abs(r.energy));
            const double dn1 = std::abs(r.n1 - prev.n1) / std::max(1.0, r.n1);
            const double dn2 = std::abs(r.n2 - prev.n2) / std::max(1.0, r.n2);
            if (de <= config.trunc_tol && dn1 <= config.trunc_tol &&
                dn2 <= config.trunc_tol) {
                r.iterations = total_mv;
                return r;
            }
        }
        const bool grow1 = r.tail1 > config.tail_mass_max;
        const bool grow2 = r.tail2 > config.tail_mass_max;
        TruncationSpec next = t;
        auto grown = [&](int n_max) {
            const double s = (n_max + 1) * config.trunc_growth;
            return std::max(static_cast<int>(std::ceil(s)) - 1, n_max + 2);
        };
        if (grow1 || grow2) {
            if (grow1) next.n1_max = grown(t.n1_max);
            if (grow2) next.n2_max = grown(t.n2_max);
        } else {
            next.n1_max = grown(t.n1_max);
            next.n2_max = grown(t.n2_max);
        }
        warm = pad_vector(r.vector, t, next);
        prev = std::move(r);
        have_prev = true;
        t = next;
    }
    throw NonConvergence("truncation refinement did not stabilize");
}

double observe(const GroundStateResult& result, const SparseOperator& op) {
    if (op.dimension != result.vector.size())
        throw ConfigError("observe: operator dimension mismatch");
    std::vector<double> w(op.dimension);
    matvec(op, result.vector.data(), w.data());
    return dot(result.vector.data(), w.data(), w.size());
}

}  // namespace qrabi
