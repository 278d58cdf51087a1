#include "qrabi/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qrabi {

void ModelParams::validate() const {
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(delta) ||
        !std::isfinite(R) || !std::isfinite(eta))
        throw ConfigError("model parameters must be finite");
    if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
    if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
    if (!(eta > 0.0)) throw ConfigError("eta must be > 0");
    if (!(R >= 0.0)) throw ConfigError("R must be >= 0");
    if (!(delta >= 0.0)) throw ConfigError("delta must be >= 0");
}

ModelParams ModelParams::from_physical(double omega1, double omega2, double g1,
                                       double g2, double eps1, double eps2,
                                       double eps3) {
    if (!(omega1 > 0.0) || !(omega2 > 0.0))
        throw ConfigError("mode frequencies must be > 0");
    if (!(g1 > 0.0)) throw ConfigError("g1 must be > 0");
    if (!(g2 > 0.0)) throw ConfigError("g2 must be > 0");
    const double Delta = eps3 - eps1;
    if (!(Delta > 0.0)) throw ConfigError("eps3 must exceed eps1");
    ModelParams p;
    p.alpha = omega2 / omega1;
    p.beta = g2 / g1;
    p.delta = (eps2 - eps1) / Delta;
    p.R = 2.0 * g1 / std::sqrt(omega1 * Delta);
    p.eta = Delta / omega1;
    p.validate();
    return p;
}

void TruncationSpec::validate() const {
    if (n1_max < 0 || n2_max < 0)
        throw ConfigError("Fock cutoffs must be non-negative");
}

namespace {

struct Entry {
    std::uint32_t col;
    double val;
};

inline void push_sorted(Entry* buf, int& n, std::uint32_t c, double v) {
    int k = n++;
    while (k > 0 && buf[k - 1].col > c) {
        buf[k] = buf[k - 1];
        --k;
    }
    buf[k] = {c, v};
}

}  // namespace

SparseOperator build_hamiltonian(const ModelParams& params, const TruncationSpec& trunc,
                                 std::size_t max_dimension) {
    params.validate();
    trunc.validate();
    const std::size_t dim = trunc.dimension();
    if (dim > max_dimension)
        throw ConfigError("basis dimension " + std::to_string(dim) +
                          " exceeds the configured cap " + std::to_string(max_dimension));

    const int N1 = trunc.n1_states();
    const int N2 = trunc.n2_states();
    const std::size_t S = static_cast<std::size_t>(N1) * N2;
    const double g = params.R / (2.0 * std::sqrt(params.eta));
    const double gb = g * params.beta;
    const double inv_eta = 1.0 / params.eta;

    SparseOperator H;
    H.dimension = dim;
    H.row_ptr.resize(dim + 1);
    H.col.reserve(dim * 5);
    H.val.reserve(dim * 5);

    Entry buf[5];
    std::size_t i = 0;
    H.row_ptr[0] = 0;
    for (int a = 0; a < 3; ++a) {
        for (int m1 = 0; m1 < N1; ++m1) {
            for (int m2 = 0; m2 < N2; ++m2, ++i) {
                int n = 0;
                double d = (m1 + params.alpha * m2) * inv_eta;
                if (a == 1) d += params.delta;
                if (a == 2) d += 1.0;
                if (d != 0.0) push_sorted(buf, n, static_cast<std::uint32_t>(i), d);
                if (g != 0.0) {
                    if (a == 0) {
                        if (m1 > 0)
                            push_sorted(buf, n, static_cast<std::uint32_t>(2 * S + i - N2),
                                        g * std::sqrt(double(m1)));
                        if (m1 + 1 < N1)
                            push_sorted(buf, n, static_cast<std::uint32_t>(2 * S + i + N2),
                                        g * std::sqrt(double(m1 + 1)));
                    } else if (a == 1) {
                        if (m2 > 0)
                            push_sorted(buf, n, static_cast<std::uint32_t>(S + i - 1),
                                        gb * std::sqrt(double(m2)));
                        if (m2 + 1 < N2)
                            push_sorted(buf, n, static_cast<std::uint32_t>(S + i + 1),
                                        gb * std::sqrt(double(m2 + 1)));
                    } else {
                        const std::size_t base = i - 2 * S;
                        if (m1 > 0)
                            push_sorted(buf, n, static_cast<std::uint32_t>(base - N2),
                                        g * std::sqrt(double(m1)));
                        if (m1 + 1 < N1)
                            push_sorted(buf, n, static_cast<std::uint32_t>(base + N2),
                                        g * std::sqrt(double(m1 + 1)));
                        if (m2 > 0)
                            push_sorted(buf, n, static_cast<std::uint32_t>(S + base - 1),
                                        gb * std::sqrt(double(m2)));
                        if (m2 + 1 < N2)
                            push_sorted(buf, n, static_cast<std::uint32_t>(S + base + 1),
                                        gb * std::sqrt(double(m2 + 1)));
                    }
                }
                for (int k = 0; k < n; ++k) {
                    H.col.push_back(buf[k].col);
                    H.val.push_back(buf[k].val);
                }
                H.row_ptr[i + 1] = H.col.size();
            }
        }
    }
    return H;
}

std::vector<double> parity_diagonal(const TruncationSpec& trunc) {
    trunc.validate();
    const int N1 = trunc.n1_states();
    const int N2 = trunc.n2_states();
    std::vector<double> p(trunc.dimension());
    std::size_t i = 0;
    for (int a = 0; a < 3; ++a) {
        const double atom_sign = (a == 2) ? -1.0 : 1.0;
        for (int m1 = 0; m1 < N1; ++m1)
            for (int m2 = 0; m2 < N2; ++m2, ++i)
                p[i] = (((m1 + m2) & 1) ? -1.0 : 1.0) * atom_sign;
    }
    return p;
}

SparseOperator build_parity(const TruncationSpec& trunc) {
    const std::vector<double> p = parity_diagonal(trunc);
    SparseOperator P;
    P.dimension = p.size();
    P.row_ptr.resize(p.size() + 1);
    P.col.resize(p.size());
    P.val = p;
    for (std::size_t i = 0; i < p.size(); ++i) {
        P.row_ptr[i] = i;
        P.col[i] = static_cast<std::uint32_t>(i);
    }
    P.row_ptr[p.size()] = p.size();
    return P;
}

double energy_surface(const ModelParams& params, double y1, double y2) {
    params.validate();
    if (params.delta != 0.0)
        throw ConfigError("energy_surface requires delta = 0");
    const double R2 = params.R * params.R;
    const double quad = 0.5 * (y1 * y1 + params.alpha * y2 * y2);
    const double rad = 1.0 + 2.0 * R2 * (y1 * y1 + params.beta * params.beta * y2 * y2);
    return quad + 0.5 * (1.0 - std::sqrt(rad));
}

Eigen::Matrix3d build_m_matrix(const ModelParams& params, double y1, double y2) {
    params.validate();
    if (params.delta != 0.0)
        throw ConfigError("build_m_matrix requires delta = 0");
    // Lowest eigenvalue lam of M relates to the surface by
    //   energy_surface(y1,y2) = (y1^2 + alpha y2^2)/2 + lam/2.
    const double c1 = std::sqrt(2.0) * params.R * y1;
    const double c2 = std::sqrt(2.0) * params.beta * params.R * y2;
    Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
    M(2, 2) = 2.0;
    M(0, 2) = M(2, 0) = c1;
    M(1, 2) = M(2, 1) = c2;
    return M;
}

bool is_symmetric(const SparseOperator& op) {
    if (op.row_ptr.size() != op.dimension + 1) return false;
    for (std::size_t i = 0; i < op.dimension; ++i) {
        for (std::size_t k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k) {
            const std::size_t j = op.col[k];
            if (j >= op.dimension) return false;
            if (op.val[k] == 0.0) return false;  // explicit zeros are not stored
            const std::size_t lo = op.row_ptr[j];
            const std::size_t hi = op.row_ptr[j + 1];
            bool found = false;
            for (std::size_t t = lo; t < hi; ++t) {
                if (op.col[t] == i) {
                    found = (op.val[t] == op.val[k]);
                    break;
                }
            }
            if (!found) return false;
        }
    }
    return true;
}

}  // namespace qrabi
