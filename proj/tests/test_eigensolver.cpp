#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "qrabi/analytic.hpp"
#include "qrabi/eigensolver.hpp"
#include "qrabi/model.hpp"

using namespace qrabi;

namespace {

ModelParams make_params(double alpha, double beta, double delta, double R,
                        double eta) {
    ModelParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.delta = delta;
    p.R = R;
    p.eta = eta;
    return p;
}

Eigen::MatrixXd dense(const SparseOperator& H) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(H.dimension, H.dimension);
    for (std::size_t i = 0; i < H.dimension; ++i)
        for (std::size_t k = H.row_ptr[i]; k < H.row_ptr[i + 1]; ++k)
            M(i, H.col[k]) = H.val[k];
    return M;
}

const double kRc = critical_coupling(0.8, 1.2).Rc;

}  // namespace

TEST_CASE("full-sector solve matches dense diagonalization") {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
        const ModelParams p =
            make_params(0.3 + 1.5 * u(rng), 0.3 + 1.5 * u(rng),
                        (trial % 2) ? 0.4 : 0.0, 0.2 + 2.0 * u(rng),
                        2.0 + 78.0 * u(rng));
        const TruncationSpec t{4, 4};
        SolverConfig cfg;
        cfg.parity = ParityMode::Full;
        const GroundStateResult g = solve_at_truncation(p, t, cfg);
        CHECK(g.converged);
        CHECK(g.residual < 1e-9 * std::max(1.0, std::abs(g.energy)) * 10.0);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            dense(build_hamiltonian(p, t)));
        CHECK(g.energy ==
              doctest::Approx(es.eigenvalues()(0))
                  .epsilon(1e-12)
                  .scale(std::max(1.0, std::abs(g.energy))));

        // unit norm and positive largest-magnitude component
        double norm = 0.0, amax = 0.0, vmax = 0.0;
        for (double v : g.vector) {
            norm += v * v;
            if (std::abs(v) > amax) {
                amax = std::abs(v);
                vmax = v;
            }
        }
        CHECK(std::abs(norm - 1.0) < 1e-12);
        CHECK(vmax > 0.0);
    }
}

TEST_CASE("raw lanczos validates its start vector") {
    const SparseOperator H =
        build_hamiltonian(make_params(0.8, 1.2, 0.0, 0.5, 10.0), {1, 1});
    LanczosOptions opt;
    CHECK_THROWS_AS(lanczos_ground(H, std::vector<double>(5, 1.0), opt),
                    ConfigError);
    CHECK_THROWS_AS(
        lanczos_ground(H, std::vector<double>(H.dimension, 0.0), opt),
        ConfigError);

    // a valid start converges and reports work done
    const LanczosOutcome out =
        lanczos_ground(H, std::vector<double>(H.dimension, 1.0), opt);
    CHECK(out.converged);
    CHECK(out.matvecs > 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(H));
    CHECK(out.theta == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-11));
}

TEST_CASE("benchmark energies at fixed truncation") {
    SolverConfig cfg;

    // near-critical point, small basis, checked against a dense oracle
    const GroundStateResult a = solve_at_truncation(
        make_params(0.8, 1.2, 0.0, 0.745356, 50.0), {6, 6}, cfg);
    CHECK(a.converged);
    CHECK(std::abs(a.energy - (-0.0070793739390278354)) < 1e-12);
    CHECK(std::abs(a.parity - 1.0) < 1e-12);
    CHECK(a.n1 == doctest::Approx(0.031002610).epsilon(1e-6));
    CHECK(a.n2 == doctest::Approx(0.549129618).epsilon(1e-6));

    // larger eta at the critical coupling
    const GroundStateResult b = solve_at_truncation(
        make_params(0.8, 1.2, 0.0, kRc, 200.0), {13, 59}, cfg);
    CHECK(b.converged);
    CHECK(std::abs(b.energy - (-2.070805159147e-3)) < 1e-12);
    CHECK(b.n1 == doctest::Approx(0.043808900).epsilon(1e-6));
    CHECK(b.n2 == doctest::Approx(1.610672553).epsilon(1e-6));

    const GroundStateResult c = solve_at_truncation(
        make_params(0.8, 1.2, 0.0, kRc, 1000.0), {11, 89}, cfg);
    CHECK(c.converged);
    CHECK(std::abs(c.energy - (-4.587415018819e-4)) < 1e-12);
    CHECK(c.n2 == doctest::Approx(3.789427950).epsilon(1e-6));
}

TEST_CASE("parity sector selection with a level splitting") {
    const TruncationSpec t{10, 30};

    // here the odd sector wins
    {
        const ModelParams p = make_params(0.8, 1.2, 0.5, 1.5, 50.0);
        SolverConfig cfg;
        cfg.parity = ParityMode::Even;
        const GroundStateResult ge = solve_at_truncation(p, t, cfg);
        cfg.parity = ParityMode::Odd;
        const GroundStateResult go = solve_at_truncation(p, t, cfg);
        cfg.parity = ParityMode::Auto;
        const GroundStateResult ga = solve_at_truncation(p, t, cfg);
        cfg.parity = ParityMode::Full;
        const GroundStateResult gf = solve_at_truncation(p, t, cfg);
        CHECK(go.energy < ge.energy);
        CHECK(ga.energy == go.energy);
        CHECK(std::abs(ga.parity + 1.0) < 1e-12);
        CHECK(gf.energy == doctest::Approx(go.energy).epsilon(1e-9));
    }

    // and here the even sector wins, so Auto must actually compare
    {
        const ModelParams p = make_params(0.8, 1.2, 0.2, 2.0, 50.0);
        SolverConfig cfg;
        cfg.parity = ParityMode::Even;
        const GroundStateResult ge = solve_at_truncation(p, t, cfg);
        cfg.parity = ParityMode::Odd;
        const GroundStateResult go = solve_at_truncation(p, t, cfg);
        cfg.parity = ParityMode::Auto;
        const GroundStateResult ga = solve_at_truncation(p, t, cfg);
        CHECK(ge.energy < go.energy);
        CHECK(ga.energy == ge.energy);
        CHECK(std::abs(ga.parity - 1.0) < 1e-12);
    }
}

TEST_CASE("degenerate model: auto equals the even sector bitwise") {
    const ModelParams p = make_params(0.8, 1.2, 0.0, 0.6, 20.0);
    const TruncationSpec t{8, 8};
    SolverConfig cfg;
    cfg.parity = ParityMode::Auto;
    const GroundStateResult ga = solve_at_truncation(p, t, cfg);
    cfg.parity = ParityMode::Even;
    const GroundStateResult ge = solve_at_truncation(p, t, cfg);
    CHECK(ga.energy == ge.energy);
    REQUIRE(ga.vector.size() == ge.vector.size());
    CHECK(std::memcmp(ga.vector.data(), ge.vector.data(),
                      ga.vector.size() * sizeof(double)) == 0);

    cfg.parity = ParityMode::Full;
    const GroundStateResult gf = solve_at_truncation(p, t, cfg);
    CHECK(gf.energy == doctest::Approx(ge.energy).epsilon(1e-10));
    CHECK(std::abs(gf.parity - 1.0) < 1e-8);
}

TEST_CASE("warm start cuts the iteration count") {
    const ModelParams p = make_params(0.8, 1.2, 0.0, kRc, 200.0);
    const TruncationSpec t{13, 59};
    SolverConfig cfg;
    const GroundStateResult cold = solve_at_truncation(p, t, cfg);
    const GroundStateResult warm =
        solve_at_truncation(p, t, cfg, &cold.vector);
    CHECK(warm.converged);
    CHECK(std::abs(warm.energy - cold.energy) < 1e-12);
    CHECK(warm.iterations < cold.iterations * 2 / 3);
}

TEST_CASE("energy decreases monotonically with the truncation") {
    const ModelParams p = make_params(0.8, 1.2, 0.0, 0.745356, 50.0);
    SolverConfig cfg;
    double prev = 1e300;
    for (int n : {4, 6, 8, 10, 14}) {
        const GroundStateResult g =
            solve_at_truncation(p, TruncationSpec{n, n}, cfg);
        CHECK(g.energy <= prev + 1e-13);
        prev = g.energy;
    }
}

TEST_CASE("adaptive refinement stabilizes energy, photons, and tails") {
    const ModelParams p = make_params(0.8, 1.2, 0.0, 0.745356, 50.0);
    SolverConfig cfg;
    const GroundStateResult g = solve_ground_state(p, cfg);
    CHECK(g.converged);
    CHECK(g.energy == doctest::Approx(-0.007274990532992059).epsilon(1e-10));
    CHECK(g.energy < -0.0070793739390278354);  // below the small fixed basis
    CHECK(g.tail1 <= cfg.tail_mass_max);
    CHECK(g.tail2 <= cfg.tail_mass_max);
    CHECK(g.trunc_used.n1_max >= cfg.trunc_init.n1_max);
    CHECK(g.trunc_used.n2_max > cfg.trunc_init.n2_max);  // mode 2 must grow
    CHECK(std::abs(g.parity - 1.0) < 1e-12);
    CHECK(g.residual < 1e-8);
    CHECK(g.vector.size() == g.trunc_used.dimension());
}

TEST_CASE("dimension cap aborts the refinement") {
    const ModelParams p = make_params(0.8, 1.2, 0.0, 0.745356, 50.0);
    SolverConfig cfg;
    cfg.max_dimension = 500;  // below dim(trunc_init) = 768
    CHECK_THROWS_WITH_AS(solve_ground_state(p, cfg),
                         doctest::Contains("max_dimension"), NonConvergence);
}

TEST_CASE("observe applies an operator to the stored eigenvector") {
    const ModelParams p = make_params(0.8, 1.2, 0.0, 0.745356, 50.0);
    const TruncationSpec t{6, 6};
    SolverConfig cfg;
    const GroundStateResult g = solve_at_truncation(p, t, cfg);
    CHECK(observe(g, build_parity(t)) == doctest::Approx(g.parity).epsilon(1e-13));
    CHECK(observe(g, build_hamiltonian(p, t)) ==
          doctest::Approx(g.energy).epsilon(1e-12));
    CHECK_THROWS_AS(observe(g, build_parity(TruncationSpec{8, 8})), ConfigError);
}

TEST_CASE("pad_vector maps basis slots and rejects shrinking") {
    const TruncationSpec from{1, 1};
    const TruncationSpec to{2, 3};
    std::vector<double> v(from.dimension());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 + i;
    const std::vector<double> w = pad_vector(v, from, to);
    REQUIRE(w.size() == to.dimension());
    double mass_in = 0.0, mass_out = 0.0;
    for (double x : v) mass_in += x * x;
    for (double x : w) mass_out += x * x;
    CHECK(mass_in == mass_out);
    for (int a = 0; a < 3; ++a)
        for (int m1 = 0; m1 <= to.n1_max; ++m1)
            for (int m2 = 0; m2 <= to.n2_max; ++m2) {
                const double got = w[basis_index(a, m1, m2, to)];
                if (m1 <= from.n1_max && m2 <= from.n2_max)
                    CHECK(got == v[basis_index(a, m1, m2, from)]);
                else
                    CHECK(got == 0.0);
            }

    CHECK_THROWS_AS(pad_vector(v, from, TruncationSpec{0, 1}), ConfigError);
    CHECK_THROWS_AS(pad_vector(std::vector<double>(7, 1.0), from, to),
                    ConfigError);
}

TEST_CASE("split_seed is deterministic and sensitive to both inputs") {
    CHECK(split_seed(1234, 5) == split_seed(1234, 5));
    CHECK(split_seed(1234, 5) != split_seed(1234, 6));
    CHECK(split_seed(1234, 5) != split_seed(1235, 5));
    CHECK(split_seed(0, 0) != split_seed(0, 1));
}
