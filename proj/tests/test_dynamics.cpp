#include "msvar/dynamics.hpp"
#include "msvar/error.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace msvar;
using msvar::testing::random_params;
using msvar::testing::simulate_irf;
using msvar::testing::thrown_kind;

MsVarParams var_params(const std::vector<Eigen::MatrixXd>& lags, const Eigen::MatrixXd& cov) {
    MsVarSpec spec;
    spec.n_vars = static_cast<int>(cov.rows());
    spec.n_regimes = 1;
    spec.n_lags = static_cast<int>(lags.size());
    MsVarParams p = MsVarParams::zeros(spec);
    p.lag_matrices = lags;
    p.covariances[0] = cov;
    return p;
}

Eigen::MatrixXd random_matrix(Rng& rng, int n) {
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = rng.normal();
    return m;
}

Eigen::MatrixXd random_spd(Rng& rng, int n) {
    const Eigen::MatrixXd a = random_matrix(rng, n);
    return a * a.transpose() + 0.3 * Eigen::MatrixXd::Identity(n, n);
}

/// Spectral radius from ||M^k||^(1/k) with k = 2^20 by repeated squaring,
/// independent of the eigen-solver.
double power_radius(const Eigen::MatrixXd& m) {
    Eigen::MatrixXd p = m;
    double log_scale = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double s = p.norm();
        if (s == 0.0) return 0.0;
        p /= s;
        log_scale = 2.0 * (log_scale + std::log(s));
        p = p * p;
    }
    return std::exp((log_scale + std::log(p.norm())) / std::ldexp(1.0, 20));
}

TEST(Companion, Shapes) {
    Eigen::MatrixXd a(2, 2);
    a << 0.1, 0.2, 0.3, 0.4;
    EXPECT_EQ(companion({a}), a);
    Eigen::MatrixXd b(2, 2);
    b << 0.5, 0.6, 0.7, 0.8;
    Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(4, 4);
    expect.topLeftCorner(2, 2) = a;
    expect.topRightCorner(2, 2) = b;
    expect.bottomLeftCorner(2, 2).setIdentity();
    EXPECT_EQ(companion({a, b}), expect);
    const std::vector<Eigen::MatrixXd> zeros(3, Eigen::MatrixXd::Zero(2, 2));
    EXPECT_EQ(is_stable(zeros).spectral_radius, 0.0);
    EXPECT_EQ(thrown_kind([&] { (void)companion({a, Eigen::MatrixXd::Zero(3, 3)}); }), ErrorKind::ShapeMismatch);
}

TEST(Stability, DiagonalAndUnitRoot) {
    const Stability half = is_stable({0.5 * Eigen::MatrixXd::Identity(3, 3)});
    EXPECT_TRUE(half.stable);
    EXPECT_NEAR(half.spectral_radius, 0.5, 1e-14);
    const Stability unit = is_stable({Eigen::MatrixXd::Identity(2, 2)});
    EXPECT_FALSE(unit.stable);
    EXPECT_NEAR(unit.spectral_radius, 1.0, 1e-14);
}

TEST(Stability, AgreesWithPowerIteration) {
    Rng rng(10);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::MatrixXd a = random_matrix(rng, 3);
        a *= 0.8 / power_radius(a);
        const Stability s = is_stable({a});
        EXPECT_TRUE(s.stable);
        EXPECT_NEAR(s.spectral_radius, 0.8, 1e-4);
    }
}

TEST(Irf, ImpactIsCholeskyFactor) {
    Rng rng(3);
    const Eigen::MatrixXd cov = random_spd(rng, 3);
    const IrfResult r = irf(var_params({0.3 * Eigen::MatrixXd::Identity(3, 3)}, cov), {{}, 5, {}, false});
    const Eigen::MatrixXd l = cov.llt().matrixL();
    EXPECT_LT((r.responses[0] - l).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(r.responses.size(), 6u);
}

TEST(Irf, ScalarGeometricDecay) {
    const IrfResult r = irf(var_params({Eigen::MatrixXd::Constant(1, 1, 0.5)}, Eigen::MatrixXd::Ones(1, 1)),
                            {{}, 30, {}, false});
    for (int h = 0; h <= 30; ++h) EXPECT_NEAR(r.responses[h](0, 0), std::pow(0.5, h), 1e-12);
}

TEST(Irf, DecaysForStableSystems) {
    Rng rng(17);
    Eigen::MatrixXd a = random_matrix(rng, 3);
    a *= 0.7 / power_radius(a);
    const IrfResult r = irf(var_params({a}, random_spd(rng, 3)), {{}, 50, {}, false});
    EXPECT_LT(r.responses[50].cwiseAbs().maxCoeff(), 1e-3 * r.responses[0].cwiseAbs().maxCoeff() + 1e-6);
}

TEST(Irf, MatchesSimulationOracle) {
    Rng rng(2718);
    Eigen::MatrixXd a(2, 2);
    a << 0.5, 0.2, -0.3, 0.4;
    Eigen::MatrixXd cov(2, 2);
    cov << 1.0, 0.4, 0.4, 0.8;
    const IrfResult r = irf(var_params({a}, cov), {{}, 10, {}, false});
    const auto sim = simulate_irf(a, cov, 10, 200000, rng);
    for (int h = 0; h <= 10; ++h)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                EXPECT_LE(std::abs(sim.mean[h](i, j) - r.responses[h](i, j)), 3.0 * sim.se[h](i, j) + 1e-12)
                    << "h=" << h << " i=" << i << " j=" << j;
}

TEST(Irf, OrderingPermutesVariables) {
    Rng rng(5);
    Eigen::MatrixXd a = random_matrix(rng, 3);
    a *= 0.6 / power_radius(a);
    const Eigen::MatrixXd cov = random_spd(rng, 3);
    const std::vector<int> order{2, 0, 1};
    const IrfResult r = irf(var_params({a}, cov), {{}, 8, order, false});
    Eigen::MatrixXd perm = Eigen::MatrixXd::Zero(3, 3);
    for (int k = 0; k < 3; ++k) perm(k, order[k]) = 1.0;
    const auto direct = orthogonal_responses({perm * a * perm.transpose()}, perm * cov * perm.transpose(), 8);
    for (int h = 0; h <= 8; ++h) EXPECT_LT((r.responses[h] - direct[h]).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(r.ordering, order);
}

TEST(Irf, Errors) {
    const MsVarParams unstable = var_params({Eigen::MatrixXd::Identity(2, 2)}, Eigen::MatrixXd::Identity(2, 2));
    EXPECT_EQ(thrown_kind([&] { (void)irf(unstable, {}); }), ErrorKind::UnstableSystem);
    EXPECT_NO_THROW((void)irf(unstable, {{}, 4, {}, true}));
    const MsVarParams ok = var_params({0.5 * Eigen::MatrixXd::Identity(2, 2)}, Eigen::MatrixXd::Identity(2, 2));
    EXPECT_EQ(thrown_kind([&] { (void)irf(ok, {{}, 4, {0, 0}, false}); }), ErrorKind::BadOrdering);
    EXPECT_EQ(thrown_kind([&] { (void)fevd(ok, {{}, 4, {0, 2}, false}); }), ErrorKind::BadOrdering);
    EXPECT_EQ(thrown_kind([&] { (void)fevd(ok, {{}, 4, {1}, false}); }), ErrorKind::BadOrdering);
}

TEST(Fevd, FirstStepIsTriangular) {
    Rng rng(8);
    Eigen::MatrixXd a = random_matrix(rng, 4);
    a *= 0.8 / power_radius(a);
    const FevdResult f = fevd(var_params({a}, random_spd(rng, 4)), {{}, 24, {}, false});
    EXPECT_EQ(f.shares[0](0, 0), 100.0);
    for (int j = 1; j < 4; ++j) EXPECT_EQ(f.shares[0](0, j), 0.0);
    for (const auto& s : f.shares)
        for (int i = 0; i < 4; ++i) EXPECT_NEAR(s.row(i).sum(), 100.0, 1e-6);
}

TEST(Fevd, MatchesDirectAccumulation) {
    Rng rng(9);
    Eigen::MatrixXd a1 = random_matrix(rng, 3), a2 = random_matrix(rng, 3);
    a1 *= 0.3 / power_radius(a1);
    a2 *= 0.2 / power_radius(a2);
    const Eigen::MatrixXd cov = random_spd(rng, 3);
    const FevdResult f = fevd(var_params({a1, a2}, cov), {{}, 12, {}, false});
    // MA recursion psi_h = a1 psi_{h-1} + a2 psi_{h-2}, written out directly.
    std::vector<Eigen::MatrixXd> psi{Eigen::MatrixXd::Identity(3, 3)};
    psi.push_back(a1);
    for (int h = 2; h <= 12; ++h) psi.push_back(a1 * psi[h - 1] + a2 * psi[h - 2]);
    const Eigen::MatrixXd l = cov.llt().matrixL();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(3, 3);
    for (int h = 0; h <= 12; ++h) {
        acc += (psi[h] * l).cwiseAbs2();
        for (int i = 0; i < 3; ++i) {
            EXPECT_NEAR(f.se[h](i), std::sqrt(acc.row(i).sum()), 1e-10);
            for (int j = 0; j < 3; ++j) EXPECT_NEAR(f.shares[h](i, j), 100.0 * acc(i, j) / acc.row(i).sum(), 1e-9);
        }
    }
}

TEST(Fevd, DiagonalSystemKeepsOwnShares) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
    a.diagonal() << 0.9, -0.5, 0.2;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(3, 3);
    cov.diagonal() << 1.0, 4.0, 0.25;
    const FevdResult f = fevd(var_params({a}, cov), {{}, 24, {}, false});
    for (const auto& s : f.shares) EXPECT_LT((s - 100.0 * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Fevd, ScaleInvariant) {
    Rng rng(12);
    Eigen::MatrixXd a = random_matrix(rng, 3);
    a *= 0.5 / power_radius(a);
    const Eigen::MatrixXd cov = random_spd(rng, 3);
    const FevdResult f = fevd(var_params({a}, cov), {{}, 10, {}, false});
    const FevdResult g = fevd(var_params({a}, 25.0 * cov), {{}, 10, {}, false});
    for (int h = 0; h <= 10; ++h) {
        EXPECT_LT((f.shares[h] - g.shares[h]).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LT((5.0 * f.se[h] - g.se[h]).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(ShockCovariance, RegimeAndErgodicWeighting) {
    Rng rng(4);
    MsVarSpec spec;
    spec.n_vars = 2;
    spec.n_regimes = 2;
    const MsVarParams p = random_params(spec, rng);
    EXPECT_EQ(shock_covariance(p, {1}), p.covariances[1]);
    const Eigen::MatrixXd t = transition_matrix(p.transition_logits);
    // Two-state chain: pi_0 = p10 / (p01 + p10).
    const double pi0 = t(1, 0) / (t(0, 1) + t(1, 0));
    const Eigen::MatrixXd expect = pi0 * p.covariances[0] + (1.0 - pi0) * p.covariances[1];
    EXPECT_LT((shock_covariance(p, {}) - expect).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(thrown_kind([&] { (void)shock_covariance(p, {2}); }), ErrorKind::InvalidArgument);
}

}  // namespace
