#pragma once

// Shared generators and brute-force oracles for the test suites.

#include "msvar/data_model.hpp"
#include "msvar/error.hpp"
#include "msvar/msvar_model.hpp"
#include "msvar/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace msvar::testing {

/// Kind of the msvar::Error thrown by fn; nullopt when nothing is thrown.
template <class Fn>
std::optional<ErrorKind> thrown_kind(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return std::nullopt;
}

/// N independent AR(1) series y_t = phi y_{t-1} + e_t started at zero.
inline std::vector<TimeSeries> ar_panel(Rng& rng, double phi, int length, int members) {
    std::vector<TimeSeries> out;
    for (int i = 0; i < members; ++i) {
        std::vector<double> y(static_cast<std::size_t>(length));
        double v = 0.0;
        for (auto& x : y) {
            v = phi * v + rng.normal();
            x = v;
        }
        out.emplace_back("e" + std::to_string(i), Period{2000, 1}, std::move(y));
    }
    return out;
}

/// Log-density of N(mean, cov) through an explicit inverse and LU
/// determinant, independent of the library's Cholesky path.
inline double mvn_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
    const Eigen::VectorXd d = x - mean;
    const double quad = d.dot(cov.inverse() * d);
    return -0.5 * (static_cast<double>(x.size()) * std::log(2.0 * M_PI) + std::log(cov.determinant()) + quad);
}

/// Random parameters: moderate intercepts and loadings, lag matrices scaled
/// to spectral norm 0.5, well-conditioned covariances, random logits.
inline MsVarParams random_params(const MsVarSpec& spec, Rng& rng) {
    MsVarParams p = MsVarParams::zeros(spec);
    const int n = spec.n_vars;
    for (int s = 0; s < spec.n_regimes; ++s) {
        for (int i = 0; i < n; ++i) {
            p.intercepts[s](i) = spec.include_intercept ? rng.normal() : 0.0;
            p.exog_loadings[s](i) = spec.has_exog_dummy ? rng.normal() : 0.0;
        }
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = 0.5 * rng.normal();
        p.covariances[s] = a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
    }
    if (!spec.switching.intercept)
        for (int s = 1; s < spec.n_regimes; ++s) p.intercepts[s] = p.intercepts[0];
    if (!spec.switching.exog_loading)
        for (int s = 1; s < spec.n_regimes; ++s) p.exog_loadings[s] = p.exog_loadings[0];
    if (!spec.switching.covariance)
        for (int s = 1; s < spec.n_regimes; ++s) p.covariances[s] = p.covariances[0];
    for (auto& a : p.lag_matrices) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
        const double norm = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);
        a *= 0.5 / norm / static_cast<double>(spec.n_lags);
    }
    for (int i = 0; i < p.transition_logits.rows(); ++i)
        for (int j = 0; j < p.transition_logits.cols(); ++j) p.transition_logits(i, j) = rng.normal();
    return p;
}

/// Exhaustive regime-path enumeration for a small system: log-likelihood
/// and posterior marginals P(S_t = s | all data) over the effective sample,
/// with the initial regime drawn from `initial`.
struct PathOracle {
    double loglik = 0.0;
    Eigen::MatrixXd marginals;
};

inline PathOracle enumerate_paths(const Eigen::MatrixXd& data, const Eigen::VectorXd& exog, const MsVarParams& p,
                                  const Eigen::VectorXd& initial) {
    const int lags = p.n_lags();
    const int n = p.n_vars();
    const int r = p.n_regimes();
    const int steps = static_cast<int>(data.rows()) - lags;
    const Eigen::MatrixXd trans = transition_matrix(p.transition_logits);
    Eigen::MatrixXd dens(steps, r);
    for (int t = 0; t < steps; ++t)
        for (int s = 0; s < r; ++s) {
            Eigen::VectorXd mean = p.intercepts[s] + p.exog_loadings[s] * (exog.size() ? exog(t + lags) : 0.0);
            for (int l = 0; l < lags; ++l) mean += p.lag_matrices[l] * data.row(t + lags - 1 - l).transpose();
            dens(t, s) = std::exp(mvn_logpdf(data.row(t + lags).transpose(), mean, p.covariances[s]));
        }
    (void)n;
    PathOracle out;
    out.marginals = Eigen::MatrixXd::Zero(steps, r);
    double total = 0.0;
    std::vector<int> path(static_cast<std::size_t>(steps), 0);
    while (true) {
        double w = initial(path[0]) * dens(0, path[0]);
        for (int t = 1; t < steps; ++t) w *= trans(path[t - 1], path[t]) * dens(t, path[t]);
        total += w;
        for (int t = 0; t < steps; ++t) out.marginals(t, path[t]) += w;
        int k = steps - 1;
        while (k >= 0 && ++path[k] == r) path[k--] = 0;
        if (k < 0) break;
    }
    out.loglik = std::log(total);
    out.marginals /= total;
    return out;
}

/// Data drawn from a parameter set (regimes iid uniform; only used to get
/// plausible numbers for oracle comparisons).
inline Eigen::MatrixXd random_data(const MsVarParams& p, int rows, const Eigen::VectorXd& exog, Rng& rng) {
    const int n = p.n_vars();
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(rows, n);
    for (int t = 0; t < rows; ++t) {
        const int s = static_cast<int>(rng.uniform() * p.n_regimes());
        Eigen::VectorXd v = p.intercepts[s] + p.exog_loadings[s] * (exog.size() ? exog(t) : 0.0);
        for (int l = 0; l < p.n_lags() && t - 1 - l >= 0; ++l) v += p.lag_matrices[l] * y.row(t - 1 - l).transpose();
        const Eigen::MatrixXd c = p.covariances[s].llt().matrixL();
        Eigen::VectorXd z(n);
        for (int i = 0; i < n; ++i) z(i) = rng.normal();
        y.row(t) = (v + c * z).transpose();
    }
    return y;
}

/// Monte Carlo impulse responses: with y_0 = P e_0 + (past noise absent) and
/// fresh Gaussian shocks afterwards, E[y_h e_0'] equals the orthogonalized
/// response at horizon h. Returns per-horizon means and standard errors.
struct SimulatedIrf {
    std::vector<Eigen::MatrixXd> mean;
    std::vector<Eigen::MatrixXd> se;
};

inline SimulatedIrf simulate_irf(const Eigen::MatrixXd& a, const Eigen::MatrixXd& cov, int horizons, int draws, Rng& rng) {
    const auto n = a.rows();
    const Eigen::MatrixXd chol = cov.llt().matrixL();
    std::vector<Eigen::MatrixXd> sum(horizons + 1, Eigen::MatrixXd::Zero(n, n)), sum_sq = sum;
    Eigen::VectorXd e0(n), z(n);
    for (int d = 0; d < draws; ++d) {
        for (Eigen::Index i = 0; i < n; ++i) e0(i) = rng.normal();
        Eigen::VectorXd y = chol * e0;
        for (int h = 0; h <= horizons; ++h) {
            if (h > 0) {
                for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.normal();
                y = a * y + chol * z;
            }
            const Eigen::MatrixXd prod = y * e0.transpose();
            sum[h] += prod;
            sum_sq[h] += prod.cwiseProduct(prod);
        }
    }
    SimulatedIrf out;
    for (int h = 0; h <= horizons; ++h) {
        const Eigen::MatrixXd m = sum[h] / draws;
        const Eigen::MatrixXd var = (sum_sq[h] / draws - m.cwiseProduct(m)).cwiseMax(0.0);
        out.mean.push_back(m);
        out.se.push_back((var / draws).cwiseSqrt());
    }
    return out;
}

}  // namespace msvar::testing
