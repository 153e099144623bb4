#include "msvar/hamilton_filter.hpp"

#include "msvar/error.hpp"
#include "msvar/numerics.hpp"

#include <cmath>
#include <limits>

namespace msvar {

Eigen::MatrixXd regime_log_densities(const Design& design, const MsVarParams& params) {
    const int n = params.n_vars();
    const int r = params.n_regimes();
    const int p = params.n_lags();
    if (design.y.cols() != n || design.x.cols() != 2 + n * p)
        throw Error(ErrorKind::ShapeMismatch, "design does not match parameter dimensions");
    const auto t_eff = design.y.rows();
    Eigen::MatrixXd out(t_eff, r);
    for (int s = 0; s < r; ++s) {
        Eigen::MatrixXd b(n, 2 + n * p);
        b.col(0) = params.intercepts[s];
        b.col(1) = params.exog_loadings[s];
        for (int l = 0; l < p; ++l) b.middleCols(2 + l * n, n) = params.lag_matrices[l];
        const Eigen::MatrixXd resid = design.y - design.x * b.transpose();
        const Eigen::MatrixXd chol = cholesky_lower(params.covariances[s]);
        const Eigen::MatrixXd z = chol.triangularView<Eigen::Lower>().solve(resid.transpose());
        const double log_det = 2.0 * chol.diagonal().array().log().sum();
        out.col(s) = -0.5 * (n * kLog2Pi + log_det + z.colwise().squaredNorm().transpose().array());
    }
    return out;
}

Eigen::VectorXd initial_probabilities(const InitialDistribution& initial, const Eigen::MatrixXd& transition) {
    const auto r = transition.rows();
    switch (initial.kind) {
        case InitialDistribution::Kind::ergodic: return ergodic_distribution(transition);
        case InitialDistribution::Kind::uniform: return Eigen::VectorXd::Constant(r, 1.0 / static_cast<double>(r));
        case InitialDistribution::Kind::given: break;
    }
    if (initial.probs.size() != r || initial.probs.minCoeff() < 0.0 || std::abs(initial.probs.sum() - 1.0) > 1e-10)
        throw Error(ErrorKind::InvalidArgument, "initial distribution must be a probability vector over regimes");
    return initial.probs;
}

FilterOutput hamilton_filter(const Design& design, const MsVarParams& params, const InitialDistribution& initial) {
    const Eigen::MatrixXd log_dens = regime_log_densities(design, params);
    const Eigen::MatrixXd trans = transition_matrix(params.transition_logits);
    const auto t_eff = log_dens.rows();
    const auto r = log_dens.cols();

    FilterOutput out;
    out.filtered.resize(t_eff, r);
    out.predicted.resize(t_eff, r);
    out.per_obs_loglik.resize(t_eff);
    Eigen::RowVectorXd pred = initial_probabilities(initial, trans).transpose();
    for (Eigen::Index t = 0; t < t_eff; ++t) {
        if (t > 0) pred = out.filtered.row(t - 1) * trans;
        pred /= pred.sum();
        out.predicted.row(t) = pred;
        Eigen::RowVectorXd joint(r);
        double m = -std::numeric_limits<double>::infinity();
        for (Eigen::Index s = 0; s < r; ++s) {
            joint(s) = pred(s) > 0.0 ? std::log(pred(s)) + log_dens(t, s) : -std::numeric_limits<double>::infinity();
            m = std::max(m, joint(s));
        }
        if (!std::isfinite(m))
            throw Error(ErrorKind::NumericalUnderflow, "observation " + std::to_string(t) + " has zero likelihood in every regime");
        const double lse = m + std::log((joint.array() - m).exp().sum());
        out.per_obs_loglik(t) = lse;
        out.filtered.row(t) = (joint.array() - lse).exp();
        out.filtered.row(t) /= out.filtered.row(t).sum();
    }
    out.loglik = out.per_obs_loglik.sum();
    out.smoothed = kim_smoother(out, trans);
    return out;
}

FilterOutput hamilton_filter(const Eigen::MatrixXd& data, const Eigen::VectorXd& exog, const MsVarParams& params,
                             const InitialDistribution& initial) {
    return hamilton_filter(make_design(data, exog, params.n_lags()), params, initial);
}

namespace {

// smoothed_{t+1}(j) / predicted_{t+1}(j), zero where the prediction is zero.
Eigen::RowVectorXd smoothing_ratio(const Eigen::MatrixXd& smoothed, const Eigen::MatrixXd& predicted, Eigen::Index t) {
    Eigen::RowVectorXd ratio(smoothed.cols());
    for (Eigen::Index j = 0; j < smoothed.cols(); ++j)
        ratio(j) = predicted(t, j) > 0.0 ? smoothed(t, j) / predicted(t, j) : 0.0;
    return ratio;
}

}  // namespace

Eigen::MatrixXd kim_smoother(const FilterOutput& filter, const Eigen::MatrixXd& transition) {
    const auto t_eff = filter.filtered.rows();
    Eigen::MatrixXd smoothed(t_eff, filter.filtered.cols());
    if (t_eff == 0) return smoothed;
    smoothed.row(t_eff - 1) = filter.filtered.row(t_eff - 1);
    for (Eigen::Index t = t_eff - 2; t >= 0; --t) {
        const Eigen::RowVectorXd ratio = smoothing_ratio(smoothed, filter.predicted, t + 1);
        smoothed.row(t) = filter.filtered.row(t).cwiseProduct((transition * ratio.transpose()).transpose());
        smoothed.row(t) /= smoothed.row(t).sum();
    }
    return smoothed;
}

Eigen::MatrixXd smoothed_transition_counts(const FilterOutput& filter, const Eigen::MatrixXd& transition) {
    const auto r = transition.rows();
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(r, r);
    for (Eigen::Index t = 0; t + 1 < filter.filtered.rows(); ++t) {
        const Eigen::RowVectorXd ratio = smoothing_ratio(filter.smoothed, filter.predicted, t + 1);
        counts += (filter.filtered.row(t).transpose() * ratio).cwiseProduct(transition);
    }
    return counts;
}

std::vector<int> regime_classify(const FilterOutput& filter) {
    std::vector<int> out(static_cast<std::size_t>(filter.smoothed.rows()));
    for (Eigen::Index t = 0; t < filter.smoothed.rows(); ++t) {
        int best = 0;
        for (Eigen::Index s = 1; s < filter.smoothed.cols(); ++s)
            if (filter.smoothed(t, s) > filter.smoothed(t, best)) best = static_cast<int>(s);
        out[static_cast<std::size_t>(t)] = best;
    }
    return out;
}

}  // namespace msvar
