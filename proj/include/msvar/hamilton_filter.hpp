#pragma once

#include "msvar/msvar_model.hpp"

#include <vector>

namespace msvar {

struct InitialDistribution {
    enum class Kind { ergodic, uniform, given } kind = Kind::ergodic;
    Eigen::VectorXd probs;

    static InitialDistribution ergodic() { return {}; }
    static InitialDistribution uniform() { return {Kind::uniform, {}}; }
    static InitialDistribution given(Eigen::VectorXd p) { return {Kind::given, std::move(p)}; }
};

/// Rows follow the effective sample (observations n_lags .. T-1).
/// Every probability row sums to one; loglik = per_obs_loglik.sum().
struct FilterOutput {
    Eigen::MatrixXd filtered;
    Eigen::MatrixXd smoothed;
    Eigen::MatrixXd predicted;
    double loglik = 0.0;
    Eigen::VectorXd per_obs_loglik;
};

/// T_eff x R matrix of log f(y_t | regime s, past). Throws SingularCovariance.
[[nodiscard]] Eigen::MatrixXd regime_log_densities(const Design& design, const MsVarParams& params);

[[nodiscard]] Eigen::VectorXd initial_probabilities(const InitialDistribution& initial, const Eigen::MatrixXd& transition);

/// Predict-update recursion plus Kim smoothing. Throws SingularCovariance and
/// NumericalUnderflow (every regime assigns zero likelihood to an observation).
[[nodiscard]] FilterOutput hamilton_filter(const Design& design, const MsVarParams& params,
                                           const InitialDistribution& initial = InitialDistribution::ergodic());
[[nodiscard]] FilterOutput hamilton_filter(const Eigen::MatrixXd& data, const Eigen::VectorXd& exog,
                                           const MsVarParams& params,
                                           const InitialDistribution& initial = InitialDistribution::ergodic());

/// Backward recursion; the last row equals the last filtered row.
[[nodiscard]] Eigen::MatrixXd kim_smoother(const FilterOutput& filter, const Eigen::MatrixXd& transition);

/// Sum over t of P(S_t = i, S_{t+1} = j | all data).
[[nodiscard]] Eigen::MatrixXd smoothed_transition_counts(const FilterOutput& filter, const Eigen::MatrixXd& transition);

/// Argmax of the smoothed probabilities, 0-based, ties toward the lower index.
[[nodiscard]] std::vector<int> regime_classify(const FilterOutput& filter);

}  // namespace msvar
