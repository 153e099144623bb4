#pragma once

#include "msvar/hamilton_filter.hpp"
#include "msvar/msvar_model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace msvar {

struct FitOptions {
    int n_starts = 4;
    int em_iters = 500;
    double em_tol = 1e-6;
    int qn_iters = 200;
    double qn_tol = 1e-5;
    std::uint64_t seed = 20240601;
    std::size_t threads = 1;
};

struct Convergence {
    int em_iterations = 0;
    int qn_iterations = 0;
    double gradient_norm = 0.0;  ///< max-norm of the loglik gradient at the optimum
    std::string status;          ///< converged | max_iterations | stalled
    int best_start = 0;
    int failed_starts = 0;
};

struct FitResult {
    MsVarSpec spec;
    MsVarParams params;
    FilterOutput filter;
    std::vector<int> regimes;  ///< 0-based smoothed classification
    double loglik = 0.0;
    double aic = 0.0;
    double schwarz = 0.0;
    double log_det_resid_cov = 0.0;
    int n_coefficients = 0;
    int n_obs = 0;  ///< effective sample size
    Convergence convergence;
};

/// One expectation / conditional-maximization update. The mean coefficients
/// are maximized given the current covariances, then the covariances given
/// the new means, then the transition logits given the smoothed counts and
/// the ergodic initial term, so the likelihood never decreases.
/// Throws DegenerateRegime when a regime's smoothed weight is below 1e-6.
[[nodiscard]] MsVarParams em_step(const Eigen::MatrixXd& data, const Eigen::VectorXd& exog, const MsVarParams& params,
                                  const MsVarSpec& spec);

struct EmUpdate {
    MsVarParams params;
    double loglik_before = 0.0;
};
[[nodiscard]] EmUpdate em_update(const Design& design, const CoefficientLayout& layout, const MsVarParams& params);

struct LoglikGradient {
    double loglik = 0.0;
    Eigen::VectorXd gradient;  ///< d loglik / d packed parameters
};
/// Loglik (ergodic start) and its exact gradient in the packed coordinates.
[[nodiscard]] LoglikGradient loglik_gradient(const Design& design, const CoefficientLayout& layout,
                                             const Eigen::VectorXd& packed);

/// new regime r takes old regime order[r].
[[nodiscard]] MsVarParams permute_regimes(const MsVarParams& params, const std::vector<int>& order);

/// Regimes sorted ascending by the exogenous loading of variable 0 (when it
/// switches), else by the intercept of variable 0, else by its variance.
[[nodiscard]] std::vector<int> reporting_order(const MsVarParams& params, const MsVarSpec& spec);

/// Multi-start EM followed by damped BFGS. Throws InsufficientObservations
/// when rows < ceil(count_coefficients / n_vars) + n_lags.
[[nodiscard]] FitResult fit(const Eigen::MatrixXd& data, const Eigen::VectorXd& exog, const MsVarSpec& spec,
                            const FitOptions& options = {});

/// Assemble a FitResult (filter, criteria, classification) for given params.
[[nodiscard]] FitResult evaluate_fit(const Design& design, const MsVarSpec& spec, const MsVarParams& params);

}  // namespace msvar
