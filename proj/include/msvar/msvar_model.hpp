#pragma once

#include <Eigen/Dense>

#include <vector>

namespace msvar {

/// Which coefficient blocks carry a regime index.
struct SwitchingFlags {
    bool intercept = true;
    bool exog_loading = true;
    bool covariance = true;
    bool lag_coeffs = false;  ///< counted by count_coefficients; estimation rejects it
};

struct MsVarSpec {
    int n_vars = 8;
    int n_regimes = 3;
    int n_lags = 1;
    bool has_exog_dummy = true;
    bool include_intercept = true;
    SwitchingFlags switching;
    /// Optional zero pattern per lag (1 = free, 0 = fixed at zero); empty = all free.
    std::vector<Eigen::MatrixXi> lag_mask;

    /// Throws InvalidArgument on inconsistent sizes.
    void validate() const;
    [[nodiscard]] bool lag_free(int lag, int row, int col) const;
};

/// Regime-indexed containers always hold n_regimes entries; a non-switching
/// block is replicated across regimes.
struct MsVarParams {
    std::vector<Eigen::VectorXd> intercepts;
    std::vector<Eigen::VectorXd> exog_loadings;
    std::vector<Eigen::MatrixXd> lag_matrices;  ///< common; n_lags of n x n
    std::vector<Eigen::MatrixXd> covariances;
    Eigen::MatrixXd transition_logits;          ///< R x (R-1), last destination is the reference

    [[nodiscard]] int n_regimes() const { return static_cast<int>(intercepts.size()); }
    [[nodiscard]] int n_vars() const { return intercepts.empty() ? 0 : static_cast<int>(intercepts[0].size()); }
    [[nodiscard]] int n_lags() const { return static_cast<int>(lag_matrices.size()); }

    /// Zero coefficients, identity covariances, uniform transitions.
    static MsVarParams zeros(const MsVarSpec& spec);
};

/// Row-stochastic matrix; row i is softmax(logits(i, :), 0).
[[nodiscard]] Eigen::MatrixXd transition_matrix(const Eigen::MatrixXd& logits);
/// Inverse of transition_matrix for a strictly positive row-stochastic matrix.
[[nodiscard]] Eigen::MatrixXd transition_logits(const Eigen::MatrixXd& transition);
/// log P computed from the logits without forming P (no underflow).
[[nodiscard]] Eigen::MatrixXd log_transition_matrix(const Eigen::MatrixXd& logits);

/// Stationary distribution; uniform when the chain has no unique one.
[[nodiscard]] Eigen::VectorXd ergodic_distribution(const Eigen::MatrixXd& transition);

/// Gaussian log-density of y_t in `regime`; y_lag stacks y_{t-1}, ..., y_{t-p}.
[[nodiscard]] double conditional_density(const Eigen::VectorXd& y_t, const Eigen::VectorXd& y_lag, double exog_t,
                                         int regime, const MsVarParams& params);

[[nodiscard]] int count_coefficients(const MsVarSpec& spec);

struct InfoCriteria {
    double aic;
    double schwarz;
};
/// Per-observation AIC and Schwarz criteria.
[[nodiscard]] InfoCriteria info_criteria(double loglik, int n_coefficients, int n_obs);

/// Regressor vector x_t = [1, exog_t, y_{t-1}', ..., y_{t-p}'] and the map
/// from (regime, equation, regressor) to a free mean coefficient.
class CoefficientLayout {
public:
    explicit CoefficientLayout(const MsVarSpec& spec);

    [[nodiscard]] const MsVarSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] int n_regressors() const noexcept { return k_; }
    [[nodiscard]] int n_mean() const noexcept { return n_mean_; }
    [[nodiscard]] int n_cov_blocks() const noexcept { return spec_.switching.covariance ? spec_.n_regimes : 1; }
    [[nodiscard]] int n_cov_params() const noexcept { return n_cov_blocks() * spec_.n_vars * (spec_.n_vars + 1) / 2; }
    [[nodiscard]] int n_logits() const noexcept { return spec_.n_regimes * (spec_.n_regimes - 1); }
    [[nodiscard]] int size() const noexcept { return n_mean_ + n_cov_params() + n_logits(); }
    /// Position of a free mean coefficient, -1 when fixed at zero.
    [[nodiscard]] int index(int regime, int equation, int regressor) const {
        return index_[(static_cast<std::size_t>(regime) * spec_.n_vars + equation) * k_ + regressor];
    }
    [[nodiscard]] int cov_block(int regime) const noexcept { return spec_.switching.covariance ? regime : 0; }

    /// n x k coefficient matrix of one regime.
    [[nodiscard]] Eigen::MatrixXd coefficients(const MsVarParams& params, int regime) const;
    [[nodiscard]] Eigen::VectorXd mean_vector(const MsVarParams& params) const;
    void set_mean_vector(MsVarParams& params, const Eigen::VectorXd& theta) const;

    /// Unconstrained vector: mean coefficients, lower Cholesky factors
    /// (row-major, log diagonal), transition logits (row-major).
    [[nodiscard]] Eigen::VectorXd pack(const MsVarParams& params) const;
    [[nodiscard]] MsVarParams unpack(const Eigen::VectorXd& packed) const;

private:
    MsVarSpec spec_;
    int k_ = 0;
    int n_mean_ = 0;
    std::vector<int> index_;
};

/// Effective-sample design: row r corresponds to observation t = r + n_lags.
struct Design {
    Eigen::MatrixXd y;  ///< T_eff x n
    Eigen::MatrixXd x;  ///< T_eff x (2 + n p)
};

/// `exog` may be empty (treated as zeros). Throws InvalidArgument on
/// non-finite data and InsufficientObservations when T <= n_lags.
[[nodiscard]] Design make_design(const Eigen::MatrixXd& data, const Eigen::VectorXd& exog, int n_lags);

/// Throws ShapeMismatch when params do not fit the spec.
void check_params(const MsVarParams& params, const MsVarSpec& spec);

}  // namespace msvar
