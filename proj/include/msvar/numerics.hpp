#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>

namespace msvar {

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;

/// Standard normal lower-tail probability.
[[nodiscard]] double normal_cdf(double x);

/// Upper tail of a chi-square distribution with 2*half_df degrees of freedom.
/// Closed form for even degrees of freedom; accurate well into the far tail.
[[nodiscard]] double chi2_upper_even(double statistic, std::size_t half_df);

/// Ordinary least squares on a full-column-rank design.
struct OlsFit {
    Eigen::VectorXd beta;
    Eigen::VectorXd residuals;
    Eigen::MatrixXd xtx_inverse;
    double ssr = 0.0;
    double sigma2 = 0.0;  ///< ssr / (nobs - k)
    std::size_t nobs = 0;
    std::size_t k = 0;

    [[nodiscard]] double std_error(Eigen::Index j) const;
    [[nodiscard]] double t_ratio(Eigen::Index j) const { return beta(j) / std_error(j); }
};

/// Throws CollinearRegressors when X is rank deficient and TooShort when
/// there are no residual degrees of freedom.
[[nodiscard]] OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Lower Cholesky factor; throws SingularCovariance if the matrix is not
/// symmetric positive definite.
[[nodiscard]] Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& sym);

/// Machine rendering: 17 significant digits, "NA" for non-finite values.
[[nodiscard]] std::string format_g17(double v);
/// Human rendering with a fixed number of decimals, "NA" for non-finite values.
[[nodiscard]] std::string format_fixed(double v, int decimals);

[[nodiscard]] Eigen::VectorXd to_eigen(std::span<const double> values);

}  // namespace msvar
