#include "msvar/numerics.hpp"

#include "msvar/error.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

namespace msvar {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double chi2_upper_even(double statistic, std::size_t half_df) {
    if (half_df == 0) throw Error(ErrorKind::InvalidArgument, "chi-square needs positive df");
    if (statistic <= 0.0) return 1.0;
    // Q = exp(-x/2) * sum_{k<N} (x/2)^k / k!, summed in log space.
    const double half = 0.5 * statistic;
    const double log_half = std::log(half);
    double log_term = -half;  // k = 0
    double max_log = log_term;
    std::vector<double> logs;
    logs.reserve(half_df);
    logs.push_back(log_term);
    for (std::size_t k = 1; k < half_df; ++k) {
        log_term += log_half - std::log(static_cast<double>(k));
        logs.push_back(log_term);
        max_log = std::max(max_log, log_term);
    }
    double acc = 0.0;
    for (double l : logs) acc += std::exp(l - max_log);
    const double q = std::exp(max_log + std::log(acc));
    return std::min(1.0, q);
}

double OlsFit::std_error(Eigen::Index j) const { return std::sqrt(sigma2 * xtx_inverse(j, j)); }

OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const auto n = x.rows();
    const auto k = x.cols();
    if (n != y.size()) throw Error(ErrorKind::ShapeMismatch, "ols: design and response differ in length");
    if (n <= k) throw Error(ErrorKind::TooShort, "ols: no residual degrees of freedom");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) throw Error(ErrorKind::CollinearRegressors, "regressor matrix is rank deficient");
    OlsFit fit;
    fit.beta = qr.solve(y);
    fit.residuals = y - x * fit.beta;
    fit.ssr = fit.residuals.squaredNorm();
    fit.nobs = static_cast<std::size_t>(n);
    fit.k = static_cast<std::size_t>(k);
    fit.sigma2 = fit.ssr / static_cast<double>(n - k);
    const Eigen::MatrixXd xtx = x.transpose() * x;
    fit.xtx_inverse = xtx.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    return fit;
}

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& sym) {
    Eigen::LLT<Eigen::MatrixXd> llt(sym);
    if (llt.info() != Eigen::Success) throw Error(ErrorKind::SingularCovariance, "matrix is not positive definite");
    Eigen::MatrixXd l = llt.matrixL();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        if (!(l(i, i) > 0.0) || !std::isfinite(l(i, i)))
            throw Error(ErrorKind::SingularCovariance, "matrix is not positive definite");
    }
    return l;
}

std::string format_g17(double v) {
    if (!std::isfinite(v)) return "NA";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_fixed(double v, int decimals) {
    if (!std::isfinite(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s = buf;
    if (s.starts_with("-")) {
        // avoid "-0.0000"
        bool all_zero = true;
        for (char c : s.substr(1))
            if (c != '0' && c != '.') all_zero = false;
        if (all_zero) s.erase(0, 1);
    }
    return s;
}

Eigen::VectorXd to_eigen(std::span<const double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i];
    return v;
}

}  // namespace msvar
