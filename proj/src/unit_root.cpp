#include "msvar/unit_root.hpp"

#include "msvar/error.hpp"
#include "msvar/mackinnon.hpp"
#include "msvar/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace msvar {

namespace {

int deterministic_columns(DeterministicSpec spec) {
    switch (spec) {
        case DeterministicSpec::none: return 0;
        case DeterministicSpec::constant: return 1;
        case DeterministicSpec::constant_trend: break;
    }
    return 2;
}

void check_usable(std::span<const double> y) {
    for (double v : y)
        if (is_missing(v)) throw Error(ErrorKind::MissingData, "series contains missing observations");
    if (y.empty() || std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); }))
        throw Error(ErrorKind::ZeroVariance, "series is constant");
}

// Regression of dy_t on [deterministics, y_{t-1}, dy_{t-1..t-k}] over t in [first, T-1].
// The lagged level sits in column `level_col`.
struct Design {
    Eigen::MatrixXd x;
    Eigen::VectorXd dy;
    Eigen::Index level_col;
};

Design adf_design(std::span<const double> y, DeterministicSpec spec, int k, int first) {
    const int n_obs = static_cast<int>(y.size()) - first;
    const int d = deterministic_columns(spec);
    Design out{Eigen::MatrixXd(n_obs, d + 1 + k), Eigen::VectorXd(n_obs), d};
    for (int r = 0; r < n_obs; ++r) {
        const int t = first + r;
        out.dy(r) = y[t] - y[t - 1];
        if (d >= 1) out.x(r, 0) = 1.0;
        if (d == 2) out.x(r, 1) = static_cast<double>(t);
        out.x(r, d) = y[t - 1];
        for (int j = 1; j <= k; ++j) out.x(r, d + j) = y[t - j] - y[t - j - 1];
    }
    return out;
}

}  // namespace

int default_max_lag(std::size_t length) {
    return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(length) / 100.0, 0.25)));
}

AdfRegression adf_regression(std::span<const double> y, DeterministicSpec spec, LagRule rule) {
    check_usable(y);
    const int T = static_cast<int>(y.size());
    int k = 0;
    if (rule.kind == LagRule::Kind::fixed) {
        if (rule.value < 0) throw Error(ErrorKind::InvalidArgument, "lag count must be non-negative");
        if (T < rule.value + 10) throw Error(ErrorKind::TooShort, "ADF needs length >= lags + 10");
        k = rule.value;
    } else {
        int max_k = rule.value < 0 ? default_max_lag(y.size()) : rule.value;
        max_k = std::min(max_k, T - 10);
        if (max_k < 0) throw Error(ErrorKind::TooShort, "ADF needs at least 10 observations");
        // Schwarz criterion on the common sample that admits max_k lags.
        double best = std::numeric_limits<double>::infinity();
        for (int cand = 0; cand <= max_k; ++cand) {
            const Design d = adf_design(y, spec, cand, max_k + 1);
            if (d.x.rows() <= d.x.cols()) continue;
            try {
                const OlsFit fit = ols(d.x, d.dy);
                const double n = static_cast<double>(fit.nobs);
                const double sic = std::log(fit.ssr / n) + static_cast<double>(fit.k) * std::log(n) / n;
                if (sic < best - 1e-12) {
                    best = sic;
                    k = cand;
                }
            } catch (const Error&) {
                // collinear candidate: skip
            }
        }
    }
    const Design d = adf_design(y, spec, k, k + 1);
    const OlsFit fit = ols(d.x, d.dy);
    if (!(fit.sigma2 > 0.0)) throw Error(ErrorKind::ZeroVariance, "ADF regression fits exactly");
    AdfRegression out;
    out.rho = fit.beta(d.level_col);
    out.tau = fit.t_ratio(d.level_col);
    out.sigma = std::sqrt(fit.sigma2);
    out.lags = k;
    out.nobs = static_cast<int>(fit.nobs);
    return out;
}

double bartlett_lrv(std::span<const double> u, double bandwidth) {
    const std::size_t n = u.size();
    auto gamma = [&](std::size_t j) {
        double s = 0.0;
        for (std::size_t t = j; t < n; ++t) s += u[t] * u[t - j];
        return s / static_cast<double>(n);
    };
    double lrv = gamma(0);
    const auto max_j = static_cast<std::size_t>(std::min<double>(std::floor(bandwidth), static_cast<double>(n - 1)));
    for (std::size_t j = 1; j <= max_j; ++j) lrv += 2.0 * (1.0 - static_cast<double>(j) / (bandwidth + 1.0)) * gamma(j);
    return lrv;
}

double newey_west_bandwidth(std::span<const double> u) {
    const double n = static_cast<double>(u.size());
    const auto m = static_cast<std::size_t>(std::floor(4.0 * std::pow(n / 100.0, 2.0 / 9.0)));
    double s0 = 0.0;
    double s1 = 0.0;
    for (std::size_t j = 0; j <= m && j < u.size(); ++j) {
        double g = 0.0;
        for (std::size_t t = j; t < u.size(); ++t) g += u[t] * u[t - j];
        g /= n;
        s0 += j == 0 ? g : 2.0 * g;
        s1 += 2.0 * static_cast<double>(j) * g;
    }
    if (s0 == 0.0) return 0.0;
    const double gamma_hat = 1.1447 * std::cbrt((s1 / s0) * (s1 / s0));
    return std::min(gamma_hat * std::cbrt(n), n - 1.0);
}

TestReport adf_test(const TimeSeries& series, DeterministicSpec spec, LagRule rule) {
    const AdfRegression r = adf_regression(series.values(), spec, rule);
    TestReport rep;
    rep.test_name = "ADF";
    rep.statistic = r.tau;
    rep.p_value = mackinnon_pvalue(r.tau, 1, spec, r.nobs);
    rep.observations = r.nobs;
    rep.spec = spec;
    rep.lags = r.lags;
    return rep;
}

TestReport pp_test(const TimeSeries& series, DeterministicSpec spec, Bandwidth bandwidth) {
    const auto y = series.values();
    if (y.size() < 20) throw Error(ErrorKind::TooShort, "PP needs length >= 20");
    check_usable(y);
    const Design d = adf_design(y, spec, 0, 1);
    // Levels form y_t = a + rho y_{t-1}; same residuals as the differenced form.
    const OlsFit fit = ols(d.x, d.dy);
    if (!(fit.sigma2 > 0.0)) throw Error(ErrorKind::ZeroVariance, "PP regression fits exactly");
    const auto n = static_cast<double>(fit.nobs);
    const std::span<const double> u(fit.residuals.data(), fit.nobs);
    const double b = bandwidth.automatic ? newey_west_bandwidth(u) : bandwidth.value;
    if (b < 0.0) throw Error(ErrorKind::InvalidArgument, "bandwidth must be non-negative");
    const double gamma0 = fit.ssr / n;
    const double lambda2 = bartlett_lrv(u, b);
    if (!(lambda2 > 0.0)) throw Error(ErrorKind::ZeroVariance, "long-run variance is not positive");
    const double se = fit.std_error(d.level_col);
    const double t_rho = fit.t_ratio(d.level_col);
    const double z_t = std::sqrt(gamma0 / lambda2) * t_rho -
                       0.5 * (lambda2 - gamma0) / std::sqrt(lambda2) * (n * se / std::sqrt(fit.sigma2));
    TestReport rep;
    rep.test_name = "PP";
    rep.statistic = z_t;
    rep.p_value = mackinnon_pvalue(z_t, 1, spec, static_cast<int>(fit.nobs));
    rep.observations = static_cast<int>(fit.nobs);
    rep.spec = spec;
    rep.lags = static_cast<int>(std::floor(b));
    return rep;
}

TestReport fisher_combine(std::span<const double> p_values) {
    if (p_values.empty()) throw Error(ErrorKind::InvalidP, "no p-values to combine");
    double stat = 0.0;
    for (double p : p_values) {
        if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidP, "p-value outside (0, 1]");
        stat -= 2.0 * std::log(p);
    }
    TestReport rep;
    rep.test_name = "Fisher Chi-square";
    rep.statistic = stat;
    rep.p_value = chi2_upper_even(stat, p_values.size());
    rep.cross_sections = static_cast<int>(p_values.size());
    rep.observations = static_cast<int>(p_values.size());
    rep.lags = 0;
    return rep;
}

}  // namespace msvar
