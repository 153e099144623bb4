#pragma once

#include "msvar/data_model.hpp"
#include "msvar/test_report.hpp"

#include <span>
#include <vector>

namespace msvar {

/// ADF augmentation: a fixed lag count or Schwarz selection up to max_k
/// (max_k < 0 means floor(12 (T/100)^0.25)).
struct LagRule {
    enum class Kind { fixed, schwarz } kind = Kind::schwarz;
    int value = -1;

    static LagRule fixed(int k) { return {Kind::fixed, k}; }
    static LagRule schwarz(int max_k = -1) { return {Kind::schwarz, max_k}; }
};

/// PP long-run variance bandwidth: Newey-West (1994) automatic or fixed.
struct Bandwidth {
    bool automatic = true;
    double value = 0.0;

    static Bandwidth automatic_nw() { return {true, 0.0}; }
    static Bandwidth fixed(double b) { return {false, b}; }
};

[[nodiscard]] int default_max_lag(std::size_t length);

/// Full ADF regression output, shared by the panel statistics.
struct AdfRegression {
    double tau = 0.0;        ///< t-ratio on the lagged level
    double rho = 0.0;        ///< coefficient on the lagged level
    double sigma = 0.0;      ///< residual standard error
    int lags = 0;
    int nobs = 0;
};

/// Throws MissingData, ZeroVariance or TooShort.
[[nodiscard]] AdfRegression adf_regression(std::span<const double> y, DeterministicSpec spec, LagRule rule);

/// Bartlett-kernel long-run variance of a mean-zero sequence.
[[nodiscard]] double bartlett_lrv(std::span<const double> u, double bandwidth);
/// Newey-West (1994) plug-in bandwidth for the Bartlett kernel.
[[nodiscard]] double newey_west_bandwidth(std::span<const double> u);

[[nodiscard]] TestReport adf_test(const TimeSeries& series, DeterministicSpec spec = DeterministicSpec::constant,
                                  LagRule rule = LagRule::schwarz());
[[nodiscard]] TestReport pp_test(const TimeSeries& series, DeterministicSpec spec = DeterministicSpec::constant,
                                 Bandwidth bandwidth = Bandwidth::automatic_nw());

/// -2 sum ln p against chi-square with 2N df. Throws InvalidP.
[[nodiscard]] TestReport fisher_combine(std::span<const double> p_values);

}  // namespace msvar
