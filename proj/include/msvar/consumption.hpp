#pragma once

#include "msvar/data_model.hpp"

#include <vector>

namespace msvar {

/// Which algebraic form maps the next-period rate onto beta.
enum class BetaFormula {
    standard,  ///< beta = 1 / (1 + r_{t+1})
    literal,   ///< beta = 1 / (2 + r_{t+1})
};

/// Consumption, income and interest rate (decimal per period) on one axis.
struct ConsumptionInputs {
    TimeSeries consumption;
    TimeSeries income;
    TimeSeries interest_rate;
};

/// Derived series plus the periods where it is undefined (held as kMissing).
struct DerivedSeries {
    TimeSeries series;
    std::vector<Period> undefined;
};

/// Throws RateOutOfDomain unless the denominator is positive.
[[nodiscard]] double discount_factor(double rate_next, BetaFormula formula = BetaFormula::standard);

/// log(c_now) - log(c_next) - log(beta) - rate.
[[nodiscard]] double euler_residual(double c_now, double c_next, double beta, double rate);

/// beta_t = discount_factor(r_{t+1}) for t = 0..T-2, dated at t.
[[nodiscard]] TimeSeries discount_path(const TimeSeries& interest_rate, BetaFormula formula = BetaFormula::standard);

/// dC_t / dY_t for t = 1..T-1.
[[nodiscard]] DerivedSeries mpc_series(const ConsumptionInputs& inputs, std::string name = "MPC");

/// MPC_t + beta_t * MPC_{t+1} for t = 1..T-2.
[[nodiscard]] DerivedSeries impc_series(const ConsumptionInputs& inputs, BetaFormula formula = BetaFormula::standard,
                                        std::string name = "IMPC");

}  // namespace msvar
