#include "msvar/consumption.hpp"

#include "msvar/error.hpp"

#include <cmath>

namespace msvar {

namespace {

void check_aligned(const ConsumptionInputs& in, std::size_t min_length) {
    const auto& c = in.consumption;
    for (const TimeSeries* s : {&in.income, &in.interest_rate})
        if (s->start() != c.start() || s->size() != c.size())
            throw Error(ErrorKind::InvalidArgument, "consumption inputs are not aligned ('" + s->name() + "')");
    if (c.size() < min_length)
        throw Error(ErrorKind::TooShort, "consumption inputs need at least " + std::to_string(min_length) + " periods");
}

// Ratio at original index t (1..T-1); NaN where dY = 0 or an input is missing.
double mpc_at(const ConsumptionInputs& in, std::size_t t) {
    const double dc = in.consumption[t] - in.consumption[t - 1];
    const double dy = in.income[t] - in.income[t - 1];
    if (dy == 0.0 || is_missing(dc) || is_missing(dy)) return kMissing;
    return dc / dy;
}

}  // namespace

double discount_factor(double rate_next, BetaFormula formula) {
    const double denom = (formula == BetaFormula::standard ? 1.0 : 2.0) + rate_next;
    if (!(denom > 0.0))
        throw Error(ErrorKind::RateOutOfDomain, "rate " + std::to_string(rate_next) + " gives a non-positive discount base");
    return 1.0 / denom;
}

double euler_residual(double c_now, double c_next, double beta, double rate) {
    if (!(c_now > 0.0) || !(c_next > 0.0)) throw Error(ErrorKind::NonPositiveConsumption, "consumption must be positive");
    if (!(beta > 0.0)) throw Error(ErrorKind::InvalidArgument, "beta must be positive");
    return std::log(c_now) - std::log(c_next) - std::log(beta) - rate;
}

TimeSeries discount_path(const TimeSeries& interest_rate, BetaFormula formula) {
    if (interest_rate.size() < 2) throw Error(ErrorKind::TooShort, "discount path needs at least two rates");
    std::vector<double> beta(interest_rate.size() - 1);
    for (std::size_t t = 0; t + 1 < interest_rate.size(); ++t) {
        const double r = interest_rate[t + 1];
        beta[t] = is_missing(r) ? kMissing : discount_factor(r, formula);
    }
    return {"BETA", interest_rate.start(), std::move(beta)};
}

DerivedSeries mpc_series(const ConsumptionInputs& inputs, std::string name) {
    check_aligned(inputs, 2);
    const std::size_t n = inputs.consumption.size();
    std::vector<double> out(n - 1);
    std::vector<Period> undefined;
    for (std::size_t t = 1; t < n; ++t) {
        out[t - 1] = mpc_at(inputs, t);
        if (is_missing(out[t - 1])) undefined.push_back(inputs.consumption.period_at(t));
    }
    return {TimeSeries(std::move(name), inputs.consumption.period_at(1), std::move(out)), std::move(undefined)};
}

DerivedSeries impc_series(const ConsumptionInputs& inputs, BetaFormula formula, std::string name) {
    check_aligned(inputs, 3);
    const std::size_t n = inputs.consumption.size();
    std::vector<double> out(n - 2);
    std::vector<Period> undefined;
    for (std::size_t t = 1; t + 1 < n; ++t) {
        const double r = inputs.interest_rate[t + 1];
        const double beta = is_missing(r) ? kMissing : discount_factor(r, formula);
        const double v = mpc_at(inputs, t) + beta * mpc_at(inputs, t + 1);
        out[t - 1] = std::isfinite(v) ? v : kMissing;
        if (is_missing(out[t - 1])) undefined.push_back(inputs.consumption.period_at(t));
    }
    return {TimeSeries(std::move(name), inputs.consumption.period_at(1), std::move(out)), std::move(undefined)};
}

}  // namespace msvar
