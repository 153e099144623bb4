#include "msvar/consumption.hpp"
#include "msvar/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace {

using namespace msvar;

ConsumptionInputs make_inputs(std::vector<double> c, std::vector<double> y, std::vector<double> r) {
    const Period start{2010, 1};
    return {TimeSeries("C", start, std::move(c)), TimeSeries("Y", start, std::move(y)), TimeSeries("r", start, std::move(r))};
}

TEST(DiscountFactor, Values) {
    EXPECT_DOUBLE_EQ(discount_factor(0.0), 1.0);
    EXPECT_NEAR(discount_factor(0.05), 0.952380952380952, 1e-15);
    EXPECT_NEAR(discount_factor(0.05, BetaFormula::literal), 1.0 / 2.05, 1e-15);
    EXPECT_THROW((void)discount_factor(-1.0), Error);
    try {
        (void)discount_factor(-1.0);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::RateOutOfDomain);
    }
}

TEST(EulerResidual, Values) {
    EXPECT_NEAR(euler_residual(2.0, 2.0, 1.0, 0.0), 0.0, 1e-15);
    EXPECT_NEAR(euler_residual(std::exp(1.0) * 3.0, 3.0, 1.0, 1.0), 0.0, 1e-15);
    EXPECT_NEAR(euler_residual(1.0, 1.0, 0.95, 0.0), 0.051293294387550, 1e-12);
    EXPECT_THROW((void)euler_residual(0.0, 1.0, 1.0, 0.0), Error);
}

TEST(Mpc, RatioOfDifferences) {
    const auto in = make_inputs({100, 105, 110}, {200, 210, 210}, {0, 0, 0});
    const DerivedSeries m = mpc_series(in);
    ASSERT_EQ(m.series.size(), 2u);
    EXPECT_EQ(m.series.start(), (Period{2010, 2}));
    EXPECT_DOUBLE_EQ(m.series[0], 0.5);
    EXPECT_TRUE(is_missing(m.series[1]));
    ASSERT_EQ(m.undefined.size(), 1u);
    EXPECT_EQ(m.undefined[0], (Period{2010, 3}));
}

TEST(Mpc, MatchesElementwiseOracle) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(50.0, 150.0);
    std::vector<double> c(30), y(30), r(30, 0.01);
    for (int t = 0; t < 30; ++t) {
        c[t] = u(gen);
        y[t] = u(gen) * 2.0;
    }
    const DerivedSeries m = mpc_series(make_inputs(c, y, r));
    for (int t = 1; t < 30; ++t) EXPECT_NEAR(m.series[t - 1], (c[t] - c[t - 1]) / (y[t] - y[t - 1]), 1e-15);
}

TEST(Impc, ForcedArithmetic) {
    // MPC_1 = 0.5, MPC_2 = 0.3, zero rates so beta = 1.
    const auto in = make_inputs({0, 5, 8, 9}, {0, 10, 20, 21}, {0, 0, 0, 0});
    const DerivedSeries i = impc_series(in);
    ASSERT_EQ(i.series.size(), 2u);
    EXPECT_EQ(i.series.start(), (Period{2010, 2}));
    EXPECT_NEAR(i.series[0], 0.8, 1e-15);
}

TEST(Impc, ComposesMpcAndDiscountFactor) {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(50.0, 150.0), ur(0.0, 0.08);
    std::vector<double> c(30), y(30), r(30);
    for (int t = 0; t < 30; ++t) {
        c[t] = u(gen);
        y[t] = 2.0 * u(gen);
        r[t] = ur(gen);
    }
    const auto in = make_inputs(c, y, r);
    for (BetaFormula f : {BetaFormula::standard, BetaFormula::literal}) {
        const DerivedSeries m = mpc_series(in);
        const DerivedSeries i = impc_series(in, f);
        ASSERT_EQ(i.series.size(), 28u);
        for (std::size_t k = 0; k < i.series.size(); ++k) {
            const std::size_t t = k + 1;
            EXPECT_NEAR(i.series[k], m.series[k] + discount_factor(r[t + 1], f) * m.series[k + 1], 1e-12);
        }
    }
}

TEST(Impc, PropagatesUndefinedMpc) {
    const auto in = make_inputs({1, 2, 3, 4, 5}, {1, 2, 2, 3, 4}, {0, 0, 0, 0, 0});
    const DerivedSeries i = impc_series(in);
    EXPECT_TRUE(is_missing(i.series[0]));
    EXPECT_TRUE(is_missing(i.series[1]));
    EXPECT_FALSE(is_missing(i.series[2]));
    EXPECT_EQ(i.undefined.size(), 2u);
}

TEST(DiscountPath, DatedAtT) {
    const TimeSeries r("r", {2010, 1}, {0.0, 0.25, 1.0});
    const TimeSeries b = discount_path(r);
    ASSERT_EQ(b.size(), 2u);
    EXPECT_DOUBLE_EQ(b[0], 0.8);
    EXPECT_DOUBLE_EQ(b[1], 0.5);
}

}  // namespace
