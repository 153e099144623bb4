#include "msvar/cointegration.hpp"
#include "msvar/mackinnon.hpp"
#include "msvar/numerics.hpp"
#include "msvar/panel_tests.hpp"
#include "msvar/unit_root.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace msvar;
using msvar::testing::ar_panel;
using msvar::testing::thrown_kind;

/// Irregular deterministic series; reference statistics for it were computed
/// with statsmodels (ADF, fixed lag 2) and arch (PP, Bartlett lag 4).
TimeSeries reference_series() {
    std::vector<double> y(120);
    double acc = 0.0;
    for (int t = 0; t < 120; ++t) {
        acc += std::sin(0.7 * t) + 0.5 * std::cos(1.9 * std::pow(static_cast<double>(t), 1.1));
        y[t] = 0.3 * acc + std::sin(0.13 * t);
    }
    return {"ref", {1990, 1}, y};
}

TEST(Chi2, UpperTailMatchesReference) {
    EXPECT_NEAR(chi2_upper_even(30.9694, 8), 0.013577823200712685, 1e-12);
    EXPECT_NEAR(chi2_upper_even(100.0, 20), 4.791357300338064e-07, 1e-18);
    EXPECT_NEAR(chi2_upper_even(3.0, 1), std::exp(-1.5), 1e-15);
}

TEST(Fisher, Combination) {
    const std::vector<double> ones(8, 1.0);
    const TestReport all_one = fisher_combine(ones);
    EXPECT_DOUBLE_EQ(all_one.statistic, 0.0);
    EXPECT_NEAR(all_one.p_value, 1.0, 1e-12);

    const std::vector<double> single{0.05};
    const TestReport r = fisher_combine(single);
    EXPECT_NEAR(r.statistic, 5.991464547107979, 1e-12);
    EXPECT_NEAR(r.p_value, 0.05, 1e-12);

    const std::vector<double> bad{0.5, 0.0};
    EXPECT_EQ(thrown_kind([&] { (void)fisher_combine(bad); }), ErrorKind::InvalidP);
    const std::vector<double> nan{0.5, std::nan("")};
    EXPECT_EQ(thrown_kind([&] { (void)fisher_combine(nan); }), ErrorKind::InvalidP);
}

TEST(Adf, MatchesReferenceStatistics) {
    const TimeSeries y = reference_series();
    EXPECT_NEAR(adf_test(y, DeterministicSpec::none, LagRule::fixed(2)).statistic, -3.1030870959957513, 1e-9);
    EXPECT_NEAR(adf_test(y, DeterministicSpec::constant, LagRule::fixed(2)).statistic, -4.18130178278612, 1e-9);
    EXPECT_NEAR(adf_test(y, DeterministicSpec::constant_trend, LagRule::fixed(2)).statistic, -4.157001579335893, 1e-9);
}

TEST(Pp, MatchesReferenceStatistics) {
    const TimeSeries y = reference_series();
    EXPECT_NEAR(pp_test(y, DeterministicSpec::none, Bandwidth::fixed(4)).statistic, -1.7964183947683456, 1e-9);
    EXPECT_NEAR(pp_test(y, DeterministicSpec::constant, Bandwidth::fixed(4)).statistic, -2.4991875444645144, 1e-9);
    EXPECT_NEAR(pp_test(y, DeterministicSpec::constant_trend, Bandwidth::fixed(4)).statistic, -2.4946148308339575, 1e-9);
}

TEST(Adf, SeparatesWalkFromNoise) {
    Rng rng(2024);
    const auto walk = ar_panel(rng, 1.0, 200, 1);
    const auto noise = ar_panel(rng, 0.0, 200, 1);
    EXPECT_GT(adf_test(walk[0]).p_value, 0.10);
    EXPECT_LT(adf_test(noise[0]).p_value, 0.01);
    EXPECT_GT(pp_test(walk[0]).p_value, 0.10);
    EXPECT_LT(pp_test(noise[0]).p_value, 0.01);
}

TEST(Adf, DegenerateInputs) {
    const TimeSeries flat("flat", {2000, 1}, std::vector<double>(50, 3.0));
    EXPECT_EQ(thrown_kind([&] { (void)adf_test(flat); }), ErrorKind::ZeroVariance);
    const TimeSeries tiny("tiny", {2000, 1}, {1, 2, 1, 3, 2});
    EXPECT_EQ(thrown_kind([&] { (void)pp_test(tiny); }), ErrorKind::TooShort);
}

TEST(Adf, SchwarzLagStaysWithinBound) {
    Rng rng(8);
    const auto y = ar_panel(rng, 0.7, 150, 1)[0];
    const TestReport r = adf_test(y);
    EXPECT_GE(r.lags, 0);
    EXPECT_LE(r.lags, default_max_lag(150));
    EXPECT_EQ(default_max_lag(100), 12);
}

TEST(Bartlett, ZeroBandwidthIsVariance) {
    const std::vector<double> u{1.0, -2.0, 0.5, 0.5};
    EXPECT_NEAR(bartlett_lrv(u, 0.0), (1.0 + 4.0 + 0.25 + 0.25) / 4.0, 1e-15);
    // One lag with weight 1/2: gamma1 = (-2 - 1 + 0.25) / 4.
    EXPECT_NEAR(bartlett_lrv(u, 1.0), 5.5 / 4.0 + 2.0 * 0.5 * (-2.75 / 4.0), 1e-15);
}

TEST(MacKinnon, CriticalValuesFollowResponseSurface) {
    EXPECT_NEAR(mackinnon_critical_value(0.05, 1, DeterministicSpec::constant, 0), -2.86154, 1e-5);
    EXPECT_NEAR(mackinnon_critical_value(0.01, 1, DeterministicSpec::constant, 0), -3.43035, 1e-5);
    EXPECT_NEAR(mackinnon_critical_value(0.05, 2, DeterministicSpec::constant, 0), -3.33613, 1e-5);
    EXPECT_NEAR(mackinnon_critical_value(0.05, 1, DeterministicSpec::constant, 100),
                -2.86154 - 2.8903 / 100 - 4.234 / 1e4 - 40.040 / 1e6, 1e-8);
}

TEST(MacKinnon, PValueAtCriticalValueEqualsLevel) {
    for (auto spec : {DeterministicSpec::constant, DeterministicSpec::constant_trend})
        for (int n : {1, 2, 5, 8})
            for (int t : {0, 50, 200})
                for (double level : {0.01, 0.05, 0.10})
                    EXPECT_NEAR(mackinnon_pvalue(mackinnon_critical_value(level, n, spec, t), n, spec, t), level, 1e-9)
                        << "n=" << n << " T=" << t << " level=" << level;
}

TEST(MacKinnon, MonotoneAndBounded) {
    for (auto spec : {DeterministicSpec::none, DeterministicSpec::constant, DeterministicSpec::constant_trend}) {
        double prev = 0.0;
        for (double tau = -12.0; tau <= 3.0; tau += 0.05) {
            const double p = mackinnon_pvalue(tau, 1, spec, 100);
            EXPECT_GE(p, 0.0);
            EXPECT_LE(p, 1.0);
            EXPECT_GE(p, prev);
            prev = p;
        }
    }
    EXPECT_LT(mackinnon_pvalue(-5.0, 3, DeterministicSpec::constant, 60),
              mackinnon_pvalue(-4.0, 3, DeterministicSpec::constant, 60));
}

TEST(MacKinnon, TauZeroIsFarInTheAcceptanceRegion) {
    EXPECT_GE(mackinnon_pvalue(0.0, 2, DeterministicSpec::constant, 0), 0.97);
    EXPECT_GE(mackinnon_pvalue(0.0, 1, DeterministicSpec::constant_trend, 0), 0.97);
    for (int n = 2; n <= 8; ++n) EXPECT_GE(mackinnon_pvalue(0.0, n, DeterministicSpec::constant, 100), 0.97) << n;
    // Single-series constant case sits lower on the published surface.
    EXPECT_NEAR(mackinnon_pvalue(0.0, 1, DeterministicSpec::constant, 0), 0.9585, 5e-4);
}

TEST(MacKinnon, EngleGrangerSpotValue) {
    const double p = mackinnon_pvalue(-9.14, 8, DeterministicSpec::constant, 23);
    EXPECT_LE(p, 0.001);
    EXPECT_NEAR(p, 0.0008, 5e-4);
    EXPECT_EQ(thrown_kind([] { (void)mackinnon_pvalue(-3.0, 13, DeterministicSpec::constant, 0); }),
              ErrorKind::DimensionOutOfRange);
}

TEST(PanelTests, PowerAgainstStationaryPanels) {
    int llc = 0, breitung = 0, ips = 0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
        Rng rng(derive_seed(777, static_cast<std::uint64_t>(r)));
        const auto panel = ar_panel(rng, 0.5, 200, 8);
        llc += llc_test(panel).p_value < 0.05;
        breitung += breitung_test(panel).p_value < 0.05;
        ips += ips_test(panel).p_value < 0.05;
    }
    EXPECT_GE(llc, 0.90 * reps);
    EXPECT_GE(breitung, 0.85 * reps);
    EXPECT_GE(ips, 0.90 * reps);
}

TEST(PanelTests, DegenerateMembers) {
    Rng rng(3);
    auto panel = ar_panel(rng, 1.0, 60, 3);
    EXPECT_EQ(thrown_kind([&] { (void)llc_test(CrossSections{panel[0]}); }), ErrorKind::TooFewEntities);

    const CrossSections flat{TimeSeries("a", {2000, 1}, std::vector<double>(60, 1.0)),
                             TimeSeries("b", {2000, 1}, std::vector<double>(60, 2.0))};
    EXPECT_EQ(thrown_kind([&] { (void)breitung_test(flat); }), ErrorKind::ZeroVariance);

    CrossSections mixed = panel;
    mixed.emplace_back("const", Period{2000, 1}, std::vector<double>(60, 5.0));
    const TestReport r = ips_test(mixed);
    EXPECT_EQ(r.cross_sections, 3);
    EXPECT_EQ(r.excluded, std::vector<std::string>{"const"});
    const CrossSections one_left{panel[0], mixed.back()};
    EXPECT_EQ(thrown_kind([&] { (void)ips_test(one_left); }), ErrorKind::TooFewEntities);
    EXPECT_EQ(thrown_kind([&] { (void)ips_test(panel, DeterministicSpec::none); }), ErrorKind::InvalidArgument);

    const CrossSections short_panel = ar_panel(rng, 1.0, 22, 4);
    EXPECT_EQ(thrown_kind([&] { (void)llc_test(short_panel); }), ErrorKind::TooShort);
}

TEST(PanelTests, ReportsCountsAndBounds) {
    Rng rng(12);
    const auto panel = ar_panel(rng, 1.0, 100, 8);
    for (const TestReport& r : {llc_test(panel), breitung_test(panel), ips_test(panel), fisher_adf_test(panel),
                                fisher_pp_test(panel)}) {
        EXPECT_EQ(r.cross_sections, 8) << r.test_name;
        EXPECT_GT(r.observations, 0) << r.test_name;
        EXPECT_GE(r.p_value, 0.0) << r.test_name;
        EXPECT_LE(r.p_value, 1.0) << r.test_name;
    }
}

TEST(PanelTests, PanelKeyedFormsUseEveryEntity) {
    Rng rng(4);
    const auto members = ar_panel(rng, 0.5, 80, 4);
    PanelDataset::Grid grid;
    for (const auto& m : members) grid[m.name()].emplace("HC", m.renamed("HC"));
    const PanelDataset panel(grid, {});
    EXPECT_EQ(cross_sections_of(panel, "HC").size(), 4u);
    EXPECT_DOUBLE_EQ(llc_test(panel, "HC").statistic, llc_test(members).statistic);
    EXPECT_DOUBLE_EQ(ips_test(panel, "HC").statistic, ips_test(members).statistic);
}

TEST(IpsMoments, ApproachAsymptoticValues) {
    const IpsMoments m = ips_moments(100000, DeterministicSpec::constant);
    EXPECT_NEAR(m.mean, -1.533, 0.002);
    EXPECT_NEAR(m.variance, 0.706, 0.002);
    const IpsMoments a = ips_moments(20, DeterministicSpec::constant);
    const IpsMoments b = ips_moments(25, DeterministicSpec::constant);
    const IpsMoments mid = ips_moments(22, DeterministicSpec::constant);
    EXPECT_NEAR(mid.mean, a.mean + 0.4 * (b.mean - a.mean), 1e-12);
}

TEST(LlcAdjustment, InterpolatesAndClamps) {
    const LlcAdjustment lo = llc_adjustment(25, DeterministicSpec::constant);
    EXPECT_DOUBLE_EQ(lo.mu, -0.554);
    EXPECT_DOUBLE_EQ(lo.sigma, 0.919);
    const LlcAdjustment below = llc_adjustment(10, DeterministicSpec::constant);
    EXPECT_DOUBLE_EQ(below.mu, lo.mu);
    const LlcAdjustment mid = llc_adjustment(27.5, DeterministicSpec::constant);
    EXPECT_NEAR(mid.mu, 0.5 * (-0.554 - 0.546), 1e-12);
}

TEST(EngleGranger, DetectsCointegration) {
    Rng rng(31);
    std::vector<double> x(200), y(200);
    double walk = 0.0;
    for (int t = 0; t < 200; ++t) {
        walk += rng.normal();
        x[t] = walk;
        y[t] = 2.0 * walk + rng.normal();
    }
    const CointegrationReport r =
        engle_granger(TimeSeries("y", {2000, 1}, y), {TimeSeries("x", {2000, 1}, x)});
    EXPECT_LT(r.p_value, 0.01);
    EXPECT_EQ(r.dimension, 2);
    EXPECT_EQ(r.dependent, "y");
}

TEST(EngleGranger, IndependentWalksMostlyNotCointegrated) {
    int kept = 0;
    for (int s = 0; s < 200; ++s) {
        Rng rng(derive_seed(99, static_cast<std::uint64_t>(s)));
        const auto w = ar_panel(rng, 1.0, 200, 2);
        kept += engle_granger(w[0], {w[1]}).p_value > 0.10;
    }
    // Nominal rate is 90%; allow three binomial standard deviations.
    EXPECT_GE(kept, 168);
}

TEST(EngleGranger, Preconditions) {
    Rng rng(1);
    const auto w = ar_panel(rng, 1.0, 15, 2);
    EXPECT_EQ(thrown_kind([&] { (void)engle_granger(w[0], {w[1]}); }), ErrorKind::TooShort);
    const auto v = ar_panel(rng, 1.0, 60, 1);
    EXPECT_EQ(thrown_kind([&] { (void)engle_granger(v[0], {v[0]}); }), ErrorKind::ZeroVariance);
    const auto u = ar_panel(rng, 1.0, 60, 1);
    EXPECT_EQ(thrown_kind([&] { (void)engle_granger(v[0], {u[0], u[0]}); }), ErrorKind::CollinearRegressors);
}

}  // namespace
