// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "msvar/cointegration.hpp"
#include "msvar/dynamics.hpp"
#include "msvar/estimation.hpp"
#include "msvar/hamilton_filter.hpp"
#include "msvar/mackinnon.hpp"
#include "msvar/numerics.hpp"
#include "msvar/panel_tests.hpp"
#include "msvar/parallel.hpp"
#include "msvar/pipeline.hpp"
#include "msvar/synthetic_lab.hpp"
#include "msvar/unit_root.hpp"

#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

namespace {

using namespace msvar;
using namespace msvar::testing;
namespace fs = std::filesystem;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* title;
    double budget_seconds;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::size_t worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

// 1. Footer statistics at T = 22, k = 130, tolerance 1e-3.
Outcome info_criteria_fixtures() {
    const struct {
        const char* name;
        double loglik, aic, sc;
    } rows[] = {{"Croatia", 399.1936, -24.4721, -18.0251},
                {"Poland", 496.5350, -33.3214, -26.8743},
                {"Slovakia", 366.2749, -21.4795, -15.0325}};
    double worst = 0.0;
    for (const auto& r : rows) {
        const InfoCriteria ic = info_criteria(r.loglik, 130, 22);
        worst = std::max({worst, std::abs(ic.aic - r.aic), std::abs(ic.schwarz - r.sc)});
    }
    return {worst <= 1e-3, fmt("max |diff| %.2e (tol 1e-3)", worst)};
}

// 2. chi-square(16) tail at 30.9694 is 0.0136 +- 5e-4.
Outcome fisher_fixture() {
    const double p = chi2_upper_even(30.9694, 8);
    return {std::abs(p - 0.0136) <= 5e-4, fmt("p = %.6f (target 0.0136 +- 5e-4)", p)};
}

// 3. Filter and smoother against 3^8 path enumeration, 25 systems.
Outcome filter_oracle() {
    double worst_ll = 0.0, worst_marg = 0.0;
    for (int rep = 0; rep < 25; ++rep) {
        Rng rng(derive_seed(3003, static_cast<std::uint64_t>(rep)));
        MsVarSpec spec;
        spec.n_vars = 2;
        spec.n_regimes = 3;
        const MsVarParams p = random_params(spec, rng);
        Eigen::VectorXd exog = Eigen::VectorXd::Zero(9);
        exog.segment(3, 3).setOnes();
        const Eigen::MatrixXd data = testing::random_data(p, 9, exog, rng);  // 8 effective periods after one lag
        Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(3, 1.0 / 3.0);
        const Eigen::MatrixXd trans = transition_matrix(p.transition_logits);
        for (int i = 0; i < 20000; ++i) pi = pi * trans;
        const PathOracle oracle = enumerate_paths(data, exog, p, pi.transpose());
        const FilterOutput f = hamilton_filter(data, exog, p);
        worst_ll = std::max(worst_ll, std::abs(f.loglik - oracle.loglik));
        worst_marg = std::max(worst_marg, (f.smoothed - oracle.marginals).cwiseAbs().maxCoeff());
    }
    return {worst_ll <= 1e-8 && worst_marg <= 1e-8,
            fmt("max loglik diff %.2e, max marginal diff %.2e (tol 1e-8)", worst_ll, worst_marg)};
}

// 4. EM ascent over 100 datasets, T = 120, R = 2, n = 2.
Outcome em_monotonicity() {
    MsVarSpec spec;
    spec.n_vars = 2;
    spec.n_regimes = 2;
    const CoefficientLayout layout(spec);
    const auto drops = parallel_map(100, worker_count(), [&](std::size_t rep) {
        Rng rng(derive_seed(4004, rep));
        const MsVarParams truth = random_params(spec, rng);
        Eigen::VectorXd exog = Eigen::VectorXd::Zero(120);
        exog.segment(60, 8).setOnes();
        const Design design = make_design(testing::random_data(truth, 120, exog, rng), exog, 1);
        MsVarParams p = random_params(spec, rng);
        double prev = -std::numeric_limits<double>::infinity(), worst = 0.0;
        for (int it = 0; it < 60; ++it) {
            const EmUpdate u = em_update(design, layout, p);
            worst = std::max(worst, prev - u.loglik_before);
            prev = u.loglik_before;
            p = u.params;
        }
        return worst;
    });
    const double worst = *std::max_element(drops.begin(), drops.end());
    return {worst <= 1e-8, fmt("largest decrease %.2e over 100 x 60 steps (tol 1e-8)", std::max(worst, 0.0))};
}

// 5. Recovery experiment, 20 seeds.
Outcome parameter_recovery() {
    const RecoveryReport rep = recovery_experiment(recovery_preset(), {}, 20, worker_count());
    int good = 0;
    double worst_acc = 1.0;
    for (const auto& r : rep.replications) {
        if (!r.ok) continue;
        worst_acc = std::min(worst_acc, r.accuracy);
        good += r.accuracy >= 0.95 && r.intercepts.max_abs <= 0.1 && r.lag_matrices.max_abs <= 0.05 &&
                r.transition.max_abs <= 0.05;
    }
    return {good >= 16, fmt("%d/20 seeds within all tolerances (need 16); mean accuracy %.4f, min %.4f, %d fit failures",
                            good, rep.mean_accuracy, worst_acc, rep.n_failed)};
}

// 6. FEVD structure of a random stable 8-variable system.
Outcome fevd_structure() {
    Rng rng(6006);
    MsVarSpec spec;
    spec.n_vars = 8;
    spec.n_regimes = 3;
    const MsVarParams p = random_params(spec, rng);
    const FevdResult f = fevd(p, {{}, 24, {}, false});
    double worst = 0.0;
    for (const auto& s : f.shares)
        for (Eigen::Index i = 0; i < s.rows(); ++i) worst = std::max(worst, std::abs(s.row(i).sum() - 100.0));
    const bool own = f.shares[0](0, 0) == 100.0 && f.shares[0].row(0).tail(7).isZero(0.0);
    return {own && worst <= 1e-6, fmt("first-period own share %.17g, max |row sum - 100| %.2e (tol 1e-6)",
                                      f.shares[0](0, 0), worst)};
}

// 7. Scalar decay and bivariate simulation oracle.
Outcome irf_oracles() {
    MsVarSpec s1;
    s1.n_vars = 1;
    s1.n_regimes = 1;
    MsVarParams scalar = MsVarParams::zeros(s1);
    scalar.lag_matrices[0](0, 0) = 0.5;
    const IrfResult r1 = irf(scalar, {{}, 30, {}, false});
    double worst_exact = 0.0;
    for (int h = 0; h <= 30; ++h) worst_exact = std::max(worst_exact, std::abs(r1.responses[h](0, 0) - std::pow(0.5, h)));

    MsVarSpec s2;
    s2.n_vars = 2;
    s2.n_regimes = 1;
    MsVarParams biv = MsVarParams::zeros(s2);
    biv.lag_matrices[0] << 0.5, 0.2, -0.3, 0.4;
    biv.covariances[0] << 1.0, 0.4, 0.4, 0.8;
    const IrfResult r2 = irf(biv, {{}, 10, {}, false});
    Rng rng(7007);
    const SimulatedIrf sim = simulate_irf(biv.lag_matrices[0], biv.covariances[0], 10, 200000, rng);
    double worst_z = 0.0;
    for (int h = 0; h <= 10; ++h)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double se = sim.se[h](i, j);
                const double diff = std::abs(sim.mean[h](i, j) - r2.responses[h](i, j));
                worst_z = std::max(worst_z, se > 0.0 ? diff / se : (diff > 1e-12 ? 1e9 : 0.0));
            }
    return {worst_exact <= 1e-12 && worst_z <= 3.0,
            fmt("scalar max error %.2e (tol 1e-12); simulation max |z| %.2f (tol 3)", worst_exact, worst_z)};
}

// 8. Size at 5% over 1000 replications (T = 200, N = 8) and Engle-Granger classification.
Outcome test_calibration() {
    constexpr int reps = 1000;
    struct Rejections {
        int adf = 0, pp = 0, llc = 0, breitung = 0, ips = 0;
    };
    const auto per_rep = parallel_map(reps, worker_count(), [](std::size_t r) {
        Rng rng(derive_seed(8008, r));
        const auto panel = ar_panel(rng, 1.0, 200, 8);
        Rejections x;
        x.adf = adf_test(panel[0]).p_value < 0.05;
        x.pp = pp_test(panel[0]).p_value < 0.05;
        x.llc = llc_test(panel).p_value < 0.05;
        x.breitung = breitung_test(panel).p_value < 0.05;
        x.ips = ips_test(panel).p_value < 0.05;
        return x;
    });
    Rejections total;
    for (const auto& x : per_rep) {
        total.adf += x.adf;
        total.pp += x.pp;
        total.llc += x.llc;
        total.breitung += x.breitung;
        total.ips += x.ips;
    }
    const auto in_band = [](int k) { return k >= 30 && k <= 70; };
    const bool sizes_ok = in_band(total.adf) && in_band(total.pp) && in_band(total.llc) && in_band(total.breitung) &&
                          in_band(total.ips);

    int coint_found = 0, walks_kept = 0;
    for (int s = 0; s < 100; ++s) {
        Rng rng(derive_seed(8108, static_cast<std::uint64_t>(s)));
        std::vector<double> x(200), y(200);
        double w = 0.0;
        for (int t = 0; t < 200; ++t) {
            w += rng.normal();
            x[t] = w;
            y[t] = 1.0 + 2.0 * w + rng.normal();
        }
        coint_found += engle_granger(TimeSeries("y", {2000, 1}, y), {TimeSeries("x", {2000, 1}, x)}).p_value < 0.05;
        const auto walks = ar_panel(rng, 1.0, 200, 2);
        walks_kept += engle_granger(walks[0], {walks[1]}).p_value >= 0.05;
    }
    return {sizes_ok && coint_found >= 90 && walks_kept >= 90,
            fmt("size ADF %.3f PP %.3f LLC %.3f Breitung %.3f IPS %.3f (band [0.03, 0.07]); "
                "EG cointegrated %d/100, independent %d/100 (need 90)",
                total.adf / 1000.0, total.pp / 1000.0, total.llc / 1000.0, total.breitung / 1000.0, total.ips / 1000.0,
                coint_found, walks_kept)};
}

// 9. Engle-Granger p-value with eight variables on 23 observations.
Outcome mackinnon_spot() {
    const double p = mackinnon_pvalue(-9.14, 8, DeterministicSpec::constant, 23);
    return {p <= 0.001 && std::abs(p - 0.0008) <= 5e-4, fmt("p = %.6f (need <= 0.001 and 0.0008 +- 5e-4)", p)};
}

// 10. cmd_fit outputs identical across runs and thread counts.
std::string eight_variable_panel() {
    const char* vars[] = {"HC", "HDI", "CGD", "EXP", "REV", "SUB"};
    std::ostringstream out;
    out.precision(17);
    out << "entity,period,variable,value\n";
    for (const char* entity : {"HR", "PL"}) {
        Rng rng(derive_seed(1010, entity[0]));
        std::vector<std::vector<double>> v(6, std::vector<double>(64));
        for (std::size_t k = 0; k < 6; ++k) {
            double x = 0.0;
            for (int t = 0; t < 64; ++t) {
                x = 0.6 * x + rng.normal();
                v[k][t] = 100.0 + 5.0 * static_cast<double>(k) + 0.5 * static_cast<double>(t) + x;
            }
        }
        Period p{2005, 1};
        for (int t = 0; t < 64; ++t, p = p.shifted(1)) {
            for (std::size_t k = 0; k < 6; ++k) out << entity << ',' << p.to_string() << ',' << vars[k] << ',' << v[k][t] << '\n';
            out << entity << ',' << p.to_string() << ",RATE," << 0.01 + 0.002 * rng.normal() << '\n';
            out << entity << ',' << p.to_string() << ",COVID," << (t >= 56 ? 1 : 0) << '\n';
        }
    }
    return out.str();
}

Outcome fit_determinism() {
    const fs::path dir = fs::temp_directory_path() / "msvar_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "panel.csv") << eight_variable_panel();
    std::vector<fs::path> runs;
    for (auto [name, threads] : {std::pair{"run_a", 1}, {"run_b", 1}, {"run_c", 8}}) {
        PipelineConfig c = make_config({{"input", (dir / "panel.csv").string()},
                                        {"out_dir", (dir / name).string()},
                                        {"threads", std::to_string(threads)}});
        const CommandOutcome r = cmd_fit(c);
        if (r.exit_code() != 0) return {false, "cmd_fit failed: " + r.errors.front()};
        runs.push_back(dir / name);
    }
    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    };
    int files = 0, mismatches = 0;
    for (const auto& e : fs::recursive_directory_iterator(runs[0])) {
        if (!e.is_regular_file()) continue;
        ++files;
        const std::string ref = slurp(e.path());
        for (std::size_t k = 1; k < runs.size(); ++k)
            mismatches += slurp(runs[k] / fs::relative(e.path(), runs[0])) != ref;
    }
    return {files > 0 && mismatches == 0,
            fmt("%d files compared across 2 repeat runs and threads 1 vs 8, %d mismatches", files, mismatches)};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "information-criteria fixtures", 0.001, info_criteria_fixtures},
        {2, "Fisher fixture", 0.001, fisher_fixture},
        {3, "filter/smoother path-enumeration oracle", 5.0, filter_oracle},
        {4, "EM monotonicity", 60.0, em_monotonicity},
        {5, "parameter recovery", 120.0, parameter_recovery},
        {6, "FEVD structure", 1.0, fevd_structure},
        {7, "IRF oracles", 30.0, irf_oracles},
        {8, "test calibration", 600.0, test_calibration},
        {9, "MacKinnon spot check", 1.0, mackinnon_spot},
        {10, "fit determinism", 600.0, fit_determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.budget_seconds;
        const bool pass = o.pass && in_time;
        failures += !pass;
        std::printf("%s criterion %d (%s): %s; %.3f s (budget %g s%s)\n", pass ? "PASS" : "FAIL", c.id, c.title,
                    o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", exceeded");
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
