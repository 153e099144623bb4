#include "msvar/synthetic_lab.hpp"

#include "msvar/error.hpp"
#include "msvar/hamilton_filter.hpp"
#include "msvar/numerics.hpp"
#include "msvar/parallel.hpp"
#include "msvar/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace msvar {

void DgpConfig::validate() const {
    spec.validate();
    check_params(true_params, spec);
    if (T <= 0) throw Error(ErrorKind::InvalidArgument, "T must be positive");
    if (burn_in < 0) throw Error(ErrorKind::InvalidArgument, "burn_in must be non-negative");
    if (exog.kind == ExogPattern::Kind::custom && exog.values.size() != T)
        throw Error(ErrorKind::ShapeMismatch, "custom exogenous path must have length T");
    if (exog.kind == ExogPattern::Kind::step && (exog.t0 < 0 || exog.t1 < exog.t0))
        throw Error(ErrorKind::InvalidArgument, "step pattern needs 0 <= t0 <= t1");
    for (const auto& c : true_params.covariances) (void)cholesky_lower(c);
}

DgpConfig recovery_preset(std::uint64_t seed) {
    DgpConfig c;
    c.spec.n_vars = 3;
    c.spec.n_regimes = 3;
    c.spec.n_lags = 1;
    c.spec.has_exog_dummy = false;
    auto& p = c.true_params;
    p = MsVarParams::zeros(c.spec);
    p.intercepts[0] << 0.0, 0.0, 0.0;
    p.intercepts[1] << 1.0, -0.5, 0.5;
    p.intercepts[2] << -1.0, 1.0, 1.0;
    p.lag_matrices[0] = 0.8 * Eigen::MatrixXd::Identity(3, 3);
    p.lag_matrices[0](0, 1) = 0.1;
    p.lag_matrices[0](2, 0) = -0.1;
    for (int s = 0; s < 3; ++s) {
        const double sd = 0.1 * (1.0 + 0.3 * s);
        p.covariances[s] = sd * sd * Eigen::MatrixXd::Identity(3, 3);
    }
    Eigen::MatrixXd trans = Eigen::MatrixXd::Constant(3, 3, 0.025);
    trans.diagonal().setConstant(0.95);
    p.transition_logits = transition_logits(trans);
    c.T = 400;
    c.burn_in = 100;
    c.seed = seed;
    return c;
}

SimulatedData simulate(const DgpConfig& config) {
    config.validate();
    const auto& p = config.true_params;
    const int n = p.n_vars();
    const int lags = p.n_lags();
    const int r = p.n_regimes();
    const int total = config.burn_in + config.T;

    Eigen::VectorXd exog = Eigen::VectorXd::Zero(config.T);
    if (config.exog.kind == ExogPattern::Kind::step) {
        for (int t = config.exog.t0; t <= config.exog.t1 && t < config.T; ++t) exog(t) = 1.0;
    } else if (config.exog.kind == ExogPattern::Kind::custom) {
        exog = config.exog.values;
    }

    std::vector<Eigen::MatrixXd> chol;
    for (const auto& c : p.covariances) chol.push_back(cholesky_lower(c));
    const Eigen::MatrixXd trans = transition_matrix(p.transition_logits);
    const Eigen::VectorXd pi = ergodic_distribution(trans);

    Rng rng(config.seed);
    SimulatedData out{Eigen::MatrixXd(config.T, n), exog, std::vector<int>(static_cast<std::size_t>(config.T))};
    std::vector<Eigen::VectorXd> history(static_cast<std::size_t>(lags), Eigen::VectorXd::Zero(n));  // y_{t-1} first
    std::vector<double> probs(static_cast<std::size_t>(r));
    int state = 0;
    Eigen::VectorXd z(n);
    for (int t = 0; t < total; ++t) {
        for (int s = 0; s < r; ++s) probs[s] = t == 0 ? pi(s) : trans(state, s);
        state = static_cast<int>(rng.categorical(probs));
        for (int i = 0; i < n; ++i) z(i) = rng.normal();
        const int kept = t - config.burn_in;
        const double x = kept >= 0 ? exog(kept) : 0.0;
        Eigen::VectorXd y = p.intercepts[state] + p.exog_loadings[state] * x + chol[state] * z;
        for (int l = 0; l < lags; ++l) y += p.lag_matrices[l] * history[l];
        if (lags > 0) {
            std::rotate(history.rbegin(), history.rbegin() + 1, history.rend());
            history[0] = y;
        }
        if (kept >= 0) {
            out.data.row(kept) = y.transpose();
            out.true_regimes[kept] = state;
        }
    }
    return out;
}

namespace {

Eigen::VectorXd switching_means(const MsVarParams& p, const MsVarSpec& spec, int s) {
    std::vector<double> v;
    if (spec.include_intercept && spec.switching.intercept)
        v.insert(v.end(), p.intercepts[s].data(), p.intercepts[s].data() + p.intercepts[s].size());
    if (spec.has_exog_dummy && spec.switching.exog_loading)
        v.insert(v.end(), p.exog_loadings[s].data(), p.exog_loadings[s].data() + p.exog_loadings[s].size());
    if (v.empty() && spec.switching.covariance) {
        const Eigen::MatrixXd& c = p.covariances[s];
        for (Eigen::Index i = 0; i < c.rows(); ++i)
            for (Eigen::Index j = 0; j <= i; ++j) v.push_back(c(i, j));
    }
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<int> ranking(const std::vector<double>& key) {
    std::vector<int> order(key.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key[a] < key[b]; });
    return order;
}

BlockError block_error(const std::vector<Eigen::MatrixXd>& fitted, const std::vector<Eigen::MatrixXd>& truth) {
    BlockError e;
    double ss = 0.0;
    std::size_t count = 0;
    for (std::size_t b = 0; b < truth.size(); ++b) {
        const Eigen::MatrixXd d = fitted[b] - truth[b];
        if (d.size() == 0) continue;
        e.max_abs = std::max(e.max_abs, d.cwiseAbs().maxCoeff());
        ss += d.squaredNorm();
        count += static_cast<std::size_t>(d.size());
    }
    e.rmse = count ? std::sqrt(ss / static_cast<double>(count)) : 0.0;
    return e;
}

template <class V>
std::vector<Eigen::MatrixXd> as_matrices(const std::vector<V>& v) {
    return {v.begin(), v.end()};
}

bool regimes_identical(const MsVarParams& p) {
    for (int s = 1; s < p.n_regimes(); ++s) {
        if ((p.intercepts[s] - p.intercepts[0]).cwiseAbs().maxCoeff() > 1e-12) return false;
        if ((p.exog_loadings[s] - p.exog_loadings[0]).cwiseAbs().maxCoeff() > 1e-12) return false;
        if ((p.covariances[s] - p.covariances[0]).cwiseAbs().maxCoeff() > 1e-12) return false;
    }
    return true;
}

ReplicationResult run_replication(const DgpConfig& config, const FitOptions& fit_options, int index) {
    ReplicationResult res;
    res.index = index;
    res.seed = derive_seed(config.seed, static_cast<std::uint64_t>(index));
    DgpConfig cfg = config;
    cfg.seed = res.seed;
    const SimulatedData sim = simulate(cfg);
    FitOptions opts = fit_options;
    opts.threads = 1;
    FitResult f;
    try {
        f = fit(sim.data, cfg.spec.has_exog_dummy ? sim.exog : Eigen::VectorXd(), cfg.spec, opts);
    } catch (const Error& e) {
        res.error = e.what();
        return res;
    }
    const auto& truth = cfg.true_params;
    res.ok = true;
    res.status = f.convergence.status;
    res.alignment = align_regimes(f.params, truth, cfg.spec);
    const MsVarParams aligned = permute_regimes(f.params, res.alignment);

    res.intercepts = block_error(as_matrices(aligned.intercepts), as_matrices(truth.intercepts));
    res.exog_loadings = block_error(as_matrices(aligned.exog_loadings), as_matrices(truth.exog_loadings));
    res.lag_matrices = block_error(aligned.lag_matrices, truth.lag_matrices);
    res.covariances = block_error(aligned.covariances, truth.covariances);
    res.transition = block_error({transition_matrix(aligned.transition_logits)}, {transition_matrix(truth.transition_logits)});

    const int lags = cfg.spec.n_lags;
    int correct = 0;
    for (std::size_t t = 0; t < f.regimes.size(); ++t)
        correct += f.regimes[t] == res.alignment[static_cast<std::size_t>(sim.true_regimes[t + static_cast<std::size_t>(lags)])];
    res.accuracy = f.regimes.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(f.regimes.size());

    const Design design = make_design(sim.data, cfg.spec.has_exog_dummy ? sim.exog : Eigen::VectorXd(), lags);
    res.fitted_loglik = f.loglik;
    res.true_loglik = hamilton_filter(design, truth).loglik;
    res.loglik_gap = res.fitted_loglik - res.true_loglik;
    return res;
}

nlohmann::json block_json(const BlockError& e) { return {{"max_abs", e.max_abs}, {"rmse", e.rmse}}; }

}  // namespace

std::vector<int> align_regimes(const MsVarParams& fitted, const MsVarParams& truth, const MsVarSpec& spec) {
    const int r = truth.n_regimes();
    if (spec.has_exog_dummy && spec.switching.exog_loading) {
        std::vector<double> tk, fk;
        for (int s = 0; s < r; ++s) {
            tk.push_back(truth.exog_loadings[s](0));
            fk.push_back(fitted.exog_loadings[s](0));
        }
        std::vector<double> sorted = tk;
        std::sort(sorted.begin(), sorted.end());
        bool distinct = true;
        for (int s = 1; s < r; ++s) distinct = distinct && sorted[s] - sorted[s - 1] > 1e-8;
        if (distinct) {
            const std::vector<int> tr = ranking(tk), fr = ranking(fk);
            std::vector<int> order(static_cast<std::size_t>(r));
            for (int k = 0; k < r; ++k) order[tr[k]] = fr[k];
            return order;
        }
    }
    std::vector<int> perm(static_cast<std::size_t>(r)), best;
    std::iota(perm.begin(), perm.end(), 0);
    double best_d = std::numeric_limits<double>::infinity();
    do {
        double d = 0.0;
        for (int s = 0; s < r; ++s) d += (switching_means(fitted, spec, perm[s]) - switching_means(truth, spec, s)).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

RecoveryReport recovery_experiment(const DgpConfig& config, const FitOptions& fit_options, int n_replications,
                                   std::size_t threads) {
    config.validate();
    if (n_replications < 1) throw Error(ErrorKind::InvalidArgument, "n_replications must be positive");
    RecoveryReport rep;
    rep.replications = parallel_map(static_cast<std::size_t>(n_replications), threads,
                                    [&](std::size_t i) { return run_replication(config, fit_options, static_cast<int>(i)); });
    rep.identifiable = config.true_params.n_regimes() == 1 || !regimes_identical(config.true_params);
    int ok = 0;
    auto add = [](BlockError& acc, const BlockError& e) {
        acc.max_abs += e.max_abs;
        acc.rmse += e.rmse;
    };
    for (const auto& r : rep.replications) {
        if (!r.ok) {
            ++rep.n_failed;
            continue;
        }
        ++ok;
        rep.mean_accuracy += r.accuracy;
        add(rep.mean_intercepts, r.intercepts);
        add(rep.mean_exog_loadings, r.exog_loadings);
        add(rep.mean_lag_matrices, r.lag_matrices);
        add(rep.mean_covariances, r.covariances);
        add(rep.mean_transition, r.transition);
    }
    if (ok > 0) {
        const double d = ok;
        rep.mean_accuracy /= d;
        for (BlockError* b : {&rep.mean_intercepts, &rep.mean_exog_loadings, &rep.mean_lag_matrices, &rep.mean_covariances,
                              &rep.mean_transition}) {
            b->max_abs /= d;
            b->rmse /= d;
        }
    }
    return rep;
}

std::string recovery_json(const RecoveryReport& report) {
    nlohmann::json j;
    j["identifiable"] = report.identifiable;
    j["n_replications"] = report.replications.size();
    j["n_failed"] = report.n_failed;
    j["mean_accuracy"] = report.mean_accuracy;
    j["mean_errors"] = {{"intercepts", block_json(report.mean_intercepts)},
                        {"exog_loadings", block_json(report.mean_exog_loadings)},
                        {"lag_matrices", block_json(report.mean_lag_matrices)},
                        {"covariances", block_json(report.mean_covariances)},
                        {"transition", block_json(report.mean_transition)}};
    nlohmann::json reps = nlohmann::json::array();
    for (const auto& r : report.replications) {
        nlohmann::json x;
        x["index"] = r.index;
        x["seed"] = r.seed;
        x["ok"] = r.ok;
        if (!r.ok) {
            x["error"] = r.error;
        } else {
            x["status"] = r.status;
            x["alignment"] = r.alignment;
            x["accuracy"] = r.accuracy;
            x["fitted_loglik"] = r.fitted_loglik;
            x["true_loglik"] = r.true_loglik;
            x["loglik_gap"] = r.loglik_gap;
            x["errors"] = {{"intercepts", block_json(r.intercepts)},
                           {"exog_loadings", block_json(r.exog_loadings)},
                           {"lag_matrices", block_json(r.lag_matrices)},
                           {"covariances", block_json(r.covariances)},
                           {"transition", block_json(r.transition)}};
        }
        reps.push_back(std::move(x));
    }
    j["replications"] = reps;
    return j.dump(2) + "\n";
}

std::string recovery_csv(const RecoveryReport& report) {
    std::ostringstream out;
    out << "replication,seed,ok,accuracy,loglik_gap,intercepts_max,intercepts_rmse,exog_max,exog_rmse,lags_max,lags_rmse,"
           "cov_max,cov_rmse,transition_max,transition_rmse,status\n";
    for (const auto& r : report.replications) {
        out << r.index << ',' << r.seed << ',' << (r.ok ? 1 : 0);
        if (r.ok) {
            out << ',' << format_g17(r.accuracy) << ',' << format_g17(r.loglik_gap);
            for (const BlockError* b : {&r.intercepts, &r.exog_loadings, &r.lag_matrices, &r.covariances, &r.transition})
                out << ',' << format_g17(b->max_abs) << ',' << format_g17(b->rmse);
            out << ',' << r.status << '\n';
        } else {
            out << ",NA,NA,NA,NA,NA,NA,NA,NA,NA,NA,NA,NA,failed\n";
        }
    }
    return out.str();
}

}  // namespace msvar
