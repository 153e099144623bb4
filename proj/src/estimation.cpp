#include "msvar/estimation.hpp"

#include "msvar/error.hpp"
#include "msvar/numerics.hpp"
#include "msvar/parallel.hpp"
#include "msvar/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

namespace msvar {

namespace {

constexpr double kDegenerateWeight = 1e-6;
constexpr double kProximalScale = 1e-10;
constexpr double kProximalTrigger = 1e-12;
constexpr double kRidgeTrigger = 1e-10;
constexpr double kRidgeScale = 1e-8;

Eigen::MatrixXd residuals(const Design& d, const CoefficientLayout& layout, const MsVarParams& p, int s) {
    return d.y - d.x * layout.coefficients(p, s).transpose();
}

// Weighted least squares for the free mean coefficients given fixed
// covariances. When the normal equations are near-singular a proximal term
// eps |theta - theta_old|^2 keeps unidentified directions at their old values.
Eigen::VectorXd solve_mean(const Design& d, const CoefficientLayout& layout, const Eigen::MatrixXd& weights,
                           const std::vector<Eigen::MatrixXd>& sigma_inv, const Eigen::VectorXd& theta_old) {
    const int n = layout.spec().n_vars;
    const int k = layout.n_regressors();
    const int m = layout.n_mean();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
    for (int s = 0; s < layout.spec().n_regimes; ++s) {
        const Eigen::MatrixXd wx = d.x.array().colwise() * weights.col(s).array();
        const Eigen::MatrixXd sxx = d.x.transpose() * wx;
        const Eigen::MatrixXd sxy = wx.transpose() * d.y;
        const Eigen::MatrixXd rhs = sxy * sigma_inv[s];  // k x n
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < k; ++c) {
                const int a = layout.index(s, i, c);
                if (a < 0) continue;
                g(a) += rhs(c, i);
                for (int j = 0; j < n; ++j)
                    for (int e = 0; e < k; ++e) {
                        const int b = layout.index(s, j, e);
                        if (b >= 0) h(a, b) += sigma_inv[s](i, j) * sxx(c, e);
                    }
            }
    }
    if (m == 0) return {};
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.rcond() > kProximalTrigger) {
        Eigen::VectorXd theta = ldlt.solve(g);
        if (theta.allFinite()) return theta;
    }
    const double eps = kProximalScale * std::max(h.trace() / m, 1e-300);
    h.diagonal().array() += eps;
    g += eps * theta_old;
    ldlt.compute(h);
    Eigen::VectorXd theta = ldlt.solve(g);
    if (ldlt.info() != Eigen::Success || !theta.allFinite())
        theta = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(h).solve(g);
    return theta;
}

bool needs_ridge(const Eigen::MatrixXd& sigma) {
    const double scale = sigma.trace() / static_cast<double>(sigma.rows());
    const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sigma, Eigen::EigenvaluesOnly).eigenvalues()(0);
    return !(min_eig > kRidgeTrigger * scale);
}

Eigen::MatrixXd with_ridge(Eigen::MatrixXd sigma) {
    sigma = 0.5 * (sigma + sigma.transpose());
    if (needs_ridge(sigma))
        sigma.diagonal().array() += kRidgeScale * std::max(sigma.trace() / static_cast<double>(sigma.rows()), 1e-300);
    return sigma;
}

// Expected complete-data log-likelihood of one covariance block, up to constants.
double covariance_objective(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& z, double w) {
    const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return -0.5 * (w * log_det + llt.solve(z).trace());
}

// M-step covariance z / w. A near-singular estimate gets the ridge; when
// the ridged matrix scores below the previous covariance the previous one is
// kept, so the update never lowers the expected log-likelihood.
Eigen::MatrixXd covariance_step(const Eigen::MatrixXd& z, double w, const Eigen::MatrixXd& previous) {
    const Eigen::MatrixXd raw = 0.5 * (z + z.transpose()) / w;
    if (!needs_ridge(raw)) return raw;
    const Eigen::MatrixXd sigma = with_ridge(raw);
    return covariance_objective(sigma, z, w) >= covariance_objective(previous, z, w) ? sigma : previous;
}

// Weighted residual cross-products per regime.
struct Moments {
    std::vector<Eigen::MatrixXd> z;
    std::vector<double> w;
};

Moments residual_moments(const Design& d, const CoefficientLayout& layout, const MsVarParams& p,
                         const Eigen::MatrixXd& weights) {
    Moments m;
    for (int s = 0; s < layout.spec().n_regimes; ++s) {
        const Eigen::MatrixXd e = residuals(d, layout, p, s);
        m.z.push_back(e.transpose() * (e.array().colwise() * weights.col(s).array()).matrix());
        m.w.push_back(weights.col(s).sum());
    }
    return m;
}

std::vector<Eigen::MatrixXd> covariance_update(const CoefficientLayout& layout, const Moments& m,
                                               const std::vector<Eigen::MatrixXd>& previous) {
    const int r = layout.spec().n_regimes;
    std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(r));
    if (layout.spec().switching.covariance) {
        for (int s = 0; s < r; ++s) out[s] = covariance_step(m.z[s], m.w[s], previous[s]);
    } else {
        Eigen::MatrixXd z = Eigen::MatrixXd::Zero(m.z[0].rows(), m.z[0].cols());
        double w = 0.0;
        for (int s = 0; s < r; ++s) {
            z += m.z[s];
            w += m.w[s];
        }
        const Eigen::MatrixXd pooled = covariance_step(z, w, previous[0]);
        for (int s = 0; s < r; ++s) out[s] = pooled;
    }
    return out;
}

// d/dP of sum_s xi1(s) log pi_s(P) where pi is the ergodic distribution;
// zero when the chain falls back to the uniform start.
Eigen::MatrixXd initial_term_gradient(const Eigen::MatrixXd& trans, const Eigen::VectorXd& xi1) {
    const auto r = trans.rows();
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(r, r);
    if (r == 1) return grad;
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(r, r) - trans.transpose();
    a.row(r - 1).setOnes();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) return grad;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(r);
    rhs(r - 1) = 1.0;
    const Eigen::VectorXd pi = lu.solve(rhs);
    if (!pi.allFinite() || pi.minCoeff() < -1e-10) return grad;
    Eigen::VectorXd ratio(r);
    for (Eigen::Index s = 0; s < r; ++s) ratio(s) = xi1(s) > 0.0 ? xi1(s) / std::max(pi(s), 1e-300) : 0.0;
    // d pi / d P_ij = pi_i * A^{-1} e_j for j < R-1.
    const Eigen::VectorXd v = lu.inverse().transpose() * ratio;
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j + 1 < r; ++j) grad(i, j) = pi(i) * v(j);
    return grad;
}

// Chain rule from dF/dP (given as counts N plus a dense extra term G) to the logits.
Eigen::MatrixXd logit_gradient(const Eigen::MatrixXd& trans, const Eigen::MatrixXd& counts, const Eigen::MatrixXd& extra) {
    const auto r = trans.rows();
    Eigen::MatrixXd out(r, r - 1);
    for (Eigen::Index i = 0; i < r; ++i) {
        const double row_count = counts.row(i).sum();
        const double extra_mean = extra.row(i).dot(trans.row(i));
        for (Eigen::Index m = 0; m + 1 < r; ++m)
            out(i, m) = counts(i, m) - row_count * trans(i, m) + trans(i, m) * (extra(i, m) - extra_mean);
    }
    return out;
}

double transition_objective(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& counts, const Eigen::VectorXd& xi1) {
    const Eigen::MatrixXd log_p = log_transition_matrix(logits);
    double f = 0.0;
    for (Eigen::Index i = 0; i < counts.rows(); ++i)
        for (Eigen::Index j = 0; j < counts.cols(); ++j)
            if (counts(i, j) > 0.0) f += counts(i, j) * log_p(i, j);
    const Eigen::VectorXd pi = ergodic_distribution(log_p.array().exp());
    for (Eigen::Index s = 0; s < xi1.size(); ++s)
        if (xi1(s) > 0.0) f += xi1(s) * std::log(pi(s));
    return std::isfinite(f) ? f : -std::numeric_limits<double>::infinity();
}

Eigen::MatrixXd transition_update(const Eigen::MatrixXd& old_logits, const Eigen::MatrixXd& counts, const Eigen::VectorXd& xi1) {
    const auto r = counts.rows();
    if (r == 1) return old_logits;
    // Closed-form candidate ignoring the initial term.
    Eigen::MatrixXd freq = counts.array() + 1e-10;
    for (Eigen::Index i = 0; i < r; ++i) freq.row(i) /= freq.row(i).sum();
    Eigen::MatrixXd best = transition_logits(freq);
    double best_f = transition_objective(best, counts, xi1);
    const double old_f = transition_objective(old_logits, counts, xi1);
    if (old_f >= best_f) {
        best = old_logits;
        best_f = old_f;
    }
    double step = 1.0 / std::max(1.0, counts.sum());
    for (int it = 0; it < 100; ++it) {
        const Eigen::MatrixXd trans = transition_matrix(best);
        const Eigen::MatrixXd g = logit_gradient(trans, counts, initial_term_gradient(trans, xi1));
        if (g.cwiseAbs().maxCoeff() < 1e-10) break;
        bool improved = false;
        for (int tries = 0; tries < 40 && !improved; ++tries) {
            const Eigen::MatrixXd trial = best + step * g;
            const double f = trans.allFinite() && trial.allFinite() ? transition_objective(trial, counts, xi1)
                                                                   : -std::numeric_limits<double>::infinity();
            if (f > best_f) {
                best = trial;
                best_f = f;
                improved = true;
                step *= 2.0;
            } else {
                step *= 0.25;
            }
        }
        if (!improved) break;
    }
    return best;
}

}  // namespace

EmUpdate em_update(const Design& design, const CoefficientLayout& layout, const MsVarParams& params) {
    const MsVarSpec& spec = layout.spec();
    const FilterOutput filter = hamilton_filter(design, params);
    const Eigen::MatrixXd& w = filter.smoothed;
    for (int s = 0; s < spec.n_regimes; ++s)
        if (w.col(s).sum() < kDegenerateWeight)
            throw Error(ErrorKind::DegenerateRegime, "regime " + std::to_string(s + 1) + " has vanishing smoothed weight");
    const Eigen::MatrixXd trans = transition_matrix(params.transition_logits);

    MsVarParams next = params;
    std::vector<Eigen::MatrixXd> sigma_inv;
    for (const auto& c : params.covariances) sigma_inv.push_back(c.ldlt().solve(Eigen::MatrixXd::Identity(c.rows(), c.cols())));
    layout.set_mean_vector(next, solve_mean(design, layout, w, sigma_inv, layout.mean_vector(params)));
    next.covariances = covariance_update(layout, residual_moments(design, layout, next, w), params.covariances);
    next.transition_logits =
        transition_update(params.transition_logits, smoothed_transition_counts(filter, trans), w.row(0).transpose());
    return {std::move(next), filter.loglik};
}

MsVarParams em_step(const Eigen::MatrixXd& data, const Eigen::VectorXd& exog, const MsVarParams& params,
                    const MsVarSpec& spec) {
    const CoefficientLayout layout(spec);
    check_params(params, spec);
    return em_update(make_design(data, exog, spec.n_lags), layout, params).params;
}

LoglikGradient loglik_gradient(const Design& design, const CoefficientLayout& layout, const Eigen::VectorXd& packed) {
    const MsVarSpec& spec = layout.spec();
    const int n = spec.n_vars;
    const int r = spec.n_regimes;
    const int k = layout.n_regressors();
    const MsVarParams p = layout.unpack(packed);
    const FilterOutput filter = hamilton_filter(design, p);
    const Eigen::MatrixXd& w = filter.smoothed;

    LoglikGradient out;
    out.loglik = filter.loglik;
    out.gradient = Eigen::VectorXd::Zero(layout.size());

    // Mean coefficients: sum_t w (Sigma^{-1} e)_i x_c.
    std::vector<Eigen::MatrixXd> e(static_cast<std::size_t>(r));
    for (int s = 0; s < r; ++s) {
        e[s] = residuals(design, layout, p, s);
        const Eigen::MatrixXd sinv_e = p.covariances[s].ldlt().solve(e[s].transpose());  // n x T
        const Eigen::MatrixXd score = (design.x.array().colwise() * w.col(s).array()).matrix().transpose() *
                                      sinv_e.transpose();  // k x n
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < k; ++c)
                if (const int a = layout.index(s, i, c); a >= 0) out.gradient(a) += score(c, i);
    }

    // Cholesky factors with log diagonal.
    int pos = layout.n_mean();
    for (int b = 0; b < layout.n_cov_blocks(); ++b) {
        Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, n);
        double wsum = 0.0;
        for (int s = 0; s < r; ++s) {
            if (layout.cov_block(s) != b) continue;
            z += e[s].transpose() * (e[s].array().colwise() * w.col(s).array()).matrix();
            wsum += w.col(s).sum();
        }
        const Eigen::MatrixXd& sigma = p.covariances[b];
        const Eigen::MatrixXd l = cholesky_lower(sigma);
        const Eigen::MatrixXd sinv = sigma.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
        const Eigen::MatrixXd g_sigma = 0.5 * (sinv * z * sinv - wsum * sinv);
        const Eigen::MatrixXd g_l = 2.0 * g_sigma * l;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) out.gradient(pos++) = i == j ? g_l(i, i) * l(i, i) : g_l(i, j);
    }

    if (r > 1) {
        const Eigen::MatrixXd trans = transition_matrix(p.transition_logits);
        const Eigen::MatrixXd counts = smoothed_transition_counts(filter, trans);
        const Eigen::MatrixXd g = logit_gradient(trans, counts, initial_term_gradient(trans, w.row(0).transpose()));
        for (int i = 0; i < r; ++i)
            for (int j = 0; j + 1 < r; ++j) out.gradient(pos++) = g(i, j);
    }
    return out;
}

MsVarParams permute_regimes(const MsVarParams& params, const std::vector<int>& order) {
    const int r = params.n_regimes();
    if (static_cast<int>(order.size()) != r) throw Error(ErrorKind::InvalidArgument, "permutation size differs from regime count");
    MsVarParams out = params;
    const Eigen::MatrixXd log_p = log_transition_matrix(params.transition_logits);
    for (int a = 0; a < r; ++a) {
        out.intercepts[a] = params.intercepts[order[a]];
        out.exog_loadings[a] = params.exog_loadings[order[a]];
        out.covariances[a] = params.covariances[order[a]];
        for (int b = 0; b + 1 < r; ++b)
            out.transition_logits(a, b) = log_p(order[a], order[b]) - log_p(order[a], order[r - 1]);
    }
    return out;
}

std::vector<int> reporting_order(const MsVarParams& params, const MsVarSpec& spec) {
    const int r = params.n_regimes();
    std::vector<double> key(static_cast<std::size_t>(r));
    for (int s = 0; s < r; ++s) {
        if (spec.has_exog_dummy && spec.switching.exog_loading) key[s] = params.exog_loadings[s](0);
        else if (spec.include_intercept && spec.switching.intercept) key[s] = params.intercepts[s](0);
        else key[s] = params.covariances[s](0, 0);
    }
    std::vector<int> order(static_cast<std::size_t>(r));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key[a] < key[b]; });
    return order;
}

FitResult evaluate_fit(const Design& design, const MsVarSpec& spec, const MsVarParams& params) {
    const CoefficientLayout layout(spec);
    FitResult res;
    res.spec = spec;
    res.params = params;
    res.filter = hamilton_filter(design, params);
    res.regimes = regime_classify(res.filter);
    res.loglik = res.filter.loglik;
    res.n_coefficients = count_coefficients(spec);
    res.n_obs = static_cast<int>(design.y.rows());
    const InfoCriteria ic = info_criteria(res.loglik, res.n_coefficients, res.n_obs);
    res.aic = ic.aic;
    res.schwarz = ic.schwarz;
    const Moments m = residual_moments(design, layout, params, res.filter.smoothed);
    Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(spec.n_vars, spec.n_vars);
    for (const auto& z : m.z) pooled += z;
    pooled /= static_cast<double>(res.n_obs);
    const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(pooled, Eigen::EigenvaluesOnly).eigenvalues();
    res.log_det_resid_cov = eig.minCoeff() > 0.0 ? eig.array().log().sum() : -std::numeric_limits<double>::infinity();
    return res;
}

// ---------------------------------------------------------------------------
// Fitting

namespace {

struct StartResult {
    MsVarParams params;
    double loglik = -std::numeric_limits<double>::infinity();
    Convergence convergence;
    std::optional<Error> error;
};

std::vector<int> pc_quantile_labels(const Eigen::MatrixXd& u, int r) {
    const auto t = u.rows();
    const Eigen::RowVectorXd mean = u.colwise().mean();
    const Eigen::MatrixXd c = u.rowwise() - mean;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.transpose() * c);
    Eigen::VectorXd dir = es.eigenvectors().col(es.eigenvectors().cols() - 1);
    // Fix the sign so the largest component is positive.
    Eigen::Index big = 0;
    dir.cwiseAbs().maxCoeff(&big);
    if (dir(big) < 0) dir = -dir;
    const Eigen::VectorXd score = c * dir;
    std::vector<int> idx(static_cast<std::size_t>(t));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return score(a) < score(b); });
    std::vector<int> labels(static_cast<std::size_t>(t));
    for (Eigen::Index rank = 0; rank < t; ++rank)
        labels[idx[rank]] = static_cast<int>(std::min<Eigen::Index>(r - 1, rank * r / t));
    return labels;
}

std::vector<int> kmeans_labels(const Eigen::MatrixXd& u, int r, std::uint64_t seed) {
    const auto t = u.rows();
    Eigen::RowVectorXd sd = ((u.rowwise() - u.colwise().mean()).array().square().colwise().sum() / static_cast<double>(t)).sqrt();
    for (Eigen::Index j = 0; j < sd.size(); ++j)
        if (!(sd(j) > 0.0)) sd(j) = 1.0;
    const Eigen::MatrixXd x = u.array().rowwise() / sd.array();
    Rng rng(seed);
    Eigen::MatrixXd centers(r, x.cols());
    centers.row(0) = x.row(static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::uint64_t>(t)));
    Eigen::VectorXd d2(t);
    for (int c = 1; c < r; ++c) {
        for (Eigen::Index i = 0; i < t; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int j = 0; j < c; ++j) best = std::min(best, (x.row(i) - centers.row(j)).squaredNorm());
            d2(i) = best;
        }
        const double total = d2.sum();
        Eigen::Index pick = 0;
        if (total > 0.0) {
            std::vector<double> probs(d2.data(), d2.data() + t);
            for (double& v : probs) v /= total;
            pick = static_cast<Eigen::Index>(rng.categorical(probs));
        } else {
            pick = static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::uint64_t>(t));
        }
        centers.row(c) = x.row(pick);
    }
    std::vector<int> labels(static_cast<std::size_t>(t), 0);
    for (int it = 0; it < 100; ++it) {
        bool changed = false;
        for (Eigen::Index i = 0; i < t; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < r; ++c) {
                const double dd = (x.row(i) - centers.row(c)).squaredNorm();
                if (dd < best_d) {
                    best_d = dd;
                    best = c;
                }
            }
            if (labels[i] != best) changed = true;
            labels[i] = best;
        }
        for (int c = 0; c < r; ++c) {
            Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(x.cols());
            int count = 0;
            for (Eigen::Index i = 0; i < t; ++i)
                if (labels[i] == c) {
                    sum += x.row(i);
                    ++count;
                }
            if (count > 0) centers.row(c) = sum / count;
        }
        if (!changed && it > 0) break;
    }
    return labels;
}

MsVarParams initial_params(const Design& d, const CoefficientLayout& layout, int start, std::uint64_t seed) {
    const MsVarSpec& spec = layout.spec();
    const int r = spec.n_regimes;
    const int n = spec.n_vars;
    const auto t = d.y.rows();
    MsVarParams p = MsVarParams::zeros(spec);

    // Pooled least squares: equal weights and identity covariances.
    const Eigen::MatrixXd equal = Eigen::MatrixXd::Constant(t, r, 1.0 / r);
    std::vector<Eigen::MatrixXd> identity(static_cast<std::size_t>(r), Eigen::MatrixXd::Identity(n, n));
    layout.set_mean_vector(p, solve_mean(d, layout, equal, identity, Eigen::VectorXd::Zero(layout.n_mean())));
    const Eigen::MatrixXd u = residuals(d, layout, p, 0);
    const Eigen::MatrixXd pooled_sigma = with_ridge(u.transpose() * u / static_cast<double>(t));
    if (r == 1) {
        p.covariances[0] = pooled_sigma;
        return p;
    }

    // Starts alternate between clustering levels (persistent mean shifts) and
    // pooled residuals (jumps); the first two are deterministic.
    const Eigen::MatrixXd& features = start % 2 == 0 ? d.y : u;
    const std::vector<int> labels = start < 2 ? pc_quantile_labels(features, r)
                                              : kmeans_labels(features, r, derive_seed(seed, static_cast<std::uint64_t>(start)));
    Eigen::MatrixXd hard = Eigen::MatrixXd::Zero(t, r);
    for (Eigen::Index i = 0; i < t; ++i) hard(i, labels[i]) = 1.0;
    // Empty clusters keep a sliver of weight so every regime stays identified.
    for (int s = 0; s < r; ++s)
        if (hard.col(s).sum() == 0.0) hard.col(s).setConstant(1.0 / static_cast<double>(t));

    const Eigen::MatrixXd pooled_inv = pooled_sigma.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
    std::vector<Eigen::MatrixXd> sinv(static_cast<std::size_t>(r), pooled_inv);
    layout.set_mean_vector(p, solve_mean(d, layout, hard, sinv, layout.mean_vector(p)));
    const Moments m = residual_moments(d, layout, p, hard);
    Eigen::MatrixXd z_all = Eigen::MatrixXd::Zero(n, n);
    for (int s = 0; s < r; ++s) z_all += m.z[s];
    for (int s = 0; s < r; ++s) {
        // Shrink small-cluster covariances toward the pooled estimate.
        p.covariances[s] = spec.switching.covariance
                               ? with_ridge((m.z[s] + n * pooled_sigma) / (m.w[s] + n))
                               : with_ridge(z_all / static_cast<double>(t));
    }
    Eigen::MatrixXd trans = Eigen::MatrixXd::Constant(r, r, 0.1 / (r - 1));
    trans.diagonal().setConstant(0.9);
    p.transition_logits = transition_logits(trans);
    return p;
}

struct QuasiNewtonResult {
    Eigen::VectorXd x;
    double loglik;
    double gradient_norm;
    int iterations;
    std::string status;
};

// Maximizes the loglik with BFGS curvature and Marquardt damping: steps solve
// (B + mu I) d = g, mu grows on rejected steps and shrinks on accepted ones.
QuasiNewtonResult quasi_newton(const Design& d, const CoefficientLayout& layout, Eigen::VectorXd x, int max_iter, double tol) {
    auto evaluate = [&](const Eigen::VectorXd& v) -> std::optional<LoglikGradient> {
        try {
            LoglikGradient lg = loglik_gradient(d, layout, v);
            if (!std::isfinite(lg.loglik) || !lg.gradient.allFinite()) return std::nullopt;
            return lg;
        } catch (const Error&) {
            return std::nullopt;
        }
    };
    auto cur = evaluate(x);
    if (!cur) throw Error(ErrorKind::NumericalUnderflow, "likelihood is not finite at the starting point");
    const auto dim = x.size();
    QuasiNewtonResult res{x, cur->loglik, dim ? cur->gradient.cwiseAbs().maxCoeff() : 0.0, 0, "converged"};
    if (dim == 0) return res;
    // Hessian approximation of the negative loglik.
    Eigen::MatrixXd b = Eigen::MatrixXd::Identity(dim, dim);
    bool scaled = false;
    double mu = 0.0;
    int it = 0;
    for (; it < max_iter; ++it) {
        const Eigen::VectorXd g = -cur->gradient;
        if (g.cwiseAbs().maxCoeff() < tol) break;
        bool accepted = false;
        for (int tries = 0; tries < 40; ++tries) {
            Eigen::MatrixXd damped = b;
            damped.diagonal().array() += mu;
            Eigen::LLT<Eigen::MatrixXd> llt(damped);
            if (llt.info() != Eigen::Success) {
                mu = mu == 0.0 ? 1e-3 : mu * 10.0;
                continue;
            }
            const Eigen::VectorXd step = -llt.solve(g);
            auto trial = evaluate(x + step);
            if (trial && trial->loglik > cur->loglik) {
                const Eigen::VectorXd y = -trial->gradient - g;
                const double sy = step.dot(y);
                if (sy > 1e-12 * step.norm() * y.norm()) {
                    if (!scaled) {
                        b = Eigen::MatrixXd::Identity(dim, dim) * (y.squaredNorm() / sy);
                        scaled = true;
                    }
                    const Eigen::VectorXd bs = b * step;
                    b += y * y.transpose() / sy - bs * bs.transpose() / step.dot(bs);
                }
                x += step;
                cur = std::move(trial);
                mu = mu < 1e-8 ? 0.0 : mu / 10.0;
                accepted = true;
                break;
            }
            mu = mu == 0.0 ? 1e-3 * std::max(1.0, b.diagonal().cwiseAbs().maxCoeff()) : mu * 10.0;
        }
        if (!accepted) {
            res.status = "stalled";
            break;
        }
    }
    res.x = x;
    res.loglik = cur->loglik;
    res.gradient_norm = cur->gradient.cwiseAbs().maxCoeff();
    res.iterations = it;
    if (res.status != "stalled") res.status = res.gradient_norm < tol ? "converged" : "max_iterations";
    return res;
}

StartResult run_start(const Design& d, const CoefficientLayout& layout, const FitOptions& opt, int start) {
    StartResult out;
    try {
        MsVarParams p = initial_params(d, layout, start, opt.seed);
        double prev = -std::numeric_limits<double>::infinity();
        int it = 0;
        for (; it < opt.em_iters; ++it) {
            EmUpdate up = em_update(d, layout, p);
            const bool done = std::abs(up.loglik_before - prev) < opt.em_tol;
            prev = up.loglik_before;
            if (done) break;
            p = std::move(up.params);
        }
        out.convergence.em_iterations = it;
        const QuasiNewtonResult qn = quasi_newton(d, layout, layout.pack(p), opt.qn_iters, opt.qn_tol);
        out.params = layout.unpack(qn.x);
        out.loglik = qn.loglik;
        out.convergence.qn_iterations = qn.iterations;
        out.convergence.gradient_norm = qn.gradient_norm;
        out.convergence.status = qn.status;
    } catch (const Error& e) {
        out.error = e;
    }
    return out;
}

}  // namespace

FitResult fit(const Eigen::MatrixXd& data, const Eigen::VectorXd& exog, const MsVarSpec& spec, const FitOptions& options) {
    const CoefficientLayout layout(spec);
    if (data.cols() != spec.n_vars) throw Error(ErrorKind::ShapeMismatch, "data columns differ from n_vars");
    const int k = count_coefficients(spec);
    const int needed = (k + spec.n_vars - 1) / spec.n_vars + spec.n_lags;
    if (data.rows() < needed)
        throw Error(ErrorKind::InsufficientObservations, std::to_string(data.rows()) + " observations for " + std::to_string(k) +
                                                             " coefficients; need at least " + std::to_string(needed));
    if (options.n_starts < 1) throw Error(ErrorKind::InvalidArgument, "n_starts must be positive");
    const Design design = make_design(data, exog, spec.n_lags);

    const auto starts = parallel_map(static_cast<std::size_t>(options.n_starts), options.threads,
                                     [&](std::size_t i) { return run_start(design, layout, options, static_cast<int>(i)); });
    int best = -1;
    int failed = 0;
    for (int i = 0; i < options.n_starts; ++i) {
        if (starts[i].error) {
            ++failed;
            continue;
        }
        if (best < 0 || starts[i].loglik > starts[best].loglik) best = i;
    }
    if (best < 0) throw *starts.front().error;

    const MsVarParams params = permute_regimes(starts[best].params, reporting_order(starts[best].params, spec));
    FitResult res = evaluate_fit(design, spec, params);
    res.convergence = starts[best].convergence;
    res.convergence.best_start = best;
    res.convergence.failed_starts = failed;
    return res;
}

}  // namespace msvar
