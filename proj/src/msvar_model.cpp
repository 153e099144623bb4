#include "msvar/msvar_model.hpp"

#include "msvar/error.hpp"
#include "msvar/numerics.hpp"

#include <cmath>

namespace msvar {

void MsVarSpec::validate() const {
    if (n_vars < 1 || n_regimes < 1 || n_lags < 1)
        throw Error(ErrorKind::InvalidArgument, "n_vars, n_regimes and n_lags must be at least 1");
    if (!lag_mask.empty()) {
        if (static_cast<int>(lag_mask.size()) != n_lags)
            throw Error(ErrorKind::InvalidArgument, "lag mask needs one pattern per lag");
        for (const auto& m : lag_mask)
            if (m.rows() != n_vars || m.cols() != n_vars)
                throw Error(ErrorKind::InvalidArgument, "lag mask patterns must be n_vars x n_vars");
    }
}

bool MsVarSpec::lag_free(int lag, int row, int col) const {
    return lag_mask.empty() || lag_mask[static_cast<std::size_t>(lag)](row, col) != 0;
}

MsVarParams MsVarParams::zeros(const MsVarSpec& spec) {
    spec.validate();
    MsVarParams p;
    const auto n = spec.n_vars;
    for (int s = 0; s < spec.n_regimes; ++s) {
        p.intercepts.push_back(Eigen::VectorXd::Zero(n));
        p.exog_loadings.push_back(Eigen::VectorXd::Zero(n));
        p.covariances.push_back(Eigen::MatrixXd::Identity(n, n));
    }
    for (int l = 0; l < spec.n_lags; ++l) p.lag_matrices.push_back(Eigen::MatrixXd::Zero(n, n));
    p.transition_logits = Eigen::MatrixXd::Zero(spec.n_regimes, spec.n_regimes - 1);
    return p;
}

Eigen::MatrixXd log_transition_matrix(const Eigen::MatrixXd& logits) {
    const auto r = logits.rows();
    if (logits.cols() != r - 1) throw Error(ErrorKind::ShapeMismatch, "transition logits must be R x (R-1)");
    if (!logits.allFinite()) throw Error(ErrorKind::InvalidArgument, "transition logits must be finite");
    Eigen::MatrixXd out(r, r);
    for (Eigen::Index i = 0; i < r; ++i) {
        double m = 0.0;
        for (Eigen::Index j = 0; j + 1 < r; ++j) m = std::max(m, logits(i, j));
        double acc = std::exp(-m);
        for (Eigen::Index j = 0; j + 1 < r; ++j) acc += std::exp(logits(i, j) - m);
        const double lse = m + std::log(acc);
        for (Eigen::Index j = 0; j + 1 < r; ++j) out(i, j) = logits(i, j) - lse;
        out(i, r - 1) = -lse;
    }
    return out;
}

Eigen::MatrixXd transition_matrix(const Eigen::MatrixXd& logits) { return log_transition_matrix(logits).array().exp(); }

Eigen::MatrixXd transition_logits(const Eigen::MatrixXd& transition) {
    const auto r = transition.rows();
    if (transition.cols() != r) throw Error(ErrorKind::ShapeMismatch, "transition matrix must be square");
    Eigen::MatrixXd out(r, r - 1);
    for (Eigen::Index i = 0; i < r; ++i) {
        if (!(transition(i, r - 1) > 0.0))
            throw Error(ErrorKind::InvalidArgument, "reference transition probability must be positive");
        for (Eigen::Index j = 0; j + 1 < r; ++j) {
            if (!(transition(i, j) > 0.0)) throw Error(ErrorKind::InvalidArgument, "transition probabilities must be positive");
            out(i, j) = std::log(transition(i, j)) - std::log(transition(i, r - 1));
        }
    }
    return out;
}

Eigen::VectorXd ergodic_distribution(const Eigen::MatrixXd& transition) {
    const auto r = transition.rows();
    const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(r, 1.0 / static_cast<double>(r));
    if (r == 1) return uniform;
    // Solve pi' (I - P) = 0 with sum(pi) = 1: replace the last equation by the constraint.
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(r, r) - transition.transpose();
    a.row(r - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(r);
    rhs(r - 1) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) return uniform;
    Eigen::VectorXd pi = lu.solve(rhs);
    if (!pi.allFinite() || pi.minCoeff() < -1e-10) return uniform;
    pi = pi.cwiseMax(0.0);
    return pi / pi.sum();
}

double conditional_density(const Eigen::VectorXd& y_t, const Eigen::VectorXd& y_lag, double exog_t, int regime,
                           const MsVarParams& params) {
    const int n = params.n_vars();
    const int p = params.n_lags();
    if (regime < 0 || regime >= params.n_regimes()) throw Error(ErrorKind::InvalidArgument, "regime index out of range");
    if (y_t.size() != n || y_lag.size() != n * p) throw Error(ErrorKind::ShapeMismatch, "density inputs do not match params");
    Eigen::VectorXd mean = params.intercepts[regime] + params.exog_loadings[regime] * exog_t;
    for (int l = 0; l < p; ++l) mean += params.lag_matrices[l] * y_lag.segment(l * n, n);
    const Eigen::MatrixXd chol = cholesky_lower(params.covariances[regime]);
    const Eigen::VectorXd z = chol.triangularView<Eigen::Lower>().solve(y_t - mean);
    const double log_det = 2.0 * chol.diagonal().array().log().sum();
    return -0.5 * (n * kLog2Pi + log_det + z.squaredNorm());
}

int count_coefficients(const MsVarSpec& spec) {
    spec.validate();
    const int n = spec.n_vars;
    const int r = spec.n_regimes;
    int lag_entries = 0;
    for (int l = 0; l < spec.n_lags; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) lag_entries += spec.lag_free(l, i, j) ? 1 : 0;
    int k = 0;
    if (spec.include_intercept) k += (spec.switching.intercept ? r : 1) * n;
    if (spec.has_exog_dummy) k += (spec.switching.exog_loading ? r : 1) * n;
    k += (spec.switching.lag_coeffs ? r : 1) * lag_entries;
    k += (spec.switching.covariance ? r : 1) * n * (n + 1) / 2;
    k += r * (r - 1);
    return k;
}

InfoCriteria info_criteria(double loglik, int n_coefficients, int n_obs) {
    if (n_obs <= 0) throw Error(ErrorKind::InvalidArgument, "information criteria need T > 0");
    const double t = n_obs;
    const double k = n_coefficients;
    return {(-2.0 * loglik + 2.0 * k) / t, (-2.0 * loglik + k * std::log(t)) / t};
}

// ---------------------------------------------------------------------------

CoefficientLayout::CoefficientLayout(const MsVarSpec& spec) : spec_(spec) {
    spec_.validate();
    if (spec_.switching.lag_coeffs)
        throw Error(ErrorKind::Unsupported, "regime-dependent lag coefficients are not estimable in this model");
    const int n = spec_.n_vars;
    const int r = spec_.n_regimes;
    k_ = 2 + n * spec_.n_lags;
    index_.assign(static_cast<std::size_t>(r) * n * k_, -1);
    auto slot = [&](int s, int i, int c) -> int& { return index_[(static_cast<std::size_t>(s) * n + i) * k_ + c]; };
    int next = 0;
    auto fill_column = [&](int c, bool switching) {
        if (switching) {
            for (int s = 0; s < r; ++s)
                for (int i = 0; i < n; ++i) slot(s, i, c) = next++;
        } else {
            for (int i = 0; i < n; ++i) {
                for (int s = 0; s < r; ++s) slot(s, i, c) = next;
                ++next;
            }
        }
    };
    if (spec_.include_intercept) fill_column(0, spec_.switching.intercept);
    if (spec_.has_exog_dummy) fill_column(1, spec_.switching.exog_loading);
    for (int l = 0; l < spec_.n_lags; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (!spec_.lag_free(l, i, j)) continue;
                for (int s = 0; s < r; ++s) slot(s, i, 2 + l * n + j) = next;
                ++next;
            }
    n_mean_ = next;
}

Eigen::MatrixXd CoefficientLayout::coefficients(const MsVarParams& params, int regime) const {
    const int n = spec_.n_vars;
    Eigen::MatrixXd b(n, k_);
    b.col(0) = params.intercepts[regime];
    b.col(1) = params.exog_loadings[regime];
    for (int l = 0; l < spec_.n_lags; ++l) b.middleCols(2 + l * n, n) = params.lag_matrices[l];
    return b;
}

Eigen::VectorXd CoefficientLayout::mean_vector(const MsVarParams& params) const {
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(n_mean_);
    for (int s = spec_.n_regimes - 1; s >= 0; --s) {
        const Eigen::MatrixXd b = coefficients(params, s);
        for (int i = 0; i < spec_.n_vars; ++i)
            for (int c = 0; c < k_; ++c)
                if (const int a = index(s, i, c); a >= 0) theta(a) = b(i, c);
    }
    return theta;
}

void CoefficientLayout::set_mean_vector(MsVarParams& params, const Eigen::VectorXd& theta) const {
    const int n = spec_.n_vars;
    auto value = [&](int s, int i, int c) {
        const int a = index(s, i, c);
        return a >= 0 ? theta(a) : 0.0;
    };
    for (int s = 0; s < spec_.n_regimes; ++s)
        for (int i = 0; i < n; ++i) {
            params.intercepts[s](i) = value(s, i, 0);
            params.exog_loadings[s](i) = value(s, i, 1);
        }
    for (int l = 0; l < spec_.n_lags; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) params.lag_matrices[l](i, j) = value(0, i, 2 + l * n + j);
}

Eigen::VectorXd CoefficientLayout::pack(const MsVarParams& params) const {
    check_params(params, spec_);
    const int n = spec_.n_vars;
    Eigen::VectorXd out(size());
    out.head(n_mean_) = mean_vector(params);
    int pos = n_mean_;
    for (int b = 0; b < n_cov_blocks(); ++b) {
        const Eigen::MatrixXd l = cholesky_lower(params.covariances[b]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) out(pos++) = i == j ? std::log(l(i, i)) : l(i, j);
    }
    const int r = spec_.n_regimes;
    for (int i = 0; i < r; ++i)
        for (int j = 0; j + 1 < r; ++j) out(pos++) = params.transition_logits(i, j);
    return out;
}

MsVarParams CoefficientLayout::unpack(const Eigen::VectorXd& packed) const {
    if (packed.size() != size()) throw Error(ErrorKind::ShapeMismatch, "packed parameter vector has the wrong length");
    const int n = spec_.n_vars;
    const int r = spec_.n_regimes;
    MsVarParams p = MsVarParams::zeros(spec_);
    set_mean_vector(p, packed.head(n_mean_));
    int pos = n_mean_;
    std::vector<Eigen::MatrixXd> blocks;
    for (int b = 0; b < n_cov_blocks(); ++b) {
        Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) l(i, j) = i == j ? std::exp(packed(pos++)) : packed(pos++);
        blocks.push_back(l * l.transpose());
    }
    for (int s = 0; s < r; ++s) p.covariances[s] = blocks[cov_block(s)];
    for (int i = 0; i < r; ++i)
        for (int j = 0; j + 1 < r; ++j) p.transition_logits(i, j) = packed(pos++);
    return p;
}

Design make_design(const Eigen::MatrixXd& data, const Eigen::VectorXd& exog, int n_lags) {
    const auto t_total = data.rows();
    const auto n = data.cols();
    if (n_lags < 1) throw Error(ErrorKind::InvalidArgument, "n_lags must be at least 1");
    if (t_total <= n_lags) throw Error(ErrorKind::InsufficientObservations, "need more observations than lags");
    if (exog.size() != 0 && exog.size() != t_total) throw Error(ErrorKind::ShapeMismatch, "exogenous series length differs");
    if (!data.allFinite() || !exog.allFinite()) throw Error(ErrorKind::InvalidArgument, "data must be finite");
    const auto t_eff = t_total - n_lags;
    Design d{data.bottomRows(t_eff), Eigen::MatrixXd(t_eff, 2 + n * n_lags)};
    for (Eigen::Index r = 0; r < t_eff; ++r) {
        const auto t = r + n_lags;
        d.x(r, 0) = 1.0;
        d.x(r, 1) = exog.size() ? exog(t) : 0.0;
        for (int l = 0; l < n_lags; ++l) d.x.block(r, 2 + l * n, 1, n) = data.row(t - l - 1);
    }
    return d;
}

void check_params(const MsVarParams& params, const MsVarSpec& spec) {
    const auto n = spec.n_vars;
    const auto r = static_cast<std::size_t>(spec.n_regimes);
    bool ok = params.intercepts.size() == r && params.exog_loadings.size() == r && params.covariances.size() == r &&
              params.lag_matrices.size() == static_cast<std::size_t>(spec.n_lags) &&
              params.transition_logits.rows() == spec.n_regimes && params.transition_logits.cols() == spec.n_regimes - 1;
    if (ok) {
        for (std::size_t s = 0; s < r; ++s)
            ok = ok && params.intercepts[s].size() == n && params.exog_loadings[s].size() == n &&
                 params.covariances[s].rows() == n && params.covariances[s].cols() == n;
        for (const auto& a : params.lag_matrices) ok = ok && a.rows() == n && a.cols() == n;
    }
    if (!ok) throw Error(ErrorKind::ShapeMismatch, "parameters do not match the model specification");
}

}  // namespace msvar
