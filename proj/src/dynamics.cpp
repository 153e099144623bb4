#include "msvar/dynamics.hpp"

#include "msvar/error.hpp"
#include "msvar/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstdio>

namespace msvar {

Eigen::MatrixXd companion(const std::vector<Eigen::MatrixXd>& lag_matrices) {
    if (lag_matrices.empty()) throw Error(ErrorKind::ShapeMismatch, "companion form needs at least one lag matrix");
    const auto n = lag_matrices.front().rows();
    const auto p = static_cast<Eigen::Index>(lag_matrices.size());
    for (const auto& a : lag_matrices)
        if (a.rows() != n || a.cols() != n) throw Error(ErrorKind::ShapeMismatch, "lag matrices must be square and equal-sized");
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n * p, n * p);
    for (Eigen::Index l = 0; l < p; ++l) c.block(0, l * n, n, n) = lag_matrices[static_cast<std::size_t>(l)];
    if (p > 1) c.block(n, 0, n * (p - 1), n * (p - 1)).setIdentity();
    return c;
}

Stability is_stable(const std::vector<Eigen::MatrixXd>& lag_matrices) {
    const Eigen::MatrixXd c = companion(lag_matrices);
    const double radius = Eigen::EigenSolver<Eigen::MatrixXd>(c, false).eigenvalues().cwiseAbs().maxCoeff();
    return {radius < 1.0 - 1e-10, radius};
}

Eigen::MatrixXd shock_covariance(const MsVarParams& params, ShockCovariance choice) {
    const int r = params.n_regimes();
    if (choice.regime) {
        if (*choice.regime < 0 || *choice.regime >= r)
            throw Error(ErrorKind::InvalidArgument, "regime " + std::to_string(*choice.regime + 1) + " does not exist");
        return params.covariances[*choice.regime];
    }
    const Eigen::VectorXd pi = ergodic_distribution(transition_matrix(params.transition_logits));
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(params.n_vars(), params.n_vars());
    for (int s = 0; s < r; ++s) sigma += pi(s) * params.covariances[s];
    return sigma;
}

std::vector<Eigen::MatrixXd> orthogonal_responses(const std::vector<Eigen::MatrixXd>& lag_matrices,
                                                  const Eigen::MatrixXd& covariance, int horizons) {
    if (horizons < 0) throw Error(ErrorKind::InvalidArgument, "horizons must be non-negative");
    const Eigen::MatrixXd c = companion(lag_matrices);
    const auto n = lag_matrices.front().rows();
    const Eigen::MatrixXd chol = cholesky_lower(covariance);
    std::vector<Eigen::MatrixXd> out;
    out.reserve(static_cast<std::size_t>(horizons) + 1);
    out.push_back(chol);
    // Psi_h = J C^h J'; track the first block column of C^h.
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(c.rows(), n);
    block.topRows(n).setIdentity();
    for (int h = 1; h <= horizons; ++h) {
        block = c * block;
        out.push_back(block.topRows(n) * chol);
    }
    return out;
}

namespace {

std::vector<int> resolve_ordering(const std::vector<int>& ordering, int n) {
    if (ordering.empty()) {
        std::vector<int> natural(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) natural[i] = i;
        return natural;
    }
    std::vector<int> sorted = ordering;
    std::sort(sorted.begin(), sorted.end());
    bool ok = static_cast<int>(ordering.size()) == n;
    for (int i = 0; ok && i < n; ++i) ok = sorted[i] == i;
    if (!ok) throw Error(ErrorKind::BadOrdering, "ordering must be a permutation of the variables");
    return ordering;
}

struct Ordered {
    std::vector<Eigen::MatrixXd> lags;
    Eigen::MatrixXd sigma;
    std::vector<int> ordering;
};

Ordered reorder(const MsVarParams& params, const DynamicsOptions& options) {
    const int n = params.n_vars();
    Ordered o;
    o.ordering = resolve_ordering(options.ordering, n);
    const Stability st = is_stable(params.lag_matrices);
    if (!st.stable && !options.allow_unstable) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "spectral radius %.6f >= 1", st.spectral_radius);
        throw Error(ErrorKind::UnstableSystem, buf);
    }
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(n);
    for (int i = 0; i < n; ++i) perm.indices()(o.ordering[i]) = i;  // original -> ordered position
    const Eigen::MatrixXd pm = perm;  // maps original coordinates to ordered ones
    for (const auto& a : params.lag_matrices) o.lags.push_back(pm * a * pm.transpose());
    const Eigen::MatrixXd sigma = shock_covariance(params, options.covariance);
    o.sigma = pm * sigma * pm.transpose();
    return o;
}

}  // namespace

IrfResult irf(const MsVarParams& params, const DynamicsOptions& options) {
    const Ordered o = reorder(params, options);
    return {options.horizons, orthogonal_responses(o.lags, o.sigma, options.horizons), o.ordering};
}

FevdResult fevd(const MsVarParams& params, const DynamicsOptions& options) {
    const Ordered o = reorder(params, options);
    const auto psi = orthogonal_responses(o.lags, o.sigma, options.horizons);
    FevdResult out;
    out.horizons = options.horizons;
    out.ordering = o.ordering;
    Eigen::MatrixXd cumulative = Eigen::MatrixXd::Zero(psi.front().rows(), psi.front().cols());
    for (const auto& m : psi) {
        cumulative += m.cwiseAbs2();
        const Eigen::VectorXd total = cumulative.rowwise().sum();
        Eigen::MatrixXd shares = cumulative;
        for (Eigen::Index i = 0; i < shares.rows(); ++i) shares.row(i) = (shares.row(i) / total(i)) * 100.0;
        out.shares.push_back(shares);
        out.se.push_back(total.cwiseSqrt());
    }
    return out;
}

}  // namespace msvar
