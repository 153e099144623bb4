#pragma once

#include "msvar/msvar_model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace msvar {

[[nodiscard]] Eigen::MatrixXd companion(const std::vector<Eigen::MatrixXd>& lag_matrices);

struct Stability {
    bool stable;
    double spectral_radius;
};
/// Stable iff the companion spectral radius is below 1 - 1e-10.
[[nodiscard]] Stability is_stable(const std::vector<Eigen::MatrixXd>& lag_matrices);

/// Shock covariance used for orthogonalization: one regime, or the
/// ergodic-probability-weighted average when `regime` is empty.
struct ShockCovariance {
    std::optional<int> regime;
};
[[nodiscard]] Eigen::MatrixXd shock_covariance(const MsVarParams& params, ShockCovariance choice);

/// responses[h](i, j): response of ordered variable i at horizon h to a
/// one-standard-deviation orthogonalized shock in ordered variable j.
struct IrfResult {
    int horizons = 0;
    std::vector<Eigen::MatrixXd> responses;  ///< horizons + 1 entries
    std::vector<int> ordering;               ///< original variable index per ordered position
};

/// shares[h](i, j): percent of the (h+1)-step forecast-error variance of
/// ordered variable i due to ordered shock j. se[h](i) is the forecast
/// standard error at that step.
struct FevdResult {
    int horizons = 0;
    std::vector<Eigen::MatrixXd> shares;  ///< horizons + 1 entries
    std::vector<Eigen::VectorXd> se;
    std::vector<int> ordering;
};

struct DynamicsOptions {
    ShockCovariance covariance;
    int horizons = 24;
    std::vector<int> ordering;  ///< empty = natural order
    bool allow_unstable = false;
};

/// Throws UnstableSystem (unless allowed), BadOrdering, SingularCovariance.
[[nodiscard]] IrfResult irf(const MsVarParams& params, const DynamicsOptions& options);
[[nodiscard]] FevdResult fevd(const MsVarParams& params, const DynamicsOptions& options);

/// Orthogonalized MA responses for explicit lag matrices and covariance in the
/// natural order.
[[nodiscard]] std::vector<Eigen::MatrixXd> orthogonal_responses(const std::vector<Eigen::MatrixXd>& lag_matrices,
                                                                const Eigen::MatrixXd& covariance, int horizons);

}  // namespace msvar
