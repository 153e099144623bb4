#pragma once

#include "msvar/data_model.hpp"
#include "msvar/estimation.hpp"

#include <string>
#include <vector>

namespace msvar {

/// Coefficient count the reference tables report for the full model; the
/// footer flags any difference from count_coefficients.
inline constexpr int kReferenceCoefficientCount = 130;

struct FitTableLabels {
    std::vector<std::string> variables;  ///< one per equation, in data column order
    std::string exog = "COVID_SHOCK";
};

/// Estimation table: one block per regime (exogenous loadings, then
/// intercepts), a Common block of lag coefficients (row = regressor,
/// column = equation), transition logits P11-C.., and footer statistics.
/// `decimals` < 0 selects 17 significant digits and CSV layout; otherwise a
/// tab-free fixed-width text table at that many decimals.
[[nodiscard]] std::string fit_table(const FitResult& fit, const FitTableLabels& labels, int decimals = -1);

/// period, smoothed probability per regime, classified regime (1-based).
[[nodiscard]] std::string regime_probabilities_csv(const FitResult& fit, Period first_period);

/// Renders CSV text as right-aligned columns (first column left-aligned).
[[nodiscard]] std::string aligned_text(const std::string& csv);

/// Saved estimation: everything later stages need to analyse a fit.
struct SavedFit {
    std::vector<std::string> variables;
    MsVarSpec spec;
    MsVarParams params;
    double loglik = 0.0;
    int n_obs = 0;
};

[[nodiscard]] std::string fit_to_json(const FitResult& fit, const std::vector<std::string>& variables);
/// Throws Configuration on malformed input.
[[nodiscard]] SavedFit fit_from_json(const std::string& text);

}  // namespace msvar
