#include "msvar/cointegration.hpp"

#include "msvar/error.hpp"
#include "msvar/mackinnon.hpp"
#include "msvar/numerics.hpp"

namespace msvar {

CointegrationReport engle_granger(const TimeSeries& y, const std::vector<TimeSeries>& x, DeterministicSpec spec,
                                  LagRule rule) {
    const auto n = static_cast<Eigen::Index>(y.size());
    if (n < 20) throw Error(ErrorKind::TooShort, "Engle-Granger needs length >= 20");
    for (const auto& s : x)
        if (s.start() != y.start() || s.size() != y.size())
            throw Error(ErrorKind::InvalidArgument, "Engle-Granger series are not aligned");
    if (y.has_missing()) throw Error(ErrorKind::MissingData, "'" + y.name() + "' has missing values");

    const Eigen::Index d = spec == DeterministicSpec::none ? 0 : spec == DeterministicSpec::constant ? 1 : 2;
    Eigen::MatrixXd design(n, d + static_cast<Eigen::Index>(x.size()));
    for (Eigen::Index t = 0; t < n; ++t) {
        if (d >= 1) design(t, 0) = 1.0;
        if (d == 2) design(t, 1) = static_cast<double>(t);
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double v = x[j][static_cast<std::size_t>(t)];
            if (is_missing(v)) throw Error(ErrorKind::MissingData, "'" + x[j].name() + "' has missing values");
            design(t, d + static_cast<Eigen::Index>(j)) = v;
        }
    }
    const OlsFit levels = ols(design, to_eigen(y.values()));
    const std::vector<double> resid(levels.residuals.data(), levels.residuals.data() + n);
    if (levels.residuals.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + to_eigen(y.values()).cwiseAbs().maxCoeff()))
        throw Error(ErrorKind::ZeroVariance, "'" + y.name() + "' is an exact combination of the regressors");
    const AdfRegression adf = adf_regression(resid, DeterministicSpec::none, rule);

    CointegrationReport rep;
    rep.dependent = y.name();
    rep.tau = adf.tau;
    rep.dimension = 1 + static_cast<int>(x.size());
    // Finite-sample surfaces are indexed by the cointegrating-regression length.
    rep.p_value = mackinnon_pvalue(adf.tau, rep.dimension, spec, static_cast<int>(n));
    rep.residual_lags = adf.lags;
    rep.observations = static_cast<int>(n);
    return rep;
}

}  // namespace msvar
