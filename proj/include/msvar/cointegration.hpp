#pragma once

#include "msvar/data_model.hpp"
#include "msvar/test_report.hpp"
#include "msvar/unit_root.hpp"

#include <vector>

namespace msvar {

/// Two-step Engle-Granger: levels regression of y on deterministics and x,
/// then a no-deterministic ADF on the residuals. The p-value uses the
/// cointegration surface with dimension 1 + x.size() and sample size equal
/// to the series length.
/// Throws TooShort (length < 20), CollinearRegressors, DimensionOutOfRange.
[[nodiscard]] CointegrationReport engle_granger(const TimeSeries& y, const std::vector<TimeSeries>& x,
                                                DeterministicSpec spec = DeterministicSpec::constant,
                                                LagRule rule = LagRule::schwarz());

}  // namespace msvar
