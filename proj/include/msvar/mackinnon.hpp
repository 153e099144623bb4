#pragma once

#include "msvar/test_report.hpp"

namespace msvar {

/// Finite-sample critical value at level 0.01, 0.05 or 0.10 from the
/// MacKinnon (2010) response surfaces; sample_size 0 gives the asymptote.
[[nodiscard]] double mackinnon_critical_value(double level, int dimension, DeterministicSpec spec, int sample_size);

/// Approximate p-value of a Dickey-Fuller / Engle-Granger tau.
///
/// Left of the 10% critical value the probit of p is the quadratic in tau
/// through the three finite-sample critical values. To the right the
/// MacKinnon (1994) asymptotic surface is shifted so both pieces meet at
/// p = 0.10. Dimensions above 6 reuse the 1994 shape for dimension 6.
/// Throws DimensionOutOfRange unless 1 <= dimension <= 12 (<= 6 for spec none).
[[nodiscard]] double mackinnon_pvalue(double tau, int dimension, DeterministicSpec spec, int sample_size);

}  // namespace msvar
