#pragma once

#include <span>

namespace maglev {

/// Number of distinct real roots of the polynomial sum_k coeffs[k] x^k.
///
/// The Sturm chain is built in exact rational arithmetic from the binary
/// values of the coefficients, so the count is exact for the polynomial as
/// represented. Coefficients must be finite; the leading one must be nonzero.
int sturm_real_root_count(std::span<const double> coeffs);

}  // namespace maglev
