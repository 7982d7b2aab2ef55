// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace cloudcap {

/// Standard normal CDF.
double normal_cdf(double z);

/// Standard normal quantile. Acklam's rational approximation refined by one
/// Halley step against erfc; |Phi(result) - p| is at double round-off.
/// Throws std::domain_error unless 0 < p < 1.
double inverse_normal_cdf(double p);

}  // namespace cloudcap
