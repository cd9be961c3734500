#pragma once

namespace kdiff {

/// Bessel function of the first kind J_order(x), integer order.
///
/// Reference implementation used to check the quadrature-built kick matrix of
/// the cosine rotator: small arguments go through the power series, everything
/// else through Miller's normalized downward recurrence. Relative error is
/// below 1e-12 over the supported range. Throws std::domain_error outside
/// |order| <= 100000 or |x| <= 2000, or for non-finite x.
double bessel_j(int order, double x);

} // namespace kdiff
