#pragma once

namespace dirnet {

/// Principal branch W0 of the Lambert W function, x >= -1/e.
/// Throws std::domain_error below the branch point.
double lambert_w0(double x);

}  // namespace dirnet
