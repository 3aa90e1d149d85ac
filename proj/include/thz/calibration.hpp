#pragma once

#include "thz/core.hpp"
#include "thz/forward.hpp"

namespace thz {

/// Removes the measurement system from a raw sweep:
///   H[r][k] = raw[r][k] / (s_extra[k] * s_connect[k]).
/// Throws NumericalError naming the frequency index if any denominator
/// magnitude falls below 1e-12.
Ctf calibrate(const Ctf& raw, const SystemResponse& sys);

}  // namespace thz
