#include "grasscap/estimate.hpp"

#include <algorithm>
#include <cmath>

#include "grasscap/errors.hpp"

namespace grasscap {

ErrorEstimate make_error_estimate(std::int64_t errors, std::int64_t trials) {
  if (trials < 1) throw DomainError("make_error_estimate: trials must be >= 1");
  if (errors < 0 || errors > trials)
    throw DomainError("make_error_estimate: errors outside [0, trials]");

  ErrorEstimate e;
  e.errors = errors;
  e.trials = trials;
  const double n = static_cast<double>(trials);
  e.p_hat = static_cast<double>(errors) / n;

  const double z = 1.959963984540054;  // 97.5% normal quantile
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (e.p_hat + z2 / (2.0 * n)) / denom;
  const double half =
      z / denom *
      std::sqrt(e.p_hat * (1.0 - e.p_hat) / n + z2 / (4.0 * n * n));
  e.ci_low = std::max(0.0, center - half);
  e.ci_high = std::min(1.0, center + half);
  return e;
}

}  // namespace grasscap
