#pragma once

#include <cstdint>

namespace grasscap {

// Monte Carlo misclassification estimate with a 95% Wilson interval.
struct ErrorEstimate {
  std::int64_t errors = 0;
  std::int64_t trials = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// p_hat = errors / trials; Wilson score interval at z = 1.96.
ErrorEstimate make_error_estimate(std::int64_t errors, std::int64_t trials);

}  // namespace grasscap
