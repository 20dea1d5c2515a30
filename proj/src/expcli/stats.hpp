#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace membrane::expcli {

// Regularized incomplete beta function via Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

struct BinomialCi {
  double lower = 0.0;
  double upper = 1.0;
};

// Exact (Clopper-Pearson) two-sided confidence interval for a binomial
// proportion at the given confidence level.
BinomialCi clopper_pearson(std::int64_t successes, std::int64_t trials,
                           double confidence = 0.95);

}  // namespace membrane::expcli
