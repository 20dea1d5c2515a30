#include "expcli/stats.hpp"

namespace membrane::expcli {

namespace {

double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 400;
  constexpr double kEps = 3e-15;
  constexpr double kFpMin = 1e-300;

  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

BinomialCi clopper_pearson(std::int64_t successes, std::int64_t trials,
                           double confidence) {
  if (trials <= 0 || successes < 0 || successes > trials)
    throw std::invalid_argument("clopper_pearson: bad counts");
  const double alpha = 1.0 - confidence;
  BinomialCi ci;

  auto solve = [](double a, double b, double target) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (lo + hi);
      if (incomplete_beta(a, b, mid) < target) lo = mid;
      else hi = mid;
    }
    return 0.5 * (lo + hi);
  };

  const double k = static_cast<double>(successes);
  const double n = static_cast<double>(trials);
  ci.lower = successes == 0 ? 0.0 : solve(k, n - k + 1.0, alpha / 2.0);
  ci.upper = successes == trials ? 1.0 : solve(k + 1.0, n - k, 1.0 - alpha / 2.0);
  return ci;
}

}  // namespace membrane::expcli
