#pragma once

// Monte Carlo point estimates with standard errors and truncation accounting.

#include <cmath>
#include <cstdint>

#include "percap/errors.hpp"

namespace percap {

struct WilsonInterval {
  double lo = 0.0, hi = 0.0;
};

// Wilson 95% score interval for a binomial proportion.
inline WilsonInterval wilson_interval(uint64_t hits, uint64_t n, double z = 1.9599639845400545) {
  if (n == 0) return {0.0, 1.0};
  const double nn = double(n);
  const double phat = double(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (phat + z2 / (2.0 * nn)) / denom;
  const double half = (z / denom) * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn));
  WilsonInterval w;
  w.lo = center - half;
  w.hi = center + half;
  if (w.lo < 0.0) w.lo = 0.0;
  if (w.hi > 1.0) w.hi = 1.0;
  return w;
}

// Bernoulli estimate. Truncated replicas (budget exhausted, event undecided)
// are excluded from the hit count; [lower, upper] re-counts them as failures
// and successes respectively.
struct Estimate {
  uint64_t n = 0;
  uint64_t hits = 0;
  uint64_t n_truncated = 0;
  double value = 0.0;
  double std_error = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;

  static Estimate bernoulli(uint64_t hits, uint64_t truncated, uint64_t n) {
    Estimate e;
    e.n = n;
    e.hits = hits;
    e.n_truncated = truncated;
    if (n == 0) return e;
    const double nn = double(n);
    e.value = double(hits) / nn;
    e.std_error = std::sqrt(e.value * (1.0 - e.value) / nn);
    e.lower = e.value;
    e.upper = double(hits + truncated) / nn;
    const WilsonInterval w = wilson_interval(hits, n);
    e.wilson_lo = w.lo;
    e.wilson_hi = w.hi;
    return e;
  }

  // Exact constant (used for degenerate cases like tau(0) = 1).
  static Estimate exact(double v, uint64_t n) {
    Estimate e;
    e.n = n;
    e.hits = uint64_t(v * double(n) + 0.5);
    e.value = v;
    e.lower = e.upper = e.wilson_lo = e.wilson_hi = v;
    return e;
  }
};

// Ratio of two estimates from independent replica streams, with the delta
// method standard error.
struct RatioEstimate {
  Estimate numerator;
  Estimate denominator;
  double ratio = 0.0;
  double std_error = 0.0;

  static RatioEstimate of(const Estimate& num, const Estimate& den) {
    if (den.hits == 0)
      throw UnderpoweredError(
          "all denominator replicas missed; increase n or decrease the source distance");
    RatioEstimate r;
    r.numerator = num;
    r.denominator = den;
    r.ratio = num.value / den.value;
    const double vd = den.value;
    r.std_error = std::sqrt(num.std_error * num.std_error / (vd * vd) +
                            num.value * num.value * den.std_error * den.std_error /
                                (vd * vd * vd * vd));
    return r;
  }
};

// Pooled standard error for comparing two estimates.
inline double pooled_se(double a, double b) { return std::sqrt(a * a + b * b); }

}  // namespace percap
