#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "crankback/errors.hpp"

namespace crankback {

/// Mean and variance of a normal law. Sums of i independent hops are
/// represented as {i * mean, i * var}.
struct NormalParams {
  double mean = 0.0;
  double var = 1.0;

  double stddev() const { return std::sqrt(var); }

  /// Law of the sum of `count` independent copies.
  NormalParams scaled(int count) const { return {count * mean, count * var}; }

  friend bool operator==(const NormalParams&, const NormalParams&) = default;
};

inline double pdf(double x, const NormalParams& p) {
  const double z = (x - p.mean) / p.stddev();
  return std::exp(-0.5 * z * z) / (p.stddev() * std::sqrt(2.0 * std::numbers::pi));
}

// Both tails go through erfc so neither loses precision to cancellation.
inline double cdf(double x, const NormalParams& p) {
  const double z = (x - p.mean) / p.stddev();
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

/// Upper tail probability P(X > x).
inline double ccdf(double x, const NormalParams& p) {
  const double z = (x - p.mean) / p.stddev();
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

/// The x with ccdf(x, params) == prob. Throws DomainError unless 0 < prob < 1.
inline double inv_ccdf(double prob, const NormalParams& params) {
  if (!(prob > 0.0 && prob < 1.0)) {
    throw DomainError("inv_ccdf: probability must lie strictly inside (0,1), got " +
                      std::to_string(prob));
  }
  const double z = std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * prob);
  return params.mean + z * params.stddev();
}

}  // namespace crankback
