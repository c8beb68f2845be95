#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "crankback/normal.hpp"
#include "crankback/profile.hpp"
#include "crankback/scenario.hpp"

namespace crankback {

inline constexpr int kDefaultQuadratureDepth = 4;
inline constexpr double kDefaultQuadratureTol = 1e-4;

namespace detail {

// Adaptive bisection over a single-interval 15/31-point Gauss-Kronrod rule with
// an absolute tolerance split evenly between halves.
template <class F>
double adaptive_gauss_kronrod(const F& f, double a, double b, double tol, int depth,
                              double& error) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  double local_error = 0.0;
  const double value = Rule::integrate(f, a, b, 0, 0.0, &local_error);
  if (local_error <= tol || depth == 0) {
    error += local_error;
    return value;
  }
  const double mid = 0.5 * (a + b);
  return adaptive_gauss_kronrod(f, a, mid, 0.5 * tol, depth - 1, error) +
         adaptive_gauss_kronrod(f, mid, b, 0.5 * tol, depth - 1, error);
}

// Nested first-return integral. Hops 1..target-1 are integrated over
// [0, bound_j - elapsed]; the last factor is supplied by `terminal(elapsed)`.
template <class Terminal>
class NestedIntegral {
 public:
  NestedIntegral(NormalParams hop, const std::vector<double>& bounds, double tol)
      : hop_(hop), bounds_(bounds), tol_(tol) {}

  double operator()(int target, const Terminal& terminal) {
    max_error_ = 0.0;
    return level(1, 0.0, target, terminal, tol_ / std::max(1, target - 1));
  }

  double max_error() const { return max_error_; }

 private:
  static constexpr int kMaxBisections = 10;
  // The hop density past this many standard deviations is below 1e-17.
  static constexpr double kSupportSigmas = 9.0;

  double level(int node, double elapsed, int target, const Terminal& terminal, double tol) {
    if (node == target) return terminal(elapsed);
    const double upper = std::min(bounds_[static_cast<std::size_t>(node - 1)] - elapsed,
                                  hop_.mean + kSupportSigmas * hop_.stddev());
    const double lower = std::max(0.0, hop_.mean - kSupportSigmas * hop_.stddev());
    if (!(upper > lower)) return 0.0;
    // An inner error is averaged against a density of mass <= 1, so the total
    // error is at most the sum of the per-level tolerances.
    auto integrand = [&](double x) {
      return pdf(x, hop_) * level(node + 1, elapsed + x, target, terminal, tol);
    };
    double error = 0.0;
    const double value = adaptive_gauss_kronrod(integrand, lower, upper, tol, kMaxBisections, error);
    if (node == 1) max_error_ = std::max(max_error_, error);
    return value;
  }

  NormalParams hop_;
  const std::vector<double>& bounds_;
  double tol_;
  double max_error_ = 0.0;
};

}  // namespace detail

/// First-return probabilities P_1..P_depth by direct nested adaptive
/// Gauss-Kronrod quadrature. Cost grows exponentially with depth. The success
/// probability is filled in only when depth == n - 1.
inline ReturnProfile return_profile_quadrature(const Scenario& s,
                                               int max_depth = kDefaultQuadratureDepth,
                                               double tol = kDefaultQuadratureTol) {
  s.validate();
  if (max_depth < 1 || max_depth > s.n - 1) {
    throw std::invalid_argument("max_depth must lie in 1..n-1");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");

  const ThresholdTable tbl = thresholds(s);
  std::vector<double> bounds;
  for (int k = 1; k < s.n; ++k) bounds.push_back(tbl.bound(k, s.deadline));
  const NormalParams hop = s.hop();

  ReturnProfile out;
  out.method = Method::quadrature;
  out.p_return.resize(static_cast<std::size_t>(max_depth));

  using ReturnTail = std::function<double(double)>;
  detail::NestedIntegral<ReturnTail> integral(hop, bounds, tol);
  for (int k = 1; k <= max_depth; ++k) {
    const double bound = bounds[static_cast<std::size_t>(k - 1)];
    ReturnTail tail = [&](double elapsed) { return ccdf(bound - elapsed, hop); };
    out.p_return[static_cast<std::size_t>(k - 1)] = integral(k, tail);
    out.error_estimate = std::max(out.error_estimate, integral.max_error());
  }
  out.quality_warning = out.error_estimate > tol;

  if (max_depth == s.n - 1) {
    out.p_success = 1.0 - out.total_return();
    // Survivors past the last decision node: same region, unit terminal factor.
    ReturnTail one = [](double) { return 1.0; };
    const double survivors = integral(s.n, one);
    out.dropped_mass = std::max(0.0, *out.p_success - survivors);
  }
  return out;
}

}  // namespace crankback
