#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>

#include "crankback/analytic.hpp"
#include "crankback/errors.hpp"
#include "crankback/profile.hpp"
#include "crankback/scenario.hpp"

namespace crankback {

// ---------------------------------------------------------------------------
// Threshold optimization
// ---------------------------------------------------------------------------

inline constexpr double kMinPtr = 1e-6;
inline constexpr double kMaxPtr = 1.0 - 1e-6;

struct OptimizeOptions {
  double tol = 1e-3;
  int max_iterations = 200;
  int grid_points = kDefaultGridPoints;
  // Called with (lo, H(lo), hi, H(hi)) before every bisection step.
  std::function<void(double, double, double, double)> on_bracket;
};

struct OptimizeResult {
  double p_tr = 0.0;
  double achieved = 0.0;  // H(p_tr)
  double target = 0.0;
  int iterations = 0;
  // Target lies outside [H(kMinPtr), H(kMaxPtr)]; p_tr is the nearest endpoint.
  bool unattainable = false;

  friend bool operator==(const OptimizeResult&, const OptimizeResult&) = default;
};

/// Solves H(p_tr) = target for a nondecreasing H by bisection on
/// [kMinPtr, kMaxPtr]. The bracket always satisfies H(lo) <= target <= H(hi).
template <class SuccessFn>
OptimizeResult optimize_threshold(SuccessFn&& success, double target,
                                  const OptimizeOptions& opts = {}) {
  if (!(target > 0.0 && target < 1.0)) {
    throw DomainError("target must lie strictly inside (0,1)");
  }
  if (!(opts.tol > 0.0)) throw DomainError("tol must be > 0");

  OptimizeResult result;
  result.target = target;

  double lo = kMinPtr;
  double hi = kMaxPtr;
  const double h_lo = success(lo);
  const double h_hi = success(hi);
  if (target < h_lo - opts.tol || target > h_hi + opts.tol) {
    const bool below = target < h_lo;
    result.p_tr = below ? lo : hi;
    result.achieved = below ? h_lo : h_hi;
    result.unattainable = true;
    return result;
  }
  if (std::abs(h_lo - target) <= opts.tol) return {lo, h_lo, target, 0, false};
  if (std::abs(h_hi - target) <= opts.tol) return {hi, h_hi, target, 0, false};

  double h_lo_cur = h_lo;
  double h_hi_cur = h_hi;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    if (opts.on_bracket) opts.on_bracket(lo, h_lo_cur, hi, h_hi_cur);
    const double mid = 0.5 * (lo + hi);
    const double h_mid = success(mid);
    if (std::abs(h_mid - target) <= opts.tol) return {mid, h_mid, target, it, false};
    if (h_mid < target) {
      lo = mid;
      h_lo_cur = h_mid;
    } else {
      hi = mid;
      h_hi_cur = h_mid;
    }
  }
  throw ConvergenceError("optimize_threshold: no convergence within " +
                             std::to_string(opts.max_iterations) + " iterations",
                         lo, hi);
}

/// Threshold p_tr whose grid-engine success probability meets `target`.
/// The p_tr stored in `s` is ignored.
inline OptimizeResult optimize_ptr(const Scenario& s, double target,
                                   const OptimizeOptions& opts = {}) {
  s.with_p_tr(0.5).validate();
  auto h = [&](double p) {
    return return_profile_grid(s.with_p_tr(p), opts.grid_points).success();
  };
  return optimize_threshold(h, target, opts);
}

// ---------------------------------------------------------------------------
// Retry and waste model
// ---------------------------------------------------------------------------

/// Geometric law of the number of attempts up to and including the first
/// delivery.
struct AttemptModel {
  double p_success = 1.0;

  double pmf(long long k) const {
    if (k < 1) return 0.0;
    return std::pow(1.0 - p_success, static_cast<double>(k - 1)) * p_success;
  }
  double cdf(long long k) const {
    if (k < 1) return 0.0;
    return 1.0 - std::pow(1.0 - p_success, static_cast<double>(k));
  }
  double mean() const { return 1.0 / p_success; }
};

inline AttemptModel attempt_distribution(double p_success) {
  if (!(p_success > 0.0 && p_success <= 1.0)) {
    throw DomainError("attempt_distribution: p_success must lie in (0,1]");
  }
  return {p_success};
}

struct WasteReport {
  double hop_distance = 0.0;       // per-hop cost unit all fields are expressed in
  double waste_per_attempt = 0.0;  // sum_k P_k * 2 * d * k
  double waste_per_success = 0.0;  // waste_per_attempt / p_success
  double expected_total_distance = 0.0;  // waste_per_success + d * n

  friend bool operator==(const WasteReport&, const WasteReport&) = default;
};

/// Expected round-trip distance wasted by one attempt.
inline double waste_per_attempt(const ReturnProfile& profile, double hop_distance) {
  double waste = 0.0;
  for (int k = 1; k <= profile.depth(); ++k) waste += profile.at(k) * 2.0 * hop_distance * k;
  return waste;
}

namespace detail {
inline double checked_success(const ReturnProfile& profile) {
  const double p = profile.success();
  if (!(p > 0.0)) throw DomainError("p_success = 0: no delivery is possible");
  return p;
}
}  // namespace detail

/// Expected waste per delivered packet, with the per-hop cost given in
/// whatever unit the caller uses (mean hop delay or hop distance).
inline double waste_per_success(const ReturnProfile& profile, double hop_cost) {
  return waste_per_attempt(profile, hop_cost) / detail::checked_success(profile);
}

/// Expected total travel per delivered packet: geometric-weighted waste plus
/// the final successful traversal of n hops.
inline double expected_total_distance(const ReturnProfile& profile, double hop_distance, int n) {
  return waste_per_success(profile, hop_distance) + hop_distance * n;
}

inline WasteReport waste_report(const ReturnProfile& profile, double hop_distance, int n) {
  WasteReport r;
  r.hop_distance = hop_distance;
  r.waste_per_attempt = waste_per_attempt(profile, hop_distance);
  r.waste_per_success = waste_per_success(profile, hop_distance);
  r.expected_total_distance = expected_total_distance(profile, hop_distance, n);
  return r;
}

}  // namespace crankback
