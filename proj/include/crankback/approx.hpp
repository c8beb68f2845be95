#pragma once

#include <algorithm>
#include <cstddef>

#include "crankback/normal.hpp"
#include "crankback/profile.hpp"
#include "crankback/scenario.hpp"

namespace crankback {

/// Coarse profile from the unconditioned stop-region probabilities
/// S_k = P(t_k > T - q_star[k]) with t_k ~ Normal(kM, kV). Entries are S_1 and
/// the successive differences S_k - S_{k-1}, clamped at zero.
inline ReturnProfile approx_profile(const Scenario& s) {
  s.validate();
  const ThresholdTable tbl = thresholds(s);
  ReturnProfile out;
  out.method = Method::approx;
  double previous = 0.0;
  for (int k = 1; k < s.n; ++k) {
    const double stop = ccdf(tbl.bound(k, s.deadline), s.hop().scaled(k));
    out.p_return.push_back(std::max(0.0, stop - previous));
    previous = stop;
  }
  out.p_success = std::max(0.0, 1.0 - out.total_return());
  return out;
}

}  // namespace crankback
