#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "crankback/normal.hpp"
#include "crankback/profile.hpp"
#include "crankback/scenario.hpp"

namespace crankback {

inline constexpr int kDefaultGridPoints = 4096;
// Richardson estimate above which a grid profile is flagged.
inline constexpr double kGridErrorBudget = 1e-4;

namespace detail {

struct GridPass {
  std::vector<double> p_return;
  double survivors = 0.0;
};

// Propagates the sub-density of accumulated delay among packets that have not
// turned back. Hop delays are integrated over [0, inf) and the density lives on
// a uniform grid over [0, reach]; every integral is trapezoidal on the grid
// nodes plus one linearly interpolated partial cell ending at the cut
// T - q_star[k].
inline GridPass propagate(const Scenario& s, const ThresholdTable& tbl, int points) {
  const int decisions = s.n - 1;
  const NormalParams hop = s.hop();

  std::vector<double> bounds(static_cast<std::size_t>(decisions));
  for (int k = 1; k <= decisions; ++k) bounds[k - 1] = tbl.bound(k, s.deadline);

  GridPass out;
  out.p_return.assign(bounds.size(), 0.0);
  out.p_return[0] = ccdf(bounds[0], hop);

  // Survivors never sit beyond the largest cut, and beyond the bulk of the
  // (n-1)-hop sum the density is negligible.
  const double bulk = s.remaining(1).mean + 8.0 * s.remaining(1).stddev();
  const double reach = std::min(*std::max_element(bounds.begin(), bounds.end()), bulk);
  if (!(reach > 0.0)) return out;

  const auto size = static_cast<std::size_t>(points);
  const double h = reach / static_cast<double>(size - 1);
  std::vector<double> kernel(size);
  for (std::size_t i = 0; i < size; ++i) kernel[i] = pdf(static_cast<double>(i) * h, hop);

  // Values past the current cut are the analytic continuation of the density
  // and are used only to interpolate at the cut.
  std::vector<double> density = kernel;
  std::vector<double> next(size);
  std::vector<double> weight(size);

  for (int k = 1; k <= decisions; ++k) {
    const double cut = std::min(bounds[k - 1], reach);
    if (!(cut > 0.0)) return out;

    auto last = static_cast<std::size_t>(std::floor(cut / h));
    double tail = cut - static_cast<double>(last) * h;
    if (last >= size - 1) {
      last = size - 1;
      tail = 0.0;
    }
    const double at_cut =
        tail > 0.0 ? density[last] + (density[last + 1] - density[last]) * (tail / h)
                   : density[last];

    // Trapezoid over nodes 0..last of density*weight, then the partial cell.
    auto integrate_to_cut = [&](auto&& weight_at, double weight_at_cut) {
      double sum = 0.0;
      for (std::size_t j = 0; j <= last; ++j) sum += density[j] * weight_at(j);
      sum -= 0.5 * (density[0] * weight_at(0) + density[last] * weight_at(last));
      return h * sum + 0.5 * tail * (density[last] * weight_at(last) + at_cut * weight_at_cut);
    };

    if (k == decisions) {
      out.survivors = integrate_to_cut([](std::size_t) { return 1.0; }, 1.0);
      break;
    }

    const double next_bound = bounds[k];
    for (std::size_t j = 0; j <= last; ++j) {
      weight[j] = ccdf(next_bound - static_cast<double>(j) * h, hop);
    }
    out.p_return[k] = integrate_to_cut([&](std::size_t j) { return weight[j]; },
                                       ccdf(next_bound - cut, hop));

    for (std::size_t i = 0; i < size; ++i) {
      const double t = static_cast<double>(i) * h;
      if (i <= last && t <= cut) {
        double sum = 0.0;
        for (std::size_t j = 0; j <= i; ++j) sum += density[j] * kernel[i - j];
        sum -= 0.5 * (density[0] * kernel[i] + density[i] * kernel[0]);
        next[i] = h * sum;
      } else {
        next[i] = integrate_to_cut([&](std::size_t j) { return kernel[i - j]; },
                                   pdf(t - cut, hop));
      }
    }
    density.swap(next);
  }
  return out;
}

}  // namespace detail

/// Full first-return profile by density propagation, for an arbitrary
/// threshold table. The result carries a Richardson check against a grid of
/// half the resolution.
inline ReturnProfile return_profile_grid(const Scenario& s, const ThresholdTable& tbl,
                                         int grid_points = kDefaultGridPoints) {
  s.validate();
  if (grid_points < 256) throw std::invalid_argument("grid_points must be >= 256");
  if (tbl.size() != s.n - 1) throw std::invalid_argument("threshold table size must be n - 1");

  const detail::GridPass fine = detail::propagate(s, tbl, grid_points);
  const detail::GridPass coarse = detail::propagate(s, tbl, grid_points / 2);

  ReturnProfile out;
  out.method = Method::grid;
  out.p_return = fine.p_return;
  double diff = 0.0;
  for (std::size_t k = 0; k < fine.p_return.size(); ++k) {
    diff = std::max(diff, std::abs(fine.p_return[k] - coarse.p_return[k]));
  }
  // Trapezoid error is O(h^2), so halving h shrinks it fourfold.
  out.error_estimate = diff / 3.0;
  out.quality_warning = out.error_estimate > kGridErrorBudget;
  out.p_success = 1.0 - out.total_return();
  out.dropped_mass = std::max(0.0, *out.p_success - fine.survivors);
  return out;
}

inline ReturnProfile return_profile_grid(const Scenario& s,
                                         int grid_points = kDefaultGridPoints) {
  return return_profile_grid(s, thresholds(s), grid_points);
}

}  // namespace crankback
