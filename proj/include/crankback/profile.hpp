#pragma once

#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crankback {

enum class Method { quadrature, grid, approx, montecarlo };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::quadrature: return "quadrature";
    case Method::grid: return "grid";
    case Method::approx: return "approx";
    case Method::montecarlo: return "montecarlo";
  }
  return "unknown";
}

inline Method method_from_string(std::string_view s) {
  if (s == "quadrature") return Method::quadrature;
  if (s == "grid") return Method::grid;
  if (s == "approx") return Method::approx;
  if (s == "montecarlo") return Method::montecarlo;
  throw std::invalid_argument("unknown method '" + std::string(s) + "'");
}

/// First-return probabilities: p_return[k-1] is the probability that the
/// packet passes nodes 1..k-1 and turns back at node k.
///
/// A depth-capped computation leaves trailing nodes out of p_return and has no
/// p_success.
struct ReturnProfile {
  Method method = Method::grid;
  std::vector<double> p_return;
  std::optional<double> p_success;

  // Engine diagnostics. For the grid engine `error_estimate` is the Richardson
  // half-grid difference; for quadrature the largest reported integration error.
  double error_estimate = 0.0;
  bool quality_warning = false;
  // Probability mass neither returned nor delivered because hop delays below
  // zero are excluded from the analytic integrals.
  double dropped_mass = 0.0;

  int depth() const { return static_cast<int>(p_return.size()); }

  /// 1-based.
  double at(int k) const { return p_return.at(static_cast<std::size_t>(k - 1)); }

  double total_return() const {
    return std::accumulate(p_return.begin(), p_return.end(), 0.0);
  }

  double success() const {
    if (!p_success) throw std::logic_error("profile has no success probability (depth-capped)");
    return *p_success;
  }

  friend bool operator==(const ReturnProfile&, const ReturnProfile&) = default;
};

}  // namespace crankback
