#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "crankback/errors.hpp"
#include "crankback/normal.hpp"

namespace crankback {

/// One problem instance: a packet crosses `n` hops, each with delay
/// Normal(hop_mean, hop_var), and must reach node n within `deadline`.
/// Intermediate nodes 1..n-1 may turn it back; `p_tr` is the tolerated
/// probability that the remaining path overruns the residual budget.
struct Scenario {
  int n = 0;
  double hop_mean = 0.0;
  double hop_var = 0.0;
  double deadline = 0.0;
  double p_tr = 0.0;
  double hop_distance = 0.0;

  NormalParams hop() const { return {hop_mean, hop_var}; }

  /// Delay law of the hops still ahead of node j.
  NormalParams remaining(int j) const { return hop().scaled(n - j); }

  /// Throws ValidationError naming the first offending field.
  void validate() const {
    auto positive = [](const char* field, double v) {
      if (!std::isfinite(v) || !(v > 0.0)) {
        throw ValidationError(field, "must be finite and > 0");
      }
    };
    if (n < 2) throw ValidationError("n", "n >= 2 required");
    positive("hop_mean", hop_mean);
    positive("hop_var", hop_var);
    positive("deadline", deadline);
    if (!std::isfinite(p_tr) || !(p_tr > 0.0 && p_tr < 1.0)) {
      throw ValidationError("p_tr", "p_tr must lie strictly inside (0,1)");
    }
    positive("hop_distance", hop_distance);
  }

  Scenario with_p_tr(double p) const {
    Scenario s = *this;
    s.p_tr = p;
    return s;
  }

  Scenario with_deadline(double t) const {
    Scenario s = *this;
    s.deadline = t;
    return s;
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Minimum residual budget required to continue from each decision node
/// j = 1..n-1.
class ThresholdTable {
 public:
  ThresholdTable() = default;
  explicit ThresholdTable(std::vector<double> q_star) : q_star_(std::move(q_star)) {}

  /// Same residual requirement at every node (the fixed rest-time rule).
  static ThresholdTable constant(int n, double residual) {
    return ThresholdTable(std::vector<double>(static_cast<std::size_t>(n - 1), residual));
  }

  /// Number of decision nodes (n - 1).
  int size() const { return static_cast<int>(q_star_.size()); }

  /// 1-based node index.
  double at(int j) const {
    if (j < 1 || j > size()) {
      throw std::out_of_range("ThresholdTable: node " + std::to_string(j) +
                              " outside 1.." + std::to_string(size()));
    }
    return q_star_[static_cast<std::size_t>(j - 1)];
  }

  /// Largest accumulated delay at node j that still continues.
  double bound(int j, double deadline) const { return deadline - at(j); }

  const std::vector<double>& values() const { return q_star_; }

 private:
  std::vector<double> q_star_;
};

inline ThresholdTable thresholds(const Scenario& s) {
  s.validate();
  std::vector<double> q(static_cast<std::size_t>(s.n - 1));
  for (int j = 1; j < s.n; ++j) {
    q[static_cast<std::size_t>(j - 1)] = inv_ccdf(s.p_tr, s.remaining(j));
  }
  return ThresholdTable(std::move(q));
}

enum class Decision { proceed, turn_back };

/// The single comparison every engine uses. Ties proceed.
inline bool turns_back(double accumulated, double bound) { return accumulated > bound; }

/// Equivalent to ccdf(T - t_k, remaining(k)) > p_tr.
inline Decision decision_rule(int k, double accumulated, const Scenario& s,
                              const ThresholdTable& tbl) {
  assert(k >= 1 && k <= s.n - 1);
  return turns_back(accumulated, tbl.bound(k, s.deadline)) ? Decision::turn_back
                                                           : Decision::proceed;
}

}  // namespace crankback
