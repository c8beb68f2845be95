#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crankback/analytic.hpp"
#include "crankback/planner.hpp"
#include "crankback/profile.hpp"
#include "crankback/scenario.hpp"
#include "crankback/simulation.hpp"

namespace crankback {

// Published reference values for the 6-hop path with hop delay Normal(3, 1)
// and p_tr = 0.9, and the tolerances they are checked at.

inline constexpr double kCalculatedTol = 0.005;
inline constexpr double kSingleRunTol = 0.03;
inline constexpr double kApproxTol = 0.015;
inline constexpr double kMonteCarloTol = 0.004;
inline constexpr double kIdentityTol = 1e-9;
inline constexpr double kWasteRelTol = 1e-12;

enum class GoldenKind { calculation_row, approximation, waste };

enum class GoldenSource {
  calculated,
  // One simulation run of unstated size; a loose sanity band only.
  single_run,
};

struct GoldenValue {
  std::string quantity;  // "P1".."P5", "success", "waste_per_success", ...
  int node = 0;          // 1-based return node, n for success, 0 otherwise
  double value = 0.0;
  double tol = 0.0;
  GoldenSource source = GoldenSource::calculated;
};

struct GoldenTable {
  std::string id;
  GoldenKind kind = GoldenKind::calculation_row;
  Scenario scenario;
  std::vector<GoldenValue> values;
  // Waste example only: the hand-built profile the published arithmetic uses.
  std::optional<ReturnProfile> input_profile;

  const GoldenValue* find(const std::string& quantity, GoldenSource source) const {
    for (const auto& v : values) {
      if (v.quantity == quantity && v.source == source) return &v;
    }
    return nullptr;
  }
};

/// Six-hop scenario with hop delay Normal(3, 1), p_tr = 0.9, per-hop cost 3.
inline Scenario reference_scenario(double deadline) {
  return Scenario{.n = 6, .hop_mean = 3.0, .hop_var = 1.0, .deadline = deadline, .p_tr = 0.9,
                  .hop_distance = 3.0};
}

namespace detail {

inline GoldenTable calculation_row(double deadline, std::vector<double> calculated,
                                   std::vector<double> single_run, double success_tol) {
  GoldenTable t;
  t.id = "deadline-" + std::to_string(static_cast<int>(deadline));
  t.kind = GoldenKind::calculation_row;
  t.scenario = reference_scenario(deadline);
  for (std::size_t i = 0; i < calculated.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    t.values.push_back({"P" + std::to_string(k), k, calculated[i], kCalculatedTol,
                        GoldenSource::calculated});
  }
  // The last single-run entry is the delivered fraction.
  for (std::size_t i = 0; i < single_run.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    const bool success = i + 1 == single_run.size();
    t.values.push_back({success ? "success" : "P" + std::to_string(k), k, single_run[i],
                        success ? success_tol : kSingleRunTol, GoldenSource::single_run});
  }
  return t;
}

}  // namespace detail

/// The five embedded reference tables: three deadline rows, the coarse
/// approximation example and the worked waste example.
inline std::vector<GoldenTable> golden_tables() {
  std::vector<GoldenTable> tables;
  tables.push_back(detail::calculation_row(16.0, {0.193, 0.194, 0.138, 0.103},
                                           {0.21, 0.194, 0.128, 0.103, 0.073, 0.288}, 0.02));
  tables.push_back(detail::calculation_row(15.0, {0.553, 0.159, 0.081, 0.052},
                                           {0.54, 0.15, 0.085, 0.054, 0.039, 0.125}, 0.02));
  tables.push_back(detail::calculation_row(14.0, {0.872, 0.056, 0.023, 0.014},
                                           {0.848, 0.076, 0.021, 0.018, 0.01, 0.026}, 0.015));

  GoldenTable approx;
  approx.id = "approximation";
  approx.kind = GoldenKind::approximation;
  approx.scenario = reference_scenario(16.0);
  approx.values = {{"approx P3", 3, 0.11, kApproxTol, GoldenSource::calculated},
                   {"approx P5", 5, 0.08, kApproxTol, GoldenSource::calculated}};
  tables.push_back(approx);

  // 1000 attempts: 200 back from node 1, 700 back from node 2, 100 delivered.
  GoldenTable waste;
  waste.id = "waste-example";
  waste.kind = GoldenKind::waste;
  waste.scenario = Scenario{.n = 4, .hop_mean = 1.0, .hop_var = 1.0, .deadline = 1.0,
                            .p_tr = 0.5, .hop_distance = 1.0};
  ReturnProfile input;
  input.method = Method::montecarlo;
  input.p_return = {0.2, 0.7};
  input.p_success = 0.1;
  waste.input_profile = input;
  waste.values = {{"waste_per_success", 0, 32.0, kWasteRelTol * 32.0, GoldenSource::calculated},
                  {"expected_total_distance", 0, 36.0, kWasteRelTol * 36.0,
                   GoldenSource::calculated}};
  tables.push_back(waste);
  return tables;
}

// ---------------------------------------------------------------------------
// Reproduction: analytic engine and simulator against the reference values.
// ---------------------------------------------------------------------------

struct ReproduceOptions {
  std::uint64_t trials = kDefaultTrials;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  int grid_points = kDefaultGridPoints;
};

/// One quantity of one table: the published numbers next to ours.
struct Comparison {
  std::string table;
  std::string quantity;
  std::optional<double> ref_calculated;
  std::optional<double> ref_single_run;
  double analytic = 0.0;
  std::optional<double> simulated;
  bool pass = true;
  std::string failures;  // which checks failed, empty when pass
};

namespace detail {

inline void check(Comparison& c, bool ok, const std::string& what) {
  if (ok) return;
  c.pass = false;
  if (!c.failures.empty()) c.failures += "; ";
  c.failures += what;
}

inline std::vector<Comparison> reproduce_row(const GoldenTable& t, const ReproduceOptions& opts) {
  const ReturnProfile analytic = return_profile_grid(t.scenario, opts.grid_points);
  SimConfig cfg;
  cfg.trials = opts.trials;
  cfg.seed = opts.seed;
  cfg.workers = opts.workers;
  const SimReport sim = simulate_profile(t.scenario, cfg);

  std::vector<Comparison> rows;
  for (int k = 1; k <= t.scenario.n; ++k) {
    const bool success = k == t.scenario.n;
    Comparison c;
    c.table = t.id;
    c.quantity = success ? "success" : "P" + std::to_string(k);
    c.analytic = success ? analytic.success() : analytic.at(k);
    c.simulated = success ? sim.profile.success() : sim.profile.at(k);
    check(c, std::abs(*c.simulated - c.analytic) <= kMonteCarloTol, "monte carlo vs analytic");
    if (const GoldenValue* v = t.find(c.quantity, GoldenSource::calculated)) {
      c.ref_calculated = v->value;
      check(c, std::abs(c.analytic - v->value) <= v->tol, "analytic vs published calculation");
    }
    if (const GoldenValue* v = t.find(c.quantity, GoldenSource::single_run)) {
      c.ref_single_run = v->value;
      check(c, std::abs(c.analytic - v->value) <= v->tol, "analytic vs published single run");
    }
    rows.push_back(std::move(c));
  }
  return rows;
}

inline std::vector<Comparison> reproduce_approx(const GoldenTable& t, const ReproduceOptions& opts) {
  const ReturnProfile approx = approx_profile(t.scenario);
  const ReturnProfile exact = return_profile_grid(t.scenario, opts.grid_points);
  std::vector<Comparison> rows;

  Comparison first;
  first.table = t.id;
  first.quantity = "approx P1 = exact P1";
  first.analytic = approx.at(1);
  first.ref_calculated = exact.at(1);
  check(first, std::abs(approx.at(1) - exact.at(1)) <= kIdentityTol, "first-entry identity");
  rows.push_back(first);

  for (const GoldenValue& v : t.values) {
    Comparison c;
    c.table = t.id;
    c.quantity = v.quantity;
    c.ref_calculated = v.value;
    c.analytic = approx.at(v.node);
    check(c, std::abs(c.analytic - v.value) <= v.tol, "approximation vs published");
    rows.push_back(std::move(c));
  }
  return rows;
}

inline std::vector<Comparison> reproduce_waste(const GoldenTable& t) {
  const ReturnProfile& profile = *t.input_profile;
  std::vector<Comparison> rows;
  for (const GoldenValue& v : t.values) {
    Comparison c;
    c.table = t.id;
    c.quantity = v.quantity + " [per-hop cost]";
    c.ref_calculated = v.value;
    c.analytic = v.quantity == "waste_per_success"
                     ? waste_per_success(profile, t.scenario.hop_distance)
                     : expected_total_distance(profile, t.scenario.hop_distance, t.scenario.n);
    check(c, std::abs(c.analytic - v.value) <= v.tol, "waste arithmetic");
    rows.push_back(std::move(c));
  }
  return rows;
}

}  // namespace detail

inline std::vector<Comparison> reproduce(const ReproduceOptions& opts = {}) {
  std::vector<Comparison> out;
  for (const GoldenTable& t : golden_tables()) {
    std::vector<Comparison> rows;
    switch (t.kind) {
      case GoldenKind::calculation_row: rows = detail::reproduce_row(t, opts); break;
      case GoldenKind::approximation: rows = detail::reproduce_approx(t, opts); break;
      case GoldenKind::waste: rows = detail::reproduce_waste(t); break;
    }
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

}  // namespace crankback
