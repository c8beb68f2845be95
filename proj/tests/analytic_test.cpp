#include "crankback/analytic.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace crankback {
namespace {

Scenario reference(double deadline, double p_tr = 0.9) {
  return {.n = 6, .hop_mean = 3.0, .hop_var = 1.0, .deadline = deadline, .p_tr = p_tr,
          .hop_distance = 3.0};
}

struct Row {
  double deadline;
  std::vector<double> published;
};

const std::vector<Row> kPublishedRows = {
    {16.0, {0.193, 0.194, 0.138, 0.103}},
    {15.0, {0.553, 0.159, 0.081, 0.052}},
    {14.0, {0.872, 0.056, 0.023, 0.014}},
};

TEST(Quadrature, ReproducesPublishedRows) {
  for (const Row& row : kPublishedRows) {
    const ReturnProfile p = return_profile_quadrature(reference(row.deadline), 4);
    ASSERT_EQ(p.depth(), 4);
    EXPECT_FALSE(p.p_success.has_value());
    for (int k = 1; k <= 4; ++k) {
      EXPECT_NEAR(p.at(k), row.published[k - 1], 0.005) << "T=" << row.deadline << " k=" << k;
    }
  }
}

TEST(Quadrature, FirstEntryIsClosedForm) {
  const Scenario s = reference(16.0);
  const ReturnProfile p = return_profile_quadrature(s, 1);
  const double bound = 16.0 - thresholds(s).at(1);
  EXPECT_NEAR(p.at(1), testing::ccdf(bound, 3.0, 1.0), 1e-12);
  EXPECT_NEAR(p.at(1), 0.1933, 1e-4);
}

TEST(Quadrature, UnboundedBudgetNeverReturns) {
  const ReturnProfile p = return_profile_quadrature(reference(1000.0), 5);
  for (double v : p.p_return) EXPECT_LT(v, 1e-9);
  EXPECT_NEAR(p.success(), 1.0, 1e-9);
}

TEST(Quadrature, EmptyFirstRegion) {
  // Budget below the first threshold: node 1 sends back everything.
  const Scenario s = reference(5.0);
  ASSERT_LT(s.deadline - thresholds(s).at(1), 0.0);
  const ReturnProfile p = return_profile_quadrature(s, 5);
  EXPECT_NEAR(p.at(1), ccdf(s.deadline - thresholds(s).at(1), s.hop()), 1e-15);
  for (int k = 2; k <= 5; ++k) EXPECT_EQ(p.at(k), 0.0);
}

TEST(Quadrature, RejectsBadArguments) {
  EXPECT_THROW(return_profile_quadrature(reference(16.0), 6), std::invalid_argument);
  EXPECT_THROW(return_profile_quadrature(reference(16.0), 0), std::invalid_argument);
  EXPECT_THROW(return_profile_quadrature(reference(16.0), 2, 0.0), std::invalid_argument);
}

TEST(Grid, AgreesWithQuadrature) {
  for (double deadline : {16.0, 15.0, 14.0}) {
    const ReturnProfile grid = return_profile_grid(reference(deadline));
    const ReturnProfile quad = return_profile_quadrature(reference(deadline), 3);
    for (int k = 1; k <= 3; ++k) {
      EXPECT_NEAR(grid.at(k), quad.at(k), 1e-4) << "T=" << deadline << " k=" << k;
    }
    EXPECT_FALSE(grid.quality_warning);
  }
}

TEST(Grid, FullDepthAgreesWithQuadrature) {
  const ReturnProfile grid = return_profile_grid(reference(16.0));
  const ReturnProfile quad = return_profile_quadrature(reference(16.0), 5);
  for (int k = 1; k <= 5; ++k) EXPECT_NEAR(grid.at(k), quad.at(k), 1e-4);
  EXPECT_NEAR(grid.success(), quad.success(), 1e-4);
  EXPECT_NEAR(grid.dropped_mass, quad.dropped_mass, 1e-4);
}

TEST(Grid, PublishedSingleRunReferences) {
  // Single simulation run of unstated size; loose bands.
  EXPECT_NEAR(return_profile_grid(reference(16.0)).at(5), 0.073, 0.03);
  EXPECT_NEAR(return_profile_grid(reference(15.0)).success(), 0.125, 0.02);
}

TEST(Grid, SumRule) {
  for (double deadline : {16.0, 15.0, 14.0}) {
    const Scenario s = reference(deadline);
    const ReturnProfile p = return_profile_grid(s);
    EXPECT_LE(std::abs(p.total_return() + p.success() - 1.0), 5e-3);
    // What is neither returned nor delivered is the excluded negative-delay mass.
    EXPECT_LE(p.dropped_mass, 5e-3);
    EXPECT_LE(p.dropped_mass, s.n * cdf(0.0, s.hop()));
    EXPECT_GE(p.dropped_mass, 0.0);
  }
}

TEST(Grid, UnboundedBudgetNeverReturns) {
  const ReturnProfile p = return_profile_grid(reference(1000.0));
  for (double v : p.p_return) EXPECT_LT(v, 1e-9);
}

TEST(Grid, EmptyContinuationRegionPropagatesZero) {
  const ReturnProfile p = return_profile_grid(reference(5.0));
  EXPECT_GT(p.at(1), 0.99);
  for (int k = 2; k <= 5; ++k) EXPECT_EQ(p.at(k), 0.0);
}

TEST(Grid, ConstantThresholdTable) {
  // Residual requirement above the deadline: every survivor of hop 1 with
  // positive delay turns back.
  const Scenario s = reference(16.0);
  const ReturnProfile p = return_profile_grid(s, ThresholdTable::constant(s.n, 20.0));
  EXPECT_NEAR(p.at(1), ccdf(-4.0, s.hop()), 1e-15);
  for (int k = 2; k <= 5; ++k) EXPECT_EQ(p.at(k), 0.0);
}

TEST(Grid, CoarseGridRaisesQualityWarning) {
  // Nearly deterministic hops: the density is a spike the grid cannot resolve.
  Scenario s = reference(16.0);
  s.hop_var = 1e-4;
  s.p_tr = 0.5;
  s.deadline = 18.0;
  const ReturnProfile p = return_profile_grid(s, 256);
  EXPECT_TRUE(p.quality_warning);
  EXPECT_GT(p.error_estimate, kGridErrorBudget);
}

TEST(Grid, RejectsBadArguments) {
  EXPECT_THROW(return_profile_grid(reference(16.0), 255), std::invalid_argument);
  const Scenario s = reference(16.0);
  EXPECT_THROW(return_profile_grid(s, ThresholdTable::constant(4, 1.0)), std::invalid_argument);
}

TEST(Approx, PublishedExample) {
  const ReturnProfile p = approx_profile(reference(16.0));
  EXPECT_EQ(p.method, Method::approx);
  EXPECT_NEAR(p.at(3), 0.11, 0.015);
  EXPECT_NEAR(p.at(5), 0.08, 0.015);
}

TEST(Approx, MatchesDirectOracle) {
  // Stop-region probabilities evaluated with the series oracle.
  const double z = testing::std_inv_ccdf(0.9);
  auto stop = [&](int k) {
    const double q = (6 - k) * 3.0 + z * std::sqrt(6.0 - k);
    return testing::ccdf(16.0 - q, 3.0 * k, 1.0 * k);
  };
  const ReturnProfile p = approx_profile(reference(16.0));
  EXPECT_NEAR(p.at(1), stop(1), 1e-9);
  for (int k = 2; k <= 5; ++k) EXPECT_NEAR(p.at(k), stop(k) - stop(k - 1), 1e-9);
  EXPECT_NEAR(p.at(3), 0.1043, 1e-4);
  EXPECT_NEAR(p.at(5), 0.0887, 1e-4);
}

TEST(Approx, FirstEntryEqualsExact) {
  for (double deadline : {14.0, 15.0, 16.0}) {
    const Scenario s = reference(deadline);
    EXPECT_NEAR(approx_profile(s).at(1), return_profile_quadrature(s, 1).at(1), 1e-9);
    EXPECT_NEAR(approx_profile(s).at(1), return_profile_grid(s).at(1), 1e-9);
  }
}

TEST(Approx, DifferencesClampedAtZero) {
  // T=14 has a decreasing stop-region probability between nodes 1 and 2.
  const ReturnProfile p = approx_profile(reference(14.0));
  for (double v : p.p_return) EXPECT_GE(v, 0.0);
  EXPECT_EQ(p.at(2), 0.0);
}

TEST(SuccessProbability, ReferenceValue) {
  EXPECT_NEAR(success_probability(reference(16.0)), 0.288, 0.02);
  EXPECT_NEAR(success_probability(reference(16.0), Method::quadrature),
              success_probability(reference(16.0), Method::grid), 1e-4);
  EXPECT_THROW(success_probability(reference(16.0), Method::approx), std::invalid_argument);
}

TEST(SuccessProbability, ExtremeThresholds) {
  EXPECT_LE(success_probability(reference(16.0, 1e-6)), 1e-3);
  // At p_tr = 1 - 1e-6 the thresholds sit only 4.75 standard deviations
  // below the remaining mean, so the late nodes still send back ~11% at T=16.
  EXPECT_NEAR(success_probability(reference(16.0, 1.0 - 1e-6)), 0.891, 0.005);
  EXPECT_GE(success_probability(reference(30.0, 1.0 - 1e-6)), 1.0 - 1e-6);
  double prev = 0.0;
  for (double eps : {1e-2, 1e-4, 1e-6, 1e-9, 1e-12}) {
    const double h = success_probability(reference(16.0, 1.0 - eps));
    EXPECT_GE(h, prev);
    prev = h;
  }
  EXPECT_GT(prev, 0.98);
}

TEST(AnalyticProperties, MonotoneInDeadline) {
  double prev_h = -1.0;
  double prev_p1 = 2.0;
  double prev_returns = 2.0;
  for (double deadline : {13.0, 14.0, 15.0, 16.0, 17.0, 18.0}) {
    const ReturnProfile p = return_profile_grid(reference(deadline));
    EXPECT_GE(p.success(), prev_h);
    EXPECT_LE(p.at(1), prev_p1);
    EXPECT_LE(p.total_return(), prev_returns);
    prev_h = p.success();
    prev_p1 = p.at(1);
    prev_returns = p.total_return();
  }
}

TEST(AnalyticProperties, SuccessMonotoneInThreshold) {
  double prev = -1.0;
  for (double p_tr : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99}) {
    const double h = success_probability(reference(16.0, p_tr));
    EXPECT_GE(h, prev) << p_tr;
    prev = h;
  }
}

TEST(AnalyticProperties, EntriesAreProbabilities) {
  for (double deadline : {10.0, 14.0, 16.0, 20.0}) {
    for (const ReturnProfile& p : {return_profile_grid(reference(deadline)),
                                   approx_profile(reference(deadline))}) {
      for (double v : p.p_return) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
  }
}

}  // namespace
}  // namespace crankback
