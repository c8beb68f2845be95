#include "crankback/golden.hpp"

#include <gtest/gtest.h>

namespace crankback {
namespace {

const GoldenTable& table(const std::vector<GoldenTable>& tables, const std::string& id) {
  for (const auto& t : tables) {
    if (t.id == id) return t;
  }
  throw std::out_of_range(id);
}

TEST(GoldenTables, FixedContents) {
  const auto tables = golden_tables();
  ASSERT_EQ(tables.size(), 5u);
  EXPECT_EQ(table(tables, "deadline-15").find("P2", GoldenSource::calculated)->value, 0.159);
  EXPECT_EQ(table(tables, "deadline-14").find("P1", GoldenSource::single_run)->value, 0.848);
  EXPECT_EQ(table(tables, "deadline-16").find("success", GoldenSource::single_run)->value, 0.288);
  EXPECT_EQ(table(tables, "approximation").find("approx P3", GoldenSource::calculated)->value, 0.11);
  EXPECT_EQ(table(tables, "waste-example").input_profile->p_return,
            (std::vector<double>{0.2, 0.7}));
}

TEST(GoldenTables, RowsUseReferenceScenario) {
  for (const auto& t : golden_tables()) {
    if (t.kind != GoldenKind::calculation_row) continue;
    EXPECT_EQ(t.scenario.n, 6);
    EXPECT_EQ(t.scenario.hop_mean, 3.0);
    EXPECT_EQ(t.scenario.hop_var, 1.0);
    EXPECT_EQ(t.scenario.p_tr, 0.9);
    EXPECT_EQ(t.values.size(), 10u);
  }
}

TEST(GoldenTables, SingleRunTolerancesAreLoose) {
  for (const auto& t : golden_tables()) {
    for (const auto& v : t.values) {
      if (v.source == GoldenSource::single_run) {
        EXPECT_GE(v.tol, 0.015);
      }
    }
  }
}

TEST(Reproduce, AllRowsPass) {
  ReproduceOptions opts;
  opts.trials = 1'000'000;
  const auto rows = reproduce(opts);
  EXPECT_EQ(rows.size(), 3u * 6u + 3u + 2u);
  for (const auto& r : rows) EXPECT_TRUE(r.pass) << r.table << " " << r.quantity << ": " << r.failures;
}

TEST(Reproduce, FailureIsReported) {
  // Too few trials for the Monte Carlo band.
  ReproduceOptions opts;
  opts.trials = 200;
  bool any_failed = false;
  for (const auto& r : reproduce(opts)) {
    if (!r.pass) {
      any_failed = true;
      EXPECT_FALSE(r.failures.empty());
    }
  }
  EXPECT_TRUE(any_failed);
}

}  // namespace
}  // namespace crankback
