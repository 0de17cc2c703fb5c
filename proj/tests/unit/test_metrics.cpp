#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "hetsched/catalog.hpp"
#include "hetsched/error.hpp"
#include "hetsched/metrics.hpp"

using namespace hetsched;
using hetsched::testing::chain;
using hetsched::testing::make_workload;

namespace {

// Logistic via tanh: 1/(1+e^x) = (1 - tanh(x/2)) / 2.
double rt_oracle(double theta, double phi, double k) {
  return 0.5 * (1.0 - std::tanh(k * (theta - phi) / phi / 2.0));
}

SweepRow row(double alpha, double median) {
  SweepRow r;
  r.alpha = alpha;
  r.score_median = median;
  return r;
}

}  // namespace

TEST(BasePeriod, LightGroupFromNpuTimes) {
  const std::vector<double> times{300.0, 1000.0, 1200.0};
  EXPECT_NEAR(base_period(times, 1), 2750.0, 1e-9);
  EXPECT_NEAR(base_period(times, 2), 5500.0, 1e-9);
  EXPECT_DOUBLE_EQ(base_period(times, 1, 0.0), 2500.0);
}

TEST(BasePeriod, FromCatalogWorkload) {
  auto catalog = builtin_catalog();
  CostModel cost(std::make_shared<const DeviceProfile>(derive_profile(catalog, default_device())));
  Scenario s;
  s.groups = {{0, {"mediapipe_face_detection", "mediapipe_selfie_segmentation",
                   "mediapipe_hand_detection"}}};
  auto w = resolve(s, catalog);
  auto base = base_periods(w, cost);
  ASSERT_EQ(base.size(), 1u);
  EXPECT_NEAR(base[0], 2750.0, 1e-6);
}

TEST(Period, ScalesByAlpha) {
  EXPECT_DOUBLE_EQ(period(1.0, 2750), 2750);
  EXPECT_DOUBLE_EQ(period(0.5, 2750), 1375);
  EXPECT_DOUBLE_EQ(period(1.4, 1000), 1400);
}

TEST(Makespans, MaxFinishMinusArrival) {
  auto w = make_workload({{"a", "b"}}, {chain("a", 1, 64), chain("b", 1, 64)});
  Trace t;
  t.requests = {{0, 0, 0, 0.0, 800.0}, {0, 0, 1, 0.0, 1200.0}, {0, 1, 0, 500.0, 900.0},
                {0, 1, 1, 500.0, 1100.0}};
  EXPECT_EQ(makespans(t, w, 0), (std::vector<double>{1200.0, 600.0}));
  t.requests.pop_back();
  EXPECT_THROW(makespans(t, w, 0), ValidationError);
}

TEST(Statistics, NearestRankAndMedian) {
  std::vector<double> v{1000, 100, 900, 200, 800, 300, 700, 400, 600, 500};
  EXPECT_DOUBLE_EQ(nearest_rank(v, 0.9), 900.0);
  EXPECT_DOUBLE_EQ(nearest_rank(v, 1.0), 1000.0);
  EXPECT_DOUBLE_EQ(mean(v), 550.0);
  EXPECT_DOUBLE_EQ(median(v), 550.0);
  EXPECT_DOUBLE_EQ(median(std::vector<double>{3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(nearest_rank(std::vector<double>{500}, 0.9), 500.0);
}

TEST(Qoe, CountsWithinDeadline) {
  EXPECT_DOUBLE_EQ(qoe_score(std::vector<double>{1, 2, 3}, 3), 1.0);
  EXPECT_DOUBLE_EQ(qoe_score(std::vector<double>{4, 5}, 3), 0.0);
  std::vector<double> ten{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_DOUBLE_EQ(qoe_score(ten, 7), 0.7);
  EXPECT_THROW(qoe_score(std::vector<double>{}, 3), ValidationError);
}

TEST(RtScore, SigmoidValues) {
  EXPECT_NEAR(rt_score(2750, 2750, 15), 0.5, 1e-12);
  EXPECT_NEAR(rt_score(1.0, 1e6, 15), 1.0, 1e-6);
  EXPECT_NEAR(rt_score(1.1 * 2750, 2750, 15), rt_oracle(1.1, 1.0, 15), 1e-12);
  EXPECT_NEAR(rt_score(1.1 * 2750, 2750, 15), 0.18242552380635635, 1e-12);
  EXPECT_GT(rt_score(100, 200), rt_score(101, 200));
  EXPECT_LT(rt_score(100, 200), rt_score(100, 201));
}

TEST(ScenarioScore, CompositionTables) {
  // Every request exactly at the deadline.
  auto at = score_groups({{1000, 1000, 1000}}, std::vector<double>{1000});
  EXPECT_DOUBLE_EQ(at.groups[0].qoe, 1.0);
  EXPECT_NEAR(scenario_score(at), 0.5, 1e-12);
  // Far within the deadline.
  auto fast = score_groups({{1, 1}}, std::vector<double>{1e6});
  EXPECT_NEAR(scenario_score(fast), 1.0, 1e-6);
  // One saturated group and one failing group.
  auto split = score_groups({{1e-9}, {1e9}}, std::vector<double>{1e3, 1.0});
  EXPECT_NEAR(scenario_score(split), rt_oracle(1e-9, 1e3, 15) / 2.0, 1e-12);
  // Mixed group: QoE 2/3, RtScores from the oracle.
  auto mixed = score_groups({{500, 1000, 1500}}, std::vector<double>{1000});
  const double expect = (rt_oracle(500, 1000, 15) + 0.5 + rt_oracle(1500, 1000, 15)) / 3.0 * (2.0 / 3.0);
  EXPECT_NEAR(scenario_score(mixed), expect, 1e-12);
  // Two groups with different deadlines.
  auto two = score_groups({{900, 1100}, {100}}, std::vector<double>{1000, 200});
  const double g0 = (rt_oracle(900, 1000, 15) + rt_oracle(1100, 1000, 15)) / 2.0 * 0.5;
  const double g1 = rt_oracle(100, 200, 15);
  EXPECT_NEAR(scenario_score(two), (g0 + g1) / 2.0, 1e-12);
}

TEST(AlphaGrid, PointsAndParse) {
  auto grid = AlphaGrid::parse("0.5:3.0:0.1");
  auto points = grid.points();
  ASSERT_EQ(points.size(), 26u);
  EXPECT_DOUBLE_EQ(points.front(), 0.5);
  EXPECT_DOUBLE_EQ(points[7], 1.2);
  EXPECT_DOUBLE_EQ(points.back(), 3.0);
  EXPECT_THROW(AlphaGrid::parse("3:1:0.1"), ValidationError);
  EXPECT_THROW(AlphaGrid::parse("1:3:0"), ValidationError);
  EXPECT_THROW(AlphaGrid::parse("1:3"), ValidationError);
  EXPECT_THROW(AlphaGrid::parse("a:b:c"), ValidationError);
}

TEST(Saturation, SmallestSaturatedAlpha) {
  std::vector<SweepRow> rows{row(0.6, 0.4), row(0.7, 0.97), row(0.8, 1.0), row(0.9, 1.0)};
  EXPECT_EQ(saturation_multiplier(rows), 0.8);
  std::vector<SweepRow> all{row(0.5, 0.996), row(0.6, 1.0)};
  EXPECT_EQ(saturation_multiplier(all), 0.5);
  std::vector<SweepRow> none{row(0.5, 0.2), row(0.6, 0.99)};
  EXPECT_FALSE(saturation_multiplier(none).has_value());
}

TEST(Sweep, NoiselessScoresNonDecreasing) {
  auto catalog = builtin_catalog();
  CostModel cost(std::make_shared<const DeviceProfile>(derive_profile(catalog, default_device())));
  auto w = resolve(generate_scenario(catalog, 2, 3, 3), catalog);
  std::vector<std::size_t> npu(w.network_count(), cost.profile().processor_index("NPU"));
  std::vector<PartitionedNetwork> parts;
  std::vector<std::vector<std::size_t>> procs;
  for (std::size_t m = 0; m < w.network_count(); ++m) {
    parts.push_back(decode_partition(w.network(m),
                                     std::vector<std::uint8_t>(w.network(m).edge_count(), 0)));
    procs.push_back({npu[m]});
  }
  std::vector<Solution> sols{build_solution(w, cost, parts, procs, w.catalog_order())};
  SweepConfig cfg;
  cfg.grid = AlphaGrid{0.5, 4.0, 0.1};
  cfg.requests = 10;
  auto rows = sweep(sols, w, cost, cfg);
  ASSERT_EQ(rows.size(), 36u);
  for (std::size_t i = 1; i < rows.size(); ++i)
    EXPECT_GE(rows[i].score_median, rows[i - 1].score_median) << rows[i].alpha;
  EXPECT_EQ(rows.front().avg_makespan_median.size(), 2u);
}
