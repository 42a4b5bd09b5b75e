#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "support.hpp"
#include "thermochain/occupancy.hpp"

using namespace thermochain;

namespace {

OccupancyDataset table1_week() {
  const std::string path = std::string(TC_DATA_DIR) + "/paper_two_zone/table1_first_week.csv";
  std::ifstream in(path);
  return parse_occupancy_csv(in, path);
}

OccupancyDataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_occupancy_csv(in, "inline.csv");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(ParseOccupancyCsv, FirstWeekHasSevenDays) {
  const OccupancyDataset d = table1_week();
  EXPECT_EQ(d.day_count(), 7u);
  EXPECT_EQ(d.first_hour(), 8);
  EXPECT_EQ(d.last_hour(), 17);
}

TEST(ParseOccupancyCsv, Errors) {
  EXPECT_NE(error_of("").find("no records"), std::string::npos);
  EXPECT_NE(error_of("day,hour,occupied\n").find("no records"), std::string::npos);
  EXPECT_NE(error_of("day,hour,occupied\n3,8,0\n3,9,2\n").find("occupied must be 0 or 1"),
            std::string::npos);
  const std::string dup = error_of("day,hour,occupied\n1,8,0\n1,8,1\n");
  EXPECT_NE(dup.find("duplicate"), std::string::npos);
  EXPECT_NE(dup.find(":3"), std::string::npos) << dup;
  EXPECT_NE(error_of("day,hour,occupied\n1,8,0\n1,10,1\n").find("gap"), std::string::npos);
  EXPECT_NE(error_of("day,hour,occupied\n1,8,0\n1,x,1\n").find("inline.csv:3"), std::string::npos);
  EXPECT_NE(error_of("when,hour,occupied\n1,8,0\n"), "");
  EXPECT_NE(error_of("day,hour,occupied\n1,8,0\n1,9,1\n2,8,0\n").find("missing"), std::string::npos);
}

TEST(ParseOccupancyCsv, RoundTripsThroughWriter) {
  const OccupancyDataset d = table1_week();
  std::ostringstream out;
  write_occupancy_csv(out, d);
  const OccupancyDataset back = parse(out.str());
  ASSERT_EQ(back.day_count(), d.day_count());
  for (std::size_t i = 0; i < d.day_count(); ++i) {
    for (std::size_t h = 0; h < d.hours().size(); ++h) EXPECT_EQ(back.occupied(i, h), d.occupied(i, h));
  }
}

TEST(Estimate, NineAmFromTheFirstWeek) {
  const TransitionSchedule s = estimate_transition_schedule(table1_week());
  ASSERT_EQ(s.size(), 9u);
  EXPECT_EQ(s.steps[0].hour, 8);
  EXPECT_DOUBLE_EQ(s.steps[0].p_vf, 3.0 / 7.0);
  EXPECT_DOUBLE_EQ(s.steps[0].p_vv(), 4.0 / 7.0);
  EXPECT_NEAR(s.steps[0].p_vf, 0.43, 0.005);
  // Nobody is in at 8 am, so the occupied row is the stay-in-state default.
  EXPECT_TRUE(s.steps[0].occupied_row_defaulted);
  EXPECT_EQ(s.steps[0].p_ff, 1.0);
  ASSERT_FALSE(s.diagnostics.empty());
  EXPECT_EQ(*s.diagnostics[0].hour, 8);
  EXPECT_EQ(s.diagnostics[0].condition, "occupied");
}

TEST(Estimate, FourToFivePmConditionedOnEmpty) {
  const TransitionSchedule s = estimate_transition_schedule(table1_week());
  const StepTransition& last = s.steps.back();
  EXPECT_EQ(last.hour, 16);
  EXPECT_DOUBLE_EQ(last.p_vf, 0.5);
  // Days 5-7 were occupied at 4 pm; only day 7 stayed.
  EXPECT_DOUBLE_EQ(last.p_ff, 1.0 / 3.0);
}

TEST(Estimate, AlwaysOccupiedDefaultsEmptyRows) {
  std::vector<std::vector<bool>> rows(5, std::vector<bool>(4, true));
  const OccupancyDataset d({1, 2, 3, 4, 5}, {9, 10, 11, 12}, rows);
  const TransitionSchedule s = estimate_transition_schedule(d);
  ASSERT_EQ(s.size(), 3u);
  for (const auto& st : s.steps) {
    EXPECT_EQ(st.p_ff, 1.0);
    EXPECT_TRUE(st.empty_row_defaulted);
    EXPECT_EQ(st.p_vv(), 1.0);
  }
  EXPECT_EQ(s.diagnostics.size(), 3u);
}

TEST(Estimate, PseudoCountSmooths) {
  const TransitionSchedule s = estimate_transition_schedule(table1_week(), 1.0);
  EXPECT_DOUBLE_EQ(s.steps[0].p_vf, 4.0 / 9.0);
  EXPECT_DOUBLE_EQ(s.steps[0].p_ff, 0.5);
  EXPECT_FALSE(s.steps[0].occupied_row_defaulted);
  EXPECT_THROW(estimate_transition_schedule(table1_week(), -1.0), ValidationError);
}

TEST(Estimate, RowsSumToOne) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const TransitionSchedule truth = tc_test::random_schedule(rng, 9);
    const TransitionSchedule s =
        estimate_transition_schedule(sample_dataset(truth, 1 + static_cast<int>(rng() % 40), 0.3, rng()));
    for (const auto& st : s.steps) {
      EXPECT_NEAR(st.p_vf + st.p_vv(), 1.0, 1e-12);
      EXPECT_NEAR(st.p_ff + st.p_fv(), 1.0, 1e-12);
      EXPECT_GE(st.p_vf, 0.0);
      EXPECT_LE(st.p_ff, 1.0);
    }
  }
}

TEST(Estimate, InvariantUnderDayPermutation) {
  std::mt19937_64 rng(5);
  const TransitionSchedule truth = tc_test::random_schedule(rng, 6);
  const OccupancyDataset d = sample_dataset(truth, 60, 0.5, 99);
  std::vector<std::size_t> order(d.day_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> days;
  std::vector<std::vector<bool>> rows;
  for (std::size_t i : order) {
    days.push_back(d.days()[i]);
    std::vector<bool> row;
    for (std::size_t h = 0; h < d.hours().size(); ++h) row.push_back(d.occupied(i, h));
    rows.push_back(row);
  }
  const TransitionSchedule a = estimate_transition_schedule(d);
  const TransitionSchedule b = estimate_transition_schedule(OccupancyDataset(days, d.hours(), rows));
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a.steps[k].p_vf, b.steps[k].p_vf);
    EXPECT_EQ(a.steps[k].p_ff, b.steps[k].p_ff);
  }
}

TEST(Estimate, ConvergesOnLargeSample) {
  std::mt19937_64 rng(17);
  const TransitionSchedule truth = tc_test::random_schedule(rng, 9);
  const TransitionSchedule est = estimate_transition_schedule(sample_dataset(truth, 10000, 0.5, 2024));
  double worst = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    worst = std::max(worst, std::abs(est.steps[k].p_vf - truth.steps[k].p_vf));
    worst = std::max(worst, std::abs(est.steps[k].p_ff - truth.steps[k].p_ff));
  }
  EXPECT_LT(worst, 0.05);
}

TEST(Marginals, Examples) {
  const TransitionSchedule s = estimate_transition_schedule(table1_week());
  const std::vector<double> m = occupancy_marginals(s, 0.0);
  ASSERT_EQ(m.size(), 10u);
  EXPECT_DOUBLE_EQ(m[1], 3.0 / 7.0);

  TransitionSchedule absorbing;
  absorbing.first_hour = 0;
  for (int k = 0; k < 5; ++k) absorbing.steps.push_back({k, 0.0, 1.0, false, false});
  for (double v : occupancy_marginals(absorbing, 1.0)) EXPECT_EQ(v, 1.0);

  TransitionSchedule mixing;
  mixing.first_hour = 0;
  for (int k = 0; k < 5; ++k) mixing.steps.push_back({k, 0.5, 0.5, false, false});
  for (double init : {0.0, 0.3, 1.0}) {
    const auto mm = occupancy_marginals(mixing, init);
    for (std::size_t k = 1; k < mm.size(); ++k) EXPECT_EQ(mm[k], 0.5);
  }
  EXPECT_THROW(occupancy_marginals(mixing, 1.5), ValidationError);
}

TEST(Marginals, StayInUnitInterval) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    const TransitionSchedule s = tc_test::random_schedule(rng, 12);
    for (double v : occupancy_marginals(s, tc_test::uniform(rng))) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Schedule, WindowAndValidation) {
  const TransitionSchedule s = estimate_transition_schedule(table1_week());
  const TransitionSchedule w = s.window(10, 3);
  EXPECT_EQ(w.first_hour, 10);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w.steps[0].p_vf, s.steps[2].p_vf);
  EXPECT_TRUE(w.diagnostics.empty());
  EXPECT_THROW(s.window(7, 2), ValidationError);
  EXPECT_THROW(s.window(15, 3), ValidationError);

  TransitionSchedule bad = s;
  bad.steps[1].p_vf = 1.5;
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Sampling, IsReproducible) {
  std::mt19937_64 rng(29);
  const TransitionSchedule truth = tc_test::random_schedule(rng, 5);
  const OccupancyDataset a = sample_dataset(truth, 20, 0.5, 42);
  const OccupancyDataset b = sample_dataset(truth, 20, 0.5, 42);
  std::ostringstream sa, sb;
  write_occupancy_csv(sa, a);
  write_occupancy_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_THROW(sample_dataset(truth, 0, 0.5, 42), ValidationError);
}
