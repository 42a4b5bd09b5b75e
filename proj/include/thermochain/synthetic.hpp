#pragma once

// Seeded synthetic occupancy for a two-zone teaching building, 8:00-17:00.
// Zone 1 is a lecture room with a lunch dip; zone 2 is a seminar room used
// mostly in the afternoon.

#include <cstdint>
#include <vector>

#include "thermochain/occupancy.hpp"

namespace thermochain {

inline constexpr std::uint64_t kSyntheticSeed = 20210;
inline constexpr int kSyntheticDays = 180;
inline constexpr int kSyntheticFirstHour = 8;

/// Generator parameters: per hour boundary 8->9 .. 16->17, (p_vf, p_ff).
inline std::vector<TransitionSchedule> synthetic_two_zone_schedules() {
  struct Row {
    double p_vf, p_ff;
  };
  const std::vector<std::vector<Row>> zones{
      {{0.40, 0.90}, {0.30, 0.55}, {0.30, 0.50}, {0.20, 0.40}, {0.25, 0.30},
       {0.35, 0.50}, {0.30, 0.45}, {0.25, 0.40}, {0.15, 0.30}},
      {{0.30, 0.90}, {0.25, 0.50}, {0.25, 0.45}, {0.20, 0.35}, {0.30, 0.45},
       {0.35, 0.55}, {0.35, 0.50}, {0.30, 0.45}, {0.20, 0.35}},
  };
  std::vector<TransitionSchedule> out;
  for (const auto& rows : zones) {
    TransitionSchedule s;
    s.first_hour = kSyntheticFirstHour;
    int hour = kSyntheticFirstHour;
    for (const Row& r : rows) s.steps.push_back({hour++, r.p_vf, r.p_ff, false, false});
    out.push_back(std::move(s));
  }
  return out;
}

/// Occupancy logs sampled from the generator; zone i uses seed + i. Every
/// zone starts the day empty.
inline std::vector<OccupancyDataset> synthetic_two_zone_datasets(
    std::uint64_t seed = kSyntheticSeed, int days = kSyntheticDays) {
  std::vector<OccupancyDataset> out;
  std::uint64_t s = seed;
  for (const auto& schedule : synthetic_two_zone_schedules()) {
    out.push_back(sample_dataset(schedule, days, 0.0, s++));
  }
  return out;
}

}  // namespace thermochain
