#pragma once

// Hourly occupancy logs and the time-dependent two-state (occupied "f" /
// empty "v") transition matrices estimated from them.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "thermochain/error.hpp"

namespace thermochain {

class OccupancyDataset {
 public:
  OccupancyDataset() = default;

  /// occupied[d][h] is the observation for days[d] at hours[h].
  OccupancyDataset(std::vector<int> days, std::vector<int> hours,
                   std::vector<std::vector<bool>> occupied)
      : days_(std::move(days)), hours_(std::move(hours)), occupied_(std::move(occupied)) {
    if (days_.empty() || hours_.empty()) throw ValidationError("no records");
    for (std::size_t i = 1; i < hours_.size(); ++i) {
      if (hours_[i] != hours_[i - 1] + 1) {
        throw ValidationError("hours must be contiguous and increasing; gap after hour " +
                              std::to_string(hours_[i - 1]));
      }
    }
    if (std::set<int>(days_.begin(), days_.end()).size() != days_.size()) {
      throw ValidationError("duplicate day in dataset");
    }
    if (occupied_.size() != days_.size()) throw ValidationError("record matrix has wrong day count");
    for (const auto& row : occupied_) {
      if (row.size() != hours_.size()) throw ValidationError("record matrix has wrong hour count");
    }
  }

  std::size_t day_count() const { return days_.size(); }
  const std::vector<int>& days() const { return days_; }
  const std::vector<int>& hours() const { return hours_; }
  int first_hour() const { return hours_.front(); }
  int last_hour() const { return hours_.back(); }
  bool occupied(std::size_t day_index, std::size_t hour_index) const {
    return occupied_[day_index][hour_index];
  }

 private:
  std::vector<int> days_;
  std::vector<int> hours_;
  std::vector<std::vector<bool>> occupied_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::optional<long> parse_int(const std::string& field) {
  const std::string t = trim(field);
  if (t.empty()) return std::nullopt;
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(t, &pos);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (pos != t.size()) return std::nullopt;
  return v;
}

}  // namespace detail

/// Reads `day,hour,occupied` CSV. `source` names the input in error messages.
inline OccupancyDataset parse_occupancy_csv(std::istream& in,
                                            const std::string& source = "<input>") {
  auto fail = [&](std::size_t line, const std::string& msg) -> ValidationError {
    return ValidationError(source + ":" + std::to_string(line) + ": " + msg);
  };

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::string compact;
    for (char c : line) {
      if (c != ' ' && c != '\t' && c != '\r') compact += c;
    }
    if (compact != "day,hour,occupied") {
      throw fail(line_no, "expected header 'day,hour,occupied'");
    }
    have_header = true;
    break;
  }
  if (!have_header) throw ValidationError(source + ": no records");

  std::map<int, std::map<int, bool>> records;
  std::set<int> hours;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 3) throw fail(line_no, "expected 3 fields, got " + std::to_string(fields.size()));
    const auto day = detail::parse_int(fields[0]);
    const auto hour = detail::parse_int(fields[1]);
    const auto occ = detail::parse_int(fields[2]);
    if (!day || !hour || !occ) throw fail(line_no, "malformed row");
    if (*day <= 0) throw fail(line_no, "day must be a positive integer");
    if (*hour < 0 || *hour > 23) throw fail(line_no, "hour must be in 0..23");
    if (*occ != 0 && *occ != 1) throw fail(line_no, "occupied must be 0 or 1");
    auto& day_records = records[static_cast<int>(*day)];
    if (!day_records.emplace(static_cast<int>(*hour), *occ == 1).second) {
      throw fail(line_no, "duplicate record for day " + std::to_string(*day) + ", hour " +
                              std::to_string(*hour));
    }
    hours.insert(static_cast<int>(*hour));
    ++count;
  }
  if (count == 0) throw ValidationError(source + ": no records");

  std::vector<int> hour_list(hours.begin(), hours.end());
  for (std::size_t i = 1; i < hour_list.size(); ++i) {
    if (hour_list[i] != hour_list[i - 1] + 1) {
      throw ValidationError(source + ": gap in hours between " + std::to_string(hour_list[i - 1]) +
                            " and " + std::to_string(hour_list[i]));
    }
  }
  std::vector<int> days;
  std::vector<std::vector<bool>> occupied;
  for (const auto& [day, by_hour] : records) {
    std::vector<bool> row;
    for (int h : hour_list) {
      auto it = by_hour.find(h);
      if (it == by_hour.end()) {
        throw ValidationError(source + ": missing record for day " + std::to_string(day) +
                              ", hour " + std::to_string(h));
      }
      row.push_back(it->second);
    }
    days.push_back(day);
    occupied.push_back(std::move(row));
  }
  return OccupancyDataset(std::move(days), std::move(hour_list), std::move(occupied));
}

inline void write_occupancy_csv(std::ostream& out, const OccupancyDataset& data) {
  out << "day,hour,occupied\n";
  for (std::size_t d = 0; d < data.day_count(); ++d) {
    for (std::size_t h = 0; h < data.hours().size(); ++h) {
      out << data.days()[d] << ',' << data.hours()[h] << ',' << (data.occupied(d, h) ? 1 : 0)
          << '\n';
    }
  }
}

/// One hour boundary: probabilities of the state at hour+1 given the state
/// at `hour`. Complements are derived, so each row sums to one.
struct StepTransition {
  int hour = 0;
  double p_vf = 0.0;  // empty -> occupied
  double p_ff = 1.0;  // occupied -> occupied
  bool empty_row_defaulted = false;
  bool occupied_row_defaulted = false;

  double p_vv() const { return 1.0 - p_vf; }
  double p_fv() const { return 1.0 - p_ff; }

  /// Probability of moving from `from_occupied` into `to_occupied`.
  double probability(bool from_occupied, bool to_occupied) const {
    if (from_occupied) return to_occupied ? p_ff : p_fv();
    return to_occupied ? p_vf : p_vv();
  }
};

struct ScheduleDiagnostic {
  std::optional<int> hour;
  std::string condition;  // "empty", "occupied" or "all"
  std::string reason;
};

/// Per-hour occupancy matrices P^k for consecutive hours starting at
/// `first_hour`: steps[k] maps hour first_hour+k to first_hour+k+1.
struct TransitionSchedule {
  int first_hour = 0;
  std::vector<StepTransition> steps;
  std::vector<ScheduleDiagnostic> diagnostics;

  std::size_t size() const { return steps.size(); }

  /// Checks probabilities lie in [0,1] and hours are consecutive.
  void validate() const {
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const StepTransition& s = steps[k];
      if (s.hour != first_hour + static_cast<int>(k)) {
        throw ValidationError("transition schedule hours are not consecutive at step " +
                              std::to_string(k));
      }
      if (!(s.p_vf >= 0.0 && s.p_vf <= 1.0) || !(s.p_ff >= 0.0 && s.p_ff <= 1.0)) {
        throw ValidationError("transition probability outside [0,1] at hour " +
                              std::to_string(s.hour));
      }
    }
  }

  /// Sub-schedule covering `count` steps from `hour`.
  TransitionSchedule window(int hour, std::size_t count) const {
    const int offset = hour - first_hour;
    if (offset < 0 || static_cast<std::size_t>(offset) + count > steps.size()) {
      throw ValidationError("transition schedule covers hours " + std::to_string(first_hour) +
                            ".." + std::to_string(first_hour + static_cast<int>(steps.size())) +
                            ", which does not include " + std::to_string(hour) + ".." +
                            std::to_string(hour + static_cast<int>(count)));
    }
    TransitionSchedule out;
    out.first_hour = hour;
    out.steps.assign(steps.begin() + offset, steps.begin() + offset + static_cast<long>(count));
    for (const auto& d : diagnostics) {
      if (!d.hour || (*d.hour >= hour && *d.hour < hour + static_cast<int>(count))) {
        out.diagnostics.push_back(d);
      }
    }
    return out;
  }
};

/// Frequency estimate of each hour's occupancy matrix. A non-zero
/// `pseudo_count` adds that many virtual observations to each outcome.
/// Rows with no observations of their conditioning state default to
/// staying in that state and are listed in `diagnostics`.
inline TransitionSchedule estimate_transition_schedule(const OccupancyDataset& data,
                                                       double pseudo_count = 0.0) {
  if (data.day_count() == 0 || data.hours().empty()) throw ValidationError("no records");
  if (pseudo_count < 0.0) throw ValidationError("pseudo-count must be non-negative");

  TransitionSchedule schedule;
  schedule.first_hour = data.first_hour();
  const std::size_t nh = data.hours().size();
  for (std::size_t h = 0; h + 1 < nh; ++h) {
    long v_to_f = 0, v_to_v = 0, f_to_f = 0, f_to_v = 0;
    for (std::size_t d = 0; d < data.day_count(); ++d) {
      const bool now = data.occupied(d, h);
      const bool next = data.occupied(d, h + 1);
      if (now) {
        (next ? f_to_f : f_to_v)++;
      } else {
        (next ? v_to_f : v_to_v)++;
      }
    }
    StepTransition step;
    step.hour = data.hours()[h];

    const double from_v = static_cast<double>(v_to_f + v_to_v) + 2.0 * pseudo_count;
    if (from_v > 0.0) {
      step.p_vf = (static_cast<double>(v_to_f) + pseudo_count) / from_v;
    } else {
      step.p_vf = 0.0;
      step.empty_row_defaulted = true;
      schedule.diagnostics.push_back(
          {step.hour, "empty", "zone never observed empty at this hour; row defaults to stay empty"});
    }
    const double from_f = static_cast<double>(f_to_f + f_to_v) + 2.0 * pseudo_count;
    if (from_f > 0.0) {
      step.p_ff = (static_cast<double>(f_to_f) + pseudo_count) / from_f;
    } else {
      step.p_ff = 1.0;
      step.occupied_row_defaulted = true;
      schedule.diagnostics.push_back(
          {step.hour, "occupied",
           "zone never observed occupied at this hour; row defaults to stay occupied"});
    }
    schedule.steps.push_back(step);
  }
  return schedule;
}

/// Probability of being occupied at each step, m[0] .. m[size()].
inline std::vector<double> occupancy_marginals(const TransitionSchedule& schedule,
                                               double initial_occupied_prob) {
  if (!(initial_occupied_prob >= 0.0 && initial_occupied_prob <= 1.0)) {
    throw ValidationError("initial occupancy probability must lie in [0,1]");
  }
  std::vector<double> m;
  m.reserve(schedule.size() + 1);
  m.push_back(initial_occupied_prob);
  for (const StepTransition& s : schedule.steps) {
    const double prev = m.back();
    m.push_back(prev * s.p_ff + (1.0 - prev) * s.p_vf);
  }
  return m;
}

/// Uniform double in [0,1) from the top 53 bits; reproducible across
/// standard libraries, unlike std::uniform_real_distribution.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Draws `days` independent day-long occupancy traces from `schedule`.
/// Days are numbered 1..days; hours span first_hour .. first_hour+size().
inline OccupancyDataset sample_dataset(const TransitionSchedule& schedule, int days,
                                       double initial_occupied_prob, std::uint64_t seed) {
  if (days <= 0) throw ValidationError("sample size must be positive");
  schedule.validate();
  std::mt19937_64 rng(seed);
  std::vector<int> day_ids;
  std::vector<int> hours;
  for (std::size_t h = 0; h <= schedule.size(); ++h) {
    hours.push_back(schedule.first_hour + static_cast<int>(h));
  }
  std::vector<std::vector<bool>> occupied;
  for (int d = 1; d <= days; ++d) {
    std::vector<bool> row;
    bool state = unit_uniform(rng) < initial_occupied_prob;
    row.push_back(state);
    for (const StepTransition& s : schedule.steps) {
      state = unit_uniform(rng) < s.probability(state, true);
      row.push_back(state);
    }
    day_ids.push_back(d);
    occupied.push_back(std::move(row));
  }
  return OccupancyDataset(std::move(day_ids), std::move(hours), std::move(occupied));
}

}  // namespace thermochain
