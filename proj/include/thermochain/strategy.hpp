#pragma once

// Heating strategies, banded time-of-use tariffs and their cost.
// Money is kept in integer units so totals are exact.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "thermochain/analysis.hpp"
#include "thermochain/error.hpp"

namespace thermochain {

/// Radiator-on hours (hour of day, slot [h, h+1)) per zone id.
struct HeatingStrategy {
  std::string name;
  std::map<std::string, std::set<int>> schedule;

  bool heating(const std::string& zone, int hour) const {
    auto it = schedule.find(zone);
    return it != schedule.end() && it->second.count(hour) > 0;
  }

  /// Radiator bit for steps 0..horizon, step k being hour window_start + k.
  std::vector<bool> step_bits(const std::string& zone, int window_start, int horizon) const {
    std::vector<bool> bits;
    for (int k = 0; k <= horizon; ++k) bits.push_back(heating(zone, window_start + k));
    return bits;
  }

  /// Zone ids must belong to the building; hours must lie in [start, end).
  void validate(const std::vector<std::string>& zone_ids, int window_start, int window_end) const {
    for (const auto& [zone, hours] : schedule) {
      if (std::find(zone_ids.begin(), zone_ids.end(), zone) == zone_ids.end()) {
        throw ValidationError("strategy '" + name + "' names unknown zone '" + zone + "'");
      }
      for (int h : hours) {
        if (h < window_start || h >= window_end) {
          throw ValidationError("strategy '" + name + "' heats zone '" + zone + "' at hour " +
                                std::to_string(h) + ", outside the operating window " +
                                std::to_string(window_start) + "-" + std::to_string(window_end));
        }
      }
    }
  }

  HeatingStrategy restricted_to(const std::string& zone) const {
    HeatingStrategy out;
    out.name = name + "[" + zone + "]";
    auto it = schedule.find(zone);
    if (it != schedule.end()) out.schedule[zone] = it->second;
    return out;
  }
};

inline const std::vector<std::string>& builtin_strategy_names() {
  static const std::vector<std::string> names{"S1", "S2", "S3", "S4", "S5", "S6"};
  return names;
}

/// Built-in strategies for a building whose first two zones are "zone 1"
/// and "zone 2":
///   S1 off; S2 both zones 9..16; S3 first zone 9..16; S4 second zone 9..16;
///   S5 both zones at 9, 11, 13, 15; S6 both zones at 8 and 9.
inline HeatingStrategy builtin_strategy(const std::string& name,
                                        const std::vector<std::string>& zone_ids) {
  std::set<int> day_hours;
  for (int h = 9; h <= 16; ++h) day_hours.insert(h);
  const std::set<int> alternating{9, 11, 13, 15};
  const std::set<int> selective{8, 9};

  auto zone = [&](std::size_t i) -> const std::string& {
    if (i >= zone_ids.size()) {
      throw ValidationError("built-in strategy " + name + " needs at least " +
                            std::to_string(i + 1) + " zones");
    }
    return zone_ids[i];
  };
  HeatingStrategy s;
  s.name = name;
  if (name == "S1") {
  } else if (name == "S2") {
    for (const auto& z : zone_ids) s.schedule[z] = day_hours;
  } else if (name == "S3") {
    s.schedule[zone(0)] = day_hours;
  } else if (name == "S4") {
    s.schedule[zone(1)] = day_hours;
  } else if (name == "S5") {
    for (const auto& z : zone_ids) s.schedule[z] = alternating;
  } else if (name == "S6") {
    for (const auto& z : zone_ids) s.schedule[z] = selective;
  } else {
    throw ValidationError("unknown built-in strategy '" + name + "'");
  }
  return s;
}

struct TariffBand {
  std::string name;
  int start = 0;  // inclusive hour
  int end = 0;    // exclusive hour
  std::int64_t price_minor_per_kwh = 0;
};

struct Tariff {
  std::vector<TariffBand> bands;

  void validate() const {
    if (bands.empty()) throw ValidationError("tariff has no bands");
    std::vector<TariffBand> sorted = bands;
    std::sort(sorted.begin(), sorted.end(),
              [](const TariffBand& a, const TariffBand& b) { return a.start < b.start; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      const TariffBand& b = sorted[i];
      if (b.start < 0 || b.end > 24 || b.start >= b.end) {
        throw ValidationError("tariff band '" + b.name + "' has an invalid hour range");
      }
      if (b.price_minor_per_kwh < 0) {
        throw ValidationError("tariff band '" + b.name + "' has a negative price");
      }
      if (i > 0 && sorted[i - 1].end > b.start) {
        throw ValidationError("tariff bands '" + sorted[i - 1].name + "' and '" + b.name +
                              "' overlap");
      }
    }
  }

  /// Band containing the slot that starts at `hour`.
  const TariffBand* band_for(int hour) const {
    for (const auto& b : bands) {
      if (hour >= b.start && hour < b.end) return &b;
    }
    return nullptr;
  }

  bool covers(int start, int end) const {
    for (int h = start; h < end; ++h) {
      if (!band_for(h)) return false;
    }
    return true;
  }
};

/// Economy 8-10 at 10, off-peak 10-13 at 15, peak 13-17 at 20 (pence/kWh).
inline Tariff builtin_tariff() {
  return Tariff{{{"economy", 8, 10, 10}, {"off-peak", 10, 13, 15}, {"peak", 13, 17, 20}}};
}

/// Amount in thousandths of a minor currency unit, i.e. Wh x (minor/kWh).
struct Money {
  std::int64_t milli_minor = 0;

  friend bool operator==(Money, Money) = default;
  friend auto operator<=>(Money, Money) = default;

  std::int64_t minor() const { return milli_minor / 1000; }

  /// Major units with two decimals, more when a fraction of a minor unit remains.
  std::string to_string() const {
    const bool negative = milli_minor < 0;
    const std::int64_t v = negative ? -milli_minor : milli_minor;
    const std::int64_t whole = v / 100000;
    std::int64_t frac = v % 100000;  // five digits below the major unit
    std::string digits = std::to_string(frac);
    digits.insert(0, 5 - digits.size(), '0');
    while (digits.size() > 2 && digits.back() == '0') digits.pop_back();
    return (negative ? "-" : "") + std::to_string(whole) + "." + digits;
  }
};

struct BandEnergy {
  std::string band;
  std::int64_t energy_wh = 0;
  std::int64_t price_minor_per_kwh = 0;

  Money cost() const { return Money{energy_wh * price_minor_per_kwh}; }
  double energy_kwh() const { return static_cast<double>(energy_wh) / 1000.0; }
};

/// Radiator rating per zone in watts; zones not listed draw `default_w`.
struct RadiatorRatings {
  std::map<std::string, std::int64_t> watts;
  std::int64_t default_w = 1000;

  std::int64_t for_zone(const std::string& zone) const {
    auto it = watts.find(zone);
    return it == watts.end() ? default_w : it->second;
  }

  /// Converts kW to whole watts; sub-watt ratings are rejected to keep sums exact.
  static std::int64_t watts_from_kw(double kw) {
    if (!(kw >= 0.0) || !std::isfinite(kw)) {
      throw ValidationError("radiator power must be non-negative");
    }
    const double w = kw * 1000.0;
    const auto rounded = static_cast<std::int64_t>(std::llround(w));
    if (std::abs(w - static_cast<double>(rounded)) > 1e-6) {
      throw ValidationError("radiator power must be a whole number of watts");
    }
    return rounded;
  }
};

/// Energy per tariff band, in tariff band order. A heated hour is billed to
/// the band containing its start.
inline std::vector<BandEnergy> energy_by_band(const HeatingStrategy& strategy,
                                              const Tariff& tariff,
                                              const RadiatorRatings& radiators = {}) {
  tariff.validate();
  std::vector<BandEnergy> out;
  for (const auto& b : tariff.bands) out.push_back({b.name, 0, b.price_minor_per_kwh});
  for (const auto& [zone, hours] : strategy.schedule) {
    const std::int64_t w = radiators.for_zone(zone);
    if (w < 0) throw ValidationError("radiator power must be non-negative");
    for (int h : hours) {
      const TariffBand* band = tariff.band_for(h);
      if (!band) {
        throw ValidationError("strategy '" + strategy.name + "' heats zone '" + zone +
                              "' at hour " + std::to_string(h) + ", outside every tariff band");
      }
      const auto idx = static_cast<std::size_t>(band - tariff.bands.data());
      out[idx].energy_wh += w;  // one hour at w watts
    }
  }
  return out;
}

/// Published per-band energies (kWh) and totals (minor units) for the
/// built-in strategies under the built-in tariff. Used only to annotate
/// reports where the computed accounting disagrees with the printed table.
struct PublishedCost {
  std::string strategy;
  std::optional<std::int64_t> economy_kwh, off_peak_kwh, peak_kwh;  // nullopt = "NA"
  std::int64_t total_minor = 0;
};

inline const std::vector<PublishedCost>& published_costs() {
  static const std::vector<PublishedCost> table{
      {"S1", std::nullopt, std::nullopt, std::nullopt, 0},
      {"S2", 2, 6, 8, 270},
      {"S3", 1, 3, 4, 135},
      {"S4", 1, 3, 4, 135},
      {"S5", 2, 4, 4, 130},
      {"S6", 2, std::nullopt, std::nullopt, 20},
  };
  return table;
}

struct CostReport {
  std::string strategy;
  std::vector<BandEnergy> bands;
  Money total;
  std::vector<std::string> notes;

  std::int64_t total_energy_wh() const {
    std::int64_t e = 0;
    for (const auto& b : bands) e += b.energy_wh;
    return e;
  }
};

namespace detail {

inline std::string kwh_text(std::int64_t wh) {
  if (wh % 1000 == 0) return std::to_string(wh / 1000) + " kWh";
  return std::to_string(wh) + " Wh";
}

/// Notes where a built-in strategy's computed figures differ from the
/// published table. Only meaningful with the built-in tariff and 1 kW
/// radiators; callers decide when to ask.
inline std::vector<std::string> published_discrepancies(const CostReport& report) {
  std::vector<std::string> notes;
  const PublishedCost* pub = nullptr;
  for (const auto& p : published_costs()) {
    if (p.strategy == report.strategy) pub = &p;
  }
  if (!pub || report.bands.size() != 3) return notes;
  const std::optional<std::int64_t>* printed[3] = {&pub->economy_kwh, &pub->off_peak_kwh,
                                                   &pub->peak_kwh};
  std::int64_t printed_cost_milli = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::int64_t printed_wh = printed[i]->value_or(0) * 1000;
    printed_cost_milli += printed_wh * report.bands[i].price_minor_per_kwh;
    if (printed_wh != report.bands[i].energy_wh) {
      notes.push_back("published " + report.bands[i].band + " energy " + kwh_text(printed_wh) +
                      " differs from computed " + kwh_text(report.bands[i].energy_wh));
    }
  }
  const Money printed_total{pub->total_minor * 1000};
  if (printed_total != report.total) {
    notes.push_back("published total " + printed_total.to_string() + " differs from computed " +
                    report.total.to_string());
  }
  if (Money{printed_cost_milli} != printed_total) {
    notes.push_back("published band energies price to " + Money{printed_cost_milli}.to_string() +
                    ", not the published total " + printed_total.to_string());
  }
  return notes;
}

inline bool is_builtin_tariff(const Tariff& t) {
  const Tariff b = builtin_tariff();
  if (t.bands.size() != b.bands.size()) return false;
  for (std::size_t i = 0; i < b.bands.size(); ++i) {
    if (t.bands[i].start != b.bands[i].start || t.bands[i].end != b.bands[i].end ||
        t.bands[i].price_minor_per_kwh != b.bands[i].price_minor_per_kwh) {
      return false;
    }
  }
  return true;
}

}  // namespace detail

/// Total = sum over bands of energy x price, in integer arithmetic. Built-in
/// strategies priced on the built-in tariff with 1 kW radiators carry notes
/// wherever the published table disagrees.
inline CostReport strategy_cost(const HeatingStrategy& strategy, const Tariff& tariff,
                                const RadiatorRatings& radiators = {}) {
  CostReport report;
  report.strategy = strategy.name;
  report.bands = energy_by_band(strategy, tariff, radiators);
  for (const auto& b : report.bands) report.total.milli_minor += b.cost().milli_minor;
  if (detail::is_builtin_tariff(tariff) && radiators.watts.empty() && radiators.default_w == 1000) {
    const auto builtin = std::find(builtin_strategy_names().begin(), builtin_strategy_names().end(),
                                   strategy.name);
    if (builtin != builtin_strategy_names().end()) {
      report.notes = detail::published_discrepancies(report);
    }
  }
  return report;
}

struct RankingRow {
  CostReport cost;
  std::optional<double> ratio;  // cost / cheapest non-zero cost
  std::optional<ComfortReport> comfort;
};

struct Ranking {
  std::vector<RankingRow> rows;  // ascending cost, ties by name
  std::optional<std::string> baseline;
  std::vector<std::string> notes;
};

/// Ranks strategies by cost. When `evaluate` is given, each row also carries
/// the comfort classification of the strategy's trajectory.
template <typename Evaluator = std::nullptr_t>
Ranking compare_strategies(const std::vector<HeatingStrategy>& strategies, const Tariff& tariff,
                           const RadiatorRatings& radiators = {}, Evaluator evaluate = nullptr,
                           ComfortBand band = {}) {
  Ranking ranking;
  for (const auto& s : strategies) {
    RankingRow row;
    row.cost = strategy_cost(s, tariff, radiators);
    if constexpr (!std::is_same_v<Evaluator, std::nullptr_t>) {
      row.comfort = comfort_check(evaluate(s), band);
    }
    ranking.rows.push_back(std::move(row));
  }
  std::sort(ranking.rows.begin(), ranking.rows.end(), [](const RankingRow& a, const RankingRow& b) {
    if (a.cost.total != b.cost.total) return a.cost.total < b.cost.total;
    return a.cost.strategy < b.cost.strategy;
  });
  const RankingRow* cheapest = nullptr;
  for (const auto& r : ranking.rows) {
    if (r.cost.total.milli_minor > 0) {
      cheapest = &r;
      break;
    }
  }
  if (cheapest) {
    ranking.baseline = cheapest->cost.strategy;
    const double base = static_cast<double>(cheapest->cost.total.milli_minor);
    for (auto& r : ranking.rows) {
      if (r.cost.total.milli_minor > 0) {
        r.ratio = static_cast<double>(r.cost.total.milli_minor) / base;
      }
    }
  }
  for (const auto& r : ranking.rows) {
    if (r.cost.total.milli_minor == 0) {
      ranking.notes.push_back("zero-cost baseline excluded: " + r.cost.strategy);
    }
  }
  return ranking;
}

}  // namespace thermochain
