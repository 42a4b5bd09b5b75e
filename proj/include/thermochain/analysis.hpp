#pragma once

// Expected zone temperatures as expected cumulative rewards over steps
// 0..theta (the bounded cumulative-reward query with bound theta+1).
//
// Three evaluation routes are provided:
//  - expected_temperature: forward reach probabilities on a rewarded
//    composed model;
//  - marginal_expected_temperature: per-zone occupancy marginals pushed
//    through rows of A^(theta-k), O(N^2 K) per theta;
//  - brute_force_expected_temperature: exhaustive path enumeration that
//    reads the previous step's labels along each path.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "thermochain/error.hpp"
#include "thermochain/markov.hpp"
#include "thermochain/occupancy.hpp"
#include "thermochain/thermal_model.hpp"

namespace thermochain {

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      c_ += (sum_ - t) + x;
    } else {
      c_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

struct ZoneTemperatures {
  std::vector<std::string> zone_ids;
  std::vector<double> values;  // degC, aligned with zone_ids

  double at(const std::string& id) const {
    for (std::size_t i = 0; i < zone_ids.size(); ++i) {
      if (zone_ids[i] == id) return values[i];
    }
    throw ValidationError("no temperature for zone '" + id + "'");
  }
};

/// Everything needed to evaluate one heating strategy on a building.
/// Per-zone vectors are aligned with building.zone_ids; step k of every
/// vector is hour window_start + k.
struct Scenario {
  Building building;
  std::vector<TransitionSchedule> schedules;  // steps[k]: step k -> k+1
  std::vector<ZoneGains> gains;
  std::vector<std::vector<bool>> heating;  // heating[zone][k], k = 0..horizon
  std::vector<bool> initially_occupied;    // empty when unset
  int horizon = 0;

  bool occupied_at_start(std::size_t zone) const {
    return zone < initially_occupied.size() && initially_occupied[zone];
  }

  bool heating_at(std::size_t zone, int step) const {
    const auto& h = heating[zone];
    return step >= 0 && static_cast<std::size_t>(step) < h.size() &&
           h[static_cast<std::size_t>(step)];
  }

  void validate() const {
    const std::size_t n = building.size();
    if (horizon < 1) throw ValidationError("horizon must be at least 1");
    if (schedules.size() != n) throw ValidationError("one transition schedule per zone required");
    if (gains.size() != n) throw ValidationError("one gain pair per zone required");
    if (heating.size() != n) throw ValidationError("one heating schedule per zone required");
    for (std::size_t i = 0; i < n; ++i) {
      if (schedules[i].size() < static_cast<std::size_t>(horizon)) {
        throw ValidationError("transition schedule for zone '" + building.zone_ids[i] +
                              "' is shorter than the horizon");
      }
      schedules[i].validate();
    }
  }

  std::vector<ZoneChain> chains() const {
    validate();
    std::vector<ZoneChain> out;
    for (std::size_t i = 0; i < building.size(); ++i) {
      out.push_back(unroll_zone(building.zone_ids[i], schedules[i], heating[i], horizon,
                                occupied_at_start(i)));
    }
    return out;
  }

  ComposedModel build_model() const { return compose(chains()); }

  /// Composition in an explicit zone order (a permutation of building order).
  ComposedModel build_model(const std::vector<std::string>& order) const {
    const std::vector<ZoneChain> all = chains();
    std::vector<ZoneChain> picked;
    for (const auto& id : order) picked.push_back(all[building.index_of(id)]);
    if (picked.size() != all.size()) throw ValidationError("zone order must list every zone once");
    return compose(picked);
  }
};

/// Expected cumulative reward per zone on a model whose rewards were
/// assigned for `theta`.
inline ZoneTemperatures expected_temperature(const ComposedModel& model, int theta) {
  if (!model.rewards) throw ValidationError("model has no rewards assigned");
  if (model.rewards->theta != theta) {
    throw ValidationError("rewards were assigned for theta " + std::to_string(model.rewards->theta) +
                          ", not " + std::to_string(theta));
  }
  const std::vector<double> pi = model.reach_probabilities();
  ZoneTemperatures out;
  for (std::size_t z = 0; z < model.rewards->zone_ids.size(); ++z) {
    const std::vector<double>& rho = model.rewards->values[z];
    CompensatedSum sum;
    for (std::size_t s = 0; s < model.states.size(); ++s) {
      const ComposedState& st = model.states[s];
      if (st.sink || st.step > theta) continue;
      sum.add(pi[s] * rho[s]);
    }
    out.zone_ids.push_back(model.rewards->zone_ids[z]);
    out.values.push_back(sum.value());
  }
  return out;
}

/// Expected temperature from occupancy marginals: the expected gain at step
/// k needs only each zone's occupancy probability at k-1 and its heating bit.
inline ZoneTemperatures marginal_expected_temperature(const Scenario& scenario, int theta) {
  scenario.validate();
  if (theta < 1 || theta > scenario.horizon) {
    throw ValidationError("theta " + std::to_string(theta) + " outside [1, " +
                          std::to_string(scenario.horizon) + "]");
  }
  const Building& b = scenario.building;
  const auto n = static_cast<Eigen::Index>(b.size());
  std::vector<std::vector<double>> marginals;
  for (std::size_t i = 0; i < b.size(); ++i) {
    marginals.push_back(occupancy_marginals(scenario.schedules[i],
                                            scenario.occupied_at_start(i) ? 1.0 : 0.0));
  }
  const std::vector<Eigen::MatrixXd> powers = matrix_powers(b.thermal.a(), theta);

  Eigen::VectorXd expected = powers[static_cast<std::size_t>(theta)] * b.thermal.initial_temps();
  for (int k = 1; k <= theta; ++k) {
    Eigen::VectorXd q(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto zj = static_cast<std::size_t>(j);
      q(j) = scenario.gains[zj].q_int * marginals[zj][static_cast<std::size_t>(k - 1)] +
             (scenario.heating_at(zj, k - 1) ? scenario.gains[zj].q_rad : 0.0);
    }
    expected += powers[static_cast<std::size_t>(theta - k)] * q;
  }
  ZoneTemperatures out;
  out.zone_ids = b.zone_ids;
  out.values.assign(expected.data(), expected.data() + expected.size());
  return out;
}

/// Largest N*K for which path enumeration is attempted.
inline constexpr int kMaxEnumerationBits = 22;

/// Sums, over every positive-probability path of length theta from the
/// initial state, the path probability times the temperature reached along
/// that path: A^theta T[0] + sum_k A^(theta-k) Q(labels at step k-1).
/// Independent of any assigned rewards.
inline ZoneTemperatures brute_force_expected_temperature(const ComposedModel& model,
                                                         const Scenario& scenario, int theta) {
  const Building& b = scenario.building;
  if (theta < 1 || theta > model.horizon) {
    throw ValidationError("theta " + std::to_string(theta) + " outside [1, " +
                          std::to_string(model.horizon) + "]");
  }
  if (static_cast<long>(model.zone_count()) * model.horizon > kMaxEnumerationBits) {
    throw NumericalError("path enumeration over " + std::to_string(model.zone_count()) +
                         " zones and " + std::to_string(model.horizon) +
                         " steps exceeds 2^" + std::to_string(kMaxEnumerationBits) +
                         " paths; use the marginal engine instead");
  }
  if (b.size() != model.zone_count() || scenario.gains.size() != b.size()) {
    throw ValidationError("scenario does not match the composed model");
  }
  const auto n = static_cast<Eigen::Index>(b.size());
  std::vector<std::size_t> position(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) position[j] = model.zone_position(b.zone_ids[j]);
  const std::vector<Eigen::MatrixXd> powers = matrix_powers(b.thermal.a(), theta);

  auto gain_vector = [&](std::size_t state) {
    Eigen::VectorXd q(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto zj = static_cast<std::size_t>(j);
      const ChainState& l = model.label(state, position[zj]);
      q(j) = (l.occupied ? scenario.gains[zj].q_int : 0.0) +
             (l.heating ? scenario.gains[zj].q_rad : 0.0);
    }
    return q;
  };

  std::vector<CompensatedSum> sums(b.size());
  const Eigen::VectorXd start = powers[static_cast<std::size_t>(theta)] * b.thermal.initial_temps();

  // Depth-first over (state, probability, temperature-so-far).
  struct Frame {
    std::size_t state;
    double probability;
    Eigen::VectorXd temperature;
    int step;
  };
  std::vector<Frame> stack;
  stack.push_back({ComposedModel::initial(), 1.0, start, 0});
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (f.step == theta) {
      for (Eigen::Index j = 0; j < n; ++j) {
        sums[static_cast<std::size_t>(j)].add(f.probability * f.temperature(j));
      }
      continue;
    }
    const Eigen::VectorXd contribution =
        powers[static_cast<std::size_t>(theta - f.step - 1)] * gain_vector(f.state);
    for (const auto& t : model.outgoing(f.state)) {
      if (t.probability <= 0.0) continue;
      stack.push_back({t.to, f.probability * t.probability, f.temperature + contribution,
                       f.step + 1});
    }
  }
  ZoneTemperatures out;
  out.zone_ids = b.zone_ids;
  for (auto& s : sums) out.values.push_back(s.value());
  return out;
}

struct TemperatureTrajectory {
  std::vector<std::string> zone_ids;
  std::vector<int> thetas;
  std::vector<std::vector<double>> values;  // values[theta index][zone]

  double at(std::size_t theta_index, const std::string& zone) const {
    for (std::size_t z = 0; z < zone_ids.size(); ++z) {
      if (zone_ids[z] == zone) return values[theta_index][z];
    }
    throw ValidationError("no trajectory for zone '" + zone + "'");
  }
};

enum class Engine { kMarginal, kComposed, kBruteForce };

/// One evaluation per theta; the composed route re-assigns rewards for each.
inline TemperatureTrajectory temperature_trajectory(const Scenario& scenario,
                                                    const std::vector<int>& thetas,
                                                    Engine engine = Engine::kMarginal) {
  if (thetas.empty()) throw ValidationError("empty theta range");
  for (int t : thetas) {
    if (t < 1 || t > scenario.horizon) {
      throw ValidationError("theta " + std::to_string(t) + " outside [1, " +
                            std::to_string(scenario.horizon) + "]");
    }
  }
  TemperatureTrajectory out;
  out.zone_ids = scenario.building.zone_ids;
  out.thetas = thetas;
  std::optional<ComposedModel> model;
  if (engine != Engine::kMarginal) model = scenario.build_model();
  for (int theta : thetas) {
    ZoneTemperatures temps;
    switch (engine) {
      case Engine::kMarginal:
        temps = marginal_expected_temperature(scenario, theta);
        break;
      case Engine::kComposed:
        temps = expected_temperature(
            assign_rewards(*model, scenario.building, scenario.gains, theta), theta);
        break;
      case Engine::kBruteForce:
        temps = brute_force_expected_temperature(*model, scenario, theta);
        break;
    }
    std::vector<double> row;
    for (const auto& id : out.zone_ids) row.push_back(temps.at(id));
    out.values.push_back(std::move(row));
  }
  return out;
}

enum class Comfort { kBelow, kWithin, kAbove };

inline const char* to_string(Comfort c) {
  switch (c) {
    case Comfort::kBelow: return "below";
    case Comfort::kWithin: return "within";
    case Comfort::kAbove: return "above";
  }
  return "within";
}

struct ComfortBand {
  double low = 20.0;
  double high = 22.0;
};

struct ComfortReport {
  ComfortBand band;
  std::vector<std::string> zone_ids;
  std::vector<int> thetas;
  std::vector<std::vector<Comfort>> classes;  // classes[theta index][zone]
  std::vector<bool> ever_above;               // per zone
  std::vector<bool> ever_below;               // per zone

  bool all_within() const {
    for (std::size_t z = 0; z < zone_ids.size(); ++z) {
      if (ever_above[z] || ever_below[z]) return false;
    }
    return true;
  }
};

/// Band edges count as within.
inline ComfortReport comfort_check(const TemperatureTrajectory& trajectory, ComfortBand band) {
  if (!(band.low < band.high)) throw ValidationError("comfort band needs low < high");
  ComfortReport report;
  report.band = band;
  report.zone_ids = trajectory.zone_ids;
  report.thetas = trajectory.thetas;
  report.ever_above.assign(trajectory.zone_ids.size(), false);
  report.ever_below.assign(trajectory.zone_ids.size(), false);
  for (const auto& row : trajectory.values) {
    std::vector<Comfort> classes;
    for (std::size_t z = 0; z < row.size(); ++z) {
      Comfort c = Comfort::kWithin;
      if (row[z] < band.low) {
        c = Comfort::kBelow;
        report.ever_below[z] = true;
      } else if (row[z] > band.high) {
        c = Comfort::kAbove;
        report.ever_above[z] = true;
      }
      classes.push_back(c);
    }
    report.classes.push_back(std::move(classes));
  }
  return report;
}

}  // namespace thermochain
