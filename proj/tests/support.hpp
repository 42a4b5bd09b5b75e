#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thermochain/analysis.hpp"
#include "thermochain/markov.hpp"
#include "thermochain/occupancy.hpp"
#include "thermochain/thermal_model.hpp"

namespace tc_test {

using namespace thermochain;

inline RCNetwork paper_network() {
  RCNetwork n;
  n.zones = {{"zone1", 1.37, 1.7429, 18.0}, {"zone2", 1.0, 5.5897, 16.0}};
  n.edges = {{"zone1", "zone2"}, {"zone2", "zone1"}};
  return n;
}

inline Eigen::MatrixXd paper_a() {
  Eigen::MatrixXd a(2, 2);
  a << 0.7001, 0.2999, 0.3007, 0.6993;
  return a;
}

inline Building paper_building() {
  Eigen::MatrixXd b(2, 2);
  b << 0.7299, 0.0, 0.0, 1.0;
  Eigen::VectorXd t0(2);
  t0 << 18.0, 16.0;
  return Building({"zone1", "zone2"}, DiscreteThermalModel(paper_a(), b, 1.0, t0));
}

inline std::vector<ZoneGains> paper_gains(std::size_t n = 2) {
  return std::vector<ZoneGains>(n, ZoneGains{0.7, 1.5});
}

inline double uniform(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline TransitionSchedule random_schedule(std::mt19937_64& rng, int steps, int first_hour = 8) {
  TransitionSchedule s;
  s.first_hour = first_hour;
  for (int k = 0; k < steps; ++k) {
    s.steps.push_back({first_hour + k, uniform(rng), uniform(rng), false, false});
  }
  return s;
}

inline std::vector<bool> random_bits(std::mt19937_64& rng, int count) {
  std::vector<bool> out;
  for (int i = 0; i < count; ++i) out.push_back(rng() & 1U);
  return out;
}

/// Row-stochastic matrix with non-negative entries.
inline Eigen::MatrixXd random_stochastic(std::mt19937_64& rng, int n) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) sum += a(i, j) = uniform(rng, 0.01, 1.0);
    a.row(i) /= sum;
  }
  return a;
}

inline Building random_building(std::mt19937_64& rng, int n) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("z" + std::to_string(i + 1));
  Eigen::VectorXd t0(n);
  for (int i = 0; i < n; ++i) t0(i) = uniform(rng, 10.0, 25.0);
  return Building(ids, DiscreteThermalModel(random_stochastic(rng, n),
                                            Eigen::MatrixXd::Identity(n, n), 1.0, t0));
}

inline Scenario random_scenario(std::mt19937_64& rng, int zones, int horizon,
                                std::optional<Building> building = std::nullopt) {
  Building b = building ? *building : random_building(rng, zones);
  std::vector<TransitionSchedule> schedules;
  std::vector<ZoneGains> gains;
  std::vector<std::vector<bool>> heating;
  for (int z = 0; z < zones; ++z) {
    schedules.push_back(random_schedule(rng, horizon));
    gains.push_back({uniform(rng, 0.0, 2.0), uniform(rng, 0.0, 2.0)});
    heating.push_back(random_bits(rng, horizon + 1));
  }
  return Scenario{std::move(b), std::move(schedules), std::move(gains), std::move(heating), {}, horizon};
}

/// Expected temperatures at step theta by explicit simulation of
/// T[k+1] = A T[k] + Q(labels at k) over every joint occupancy path,
/// reading the raw schedules only.
inline std::vector<double> path_oracle(const Scenario& sc, int theta) {
  const auto n = static_cast<Eigen::Index>(sc.building.size());
  const Eigen::MatrixXd& a = sc.building.thermal.a();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  std::vector<bool> occ(static_cast<std::size_t>(n));
  for (Eigen::Index z = 0; z < n; ++z) occ[static_cast<std::size_t>(z)] = sc.occupied_at_start(static_cast<std::size_t>(z));

  std::function<void(int, double, const Eigen::VectorXd&, std::vector<bool>)> walk =
      [&](int k, double p, const Eigen::VectorXd& t, std::vector<bool> cur) {
        if (p == 0.0) return;
        if (k == theta) {
          acc += p * t;
          return;
        }
        Eigen::VectorXd q(n);
        for (Eigen::Index z = 0; z < n; ++z) {
          const auto zi = static_cast<std::size_t>(z);
          q(z) = (cur[zi] ? sc.gains[zi].q_int : 0.0) + (sc.heating_at(zi, k) ? sc.gains[zi].q_rad : 0.0);
        }
        const Eigen::VectorXd next = a * t + q;
        const std::uint64_t combos = std::uint64_t{1} << n;
        for (std::uint64_t mask = 0; mask < combos; ++mask) {
          double pm = p;
          std::vector<bool> nxt(static_cast<std::size_t>(n));
          for (Eigen::Index z = 0; z < n; ++z) {
            const auto zi = static_cast<std::size_t>(z);
            nxt[zi] = (mask >> z) & 1U;
            const StepTransition& st = sc.schedules[zi].steps[static_cast<std::size_t>(k)];
            const double p_occ = cur[zi] ? st.p_ff : st.p_vf;
            pm *= nxt[zi] ? p_occ : 1.0 - p_occ;
          }
          walk(k + 1, pm, next, nxt);
        }
      };
  walk(0, 1.0, sc.building.thermal.initial_temps(), occ);
  return {acc.data(), acc.data() + n};
}

}  // namespace tc_test
