#pragma once

// Unrolled zone reward chains, their synchronized product, and the
// evaluation-step dependent reward structure.
//
// A zone chain over horizon K has an initial state at step 0, an occupied
// and an empty state at each step 1..K, and an absorbing sink at step K+1.
// Index layout: 0 is the initial state, 2k-1 / 2k are the occupied / empty
// states of step k, 2K+1 is the sink. Transitions leaving step k carry the
// synchronization label t_{k+1}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "thermochain/error.hpp"
#include "thermochain/occupancy.hpp"
#include "thermochain/thermal_model.hpp"

namespace thermochain {

struct ChainState {
  int step = 0;  // K+1 for the sink
  bool occupied = false;
  bool heating = false;
  bool sink = false;
};

struct ChainTransition {
  std::size_t from = 0;
  std::size_t to = 0;
  double probability = 0.0;
  int label = 0;  // k for t_k
};

struct ZoneChain {
  std::string zone_id;
  int horizon = 0;
  std::vector<ChainState> states;
  std::vector<ChainTransition> transitions;  // grouped by source, ascending

  static constexpr std::size_t initial() { return 0; }
  std::size_t sink() const { return states.size() - 1; }

  std::set<int> labels() const {
    std::set<int> out;
    for (const auto& t : transitions) out.insert(t.label);
    return out;
  }
};

/// Unrolls one zone over `horizon` steps. `schedule.steps[k]` drives the
/// move from step k to k+1; `heating[k]` is the radiator bit of step k
/// (missing trailing entries are off).
inline ZoneChain unroll_zone(std::string zone_id, const TransitionSchedule& schedule,
                             const std::vector<bool>& heating, int horizon,
                             bool initially_occupied = false) {
  if (horizon < 1) throw ValidationError("horizon must be at least 1");
  if (schedule.size() < static_cast<std::size_t>(horizon)) {
    throw ValidationError("transition schedule for zone '" + zone_id + "' covers " +
                          std::to_string(schedule.size()) + " steps, horizon needs " +
                          std::to_string(horizon));
  }
  schedule.validate();
  auto heat = [&](int k) {
    return static_cast<std::size_t>(k) < heating.size() && heating[static_cast<std::size_t>(k)];
  };

  ZoneChain chain;
  chain.zone_id = std::move(zone_id);
  chain.horizon = horizon;
  chain.states.push_back({0, initially_occupied, heat(0), false});
  for (int k = 1; k <= horizon; ++k) {
    chain.states.push_back({k, true, heat(k), false});
    chain.states.push_back({k, false, heat(k), false});
  }
  chain.states.push_back({horizon + 1, false, false, true});
  const std::size_t sink = chain.states.size() - 1;

  auto occupied_index = [](int k) { return static_cast<std::size_t>(2 * k - 1); };
  auto empty_index = [](int k) { return static_cast<std::size_t>(2 * k); };

  const StepTransition& first = schedule.steps[0];
  chain.transitions.push_back(
      {0, occupied_index(1), first.probability(initially_occupied, true), 1});
  chain.transitions.push_back(
      {0, empty_index(1), first.probability(initially_occupied, false), 1});
  for (int k = 1; k < horizon; ++k) {
    const StepTransition& p = schedule.steps[static_cast<std::size_t>(k)];
    for (bool from_occ : {true, false}) {
      const std::size_t from = from_occ ? occupied_index(k) : empty_index(k);
      chain.transitions.push_back({from, occupied_index(k + 1), p.probability(from_occ, true), k + 1});
      chain.transitions.push_back({from, empty_index(k + 1), p.probability(from_occ, false), k + 1});
    }
  }
  chain.transitions.push_back({occupied_index(horizon), sink, 1.0, horizon + 1});
  chain.transitions.push_back({empty_index(horizon), sink, 1.0, horizon + 1});
  chain.transitions.push_back({sink, sink, 1.0, horizon + 1});
  return chain;
}

struct ComposedState {
  int step = 0;
  bool sink = false;
  std::vector<std::size_t> local;  // state index in each zone chain
};

/// Per-zone state rewards for one evaluation step theta.
struct RewardStructure {
  int theta = 0;
  std::vector<std::string> zone_ids;
  std::vector<std::vector<double>> values;  // values[zone][state]

  const std::vector<double>* find(const std::string& zone_id) const {
    for (std::size_t i = 0; i < zone_ids.size(); ++i) {
      if (zone_ids[i] == zone_id) return &values[i];
    }
    return nullptr;
  }

  const std::vector<double>& at(const std::string& zone_id) const {
    const auto* v = find(zone_id);
    if (!v) throw ValidationError("no reward structure for zone '" + zone_id + "'");
    return *v;
  }
};

class ComposedModel {
 public:
  std::vector<std::string> zone_ids;
  int horizon = 0;
  std::vector<std::vector<ChainState>> zone_states;  // labels of each component chain
  std::vector<ComposedState> states;                 // ascending by step
  std::vector<ChainTransition> transitions;          // grouped by source, ascending
  std::vector<std::size_t> out_offsets;              // CSR offsets into transitions
  std::optional<RewardStructure> rewards;

  static constexpr std::size_t initial() { return 0; }
  std::size_t sink() const { return states.size() - 1; }
  std::size_t zone_count() const { return zone_ids.size(); }

  std::span<const ChainTransition> outgoing(std::size_t s) const {
    return {transitions.data() + out_offsets[s], out_offsets[s + 1] - out_offsets[s]};
  }

  std::size_t zone_position(const std::string& id) const {
    for (std::size_t i = 0; i < zone_ids.size(); ++i) {
      if (zone_ids[i] == id) return i;
    }
    throw ValidationError("composed model has no zone '" + id + "'");
  }

  const ChainState& label(std::size_t state, std::size_t zone) const {
    return zone_states[zone][states[state].local[zone]];
  }

  /// Probability of reaching each state. Every state except the sink is
  /// visited at most once, so this is also its expected visit count.
  std::vector<double> reach_probabilities() const {
    std::vector<double> pi(states.size(), 0.0);
    pi[initial()] = 1.0;
    for (std::size_t s = 0; s < states.size(); ++s) {
      for (const auto& t : outgoing(s)) {
        if (t.to != s) pi[t.to] += pi[s] * t.probability;
      }
    }
    return pi;
  }
};

/// Synchronized product of zone chains restricted to reachable states.
/// All chains share their labels t_k, so every move is joint and the
/// probability is the product of the component probabilities.
inline ComposedModel compose(const std::vector<ZoneChain>& chains) {
  if (chains.empty()) throw ValidationError("nothing to compose");
  const int horizon = chains.front().horizon;
  const std::set<int> labels = chains.front().labels();
  std::set<std::string> seen;
  for (const auto& c : chains) {
    if (c.horizon != horizon) {
      throw ValidationError("mismatched horizons: zone '" + c.zone_id + "' has " +
                            std::to_string(c.horizon) + ", expected " + std::to_string(horizon));
    }
    if (c.labels() != labels) {
      throw ValidationError("zone '" + c.zone_id + "' does not share the transition labels");
    }
    if (!seen.insert(c.zone_id).second) {
      throw ValidationError("duplicate zone id '" + c.zone_id + "' in composition");
    }
  }

  // Outgoing transitions per chain state, keyed by label.
  std::vector<std::vector<std::map<int, std::vector<ChainTransition>>>> by_label(chains.size());
  for (std::size_t c = 0; c < chains.size(); ++c) {
    by_label[c].resize(chains[c].states.size());
    for (const auto& t : chains[c].transitions) by_label[c][t.from][t.label].push_back(t);
  }

  ComposedModel model;
  model.horizon = horizon;
  for (const auto& c : chains) {
    model.zone_ids.push_back(c.zone_id);
    model.zone_states.push_back(c.states);
  }

  std::map<std::vector<std::size_t>, std::size_t> index;
  std::vector<std::vector<ChainTransition>> out;
  auto intern = [&](const std::vector<std::size_t>& local) {
    auto [it, inserted] = index.emplace(local, model.states.size());
    if (inserted) {
      const ChainState& first = chains[0].states[local[0]];
      model.states.push_back({first.step, first.sink, local});
      out.emplace_back();
    }
    return it->second;
  };
  intern(std::vector<std::size_t>(chains.size(), ZoneChain::initial()));

  // Breadth-first; layers are visited in step order.
  for (std::size_t s = 0; s < model.states.size(); ++s) {
    const std::vector<std::size_t> local = model.states[s].local;
    for (const auto& entry : by_label[0][local[0]]) {
      const int label = entry.first;
      bool enabled = true;
      for (std::size_t c = 1; c < chains.size(); ++c) {
        if (!by_label[c][local[c]].count(label)) enabled = false;
      }
      if (!enabled) continue;
      // Cartesian product over the components' moves on this label.
      std::vector<std::size_t> pick(chains.size(), 0);
      for (bool more = true; more;) {
        std::vector<std::size_t> target(chains.size());
        double p = 1.0;
        for (std::size_t c = 0; c < chains.size(); ++c) {
          const ChainTransition& t = by_label[c][local[c]].at(label)[pick[c]];
          target[c] = t.to;
          p *= t.probability;
        }
        const std::size_t to = intern(target);
        out[s].push_back({s, to, p, label});
        more = false;
        for (std::size_t c = chains.size(); c-- > 0;) {
          if (++pick[c] < by_label[c][local[c]].at(label).size()) {
            more = true;
            break;
          }
          pick[c] = 0;
        }
      }
    }
  }

  model.out_offsets.push_back(0);
  for (auto& moves : out) {
    for (auto& t : moves) model.transitions.push_back(t);
    model.out_offsets.push_back(model.transitions.size());
  }
  return model;
}

struct ZoneGains {
  double q_int = 0.0;  // degC per step while occupied
  double q_rad = 0.0;  // degC per step while the radiator is on
};

/// Assigns the theta-dependent reward of every zone in `zones` (all zones
/// of the model when empty):
///
///   initial state        row_m(A^theta) . T[0]
///   step k, 1<=k<=theta  row_m(A^(theta-k)) . E[Q^k | state]
///   otherwise            0
///
/// where Q^k_j = q_int_j [zone j occupied at k-1] + q_rad_j [heating on at
/// k-1]. The previous-step labels are not part of the current state, so the
/// gain is conditioned on it using the forward path measure; by the tower
/// property the expected cumulative reward is that of reading the labels
/// along each path. States of probability zero average over their
/// predecessors uniformly.
inline ComposedModel assign_rewards(const ComposedModel& model, const Building& building,
                                    const std::vector<ZoneGains>& gains, int theta,
                                    const std::vector<std::string>& zones = {}) {
  if (theta < 1 || theta > model.horizon) {
    throw ValidationError("theta " + std::to_string(theta) + " outside [1, " +
                          std::to_string(model.horizon) + "]");
  }
  if (gains.size() != building.size()) throw ValidationError("one gain pair per building zone required");
  if (building.size() != model.zone_count()) {
    throw ValidationError("building and composed model have different zone counts");
  }
  for (const auto& g : gains) {
    if (!std::isfinite(g.q_int) || !std::isfinite(g.q_rad)) throw ValidationError("non-finite gain");
  }
  // Building row j -> position of that zone in the composed tuple.
  std::vector<std::size_t> position(building.size());
  for (std::size_t j = 0; j < building.size(); ++j) {
    position[j] = model.zone_position(building.zone_ids[j]);
  }

  const std::vector<std::string>& targets = zones.empty() ? model.zone_ids : zones;
  const auto n = static_cast<Eigen::Index>(building.size());
  const std::vector<Eigen::MatrixXd> powers = matrix_powers(building.thermal.a(), theta);
  const std::vector<double> pi = model.reach_probabilities();

  std::vector<std::vector<std::pair<std::size_t, double>>> preds(model.states.size());
  for (const auto& t : model.transitions) {
    if (t.to != t.from) preds[t.to].push_back({t.from, t.probability});
  }
  auto gain_vector = [&](std::size_t state) {
    Eigen::VectorXd q(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const ChainState& l = model.label(state, position[static_cast<std::size_t>(j)]);
      const ZoneGains& g = gains[static_cast<std::size_t>(j)];
      q(j) = (l.occupied ? g.q_int : 0.0) + (l.heating ? g.q_rad : 0.0);
    }
    return q;
  };

  // Conditional expected gain vector of each state at steps 1..theta.
  std::vector<Eigen::VectorXd> expected_gain(model.states.size());
  for (std::size_t s = 0; s < model.states.size(); ++s) {
    const ComposedState& st = model.states[s];
    if (st.sink || st.step < 1 || st.step > theta) continue;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    double weight = 0.0;
    for (const auto& [u, p] : preds[s]) {
      const double w = pi[u] * p;
      if (w > 0.0) {
        acc += w * gain_vector(u);
        weight += w;
      }
    }
    if (weight > 0.0) {
      expected_gain[s] = acc / weight;
    } else {
      acc.setZero();
      for (const auto& pred : preds[s]) acc += gain_vector(pred.first);
      expected_gain[s] = preds[s].empty() ? acc : acc / static_cast<double>(preds[s].size());
    }
  }

  ComposedModel out = model;
  RewardStructure rewards;
  rewards.theta = theta;
  if (model.rewards && model.rewards->theta == theta) rewards = *model.rewards;
  for (const auto& id : targets) {
    if (rewards.find(id)) continue;
    const auto m = static_cast<Eigen::Index>(building.index_of(id));
    model.zone_position(id);  // throws for zones outside the model
    std::vector<double> values(model.states.size(), 0.0);
    values[ComposedModel::initial()] = powers[static_cast<std::size_t>(theta)].row(m).dot(
        building.thermal.initial_temps());
    for (std::size_t s = 0; s < model.states.size(); ++s) {
      const ComposedState& st = model.states[s];
      if (st.sink || st.step < 1 || st.step > theta) continue;
      values[s] = powers[static_cast<std::size_t>(theta - st.step)].row(m).dot(expected_gain[s]);
    }
    rewards.zone_ids.push_back(id);
    rewards.values.push_back(std::move(values));
  }
  out.rewards = std::move(rewards);
  return out;
}

/// Unions the per-zone reward annotations of structurally identical models.
/// Rewards are concatenated, never combined arithmetically; the result lists
/// zones in the models' composition order.
inline ComposedModel relabel_and_merge_rewards(const std::vector<ComposedModel>& models) {
  if (models.empty()) throw ValidationError("nothing to merge");
  const ComposedModel& base = models.front();
  std::map<std::string, const std::vector<double>*> merged;
  std::optional<int> theta;
  for (const auto& m : models) {
    if (m.zone_ids != base.zone_ids || m.states.size() != base.states.size() ||
        m.transitions.size() != base.transitions.size() || m.horizon != base.horizon) {
      throw ValidationError("cannot merge rewards of structurally different models");
    }
    if (!m.rewards) continue;
    if (theta && *theta != m.rewards->theta) {
      throw ValidationError("cannot merge rewards assigned for different theta");
    }
    theta = m.rewards->theta;
    for (std::size_t i = 0; i < m.rewards->zone_ids.size(); ++i) {
      if (!merged.emplace(m.rewards->zone_ids[i], &m.rewards->values[i]).second) {
        throw ValidationError("duplicate reward structure for zone '" + m.rewards->zone_ids[i] + "'");
      }
    }
  }
  ComposedModel out = base;
  out.rewards.reset();
  if (!theta) return out;
  RewardStructure rewards;
  rewards.theta = *theta;
  for (const auto& id : base.zone_ids) {
    auto it = merged.find(id);
    if (it == merged.end()) continue;
    rewards.zone_ids.push_back(id);
    rewards.values.push_back(*it->second);
  }
  out.rewards = std::move(rewards);
  return out;
}

}  // namespace thermochain
