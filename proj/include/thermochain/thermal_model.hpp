#pragma once

// RC-network thermal model of a multi-zone building.
//
// Each zone i carries a lumped capacitance C_i and a node resistance R_i.
// Heat flows along directed edges (i, j), giving the continuous model
//
//   dT_i/dt = sum_{j : (i,j) in E} (T_j - T_i) / (C_i R_i) + Q_i / C_i
//
// which is discretized with forward Euler into T[k+1] = A T[k] + B Q[k].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "thermochain/error.hpp"

namespace thermochain {

struct Zone {
  std::string id;
  double capacitance = 0.0;
  double resistance = 0.0;
  double initial_temp = 0.0;  // degC
};

struct RCNetwork {
  std::vector<Zone> zones;
  std::vector<std::pair<std::string, std::string>> edges;

  std::size_t size() const { return zones.size(); }

  std::optional<std::size_t> index_of(const std::string& id) const {
    for (std::size_t i = 0; i < zones.size(); ++i) {
      if (zones[i].id == id) return i;
    }
    return std::nullopt;
  }

  Eigen::VectorXd initial_temps() const {
    Eigen::VectorXd t(static_cast<Eigen::Index>(zones.size()));
    for (std::size_t i = 0; i < zones.size(); ++i) {
      t(static_cast<Eigen::Index>(i)) = zones[i].initial_temp;
    }
    return t;
  }
};

struct Diagnostic {
  enum class Severity { kError, kWarning };

  Severity severity = Severity::kError;
  std::string code;
  std::string message;

  bool is_error() const { return severity == Severity::kError; }
};

struct NetworkReport {
  std::vector<Diagnostic> entries;

  bool empty() const { return entries.empty(); }

  bool has_errors() const {
    return std::any_of(entries.begin(), entries.end(),
                       [](const Diagnostic& d) { return d.is_error(); });
  }

  bool contains(const std::string& code) const {
    return std::any_of(entries.begin(), entries.end(),
                       [&](const Diagnostic& d) { return d.code == code; });
  }

  std::string error_summary() const {
    std::string out;
    for (const auto& d : entries) {
      if (!d.is_error()) continue;
      if (!out.empty()) out += "; ";
      out += d.message;
    }
    return out;
  }
};

/// Lists violated invariants, disconnected components and one-way edges.
/// Never throws.
inline NetworkReport validate_network(const RCNetwork& network) {
  using Severity = Diagnostic::Severity;
  NetworkReport report;
  auto add = [&](Severity s, std::string code, std::string msg) {
    report.entries.push_back({s, std::move(code), std::move(msg)});
  };

  std::map<std::string, std::size_t> ids;
  for (std::size_t i = 0; i < network.zones.size(); ++i) {
    const Zone& z = network.zones[i];
    if (!ids.emplace(z.id, i).second) {
      add(Severity::kError, "duplicate-zone-id", "duplicate zone id '" + z.id + "'");
    }
    if (!(z.capacitance > 0.0)) {
      add(Severity::kError, "non-positive-capacitance",
          "non-positive capacitance for zone '" + z.id + "'");
    }
    if (!(z.resistance > 0.0)) {
      add(Severity::kError, "non-positive-resistance",
          "non-positive resistance for zone '" + z.id + "'");
    }
    if (!std::isfinite(z.initial_temp)) {
      add(Severity::kError, "non-finite-temperature",
          "non-finite initial temperature for zone '" + z.id + "'");
    }
  }
  if (network.zones.empty()) {
    add(Severity::kError, "no-zones", "network has no zones");
  }

  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& [from, to] : network.edges) {
    auto fi = ids.find(from);
    auto ti = ids.find(to);
    if (fi == ids.end() || ti == ids.end()) {
      add(Severity::kError, "unknown-edge-endpoint",
          "edge (" + from + ", " + to + ") references an undeclared zone");
      continue;
    }
    if (fi->second == ti->second) {
      add(Severity::kError, "self-edge", "self-edge on zone '" + from + "'");
      continue;
    }
    edges.emplace(fi->second, ti->second);
  }

  for (const auto& [i, j] : edges) {
    if (!edges.count({j, i})) {
      add(Severity::kWarning, "asymmetric-edge",
          "edge (" + network.zones[i].id + ", " + network.zones[j].id +
              ") declared without its reverse");
    }
  }

  // Connectivity over the undirected skeleton.
  const std::size_t n = network.zones.size();
  if (n > 1) {
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& [i, j] : edges) parent[find(i)] = find(j);
    std::set<std::size_t> roots;
    for (std::size_t i = 0; i < n; ++i) roots.insert(find(i));
    if (roots.size() > 1) {
      add(Severity::kWarning, "disconnected",
          "network has " + std::to_string(roots.size()) + " disconnected components");
    }
  }
  return report;
}

struct ContinuousStateSpace {
  Eigen::MatrixXd a_hat;  // 1/hour
  Eigen::MatrixXd b_hat;  // diag(1/C_i)
  std::vector<Diagnostic> warnings;
};

/// Assembles A-hat and B-hat. Off-diagonal A-hat(i,j) = 1/(C_i R_i) for each
/// declared edge (i,j); the diagonal closes each row to zero.
inline ContinuousStateSpace build_state_space(const RCNetwork& network) {
  NetworkReport report = validate_network(network);
  if (report.has_errors()) throw ValidationError(report.error_summary());

  const auto n = static_cast<Eigen::Index>(network.size());
  ContinuousStateSpace ss;
  ss.a_hat = Eigen::MatrixXd::Zero(n, n);
  ss.b_hat = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [from, to] : network.edges) {
    const auto i = static_cast<Eigen::Index>(*network.index_of(from));
    const auto j = static_cast<Eigen::Index>(*network.index_of(to));
    const Zone& z = network.zones[static_cast<std::size_t>(i)];
    ss.a_hat(i, j) = 1.0 / (z.capacitance * z.resistance);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) off += ss.a_hat(i, j);
    }
    ss.a_hat(i, i) = -off;
    ss.b_hat(i, i) = 1.0 / network.zones[static_cast<std::size_t>(i)].capacitance;
  }
  for (auto& d : report.entries) ss.warnings.push_back(std::move(d));
  return ss;
}

/// Discrete-time model T[k+1] = A T[k] + B Q[k] with step length delta.
/// Construction rejects A entries outside [0, 1]: downstream reward weights
/// are rows of powers of A and must stay non-negative.
class DiscreteThermalModel {
 public:
  DiscreteThermalModel(Eigen::MatrixXd a, Eigen::MatrixXd b, double delta,
                       Eigen::VectorXd initial_temps)
      : a_(std::move(a)), b_(std::move(b)), delta_(delta),
        initial_temps_(std::move(initial_temps)) {
    if (a_.rows() == 0 || a_.rows() != a_.cols()) {
      throw ValidationError("A must be a non-empty square matrix");
    }
    if (b_.rows() != a_.rows() || b_.cols() != a_.cols()) {
      throw ValidationError("B must have the same shape as A");
    }
    if (initial_temps_.size() != a_.rows()) {
      throw ValidationError("initial temperature vector does not match A");
    }
    if (!(delta_ > 0.0)) throw ValidationError("step length must be positive");
    constexpr double kSlack = 1e-12;
    for (Eigen::Index i = 0; i < a_.rows(); ++i) {
      for (Eigen::Index j = 0; j < a_.cols(); ++j) {
        const double v = a_(i, j);
        if (!(v >= -kSlack && v <= 1.0 + kSlack)) {
          throw NumericalError("unstable discretization: A(" + std::to_string(i) + "," +
                               std::to_string(j) + ") = " + std::to_string(v) +
                               " lies outside [0, 1]; reduce the step length");
        }
      }
    }
  }

  const Eigen::MatrixXd& a() const { return a_; }
  const Eigen::MatrixXd& b() const { return b_; }
  double delta() const { return delta_; }
  const Eigen::VectorXd& initial_temps() const { return initial_temps_; }
  Eigen::Index zone_count() const { return a_.rows(); }

 private:
  Eigen::MatrixXd a_;
  Eigen::MatrixXd b_;
  double delta_;
  Eigen::VectorXd initial_temps_;
};

/// A = I + delta * A-hat, B = delta * B-hat.
inline DiscreteThermalModel discretize_forward_euler(const ContinuousStateSpace& ss,
                                                     double delta,
                                                     Eigen::VectorXd initial_temps) {
  if (!(delta > 0.0)) throw ValidationError("step length must be positive");
  const auto n = ss.a_hat.rows();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) + delta * ss.a_hat;
  Eigen::MatrixXd b = delta * ss.b_hat;
  return DiscreteThermalModel(std::move(a), std::move(b), delta, std::move(initial_temps));
}

inline DiscreteThermalModel discretize_forward_euler(const RCNetwork& network, double delta) {
  return discretize_forward_euler(build_state_space(network), delta, network.initial_temps());
}

/// Repeated product a^k; k = 0 gives the identity.
inline Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& a, int k) {
  if (a.rows() != a.cols()) throw ValidationError("matrix_power needs a square matrix");
  if (k < 0) throw ValidationError("matrix_power needs a non-negative exponent");
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  for (int i = 0; i < k; ++i) out = out * a;
  return out;
}

/// Powers a^0 .. a^max_k, indexed by exponent.
inline std::vector<Eigen::MatrixXd> matrix_powers(const Eigen::MatrixXd& a, int max_k) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(max_k) + 1);
  out.push_back(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
  for (int i = 1; i <= max_k; ++i) out.push_back(out.back() * a);
  return out;
}

/// Discrete thermal model plus the zone id of each row/column of A.
struct Building {
  std::vector<std::string> zone_ids;
  DiscreteThermalModel thermal;

  Building(std::vector<std::string> ids, DiscreteThermalModel model)
      : zone_ids(std::move(ids)), thermal(std::move(model)) {
    if (static_cast<Eigen::Index>(zone_ids.size()) != thermal.zone_count()) {
      throw ValidationError("zone id list does not match the thermal model size");
    }
    if (std::set<std::string>(zone_ids.begin(), zone_ids.end()).size() != zone_ids.size()) {
      throw ValidationError("duplicate zone id in building");
    }
  }

  std::size_t size() const { return zone_ids.size(); }

  std::size_t index_of(const std::string& id) const {
    for (std::size_t i = 0; i < zone_ids.size(); ++i) {
      if (zone_ids[i] == id) return i;
    }
    throw ValidationError("unknown zone id '" + id + "'");
  }
};

}  // namespace thermochain
