#pragma once

// PRISM-language emission of the composed building model. One module per
// zone holds a step counter and an occupancy bit; modules synchronize on
// the step labels t_k. Rewards depend on the evaluation step theta, so each
// (zone, theta) pair gets its own reward structure.

#include <charconv>
#include <cstddef>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "thermochain/analysis.hpp"
#include "thermochain/error.hpp"
#include "thermochain/markov.hpp"

namespace thermochain {

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw ValidationError("cannot format number");
  return std::string(buf, end);
}

struct PrismArtifact {
  std::string model_text;
  std::string properties_text;
  std::size_t zone_count = 0;
  int horizon = 0;
  std::vector<int> thetas;
};

inline std::string reward_structure_name(const std::string& zone_id, int theta) {
  return zone_id + "_theta" + std::to_string(theta);
}

namespace detail {

inline void check_identifier(const std::string& id) {
  if (id.empty()) throw ValidationError("empty zone id");
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-';
    if (!ok) throw ValidationError("zone id '" + id + "' cannot be exported; use [A-Za-z0-9_-]");
  }
}

inline bool same_dynamics(const ZoneChain& a, const ZoneChain& b) {
  if (a.transitions.size() != b.transitions.size()) return false;
  if (a.states.front().occupied != b.states.front().occupied) return false;
  for (std::size_t i = 0; i < a.transitions.size(); ++i) {
    const auto& x = a.transitions[i];
    const auto& y = b.transitions[i];
    if (x.from != y.from || x.to != y.to || x.label != y.label || x.probability != y.probability) {
      return false;
    }
  }
  return true;
}

inline void emit_module(std::ostream& out, const ZoneChain& chain, std::size_t zone) {
  const std::string k = "k" + std::to_string(zone + 1);
  const std::string o = "o" + std::to_string(zone + 1);
  out << "module z" << zone + 1 << "\n";
  out << "  " << k << " : [0.." << chain.horizon + 1 << "] init 0;\n";
  out << "  " << o << " : [0..1] init " << (chain.states.front().occupied ? 1 : 0) << ";\n\n";

  const auto& ts = chain.transitions;
  for (std::size_t i = 0; i < ts.size();) {
    const std::size_t from = ts[i].from;
    const ChainState& src = chain.states[from];
    out << "  [t" << ts[i].label << "] " << k << "=" << src.step;
    if (src.sink) {
      out << " -> true;\n";
      while (i < ts.size() && ts[i].from == from) ++i;
      continue;
    }
    out << " & " << o << "=" << (src.occupied ? 1 : 0) << " -> ";
    bool first = true;
    for (; i < ts.size() && ts[i].from == from; ++i) {
      const ChainTransition& t = ts[i];
      if (t.probability <= 0.0) continue;
      const ChainState& dst = chain.states[t.to];
      if (!first) out << " + ";
      out << format_double(t.probability) << ":(" << k << "'=" << dst.step << ")&(" << o
          << "'=" << (dst.occupied ? 1 : 0) << ")";
      first = false;
    }
    out << ";\n";
  }
  out << "endmodule\n";
}

}  // namespace detail

/// Cumulative-reward queries, one per (theta, zone), with bound theta+1.
inline std::string export_properties(const std::vector<std::string>& zone_ids,
                                     const std::vector<int>& thetas) {
  std::ostringstream out;
  out << "// Expected zone temperature at step theta: cumulative state reward\n"
         "// over steps 0..theta, i.e. C<=theta+1.\n";
  for (int theta : thetas) {
    for (const auto& id : zone_ids) {
      out << "R{\"" << reward_structure_name(id, theta) << "\"}=? [ C<=" << theta + 1 << " ]\n";
    }
  }
  return out.str();
}

/// Emits the scenario's composed model with one reward structure per zone
/// and theta. Deterministic: identical inputs give identical text.
inline PrismArtifact export_prism_model(const Scenario& scenario, const std::vector<int>& thetas) {
  const std::vector<ZoneChain> chains = scenario.chains();
  for (const auto& c : chains) detail::check_identifier(c.zone_id);
  for (int t : thetas) {
    if (t < 1 || t > scenario.horizon) {
      throw ValidationError("theta " + std::to_string(t) + " outside [1, " +
                            std::to_string(scenario.horizon) + "]");
    }
  }
  const ComposedModel model = compose(chains);
  const std::size_t n = chains.size();

  std::ostringstream out;
  out << "// Building thermal/occupancy model: " << n << " zone(s), horizon " << scenario.horizon
      << " step(s)\n";
  for (std::size_t z = 0; z < n; ++z) {
    out << "//   z" << z + 1 << " = zone \"" << chains[z].zone_id << "\"\n";
  }
  out << "// reward structures for theta:";
  for (int t : thetas) out << ' ' << t;
  out << "\n\ndtmc\n\n";

  for (std::size_t z = 0; z < n; ++z) {
    std::size_t twin = z;
    for (std::size_t y = 0; y < z; ++y) {
      if (detail::same_dynamics(chains[y], chains[z])) {
        twin = y;
        break;
      }
    }
    if (twin != z) {
      out << "module z" << z + 1 << " = z" << twin + 1 << " [k" << twin + 1 << "=k" << z + 1
          << ", o" << twin + 1 << "=o" << z + 1 << "] endmodule\n\n";
    } else {
      detail::emit_module(out, chains[z], z);
      out << "\n";
    }
  }

  for (int theta : thetas) {
    const ComposedModel rewarded =
        assign_rewards(model, scenario.building, scenario.gains, theta);
    for (const auto& id : model.zone_ids) {
      const std::vector<double>& rho = rewarded.rewards->at(id);
      out << "rewards \"" << reward_structure_name(id, theta) << "\"\n";
      for (std::size_t s = 0; s < model.states.size(); ++s) {
        const double v = rho[s];
        const ComposedState& st = model.states[s];
        if (v < 0.0) {
          std::string where = "step " + std::to_string(st.step);
          for (std::size_t z = 0; z < n; ++z) {
            where += std::string(", ") + model.zone_ids[z] + "=" +
                     (model.label(s, z).occupied ? "occupied" : "empty");
          }
          throw ValidationError("negative reward unsupported by target: zone '" + id +
                                "', theta " + std::to_string(theta) + ", state (" + where + ")");
        }
        if (v == 0.0) continue;
        out << "  k1=" << st.step;
        if (st.step > 0) {
          for (std::size_t z = 0; z < n; ++z) {
            out << " & o" << z + 1 << "=" << (model.label(s, z).occupied ? 1 : 0);
          }
        }
        out << " : " << format_double(v) << ";\n";
      }
      out << "endrewards\n\n";
    }
  }

  PrismArtifact artifact;
  artifact.model_text = out.str();
  artifact.properties_text = export_properties(model.zone_ids, thetas);
  artifact.zone_count = n;
  artifact.horizon = scenario.horizon;
  artifact.thetas = thetas;
  return artifact;
}

}  // namespace thermochain
