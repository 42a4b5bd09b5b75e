#pragma once

// JSON/CSV readers and writers for the file formats used by the CLI.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "thermochain/analysis.hpp"
#include "thermochain/error.hpp"
#include "thermochain/markov.hpp"
#include "thermochain/occupancy.hpp"
#include "thermochain/prism_export.hpp"
#include "thermochain/strategy.hpp"
#include "thermochain/thermal_model.hpp"

namespace thermochain::io {

using nlohmann::json;

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(source + ": " + e.what());
  }
}

/// Writes to a sibling temporary file, then renames over the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw ValidationError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Building topology

struct BuildingFile {
  RCNetwork network;
  double delta = 1.0;
  std::optional<Eigen::MatrixXd> explicit_a;
  std::optional<Eigen::MatrixXd> explicit_b;

  std::vector<std::string> zone_ids() const {
    std::vector<std::string> ids;
    for (const auto& z : network.zones) ids.push_back(z.id);
    return ids;
  }

  /// Explicit matrices when present, forward-Euler discretization otherwise.
  Building building() const {
    NetworkReport report = validate_network(network);
    if (report.has_errors()) throw ValidationError(report.error_summary());
    if (explicit_a) {
      return Building(zone_ids(), DiscreteThermalModel(*explicit_a, *explicit_b, delta,
                                                       network.initial_temps()));
    }
    return Building(zone_ids(), discretize_forward_euler(network, delta));
  }
};

namespace detail {

inline double number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ValidationError(where + ": missing numeric field '" + key + "'");
  }
  return j.at(key).get<double>();
}

inline Eigen::MatrixXd matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ValidationError(where + ": expected a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j.at(static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ValidationError(where + ": ragged matrix");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& v = row.at(static_cast<std::size_t>(c));
      if (!v.is_number()) throw ValidationError(where + ": non-numeric matrix entry");
      m(r, c) = v.get<double>();
    }
  }
  return m;
}

}  // namespace detail

inline BuildingFile parse_building(const json& j, const std::string& source = "building") {
  BuildingFile out;
  if (!j.is_object() || !j.contains("zones") || !j.at("zones").is_array()) {
    throw ValidationError(source + ": expected an object with a 'zones' array");
  }
  for (const json& z : j.at("zones")) {
    if (!z.contains("id") || !z.at("id").is_string()) {
      throw ValidationError(source + ": zone without a string 'id'");
    }
    const std::string id = z.at("id").get<std::string>();
    const std::string where = source + ": zone '" + id + "'";
    out.network.zones.push_back({id, detail::number(z, "capacitance", where),
                                 detail::number(z, "resistance", where),
                                 detail::number(z, "initial_temp", where)});
  }
  if (j.contains("edges")) {
    for (const json& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2 || !e.at(0).is_string() || !e.at(1).is_string()) {
        throw ValidationError(source + ": each edge must be a pair of zone ids");
      }
      out.network.edges.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    }
  }
  if (j.contains("delta")) out.delta = detail::number(j, "delta", source);
  if (j.contains("explicit_discrete")) {
    const json& d = j.at("explicit_discrete");
    out.explicit_a = detail::matrix(d.at("a"), source + ": explicit_discrete.a");
    out.explicit_b = detail::matrix(d.at("b"), source + ": explicit_discrete.b");
    if (d.contains("delta")) out.delta = detail::number(d, "delta", source + ": explicit_discrete");
  }
  return out;
}

inline BuildingFile load_building(const std::filesystem::path& path) {
  return parse_building(parse_json(read_file(path), path.string()), path.string());
}

// ---------------------------------------------------------------------------
// Occupancy schedules

inline json diagnostics_json(const std::vector<ScheduleDiagnostic>& diagnostics) {
  json out = json::array();
  for (const auto& d : diagnostics) {
    out.push_back({{"hour", d.hour ? json(*d.hour) : json(nullptr)},
                   {"condition", d.condition},
                   {"reason", d.reason}});
  }
  return out;
}

inline json schedule_json(const TransitionSchedule& s) {
  json steps = json::array();
  for (const auto& st : s.steps) {
    steps.push_back({{"hour", st.hour},
                     {"p_vf", st.p_vf},
                     {"p_vv", st.p_vv()},
                     {"p_ff", st.p_ff},
                     {"p_fv", st.p_fv()}});
  }
  return {{"first_hour", s.first_hour},
          {"steps", steps},
          {"diagnostics", diagnostics_json(s.diagnostics)}};
}

inline TransitionSchedule parse_schedule(const json& j, const std::string& source) {
  TransitionSchedule s;
  try {
    s.first_hour = j.at("first_hour").get<int>();
    for (const json& st : j.at("steps")) {
      s.steps.push_back({st.at("hour").get<int>(), st.at("p_vf").get<double>(),
                         st.at("p_ff").get<double>(), false, false});
    }
  } catch (const json::exception& e) {
    throw ValidationError(source + ": " + e.what());
  }
  s.validate();
  return s;
}

/// A `.json` path holds an estimated schedule; anything else is an
/// occupancy CSV that is estimated on load.
inline TransitionSchedule load_schedule(const std::filesystem::path& path,
                                        double pseudo_count = 0.0) {
  if (path.extension() == ".json") {
    return parse_schedule(parse_json(read_file(path), path.string()), path.string());
  }
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open occupancy file " + path.string());
  return estimate_transition_schedule(parse_occupancy_csv(in, path.string()), pseudo_count);
}

// ---------------------------------------------------------------------------
// Strategies and tariffs

inline HeatingStrategy parse_strategy(const json& j, const std::string& source = "strategy") {
  HeatingStrategy s;
  try {
    s.name = j.at("name").get<std::string>();
    for (const auto& [zone, hours] : j.at("schedule").items()) {
      auto& set = s.schedule[zone];
      for (const json& h : hours) set.insert(h.get<int>());
    }
  } catch (const json::exception& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return s;
}

inline Tariff parse_tariff(const json& j, const std::string& source = "tariff") {
  Tariff t;
  try {
    for (const json& b : j.at("bands")) {
      t.bands.push_back({b.at("name").get<std::string>(), b.at("start").get<int>(),
                         b.at("end").get<int>(), b.at("price_minor_per_kwh").get<std::int64_t>()});
    }
  } catch (const json::exception& e) {
    throw ValidationError(source + ": " + e.what());
  }
  t.validate();
  return t;
}

// ---------------------------------------------------------------------------
// Result writers

inline std::string trajectory_csv(const TemperatureTrajectory& t, int window_start) {
  std::ostringstream out;
  out << "theta_hour,zone_id,expected_temp_c\n";
  for (std::size_t i = 0; i < t.thetas.size(); ++i) {
    for (std::size_t z = 0; z < t.zone_ids.size(); ++z) {
      out << window_start + t.thetas[i] << ',' << t.zone_ids[z] << ','
          << format_double(t.values[i][z]) << '\n';
    }
  }
  return out.str();
}

inline json comfort_json(const ComfortReport& r, int window_start) {
  json points = json::array();
  for (std::size_t i = 0; i < r.thetas.size(); ++i) {
    for (std::size_t z = 0; z < r.zone_ids.size(); ++z) {
      points.push_back({{"theta_hour", window_start + r.thetas[i]},
                        {"zone_id", r.zone_ids[z]},
                        {"class", to_string(r.classes[i][z])}});
    }
  }
  json zones = json::array();
  for (std::size_t z = 0; z < r.zone_ids.size(); ++z) {
    zones.push_back({{"zone_id", r.zone_ids[z]},
                     {"ever_above", static_cast<bool>(r.ever_above[z])},
                     {"ever_below", static_cast<bool>(r.ever_below[z])}});
  }
  return {{"band", {{"low", r.band.low}, {"high", r.band.high}}},
          {"zones", zones},
          {"points", points}};
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string kwh(std::int64_t wh) {
  std::string s = std::to_string(wh / 1000);
  if (wh % 1000 != 0) {
    std::string frac = std::to_string(wh % 1000);
    frac.insert(0, 3 - frac.size(), '0');
    while (frac.back() == '0') frac.pop_back();
    s += "." + frac;
  }
  return s;
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

}  // namespace detail

inline std::string cost_csv(const Ranking& ranking) {
  std::ostringstream out;
  out << "strategy";
  if (!ranking.rows.empty()) {
    for (const auto& b : ranking.rows.front().cost.bands) out << ',' << detail::csv_field(b.band + "_kwh");
  }
  out << ",total_cost,ratio_vs_cheapest";
  const bool with_comfort = !ranking.rows.empty() && ranking.rows.front().comfort.has_value();
  if (with_comfort) out << ",comfort";
  out << ",notes\n";
  for (const auto& row : ranking.rows) {
    out << detail::csv_field(row.cost.strategy);
    for (const auto& b : row.cost.bands) out << ',' << detail::kwh(b.energy_wh);
    out << ',' << row.cost.total.to_string() << ',';
    if (row.ratio) out << format_double(*row.ratio);
    if (with_comfort) out << ',' << (row.comfort->all_within() ? "within" : "violated");
    out << ',' << detail::csv_field(detail::join(row.cost.notes, "; ")) << '\n';
  }
  return out.str();
}

inline json cost_json(const Ranking& ranking, int window_start = 0) {
  json rows = json::array();
  for (const auto& row : ranking.rows) {
    json bands = json::array();
    for (const auto& b : row.cost.bands) {
      bands.push_back({{"band", b.band},
                       {"energy_kwh", b.energy_kwh()},
                       {"price_minor_per_kwh", b.price_minor_per_kwh},
                       {"cost", b.cost().to_string()}});
    }
    json r = {{"strategy", row.cost.strategy},
              {"bands", bands},
              {"total_cost", row.cost.total.to_string()},
              {"ratio_vs_cheapest", row.ratio ? json(*row.ratio) : json(nullptr)},
              {"notes", row.cost.notes}};
    if (row.comfort) r["comfort"] = comfort_json(*row.comfort, window_start);
    rows.push_back(std::move(r));
  }
  return {{"strategies", rows},
          {"baseline", ranking.baseline ? json(*ranking.baseline) : json(nullptr)},
          {"notes", ranking.notes}};
}

/// States with (step, labels, rewards) and transitions with probabilities.
inline json chain_json(const ComposedModel& model) {
  json states = json::array();
  for (std::size_t s = 0; s < model.states.size(); ++s) {
    const ComposedState& st = model.states[s];
    json labels = json::object();
    for (std::size_t z = 0; z < model.zone_count(); ++z) {
      const ChainState& l = model.label(s, z);
      json zl = json::array();
      if (!st.sink) {
        zl.push_back(l.occupied ? "occupied" : "empty");
        zl.push_back(l.heating ? "heating_on" : "heating_off");
      }
      labels[model.zone_ids[z]] = zl;
    }
    json entry = {{"id", s}, {"step", st.step}, {"sink", st.sink}, {"labels", labels}};
    if (model.rewards) {
      json rewards = json::object();
      for (std::size_t z = 0; z < model.rewards->zone_ids.size(); ++z) {
        rewards[model.rewards->zone_ids[z]] = model.rewards->values[z][s];
      }
      entry["rewards"] = rewards;
    }
    states.push_back(std::move(entry));
  }
  json transitions = json::array();
  for (const auto& t : model.transitions) {
    transitions.push_back({{"from", t.from},
                           {"to", t.to},
                           {"probability", t.probability},
                           {"label", "t" + std::to_string(t.label)}});
  }
  json out = {{"zones", model.zone_ids},
              {"horizon", model.horizon},
              {"states", states},
              {"transitions", transitions}};
  if (model.rewards) out["theta"] = model.rewards->theta;
  return out;
}

}  // namespace thermochain::io
