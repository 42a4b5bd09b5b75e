#pragma once

// Batch command-line front end: analyze | cost | export | estimate | synth.
// Exit codes: 0 success, 2 validation/config error, 3 numerical guard.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "thermochain/analysis.hpp"
#include "thermochain/error.hpp"
#include "thermochain/io.hpp"
#include "thermochain/occupancy.hpp"
#include "thermochain/prism_export.hpp"
#include "thermochain/strategy.hpp"
#include "thermochain/synthetic.hpp"

namespace thermochain::cli {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

struct RunConfig {
  std::optional<fs::path> building;
  std::map<std::string, fs::path> occupancy;  // zone id -> CSV or schedule JSON
  std::vector<std::string> strategies;        // built-in names or JSON paths
  std::string tariff = "builtin";             // "builtin" or a JSON path
  std::map<std::string, ZoneGains> gains;
  std::map<std::string, double> radiator_kw;
  int window_start = 8;
  int window_end = 17;
  ComfortBand band{20.0, 22.0};
  std::optional<std::pair<int, int>> theta;  // steps; default 1..K
  fs::path out_dir = ".";
  std::uint64_t seed = kSyntheticSeed;
  int days = kSyntheticDays;
  double pseudo_count = 0.0;
  std::string name = "building";
  bool to_stdout = false;
  std::optional<fs::path> dump_chain;

  int horizon() const { return window_end - window_start; }
};

namespace detail {

inline std::pair<std::string, std::string> split_assignment(const std::string& s,
                                                            const std::string& flag) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
    throw ValidationError(flag + " expects <zone>=<value>, got '" + s + "'");
  }
  return {s.substr(0, eq), s.substr(eq + 1)};
}

inline double to_double(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ValidationError("invalid number '" + s + "' for " + what);
  }
  if (pos != s.size()) throw ValidationError("invalid number '" + s + "' for " + what);
  return v;
}

inline int to_int(const std::string& s, const std::string& what) {
  const double v = to_double(s, what);
  if (v != static_cast<double>(static_cast<int>(v))) {
    throw ValidationError("expected an integer for " + what + ", got '" + s + "'");
  }
  return static_cast<int>(v);
}

inline std::pair<std::string, std::string> split_range(const std::string& s, const std::string& what) {
  const auto dash = s.find('-', 1);
  if (dash == std::string::npos) throw ValidationError(what + " expects <a>-<b>, got '" + s + "'");
  return {s.substr(0, dash), s.substr(dash + 1)};
}

inline std::pair<int, int> int_range(const std::string& s, const std::string& what) {
  auto [a, b] = split_range(s, what);
  return {to_int(a, what), to_int(b, what)};
}

inline ComfortBand band_range(const std::string& s) {
  auto [a, b] = split_range(s, "--band");
  ComfortBand band{to_double(a, "--band"), to_double(b, "--band")};
  if (!(band.low < band.high)) throw ValidationError("--band needs low < high");
  return band;
}

inline ZoneGains parse_gains(const std::string& value) {
  const auto comma = value.find(',');
  if (comma == std::string::npos) throw ValidationError("--gains expects <zone>=<q_int>,<q_rad>");
  ZoneGains g{to_double(value.substr(0, comma), "--gains"),
              to_double(value.substr(comma + 1), "--gains")};
  if (g.q_int < 0.0 || g.q_rad < 0.0) throw ValidationError("gains must be non-negative");
  return g;
}

inline fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

inline std::string as_text(const json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

/// Fills `cfg` from a JSON run configuration; relative paths resolve
/// against the configuration file's directory.
inline void apply_config_file(RunConfig& cfg, const fs::path& path) {
  const json j = io::parse_json(io::read_file(path), path.string());
  const fs::path base = path.parent_path();
  try {
    if (j.contains("building")) cfg.building = resolve(base, j.at("building").get<std::string>());
    if (j.contains("occupancy")) {
      for (const auto& [zone, p] : j.at("occupancy").items()) {
        cfg.occupancy[zone] = resolve(base, p.get<std::string>());
      }
    }
    if (j.contains("strategy")) {
      cfg.strategies.clear();
      const json& s = j.at("strategy");
      auto add = [&](const std::string& v) {
        const bool builtin = v == "all" ||
                             std::find(builtin_strategy_names().begin(),
                                       builtin_strategy_names().end(), v) != builtin_strategy_names().end();
        cfg.strategies.push_back(builtin ? v : resolve(base, v).string());
      };
      if (s.is_array()) {
        for (const json& v : s) add(v.get<std::string>());
      } else {
        add(s.get<std::string>());
      }
    }
    if (j.contains("tariff")) {
      const std::string t = j.at("tariff").get<std::string>();
      cfg.tariff = t == "builtin" ? t : resolve(base, t).string();
    }
    if (j.contains("gains")) {
      for (const auto& [zone, g] : j.at("gains").items()) {
        cfg.gains[zone] = parse_gains(g.is_array() ? as_text(g.at(0)) + "," + as_text(g.at(1))
                                                   : g.get<std::string>());
      }
    }
    if (j.contains("radiator_kw")) {
      for (const auto& [zone, kw] : j.at("radiator_kw").items()) cfg.radiator_kw[zone] = kw.get<double>();
    }
    if (j.contains("window")) {
      std::tie(cfg.window_start, cfg.window_end) = int_range(as_text(j.at("window")), "window");
    }
    if (j.contains("band")) cfg.band = band_range(as_text(j.at("band")));
    if (j.contains("theta")) cfg.theta = int_range(as_text(j.at("theta")), "theta");
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("name")) cfg.name = j.at("name").get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

inline std::vector<HeatingStrategy> resolve_strategies(const RunConfig& cfg,
                                                       const std::vector<std::string>& zone_ids) {
  std::vector<HeatingStrategy> out;
  for (const auto& token : cfg.strategies) {
    if (token == "all") {
      for (const auto& n : builtin_strategy_names()) out.push_back(builtin_strategy(n, zone_ids));
      continue;
    }
    const auto& names = builtin_strategy_names();
    if (std::find(names.begin(), names.end(), token) != names.end()) {
      out.push_back(builtin_strategy(token, zone_ids));
      continue;
    }
    out.push_back(io::parse_strategy(io::parse_json(io::read_file(token), token), token));
  }
  for (const auto& s : out) s.validate(zone_ids, cfg.window_start, cfg.window_end);
  return out;
}

inline Tariff resolve_tariff(const RunConfig& cfg) {
  if (cfg.tariff == "builtin") return builtin_tariff();
  return io::parse_tariff(io::parse_json(io::read_file(cfg.tariff), cfg.tariff), cfg.tariff);
}

inline RadiatorRatings resolve_radiators(const RunConfig& cfg) {
  RadiatorRatings r;
  for (const auto& [zone, kw] : cfg.radiator_kw) r.watts[zone] = RadiatorRatings::watts_from_kw(kw);
  return r;
}

inline void check_window(const RunConfig& cfg) {
  if (cfg.window_start < 0 || cfg.window_end > 24 || cfg.window_start >= cfg.window_end) {
    throw ValidationError("--window needs 0 <= start < end <= 24");
  }
}

inline std::vector<int> thetas(const RunConfig& cfg) {
  const int k = cfg.horizon();
  const auto [lo, hi] = cfg.theta.value_or(std::pair{1, k});
  if (lo < 1 || hi > k || lo > hi) {
    throw ValidationError("--theta " + std::to_string(lo) + "-" + std::to_string(hi) +
                          " must lie within 1-" + std::to_string(k));
  }
  std::vector<int> out;
  for (int t = lo; t <= hi; ++t) out.push_back(t);
  return out;
}

/// Building, window-aligned schedules and gains; heating is filled per strategy.
struct LoadedInputs {
  Building building;
  std::vector<TransitionSchedule> schedules;
  std::vector<ZoneGains> gains;
};

inline LoadedInputs load_inputs(const RunConfig& cfg) {
  check_window(cfg);
  if (!cfg.building) throw ValidationError("--building is required");
  Building building = io::load_building(*cfg.building).building();
  std::vector<TransitionSchedule> schedules;
  std::vector<ZoneGains> gains;
  for (const auto& id : building.zone_ids) {
    auto it = cfg.occupancy.find(id);
    if (it == cfg.occupancy.end()) throw ValidationError("no --occupancy given for zone '" + id + "'");
    schedules.push_back(io::load_schedule(it->second, cfg.pseudo_count)
                            .window(cfg.window_start, static_cast<std::size_t>(cfg.horizon())));
    auto g = cfg.gains.find(id);
    gains.push_back(g == cfg.gains.end() ? ZoneGains{} : g->second);
  }
  for (const auto& [zone, path] : cfg.occupancy) building.index_of(zone);
  for (const auto& [zone, g] : cfg.gains) building.index_of(zone);
  return {std::move(building), std::move(schedules), std::move(gains)};
}

inline Scenario make_scenario(const LoadedInputs& in, const HeatingStrategy& strategy,
                              const RunConfig& cfg) {
  std::vector<std::vector<bool>> heating;
  for (const auto& id : in.building.zone_ids) {
    heating.push_back(strategy.step_bits(id, cfg.window_start, cfg.horizon()));
  }
  return Scenario{in.building, in.schedules, in.gains, std::move(heating), {}, cfg.horizon()};
}

inline HeatingStrategy single_strategy(const RunConfig& cfg, const std::vector<std::string>& zones) {
  const std::vector<HeatingStrategy> s = resolve_strategies(cfg, zones);
  if (s.size() != 1) {
    throw ValidationError("exactly one --strategy is required, got " + std::to_string(s.size()));
  }
  return s.front();
}

inline void emit(const RunConfig& cfg, std::ostream& out, const std::string& file,
                 const std::string& content) {
  const fs::path path = cfg.out_dir / file;
  io::write_file_atomic(path, content);
  if (!cfg.to_stdout) out << "wrote " << path.string() << "\n";
}

}  // namespace detail

inline int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
  const detail::LoadedInputs in = detail::load_inputs(cfg);
  const HeatingStrategy strategy = detail::single_strategy(cfg, in.building.zone_ids);
  const Scenario scenario = detail::make_scenario(in, strategy, cfg);
  const std::vector<int> thetas = detail::thetas(cfg);
  const TemperatureTrajectory trajectory = temperature_trajectory(scenario, thetas);
  const ComfortReport comfort = comfort_check(trajectory, cfg.band);

  const std::string csv = io::trajectory_csv(trajectory, cfg.window_start);
  detail::emit(cfg, out, "trajectory.csv", csv);
  detail::emit(cfg, out, "comfort.json", io::comfort_json(comfort, cfg.window_start).dump(2) + "\n");
  if (cfg.dump_chain) {
    const ComposedModel model = assign_rewards(scenario.build_model(), scenario.building,
                                               scenario.gains, thetas.back());
    io::write_file_atomic(*cfg.dump_chain, io::chain_json(model).dump(2) + "\n");
  }
  if (cfg.to_stdout) out << csv;
  return kExitOk;
}

inline int cmd_cost(const RunConfig& cfg, std::ostream& out) {
  detail::check_window(cfg);
  if (cfg.strategies.empty()) throw ValidationError("no strategies given; pass --strategy");
  const Tariff tariff = detail::resolve_tariff(cfg);
  const RadiatorRatings radiators = detail::resolve_radiators(cfg);

  Ranking ranking;
  if (cfg.building && !cfg.occupancy.empty()) {
    const detail::LoadedInputs in = detail::load_inputs(cfg);
    const std::vector<int> thetas = detail::thetas(cfg);
    auto evaluate = [&](const HeatingStrategy& s) {
      return temperature_trajectory(detail::make_scenario(in, s, cfg), thetas);
    };
    ranking = compare_strategies(detail::resolve_strategies(cfg, in.building.zone_ids), tariff,
                                 radiators, evaluate, cfg.band);
  } else {
    std::vector<std::string> zones;
    if (cfg.building) {
      zones = io::load_building(*cfg.building).zone_ids();
    } else {
      zones = {"zone1", "zone2"};
    }
    ranking = compare_strategies(detail::resolve_strategies(cfg, zones), tariff, radiators);
  }
  const std::string csv = io::cost_csv(ranking);
  detail::emit(cfg, out, "cost.csv", csv);
  detail::emit(cfg, out, "cost.json", io::cost_json(ranking, cfg.window_start).dump(2) + "\n");
  if (cfg.to_stdout) out << csv;
  return kExitOk;
}

inline int cmd_export(const RunConfig& cfg, std::ostream& out) {
  const detail::LoadedInputs in = detail::load_inputs(cfg);
  const HeatingStrategy strategy = detail::single_strategy(cfg, in.building.zone_ids);
  const Scenario scenario = detail::make_scenario(in, strategy, cfg);
  const PrismArtifact artifact = export_prism_model(scenario, detail::thetas(cfg));
  if (cfg.to_stdout) {
    out << artifact.model_text;
    return kExitOk;
  }
  detail::emit(cfg, out, cfg.name + ".pm", artifact.model_text);
  detail::emit(cfg, out, cfg.name + ".props", artifact.properties_text);
  return kExitOk;
}

inline int cmd_estimate(const RunConfig& cfg, const std::vector<fs::path>& inputs,
                        std::ostream& out, std::ostream& err) {
  if (inputs.size() != 1) throw ValidationError("estimate takes exactly one occupancy CSV");
  std::ifstream in(inputs.front());
  if (!in) throw ValidationError("cannot open occupancy file " + inputs.front().string());
  const OccupancyDataset data = parse_occupancy_csv(in, inputs.front().string());
  TransitionSchedule schedule = estimate_transition_schedule(data, cfg.pseudo_count);
  constexpr std::size_t kLowSample = 30;
  if (data.day_count() < kLowSample) {
    const std::string reason = "low sample: " + std::to_string(data.day_count()) +
                               " day(s); estimates are coarse";
    schedule.diagnostics.push_back({std::nullopt, "all", reason});
    err << "warning: " << reason << "\n";
  }
  json j = io::schedule_json(schedule);
  j["days"] = data.day_count();
  const std::string text = j.dump(2) + "\n";
  if (cfg.to_stdout) {
    out << text;
  } else {
    detail::emit(cfg, out, "schedule.json", text);
  }
  return kExitOk;
}

inline int cmd_synth(const RunConfig& cfg, std::ostream& out) {
  if (cfg.days <= 0) throw ValidationError("--days must be positive");
  const auto datasets = synthetic_two_zone_datasets(cfg.seed, cfg.days);
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    std::ostringstream csv;
    write_occupancy_csv(csv, datasets[i]);
    detail::emit(cfg, out, "occupancy_zone" + std::to_string(i + 1) + ".csv", csv.str());
  }
  return kExitOk;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Expected zone temperatures and heating costs from occupancy Markov reward models",
               "thermochain"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::optional<std::string> config_path, building, strategy_tariff, window, band, theta, out_dir;
  std::vector<std::string> occupancy, strategies, gains, radiators;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> dump_chain;
  std::vector<std::string> positional;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--building", building, "building topology JSON");
    sub->add_option("--occupancy", occupancy, "<zone>=<csv|schedule json>, repeatable");
    sub->add_option("--strategy", strategies, "built-in S1..S6, 'all', or strategy JSON; repeatable");
    sub->add_option("--tariff", strategy_tariff, "'builtin' or tariff JSON");
    sub->add_option("--gains", gains, "<zone>=<q_int>,<q_rad> in degC per step, repeatable");
    sub->add_option("--radiator", radiators, "<zone>=<kW>, repeatable (default 1 kW)");
    sub->add_option("--window", window, "operating window in hours, e.g. 8-17");
    sub->add_option("--band", band, "comfort band in degC, e.g. 20-22");
    sub->add_option("--theta", theta, "evaluation steps, e.g. 1-9");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "seed for synthetic data");
    sub->add_option("--pseudo-count", cfg.pseudo_count, "additive smoothing for estimation");
    sub->add_flag("--stdout", cfg.to_stdout, "print the main result to standard output");
  };
  CLI::App* analyze = app.add_subcommand("analyze", "expected temperature trajectory and comfort");
  CLI::App* cost = app.add_subcommand("cost", "energy and cost per strategy");
  CLI::App* exporter = app.add_subcommand("export", "PRISM model and property files");
  CLI::App* estimate = app.add_subcommand("estimate", "occupancy transition schedule from a CSV");
  CLI::App* synth = app.add_subcommand("synth", "write the bundled synthetic occupancy logs");
  for (CLI::App* sub : {analyze, cost, exporter, estimate, synth}) add_common(sub);
  analyze->add_option("--dump-chain", dump_chain, "write the rewarded composed chain as JSON");
  exporter->add_option("--name", cfg.name, "base name of the .pm/.props files");
  estimate->add_option("input", positional, "occupancy CSV");
  synth->add_option("--days", cfg.days, "days per zone");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    // Flags override the configuration file.
    const std::string name = cfg.name;
    const double pseudo = cfg.pseudo_count;
    const bool to_stdout = cfg.to_stdout;
    const int days = cfg.days;
    if (config_path) detail::apply_config_file(cfg, *config_path);
    if (exporter->count("--name")) cfg.name = name;
    cfg.pseudo_count = pseudo;
    cfg.to_stdout = to_stdout;
    cfg.days = days;
    if (building) cfg.building = *building;
    for (const auto& o : occupancy) {
      auto [zone, path] = detail::split_assignment(o, "--occupancy");
      cfg.occupancy[zone] = path;
    }
    if (!strategies.empty()) cfg.strategies = strategies;
    if (strategy_tariff) cfg.tariff = *strategy_tariff;
    for (const auto& g : gains) {
      auto [zone, value] = detail::split_assignment(g, "--gains");
      cfg.gains[zone] = detail::parse_gains(value);
    }
    for (const auto& r : radiators) {
      auto [zone, value] = detail::split_assignment(r, "--radiator");
      cfg.radiator_kw[zone] = detail::to_double(value, "--radiator");
    }
    if (window) std::tie(cfg.window_start, cfg.window_end) = detail::int_range(*window, "--window");
    if (band) cfg.band = detail::band_range(*band);
    if (theta) cfg.theta = detail::int_range(*theta, "--theta");
    if (out_dir) cfg.out_dir = *out_dir;
    if (seed) cfg.seed = *seed;
    if (dump_chain) cfg.dump_chain = *dump_chain;

    if (*analyze) return cmd_analyze(cfg, out);
    if (*cost) return cmd_cost(cfg, out);
    if (*exporter) return cmd_export(cfg, out);
    if (*synth) return cmd_synth(cfg, out);
    std::vector<fs::path> inputs(positional.begin(), positional.end());
    for (const auto& o : occupancy) {
      const auto eq = o.find('=');
      inputs.emplace_back(eq == std::string::npos ? o : o.substr(eq + 1));
    }
    return cmd_estimate(cfg, inputs, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::kNumerical ? kExitNumerical : kExitValidation;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace thermochain::cli
