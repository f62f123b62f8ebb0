#pragma once

// Run configuration: one INI/TOML-style document of [section] key = value
// lines. Every key has a default; unknown sections or keys are rejected.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mdmp/baseline.hpp"
#include "mdmp/bench.hpp"
#include "mdmp/core.hpp"
#include "mdmp/dispersion.hpp"
#include "mdmp/planner.hpp"
#include "mdmp/sampling.hpp"
#include "mdmp/systems.hpp"

namespace mdmp {

struct SystemConfig {
  std::string kind = "reeds_shepp";
  double turning_radius = 1.0;
  double rho = 1.0;
  double u_max = 1.0;
  double v_max = 1.0;
};

struct SamplingConfig {
  std::size_t count = 0;  // 0: 10000 for the car, 20000 for the double integrator
  std::string sequence = "sobol";
  std::uint64_t seed = 0;
  std::vector<double> lower;  // empty: one tile by the full angle/velocity range
  std::vector<double> upper;
};

struct TilingConfig {
  bool enabled = true;
  std::vector<double> tile_extent{1.0, 1.0};
  std::vector<double> origin;  // empty: centered on zero
  int neighbor_radius = 1;
};

struct DispersionConfig {
  double target = 1.0;
  std::size_t vertex_cap = 512;
};

struct PlannerConfig {
  double goal_cost_tolerance = kUnset;
  double collision_resolution = kUnset;
  std::size_t max_collision_checks = 100000;
  std::string heuristic = "zero";
  std::string departability = "steer";
};

struct BenchConfig {
  bool graphs = true;  // false: baselines only
  std::size_t maps = 20;
  std::uint64_t map_seed = 1;
  std::size_t width = 200;
  std::size_t height = 200;
  double resolution = 0.25;
  double corridor_width = 2.0;
  double obstacle_density = 0.3;
  std::vector<double> dispersion_levels;  // empty: the generated graph only
  std::vector<double> baseline_durations{0.1, 0.3, 0.5};
  std::vector<double> baseline_branching{3, 4, 5};
  double baseline_u_max = kUnset;  // unset: system u_max
  double snap_position = 0.25;
  double snap_velocity = 0.25;
  std::size_t trials = 0;
  double trial_delta_factor = 2.2;
  std::uint64_t trial_seed = 1;
  double trial_workspace = 6.0;
};

struct Config {
  SystemConfig system;
  SamplingConfig sampling;
  TilingConfig tiling;
  DispersionConfig dispersion;
  PlannerConfig planner;
  BenchConfig bench;

  System make_system() const {
    System s;
    if (system.kind == "reeds_shepp") {
      s = ReedsSheppSystem{system.turning_radius};
    } else if (system.kind == "double_integrator") {
      s = DoubleIntegratorSystem{di::Params{system.rho, system.u_max, system.v_max}};
    } else {
      throw ConfigError("unknown system kind: " + system.kind);
    }
    validate(s);
    return s;
  }

  TilingSpec make_tiling() const {
    if (!tiling.enabled) return no_tiling();
    TilingSpec t;
    t.spatial_dims = {0, 1};
    t.tile_extent = tiling.tile_extent;
    if (tiling.origin.empty()) {
      t.origin.clear();
      for (double e : tiling.tile_extent) t.origin.push_back(-0.5 * e);
    } else {
      t.origin = tiling.origin;
    }
    t.neighbor_radius = tiling.neighbor_radius;
    return t;
  }

  /// Dense-sample box: explicit bounds, or one tile by the full heading
  /// circle (car) / velocity box (double integrator).
  StateBox make_box() const {
    const System s = make_system();
    const std::size_t dim = state_dim(s);
    StateBox box;
    box.lower = State(dim);
    box.upper = State(dim);
    if (!sampling.lower.empty() || !sampling.upper.empty()) {
      if (sampling.lower.size() != dim || sampling.upper.size() != dim) {
        throw ConfigError("sampling.lower/upper must have one entry per state coordinate");
      }
      for (std::size_t i = 0; i < dim; ++i) {
        box.lower[i] = sampling.lower[i];
        box.upper[i] = sampling.upper[i];
      }
    } else {
      const std::vector<double> ext = tiling.tile_extent.size() == 2 ? tiling.tile_extent : std::vector<double>{1.0, 1.0};
      for (std::size_t i = 0; i < 2; ++i) {
        box.lower[i] = -0.5 * ext[i];
        box.upper[i] = 0.5 * ext[i];
      }
      if (dim == 3) {
        box.lower[2] = -std::numbers::pi;
        box.upper[2] = std::numbers::pi;
      } else {
        for (std::size_t i = 2; i < 4; ++i) {
          box.lower[i] = -system.v_max;
          box.upper[i] = system.v_max;
        }
      }
    }
    box.validate();
    return box;
  }

  std::size_t dense_count() const {
    if (sampling.count > 0) return sampling.count;
    return system.kind == "reeds_shepp" ? 10000 : 20000;
  }

  PlanQuery make_query() const {
    PlanQuery q;
    q.goal_cost_tolerance = planner.goal_cost_tolerance;
    q.collision_resolution = planner.collision_resolution;
    q.max_collision_checks = planner.max_collision_checks;
    q.heuristic = heuristic_from_string(planner.heuristic);
    q.departability = departability_from_string(planner.departability);
    return q;
  }

  std::vector<UniformInputSpec> make_baselines() const {
    std::vector<UniformInputSpec> out;
    const System s = make_system();
    if (is_reeds_shepp(s)) return out;
    for (double dur : bench.baseline_durations) {
      for (double b : bench.baseline_branching) {
        UniformInputSpec u;
        u.duration = dur;
        if (b < 2.0 || b != std::floor(b)) throw ConfigError("bench.baseline_branching entries must be integers >= 2");
        u.branching_per_dim = static_cast<std::size_t>(b);
        u.u_max = std::isnan(bench.baseline_u_max) ? system.u_max : bench.baseline_u_max;
        u.system = std::get<DoubleIntegratorSystem>(s);
        u.validate();
        out.push_back(u);
      }
    }
    return out;
  }

  std::vector<MapSpec> make_maps() const {
    std::vector<MapSpec> out;
    for (std::size_t i = 0; i < bench.maps; ++i) {
      MapSpec m;
      m.seed = bench.map_seed + i;
      m.width = bench.width;
      m.height = bench.height;
      m.resolution = bench.resolution;
      m.style = RandomCorridors{bench.corridor_width, bench.obstacle_density};
      out.push_back(m);
    }
    return out;
  }
};

namespace config_detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
  }
}

inline std::uint64_t to_uint(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("config: " + key + " expects a non-negative integer, got '" + v + "'");
  }
  return std::stoull(v);
}

inline bool to_bool(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("config: " + key + " expects true or false, got '" + v + "'");
}

inline std::string to_string_value(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v.size() < 2 || v.front() != '"' || v.back() != '"') {
    throw ConfigError("config: " + key + " expects a quoted string, got '" + v + "'");
  }
  return v.substr(1, v.size() - 2);
}

inline std::vector<double> to_list(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
    throw ConfigError("config: " + key + " expects a list like [1.0, 2.0], got '" + v + "'");
  }
  std::vector<double> out;
  const std::string body = trim(v.substr(1, v.size() - 2));
  if (body.empty()) return out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  return out;
}

}  // namespace config_detail

/// Applies one `section.key = value` assignment. Used by the file loader and
/// by command-line overrides.
inline void apply_setting(Config& c, const std::string& section, const std::string& key, const std::string& raw) {
  using namespace config_detail;
  const std::string full = section + "." + key;
  auto num = [&] { return to_double(full, raw); };
  auto uint = [&] { return to_uint(full, raw); };
  auto str = [&] { return to_string_value(full, raw); };
  auto list = [&] { return to_list(full, raw); };

  if (section == "system") {
    if (key == "kind") return void(c.system.kind = str());
    if (key == "turning_radius") return void(c.system.turning_radius = num());
    if (key == "rho") return void(c.system.rho = num());
    if (key == "u_max") return void(c.system.u_max = num());
    if (key == "v_max") return void(c.system.v_max = num());
  } else if (section == "sampling") {
    if (key == "count") return void(c.sampling.count = uint());
    if (key == "sequence") return void(c.sampling.sequence = str());
    if (key == "seed") return void(c.sampling.seed = uint());
    if (key == "lower") return void(c.sampling.lower = list());
    if (key == "upper") return void(c.sampling.upper = list());
  } else if (section == "tiling") {
    if (key == "enabled") return void(c.tiling.enabled = to_bool(full, raw));
    if (key == "tile_extent") return void(c.tiling.tile_extent = list());
    if (key == "origin") return void(c.tiling.origin = list());
    if (key == "neighbor_radius") return void(c.tiling.neighbor_radius = static_cast<int>(uint()));
  } else if (section == "dispersion") {
    if (key == "target") return void(c.dispersion.target = num());
    if (key == "vertex_cap") return void(c.dispersion.vertex_cap = uint());
  } else if (section == "planner") {
    if (key == "goal_cost_tolerance") return void(c.planner.goal_cost_tolerance = num());
    if (key == "collision_resolution") return void(c.planner.collision_resolution = num());
    if (key == "max_collision_checks") return void(c.planner.max_collision_checks = uint());
    if (key == "heuristic") return void(c.planner.heuristic = str());
    if (key == "departability") return void(c.planner.departability = str());
  } else if (section == "bench") {
    if (key == "graphs") return void(c.bench.graphs = to_bool(full, raw));
    if (key == "maps") return void(c.bench.maps = uint());
    if (key == "map_seed") return void(c.bench.map_seed = uint());
    if (key == "width") return void(c.bench.width = uint());
    if (key == "height") return void(c.bench.height = uint());
    if (key == "resolution") return void(c.bench.resolution = num());
    if (key == "corridor_width") return void(c.bench.corridor_width = num());
    if (key == "obstacle_density") return void(c.bench.obstacle_density = num());
    if (key == "dispersion_levels") return void(c.bench.dispersion_levels = list());
    if (key == "baseline_durations") return void(c.bench.baseline_durations = list());
    if (key == "baseline_branching") return void(c.bench.baseline_branching = list());
    if (key == "baseline_u_max") return void(c.bench.baseline_u_max = num());
    if (key == "snap_position") return void(c.bench.snap_position = num());
    if (key == "snap_velocity") return void(c.bench.snap_velocity = num());
    if (key == "trials") return void(c.bench.trials = uint());
    if (key == "trial_delta_factor") return void(c.bench.trial_delta_factor = num());
    if (key == "trial_seed") return void(c.bench.trial_seed = uint());
    if (key == "trial_workspace") return void(c.bench.trial_workspace = num());
  } else {
    throw ConfigError("config: unknown section [" + section + "]");
  }
  throw ConfigError("config: unknown key " + full);
}

/// Parses a document. Keys outside any section are rejected.
inline Config parse_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  Config c;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config: key '" + section + "' must be inside a [section]");
    for (const auto& [key, value] : body) apply_setting(c, section, key, value.data());
  }
  return c;
}

inline Config parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  return parse_config(in);
}

/// Splits "section.key=value" (command-line override form).
inline void apply_override(Config& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ConfigError("override must look like section.key=value: " + assignment);
  }
  apply_setting(c, config_detail::trim(assignment.substr(0, dot)), config_detail::trim(assignment.substr(dot + 1, eq - dot - 1)),
                assignment.substr(eq + 1));
}

}  // namespace mdmp
