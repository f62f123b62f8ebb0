#pragma once

// Subcommands generate / plan / bench / inspect behind one entry point.
// run_cli takes explicit streams so it can be driven in-process.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mdmp/baseline.hpp"
#include "mdmp/bench.hpp"
#include "mdmp/config.hpp"
#include "mdmp/dispersion.hpp"
#include "mdmp/graph.hpp"
#include "mdmp/graph_io.hpp"
#include "mdmp/occupancy.hpp"
#include "mdmp/planner.hpp"
#include "mdmp/sampling.hpp"
#include "mdmp/svg.hpp"

namespace mdmp {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNoPath = 2, kExitBudget = 3, kExitIo = 4 };

namespace cli_detail {

inline State parse_state(const std::string& text, std::size_t dim) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (config_detail::trim(item.substr(used)).size() != 0) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad state coordinate '" + item + "'");
    }
  }
  if (v.size() != dim) {
    throw ConfigError("state '" + text + "' needs " + std::to_string(dim) + " comma-separated values");
  }
  State s(dim);
  for (std::size_t i = 0; i < dim; ++i) s[i] = v[i];
  return s;
}

/// Options shared by the config-driven commands.
struct ConfigArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<double> target;
  std::optional<std::size_t> count;
  std::size_t threads = 0;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "configuration document")->check(CLI::ExistingFile);
    app->add_option("--set", overrides, "override one key: section.key=value (repeatable)");
    app->add_option("--seed", seed, "dense-sample seed (sampling.seed)");
    app->add_option("--target", target, "target dispersion (dispersion.target)");
    app->add_option("--count", count, "dense-sample count (sampling.count)");
    app->add_option("--threads", threads, "worker threads (0: all cores)");
  }

  Config load() const {
    Config c = config_path.empty() ? Config{} : load_config(config_path);
    for (const auto& o : overrides) apply_override(c, o);
    if (seed) c.sampling.seed = *seed;
    if (target) c.dispersion.target = *target;
    if (count) c.sampling.count = *count;
    return c;
  }
};

struct Generated {
  DispersionRun run;
  PrimitiveGraph graph;
};

inline Generated generate_from(const Config& c, double target, std::size_t threads) {
  const System sys = c.make_system();
  const DenseSampleSet dense =
      generate_dense(c.make_box(), c.dense_count(), sequence_kind_from_string(c.sampling.sequence), c.sampling.seed);
  DispersionOptions opt;
  opt.vertex_cap = c.dispersion.vertex_cap;
  opt.threads = threads;
  Generated g;
  g.run = min_dispersion_vertices(target, dense, sys, c.make_tiling(), opt);
  g.graph = build_edges(g.run, sys, threads);
  return g;
}

inline std::string tiling_text(const TilingSpec& t) {
  if (t.k() == 0) return "none";
  std::ostringstream os;
  os << "extent (";
  for (std::size_t i = 0; i < t.k(); ++i) os << (i ? ", " : "") << t.tile_extent[i];
  os << ") origin (";
  for (std::size_t i = 0; i < t.k(); ++i) os << (i ? ", " : "") << t.origin[i];
  os << ") neighbor_radius " << t.neighbor_radius;
  return os.str();
}

}  // namespace cli_detail

inline int cmd_generate(const Config& c, const std::filesystem::path& out_path, std::size_t threads, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto gen = cli_detail::generate_from(c, c.dispersion.target, threads);
  save_graph(gen.graph, out_path);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out << "system      " << system_name(gen.graph.system) << '\n'
      << "seed        " << c.sampling.seed << '\n'
      << "vertices    " << gen.graph.vertices.size() << '\n'
      << "edges       " << gen.graph.edges.size() << '\n'
      << "dispersion  " << std::setprecision(10) << gen.graph.dispersion << '\n'
      << "mean degree " << std::setprecision(6) << gen.graph.mean_out_degree() << '\n'
      << "elapsed     " << std::setprecision(4) << elapsed << " s\n"
      << "wrote       " << out_path.string() << '\n';
  return kExitOk;
}

struct PlanArgs {
  std::string graph_path;
  std::string map_path;
  std::string start;
  std::string goal;
  std::string out_path;
  std::string svg_path;
  std::optional<double> tolerance;
  std::optional<double> resolution;
  std::optional<std::size_t> max_checks;
  std::string heuristic = "zero";
  std::string departability = "steer";
  std::uint64_t seed = 0;
};

inline int cmd_plan(const PlanArgs& a, std::ostream& out) {
  const PrimitiveGraph g = load_graph(a.graph_path);
  const OccupancyGrid grid = load_map(a.map_path);
  PlanQuery q;
  const std::size_t dim = state_dim(g.system);
  q.start = cli_detail::parse_state(a.start, dim);
  q.goal = cli_detail::parse_state(a.goal, dim);
  if (a.tolerance) q.goal_cost_tolerance = *a.tolerance;
  if (a.resolution) q.collision_resolution = *a.resolution;
  if (a.max_checks) q.max_collision_checks = *a.max_checks;
  q.heuristic = heuristic_from_string(a.heuristic);
  q.departability = departability_from_string(a.departability);
  const PlanResult r = plan(g, grid, q);

  nlohmann::json j = plan_json(r);
  j["seed"] = a.seed;
  j["graph"] = a.graph_path;
  j["map"] = a.map_path;
  j["start"] = state_json(q.start);
  j["goal"] = state_json(q.goal);
  if (a.out_path.empty()) {
    out << j.dump(2) << '\n';
  } else {
    std::ofstream f(a.out_path);
    if (!f) throw IoError("cannot write " + a.out_path);
    f << j.dump(2) << '\n';
    out << "status " << to_string(r.status) << "  cost " << (r.status == PlanStatus::Success ? r.total_cost : NAN)
        << "  collision checks " << r.collision_checks << "  expansions " << r.expansions << '\n';
  }
  if (!a.svg_path.empty()) {
    std::ofstream f(a.svg_path);
    if (!f) throw IoError("cannot write " + a.svg_path);
    write_plan_svg(f, grid, r, q.start, q.goal);
  }
  switch (r.status) {
    case PlanStatus::Success:
      return kExitOk;
    case PlanStatus::NoPath:
      return kExitNoPath;
    case PlanStatus::BudgetExhausted:
      return kExitBudget;
  }
  return kExitNoPath;
}

/// Graphs for a sweep: one run down to the smallest requested level, then
/// each level as a prefix of that run.
inline std::vector<PrimitiveGraph> sweep_graphs(const Config& c, std::size_t threads) {
  std::vector<PrimitiveGraph> out;
  if (!c.bench.graphs) return out;
  std::vector<double> levels = c.bench.dispersion_levels;
  if (levels.empty()) levels.push_back(c.dispersion.target);
  double lowest = std::numeric_limits<double>::infinity();
  for (double l : levels) lowest = std::min(lowest, l);
  const auto gen = cli_detail::generate_from(c, lowest, threads);
  for (double l : levels) out.push_back(build_edges(truncate_run(gen.run, l), gen.graph.system, threads));
  return out;
}

inline int cmd_bench(const Config& c, const std::filesystem::path& out_dir, std::size_t threads, std::ostream& out) {
  std::filesystem::create_directories(out_dir);
  const std::vector<PrimitiveGraph> graphs = sweep_graphs(c, threads);
  const std::vector<UniformInputSpec> baselines = c.make_baselines();
  const std::vector<MapSpec> maps = c.make_maps();
  QueryTemplate tmpl;
  tmpl.goal_cost_tolerance = c.planner.goal_cost_tolerance;
  tmpl.collision_resolution = c.planner.collision_resolution;
  tmpl.max_collision_checks = c.planner.max_collision_checks;
  tmpl.heuristic = heuristic_from_string(c.planner.heuristic);
  tmpl.snap = SnapResolution{c.bench.snap_position, c.bench.snap_velocity};
  const auto records = run_sweep(graphs, baselines, maps, tmpl, threads);
  const auto agg = aggregate(records);

  const std::vector<std::string> header{
      "system " + c.system.kind, "sampling.seed " + std::to_string(c.sampling.seed),
      "bench.map_seed " + std::to_string(c.bench.map_seed) + " maps " + std::to_string(c.bench.maps),
      "max_collision_checks " + std::to_string(c.planner.max_collision_checks),
      "snap " + fmt_num(c.bench.snap_position) + " " + fmt_num(c.bench.snap_velocity)};
  {
    std::ofstream f(out_dir / "records.csv");
    if (!f) throw IoError("cannot write " + (out_dir / "records.csv").string());
    write_records_csv(f, records, header);
  }
  {
    std::ofstream f(out_dir / "aggregate.csv");
    if (!f) throw IoError("cannot write " + (out_dir / "aggregate.csv").string());
    write_aggregate_csv(f, agg, header);
  }
  for (const auto& h : header) out << "# " << h << '\n';
  out << render_table(agg, c.planner.max_collision_checks);

  if (c.bench.trials > 0) {
    for (const auto& g : graphs) {
      const double res = std::isnan(c.planner.collision_resolution) ? g.dispersion / 10.0 : c.planner.collision_resolution;
      const double delta = c.bench.trial_delta_factor * g.dispersion;
      TrialOptions opt;
      opt.workspace = c.bench.trial_workspace;
      opt.collision_resolution = res;
      opt.max_collision_checks = c.planner.max_collision_checks;
      opt.threads = threads;
      const auto rep = completeness_trial(g, delta, c.bench.trials, c.bench.trial_seed, opt);
      out << "completeness " << graph_method_id(g) << " delta " << fmt_num(delta) << " trials " << c.bench.trials
          << " seed " << c.bench.trial_seed << " success " << fmt_num(rep.success_fraction) << '\n';
    }
  }
  return kExitOk;
}

inline int cmd_inspect(const std::filesystem::path& graph_path, const std::string& svg_path, std::size_t bins,
                       std::ostream& out) {
  const PrimitiveGraph g = load_graph(graph_path);
  out << "system      " << system_name(g.system) << '\n'
      << "vertices    " << g.vertices.size() << '\n'
      << "edges       " << g.edges.size() << '\n'
      << "dispersion  " << std::setprecision(10) << g.dispersion << '\n'
      << "mean degree " << std::setprecision(6) << g.mean_out_degree() << '\n'
      << "tiling      " << cli_detail::tiling_text(g.tiling) << '\n';
  for (std::size_t i = 0; i < g.vertices.size(); ++i) out << "  v" << i << ' ' << g.vertices[i] << '\n';

  bins = std::max<std::size_t>(bins, 1);
  const double hi = 2.0 * g.dispersion;
  std::vector<std::size_t> hist(bins, 0);
  for (const Edge& e : g.edges) {
    auto b = static_cast<std::size_t>(e.cost / hi * static_cast<double>(bins));
    hist[std::min(b, bins - 1)]++;
  }
  out << "edge cost histogram over [0, 2d)\n";
  for (std::size_t b = 0; b < bins; ++b) {
    out << "  [" << std::setw(10) << fmt_num(hi * static_cast<double>(b) / static_cast<double>(bins)) << ", "
        << std::setw(10) << fmt_num(hi * static_cast<double>(b + 1) / static_cast<double>(bins)) << ") " << hist[b]
        << '\n';
  }
  if (!svg_path.empty()) {
    std::ofstream f(svg_path);
    if (!f) throw IoError("cannot write " + svg_path);
    write_graph_svg(f, g);
  }
  return kExitOk;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"minimum-dispersion motion primitives"};
  app.require_subcommand(1);

  cli_detail::ConfigArgs gen_args;
  std::string gen_out = "graph.mdmp";
  auto* gen = app.add_subcommand("generate", "build a primitive graph from a configuration");
  gen_args.attach(gen);
  gen->add_option("-o,--out", gen_out, "graph file to write");

  PlanArgs plan_args;
  std::size_t plan_threads = 0;
  auto* pl = app.add_subcommand("plan", "plan on a map with a saved graph");
  pl->add_option("--graph", plan_args.graph_path, "graph file")->required();
  pl->add_option("--map", plan_args.map_path, "map image (PGM)")->required();
  pl->add_option("--start", plan_args.start, "start state, comma separated")->required();
  pl->add_option("--goal", plan_args.goal, "goal state, comma separated")->required();
  pl->add_option("-o,--out", plan_args.out_path, "result JSON (default: stdout)");
  pl->add_option("--svg", plan_args.svg_path, "plot of the search");
  pl->add_option("--tolerance", plan_args.tolerance, "goal cost tolerance (default: graph dispersion)");
  pl->add_option("--resolution", plan_args.resolution, "collision sampling step (default: dispersion / 10)");
  pl->add_option("--max-checks", plan_args.max_checks, "collision check budget");
  pl->add_option("--heuristic", plan_args.heuristic, "zero | free_space_steer");
  pl->add_option("--departability", plan_args.departability, "steer | terminal_set");
  pl->add_option("--seed", plan_args.seed, "echoed into the result");
  pl->add_option("--threads", plan_threads, "unused; planning is single threaded");

  cli_detail::ConfigArgs bench_args;
  std::string bench_out = "bench_out";
  auto* be = app.add_subcommand("bench", "sweep graphs and baselines over corridor maps");
  bench_args.attach(be);
  be->add_option("-o,--out-dir", bench_out, "directory for records.csv and aggregate.csv");

  std::string insp_graph, insp_svg;
  std::size_t insp_bins = 10;
  auto* in = app.add_subcommand("inspect", "summarize a saved graph");
  in->add_option("graph", insp_graph, "graph file")->required();
  in->add_option("--svg", insp_svg, "plot of the tiled graph");
  in->add_option("--bins", insp_bins, "edge cost histogram bins");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*gen) return cmd_generate(gen_args.load(), gen_out, gen_args.threads, out);
    if (*pl) return cmd_plan(plan_args, out);
    if (*be) return cmd_bench(bench_args.load(), bench_out, bench_args.threads, out);
    if (*in) return cmd_inspect(insp_graph, insp_svg, insp_bins, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const MalformedFileError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const VersionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ChecksumError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace mdmp
