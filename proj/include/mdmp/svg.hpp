#pragma once

// SVG renderings: a plan over its map (obstacles, stitched trajectory,
// expanded nodes, start/goal) and a primitive graph projected onto the plane.
// One element per drawn object so the output can be checked by counting.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mdmp/graph.hpp"
#include "mdmp/occupancy.hpp"
#include "mdmp/planner.hpp"
#include "mdmp/systems.hpp"

namespace mdmp {

namespace svg_detail {

struct Bounds {
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = std::numeric_limits<double>::infinity();
  double x1 = -std::numeric_limits<double>::infinity();
  double y1 = -std::numeric_limits<double>::infinity();

  void add(double x, double y) {
    x0 = std::min(x0, x);
    y0 = std::min(y0, y);
    x1 = std::max(x1, x);
    y1 = std::max(y1, y);
  }
  bool empty() const { return !(x0 <= x1); }
};

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Opens the document with a y-up world frame.
inline void open(std::ostream& os, Bounds b) {
  if (b.empty()) b = {0.0, 0.0, 1.0, 1.0};
  const double pad = 0.02 * std::max({b.x1 - b.x0, b.y1 - b.y0, 1e-6});
  b.x0 -= pad;
  b.y0 -= pad;
  b.x1 += pad;
  b.y1 += pad;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << num(b.x0) << ' ' << num(-b.y1) << ' '
     << num(b.x1 - b.x0) << ' ' << num(b.y1 - b.y0) << "\" width=\"800\" height=\""
     << num(800.0 * (b.y1 - b.y0) / (b.x1 - b.x0)) << "\">\n";
  os << "<g transform=\"scale(1,-1)\">\n";
}

inline void close(std::ostream& os) { os << "</g>\n</svg>\n"; }

inline void path(std::ostream& os, const Trajectory& t, double step, const char* cls, double width) {
  os << "<path class=\"" << cls << "\" fill=\"none\" stroke-width=\"" << num(width) << "\" d=\"";
  const auto pts = sample_trajectory(t, step);
  for (std::size_t i = 0; i < pts.size(); ++i) os << (i ? " L" : "M") << num(pts[i][0]) << ',' << num(pts[i][1]);
  if (pts.size() == 1) os << " L" << num(pts[0][0]) << ',' << num(pts[0][1]);
  os << "\"/>\n";
}

inline void marker(std::ostream& os, const State& s, double size, const char* cls) {
  // Triangle pointing along the heading (car) or velocity (double integrator).
  double dir = 0.0;
  if (s.dim == 3) {
    dir = s[2];
  } else if (s.dim == 4 && (s[2] != 0.0 || s[3] != 0.0)) {
    dir = std::atan2(s[3], s[2]);
  }
  os << "<polygon class=\"" << cls << "\" points=\"";
  for (int k = 0; k < 3; ++k) {
    const double a = dir + (k == 0 ? 0.0 : (k == 1 ? 2.5 : -2.5));
    const double r = k == 0 ? size : 0.6 * size;
    os << (k ? " " : "") << num(s[0] + r * std::cos(a)) << ',' << num(s[1] + r * std::sin(a));
  }
  os << "\"/>\n";
}

}  // namespace svg_detail

/// Map cells as horizontal runs of <rect>, the stitched trajectory as one
/// <path> per segment, one <circle> per expanded node, start/goal polygons.
inline void write_plan_svg(std::ostream& os, const OccupancyGrid& grid, const PlanResult& r, const State& start,
                           const State& goal) {
  svg_detail::Bounds b;
  if (grid.width > 0 && grid.height > 0) {
    b.add(grid.origin[0], grid.origin[1]);
    b.add(grid.origin[0] + static_cast<double>(grid.width) * grid.resolution,
          grid.origin[1] + static_cast<double>(grid.height) * grid.resolution);
  }
  b.add(start[0], start[1]);
  b.add(goal[0], goal[1]);
  for (const State& s : r.expanded_states) b.add(s[0], s[1]);
  for (const State& s : r.node_sequence) b.add(s[0], s[1]);
  const double scale = std::max(b.x1 - b.x0, b.y1 - b.y0);
  svg_detail::open(os, b);
  os << "<style>.obstacle{fill:#444}.trajectory{stroke:#c00}.expanded{fill:#999}"
        ".start{fill:#0a0}.goal{fill:#00c}</style>\n";
  for (std::size_t cy = 0; cy < grid.height; ++cy) {
    std::size_t cx = 0;
    while (cx < grid.width) {
      if (!grid.occupied(cx, cy)) {
        ++cx;
        continue;
      }
      const std::size_t run0 = cx;
      while (cx < grid.width && grid.occupied(cx, cy)) ++cx;
      os << "<rect class=\"obstacle\" x=\"" << svg_detail::num(grid.origin[0] + static_cast<double>(run0) * grid.resolution)
         << "\" y=\"" << svg_detail::num(grid.origin[1] + static_cast<double>(cy) * grid.resolution) << "\" width=\""
         << svg_detail::num(static_cast<double>(cx - run0) * grid.resolution) << "\" height=\""
         << svg_detail::num(grid.resolution) << "\"/>\n";
    }
  }
  for (const State& s : r.expanded_states) {
    os << "<circle class=\"expanded\" cx=\"" << svg_detail::num(s[0]) << "\" cy=\"" << svg_detail::num(s[1])
       << "\" r=\"" << svg_detail::num(0.004 * scale) << "\"/>\n";
  }
  const double step = r.collision_resolution > 0.0 ? r.collision_resolution : 0.01 * scale;
  for (const Trajectory& t : r.stitched) svg_detail::path(os, t, step, "trajectory", 0.004 * scale);
  svg_detail::marker(os, start, 0.015 * scale, "start");
  svg_detail::marker(os, goal, 0.015 * scale, "goal");
  svg_detail::close(os);
}

/// The base tile outline, one <circle> per vertex and one <path> per edge,
/// each edge drawn from its source vertex in the base tile.
inline void write_graph_svg(std::ostream& os, const PrimitiveGraph& g) {
  svg_detail::Bounds b;
  for (const State& v : g.vertices) b.add(v[0], v[1]);
  std::vector<Trajectory> trajs;
  trajs.reserve(g.edges.size());
  const double step = g.dispersion > 0.0 ? g.dispersion / 20.0 : 0.05;
  for (const Edge& e : g.edges) {
    trajs.push_back(world_trajectory(g, GraphNode{static_cast<std::int32_t>(e.from), {}}, e));
    for (const State& s : sample_trajectory(trajs.back(), step)) b.add(s[0], s[1]);
  }
  const bool tiled = g.tiling.k() == 2;
  if (tiled) {
    b.add(g.tiling.origin[0], g.tiling.origin[1]);
    b.add(g.tiling.origin[0] + g.tiling.tile_extent[0], g.tiling.origin[1] + g.tiling.tile_extent[1]);
  }
  const double scale = b.empty() ? 1.0 : std::max(b.x1 - b.x0, b.y1 - b.y0);
  svg_detail::open(os, b);
  os << "<style>.tile{fill:none;stroke:#888}.edge{stroke:#36c;stroke-opacity:0.5}.vertex{fill:#0a0}</style>\n";
  if (tiled) {
    os << "<rect class=\"tile\" x=\"" << svg_detail::num(g.tiling.origin[0]) << "\" y=\""
       << svg_detail::num(g.tiling.origin[1]) << "\" width=\"" << svg_detail::num(g.tiling.tile_extent[0])
       << "\" height=\"" << svg_detail::num(g.tiling.tile_extent[1]) << "\" stroke-width=\""
       << svg_detail::num(0.003 * scale) << "\"/>\n";
  }
  for (const Trajectory& t : trajs) svg_detail::path(os, t, step, "edge", 0.002 * scale);
  for (const State& v : g.vertices) {
    os << "<circle class=\"vertex\" cx=\"" << svg_detail::num(v[0]) << "\" cy=\"" << svg_detail::num(v[1]) << "\" r=\""
       << svg_detail::num(0.008 * scale) << "\"/>\n";
  }
  svg_detail::close(os);
}

}  // namespace mdmp
