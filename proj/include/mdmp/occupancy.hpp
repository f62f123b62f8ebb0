#pragma once

// 2D occupancy grid, PGM (P5) map files with a JSON sidecar, and trajectory
// collision checking.

#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "mdmp/core.hpp"
#include "mdmp/systems.hpp"

namespace mdmp {

/// Row-major cells, row 0 at the lowest y. Anything outside the grid is free.
struct OccupancyGrid {
  std::size_t width = 0;
  std::size_t height = 0;
  double resolution = 1.0;
  std::array<double, 2> origin{0.0, 0.0};
  std::vector<std::uint8_t> cells;  // 1 = occupied

  OccupancyGrid() = default;
  OccupancyGrid(std::size_t w, std::size_t h, double res, std::array<double, 2> org = {0.0, 0.0})
      : width(w), height(h), resolution(res), origin(org), cells(w * h, 0) {
    if (!(res > 0.0)) throw ConfigError("occupancy grid: resolution must be positive");
  }

  std::optional<std::pair<std::size_t, std::size_t>> cell_of(double x, double y) const {
    const double fx = std::floor((x - origin[0]) / resolution);
    const double fy = std::floor((y - origin[1]) / resolution);
    if (fx < 0.0 || fy < 0.0 || fx >= static_cast<double>(width) || fy >= static_cast<double>(height)) {
      return std::nullopt;
    }
    return std::pair{static_cast<std::size_t>(fx), static_cast<std::size_t>(fy)};
  }

  bool occupied(std::size_t cx, std::size_t cy) const { return cells[cy * width + cx] != 0; }
  void set(std::size_t cx, std::size_t cy, bool occ) { cells[cy * width + cx] = occ ? 1 : 0; }

  bool occupied_at(double x, double y) const {
    const auto c = cell_of(x, y);
    return c && occupied(c->first, c->second);
  }

  /// World coordinates of a cell's center.
  std::array<double, 2> center(std::size_t cx, std::size_t cy) const {
    return {origin[0] + (static_cast<double>(cx) + 0.5) * resolution,
            origin[1] + (static_cast<double>(cy) + 0.5) * resolution};
  }

  std::size_t occupied_count() const {
    std::size_t n = 0;
    for (auto c : cells) n += c != 0;
    return n;
  }

  void fill_rect(double x0, double y0, double x1, double y1, bool occ) {
    for (std::size_t cy = 0; cy < height; ++cy) {
      for (std::size_t cx = 0; cx < width; ++cx) {
        const auto c = center(cx, cy);
        if (c[0] >= x0 && c[0] < x1 && c[1] >= y0 && c[1] < y1) set(cx, cy, occ);
      }
    }
  }

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;
};

/// One collision check: samples the trajectory at the cost resolution and
/// tests every sampled position. Increments `counter` by one.
inline bool collision_free(const Trajectory& t, const OccupancyGrid& grid, double resolution, std::size_t& counter) {
  ++counter;
  for (const State& s : sample_trajectory(t, resolution)) {
    if (grid.occupied_at(s[0], s[1])) return false;
  }
  return true;
}

/// Sidecar metadata for a PGM map.
struct MapMeta {
  double resolution = 1.0;
  std::array<double, 2> origin{0.0, 0.0};
  double occupied_threshold = 0.65;
};

inline std::filesystem::path map_sidecar_path(const std::filesystem::path& p) {
  std::filesystem::path s = p;
  s.replace_extension(".json");
  return s;
}

/// Writes the grid as a binary PGM (occupied = 0, free = 255; top image row
/// is the highest y) plus the JSON sidecar.
inline void save_map(const OccupancyGrid& grid, const std::filesystem::path& path, double occupied_threshold = 0.65) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << grid.width << ' ' << grid.height << "\n255\n";
  std::vector<char> row(grid.width);
  for (std::size_t r = 0; r < grid.height; ++r) {
    const std::size_t cy = grid.height - 1 - r;
    for (std::size_t cx = 0; cx < grid.width; ++cx) row[cx] = static_cast<char>(grid.occupied(cx, cy) ? 0 : 255);
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw IoError("short write to " + path.string());
  nlohmann::json j;
  j["resolution"] = grid.resolution;
  j["origin"] = grid.origin;
  j["occupied_threshold"] = occupied_threshold;
  std::ofstream side(map_sidecar_path(path), std::ios::trunc);
  if (!side) throw IoError("cannot write " + map_sidecar_path(path).string());
  side << j.dump(2) << '\n';
}

namespace pgm_detail {

inline std::string token(std::istream& in) {
  std::string t;
  char c;
  while (in.get(c)) {
    if (t.empty() && c == '#') {
      std::string skip;
      std::getline(in, skip);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!t.empty()) return t;
      continue;
    }
    t.push_back(c);
  }
  return t;
}

inline std::size_t number(std::istream& in) {
  const std::string t = token(in);
  if (t.empty() || t.size() > 9 || t.find_first_not_of("0123456789") != std::string::npos) {
    throw MalformedFileError("pgm: bad header");
  }
  return std::stoul(t);
}

}  // namespace pgm_detail

/// Reads a P5 map. A pixel is occupied when its darkness (1 - value/maxval)
/// reaches the sidecar's occupied_threshold. A missing sidecar means
/// resolution 1, origin (0, 0), threshold 0.65.
inline OccupancyGrid load_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  if (pgm_detail::token(in) != "P5") throw MalformedFileError("pgm: expected P5 magic");
  const std::size_t w = pgm_detail::number(in);
  const std::size_t h = pgm_detail::number(in);
  const std::size_t maxval = pgm_detail::number(in);
  if (w == 0 || h == 0 || maxval == 0 || maxval > 255) throw MalformedFileError("pgm: unsupported dimensions or depth");

  MapMeta meta;
  const auto side = map_sidecar_path(path);
  if (std::filesystem::exists(side)) {
    std::ifstream sj(side);
    nlohmann::json j;
    try {
      sj >> j;
      meta.resolution = j.at("resolution").get<double>();
      meta.origin = j.at("origin").get<std::array<double, 2>>();
      meta.occupied_threshold = j.value("occupied_threshold", meta.occupied_threshold);
    } catch (const nlohmann::json::exception& e) {
      throw MalformedFileError(std::string("map sidecar: ") + e.what());
    }
  }
  OccupancyGrid grid(w, h, meta.resolution, meta.origin);
  std::vector<char> row(w);
  for (std::size_t r = 0; r < h; ++r) {
    in.read(row.data(), static_cast<std::streamsize>(w));
    if (in.gcount() != static_cast<std::streamsize>(w)) throw MalformedFileError("pgm: truncated pixel data");
    const std::size_t cy = h - 1 - r;
    for (std::size_t cx = 0; cx < w; ++cx) {
      const double v = static_cast<double>(static_cast<unsigned char>(row[cx]));
      const double dark = 1.0 - v / static_cast<double>(maxval);
      grid.set(cx, cy, dark >= meta.occupied_threshold);
    }
  }
  return grid;
}

}  // namespace mdmp
