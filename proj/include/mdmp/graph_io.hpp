#pragma once

// Graph file: a little-endian binary container (.mpg) with a CRC-32 trailer,
// plus a JSON sidecar carrying the same metadata for human inspection.
//
//   magic "MDMPGRPH" | u32 format_version | u32 system kind | f64 param[3]
//   u32 k | k x (u32 dim, f64 extent, f64 origin) | i32 neighbor_radius
//   f64 dispersion | u32 state_dim | u64 vertex_count | u64 edge_count
//   vertices: state_dim x f64 each
//   edges: u32 from | u32 to | k x i32 offset | f64 cost | f64 duration
//          | start, end (state_dim x f64 each) | shape payload
//          shape RS: u8 count, count x (u8 steer, f64 length)
//          shape DI: 6 x f64 (c1, c2, c3 per axis)
//   u32 crc32 of every preceding byte

#include <zlib.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "mdmp/core.hpp"
#include "mdmp/graph.hpp"

namespace mdmp {

namespace io_detail {

inline constexpr std::string_view kMagic = "MDMPGRPH";

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  template <class T>
  void le(T v) {
    static_assert(std::is_integral_v<T>);
    using U = std::make_unsigned_t<T>;
    U u = static_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) buf_.push_back(static_cast<std::uint8_t>((u >> (8 * i)) & 0xFFu));
  }
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) { le(v); }
  void i32(std::int32_t v) { le(v); }
  void u64(std::uint64_t v) { le(v); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }
  void state(const State& s, std::size_t dim) {
    for (std::size_t i = 0; i < dim; ++i) f64(s[i]);
  }
  const std::vector<std::uint8_t>& data() const { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  Reader(const std::uint8_t* p, std::size_t n) : p_(p), n_(n) {}

  std::size_t remaining() const { return n_ - pos_; }

  void need(std::size_t k) const {
    if (remaining() < k) throw MalformedFileError("graph file: unexpected end of data");
  }
  template <class T>
  T le() {
    need(sizeof(T));
    using U = std::make_unsigned_t<T>;
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(static_cast<U>(p_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  std::uint8_t u8() { return le<std::uint8_t>(); }
  std::uint32_t u32() { return le<std::uint32_t>(); }
  std::int32_t i32() { return le<std::int32_t>(); }
  std::uint64_t u64() { return le<std::uint64_t>(); }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
  State state(std::size_t dim) {
    State s(dim);
    for (std::size_t i = 0; i < dim; ++i) s[i] = f64();
    return s;
  }
  std::string_view take(std::size_t k) {
    need(k);
    std::string_view v(reinterpret_cast<const char*>(p_ + pos_), k);
    pos_ += k;
    return v;
  }

 private:
  const std::uint8_t* p_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

inline std::uint32_t crc(const std::uint8_t* p, std::size_t n) {
  uLong c = crc32(0L, Z_NULL, 0);
  c = crc32(c, p, static_cast<uInt>(n));
  return static_cast<std::uint32_t>(c);
}

}  // namespace io_detail

/// Serializes the graph to bytes (without the sidecar).
inline std::vector<std::uint8_t> encode_graph(const PrimitiveGraph& g) {
  io_detail::Writer w;
  w.bytes(io_detail::kMagic.data(), io_detail::kMagic.size());
  w.u32(g.format_version);
  const std::size_t dim = state_dim(g.system);
  if (const auto* rs = std::get_if<ReedsSheppSystem>(&g.system)) {
    w.u32(0);
    w.f64(rs->turning_radius);
    w.f64(0.0);
    w.f64(0.0);
  } else {
    const auto& p = std::get<DoubleIntegratorSystem>(g.system).params;
    w.u32(1);
    w.f64(p.rho);
    w.f64(p.u_max);
    w.f64(p.v_max);
  }
  const std::size_t k = g.tiling.k();
  w.u32(static_cast<std::uint32_t>(k));
  for (std::size_t i = 0; i < k; ++i) {
    w.u32(static_cast<std::uint32_t>(g.tiling.spatial_dims[i]));
    w.f64(g.tiling.tile_extent[i]);
    w.f64(g.tiling.origin[i]);
  }
  w.i32(g.tiling.neighbor_radius);
  w.f64(g.dispersion);
  w.u32(static_cast<std::uint32_t>(dim));
  w.u64(g.vertices.size());
  w.u64(g.edges.size());
  for (const State& v : g.vertices) w.state(v, dim);
  for (const Edge& e : g.edges) {
    w.u32(e.from);
    w.u32(e.to);
    for (std::size_t i = 0; i < k; ++i) w.i32(e.offset[i]);
    w.f64(e.cost);
    w.f64(e.traj.duration);
    w.state(e.traj.start, dim);
    w.state(e.traj.end, dim);
    if (const auto* path = std::get_if<rs::Path>(&e.traj.shape)) {
      w.u8(static_cast<std::uint8_t>(path->count));
      for (std::size_t s = 0; s < path->count; ++s) {
        w.u8(static_cast<std::uint8_t>(path->segments[s].steer));
        w.f64(path->segments[s].length);
      }
    } else {
      for (const auto& a : std::get<di::Cubic2>(e.traj.shape)) {
        w.f64(a.c1);
        w.f64(a.c2);
        w.f64(a.c3);
      }
    }
  }
  std::vector<std::uint8_t> out = w.data();
  const std::uint32_t c = io_detail::crc(out.data(), out.size());
  for (std::size_t i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((c >> (8 * i)) & 0xFFu));
  return out;
}

/// Parses bytes produced by encode_graph. Throws VersionError, ChecksumError
/// or MalformedFileError; never returns a partial graph.
inline PrimitiveGraph decode_graph(const std::vector<std::uint8_t>& bytes) {
  io_detail::Reader r(bytes.data(), bytes.size());
  if (r.take(io_detail::kMagic.size()) != io_detail::kMagic) throw MalformedFileError("graph file: bad magic");
  const std::uint32_t version = r.u32();
  if (version != kGraphFormatVersion) {
    throw VersionError("graph file: format_version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(kGraphFormatVersion) + ")");
  }
  PrimitiveGraph g;
  g.format_version = version;
  const std::uint32_t kind = r.u32();
  const double p0 = r.f64(), p1 = r.f64(), p2 = r.f64();
  if (kind == 0) {
    g.system = ReedsSheppSystem{p0};
  } else if (kind == 1) {
    g.system = DoubleIntegratorSystem{di::Params{p0, p1, p2}};
  } else {
    throw MalformedFileError("graph file: unknown system kind");
  }
  const std::uint32_t k = r.u32();
  if (k > kMaxSpatialDims) throw MalformedFileError("graph file: too many spatial dimensions");
  g.tiling.spatial_dims.resize(k);
  g.tiling.tile_extent.resize(k);
  g.tiling.origin.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    g.tiling.spatial_dims[i] = r.u32();
    g.tiling.tile_extent[i] = r.f64();
    g.tiling.origin[i] = r.f64();
  }
  g.tiling.neighbor_radius = r.i32();
  g.dispersion = r.f64();
  const std::uint32_t dim = r.u32();
  if (dim != state_dim(g.system)) throw MalformedFileError("graph file: state dimension does not match system");
  const std::uint64_t nv = r.u64();
  const std::uint64_t ne = r.u64();
  if (nv > r.remaining() / (8 * dim) || ne > r.remaining() / (8 + 8 + 16 * dim)) {
    throw MalformedFileError("graph file: counts exceed file size");
  }
  g.vertices.reserve(nv);
  for (std::uint64_t i = 0; i < nv; ++i) g.vertices.push_back(r.state(dim));
  g.edges.reserve(ne);
  for (std::uint64_t i = 0; i < ne; ++i) {
    Edge e;
    e.from = r.u32();
    e.to = r.u32();
    if (e.from >= nv || e.to >= nv) throw MalformedFileError("graph file: edge endpoint out of range");
    for (std::size_t j = 0; j < k; ++j) e.offset[j] = r.i32();
    e.cost = r.f64();
    e.traj.system = g.system;
    e.traj.cost = e.cost;
    e.traj.duration = r.f64();
    e.traj.start = r.state(dim);
    e.traj.end = r.state(dim);
    if (kind == 0) {
      rs::Path path;
      path.count = r.u8();
      if (path.count > rs::kMaxSegments) throw MalformedFileError("graph file: too many path segments");
      for (std::size_t s = 0; s < path.count; ++s) {
        const std::uint8_t steer = r.u8();
        if (steer > 2) throw MalformedFileError("graph file: bad segment type");
        path.segments[s] = rs::Segment{static_cast<rs::Steer>(steer), r.f64()};
      }
      e.traj.shape = path;
    } else {
      di::Cubic2 axes{};
      for (auto& a : axes) {
        a.c1 = r.f64();
        a.c2 = r.f64();
        a.c3 = r.f64();
      }
      e.traj.shape = axes;
    }
    g.edges.push_back(std::move(e));
  }
  if (r.remaining() != 4) throw MalformedFileError("graph file: trailing data or missing checksum");
  const std::uint32_t stored = r.u32();
  if (stored != io_detail::crc(bytes.data(), bytes.size() - 4)) throw ChecksumError("graph file: checksum mismatch");
  g.reindex();
  return g;
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& p) {
  std::filesystem::path s = p;
  s.replace_extension(".json");
  return s;
}

inline nlohmann::json graph_metadata(const PrimitiveGraph& g, std::uint32_t checksum) {
  nlohmann::json j;
  j["format_version"] = g.format_version;
  j["system"]["kind"] = system_name(g.system);
  if (const auto* rs = std::get_if<ReedsSheppSystem>(&g.system)) {
    j["system"]["turning_radius"] = rs->turning_radius;
  } else {
    const auto& p = std::get<DoubleIntegratorSystem>(g.system).params;
    j["system"]["rho"] = p.rho;
    j["system"]["u_max"] = p.u_max;
    j["system"]["v_max"] = p.v_max;
  }
  j["tiling"]["spatial_dims"] = g.tiling.spatial_dims;
  j["tiling"]["tile_extent"] = g.tiling.tile_extent;
  j["tiling"]["origin"] = g.tiling.origin;
  j["tiling"]["neighbor_radius"] = g.tiling.neighbor_radius;
  j["dispersion"] = g.dispersion;
  j["vertex_count"] = g.vertices.size();
  j["edge_count"] = g.edges.size();
  j["mean_out_degree"] = g.mean_out_degree();
  std::ostringstream hex;
  hex << std::hex << std::setw(8) << std::setfill('0') << checksum;
  j["crc32"] = hex.str();
  return j;
}

inline void save_graph(const PrimitiveGraph& g, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = encode_graph(g);
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + path.string());
  }
  std::uint32_t c = 0;
  for (std::size_t i = 0; i < 4; ++i) c |= static_cast<std::uint32_t>(bytes[bytes.size() - 4 + i]) << (8 * i);
  std::ofstream side(sidecar_path(path), std::ios::trunc);
  if (!side) throw IoError("cannot write " + sidecar_path(path).string());
  side << graph_metadata(g, c).dump(2) << '\n';
}

inline PrimitiveGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_graph(bytes);
}

}  // namespace mdmp
