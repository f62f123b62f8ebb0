#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <tuple>

#include "mdmp/graph.hpp"
#include "mdmp/graph_io.hpp"
#include "json.hpp"

using namespace mdmp;

namespace {

using EdgeKey = std::tuple<std::uint32_t, std::uint32_t, int, int>;

TilingSpec square_tiling(double side) {
  TilingSpec t;
  t.tile_extent = {side, side};
  t.origin = {-side / 2, -side / 2};
  t.neighbor_radius = 1;
  return t;
}

const PrimitiveGraph& car_graph() {
  static const PrimitiveGraph g = [] {
    const System car = ReedsSheppSystem{0.46};
    StateBox b;
    b.lower = State::se2(-1, -1, -std::numbers::pi);
    b.upper = State::se2(1, 1, std::numbers::pi);
    const auto run = min_dispersion_vertices(1.05, generate_dense(b, 10000, SequenceKind::Sobol), car, square_tiling(2.0));
    return build_edges(run, car);
  }();
  return g;
}

const PrimitiveGraph& quad_graph() {
  static const PrimitiveGraph g = [] {
    const System quad = DoubleIntegratorSystem{di::Params{1.0, 4.0, 2.0}};
    StateBox b;
    b.lower = State::planar(-2, -2, -0.5, -0.5);
    b.upper = State::planar(2, 2, 0.5, 0.5);
    DispersionOptions opt;
    opt.vertex_cap = 8;
    DispersionRun run;
    try {
      run = min_dispersion_vertices(1e-3, generate_dense(b, 1000, SequenceKind::Sobol), quad, square_tiling(4.0), opt);
    } catch (const PartialResultError& e) {
      run = e.run();
    }
    return build_edges(run, quad);
  }();
  return g;
}

std::set<EdgeKey> stored_edges(const PrimitiveGraph& g) {
  std::set<EdgeKey> s;
  for (const Edge& e : g.edges) EXPECT_TRUE(s.insert({e.from, e.to, e.offset[0], e.offset[1]}).second);
  return s;
}

// Every (pair, offset) candidate, with the exact cost and no pruning.
std::set<EdgeKey> brute_force_edges(const PrimitiveGraph& g) {
  std::set<EdgeKey> s;
  const double ex = g.tiling.tile_extent[0], ey = g.tiling.tile_extent[1];
  for (std::uint32_t i = 0; i < g.vertices.size(); ++i) {
    for (std::uint32_t j = 0; j < g.vertices.size(); ++j) {
      for (int a = -1; a <= 1; ++a) {
        for (int b = -1; b <= 1; ++b) {
          if (i == j && a == 0 && b == 0) continue;
          State t = g.vertices[j];
          t[0] += a * ex;
          t[1] += b * ey;
          const double c = steer_cost(g.system, g.vertices[i], t);
          if (c > 0.0 && c < 2.0 * g.dispersion) s.insert({i, j, a, b});
        }
      }
    }
  }
  return s;
}

// Max-abs difference; headings compared modulo 2pi.
double state_distance_inf(const State& a, const State& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    if (a.size() == 3 && i == 2) d = std::remainder(d, 2.0 * std::numbers::pi);
    m = std::max(m, std::abs(d));
  }
  return m;
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool states_bit_equal(const State& a, const State& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!bit_equal(a[i], b[i])) return false;
  }
  return true;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mdmp_test_graph_" + name);
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& p, const std::vector<std::uint8_t>& b) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

}  // namespace

TEST(BuildEdges, TwoVerticesBothDirections) {
  const System car = ReedsSheppSystem{1.0};
  const std::vector<State> v{State::se2(0, 0, 0), State::se2(1.2, 0.3, 0.4)};
  const double j = steer_cost(car, v[0], v[1]);
  const PrimitiveGraph g = build_graph(car, v, j / 1.5, no_tiling());
  ASSERT_EQ(g.edges.size(), 2u);
  EXPECT_EQ(g.edges[0].from, 0u);
  EXPECT_EQ(g.edges[0].to, 1u);
  EXPECT_EQ(g.edges[1].from, 1u);
  EXPECT_EQ(g.edges[1].to, 0u);
  // Strict bound: at exactly 2d the pair is excluded.
  EXPECT_TRUE(build_graph(car, v, j / 2.0, no_tiling()).edges.empty());
}

TEST(BuildEdges, CarMatchesBruteForce) {
  const auto& g = car_graph();
  ASSERT_LE(g.vertices.size(), 15u);
  EXPECT_EQ(stored_edges(g), brute_force_edges(g));
}

TEST(BuildEdges, QuadMatchesBruteForce) {
  const auto& g = quad_graph();
  ASSERT_LE(g.vertices.size(), 15u);
  EXPECT_EQ(stored_edges(g), brute_force_edges(g));
  EXPECT_FALSE(g.edges.empty());
}

TEST(BuildEdges, CostsAndEndpoints) {
  for (const PrimitiveGraph* g : {&car_graph(), &quad_graph()}) {
    for (const Edge& e : g->edges) {
      EXPECT_GT(e.cost, 0.0);
      EXPECT_LT(e.cost, 2.0 * g->dispersion);
      EXPECT_NEAR(e.traj.cost, e.cost, 1e-9);
      const State from = g->vertices[e.from];
      const State to = g->world_state(e.to, e.offset);
      const auto samples = sample_trajectory(e.traj, 0.1);
      EXPECT_LT(state_distance_inf(samples.front(), from), 1e-9);
      EXPECT_LT(state_distance_inf(samples.back(), to), 1e-9);
      EXPECT_LT(state_distance_inf(e.traj.at(e.traj.duration), to), 1e-9);
    }
  }
}

TEST(BuildEdges, CarFigureCounts) {
  const auto& g = car_graph();
  EXPECT_EQ(g.vertices.size(), 10u);
  EXPECT_NEAR(static_cast<double>(g.edges.size()), 224.0, 22.4);
  // 224 edges over 10 vertices.
  EXPECT_NEAR(g.mean_out_degree(), 22.4, 2.24);
}

TEST(BuildEdges, SymmetricSystemGivesPairedEdges) {
  const auto& g = car_graph();
  const auto s = stored_edges(g);
  for (const auto& [i, j, a, b] : s) EXPECT_TRUE(s.count({j, i, -a, -b})) << i << "->" << j;
  const PrimitiveGraph flat = build_graph(g.system, g.vertices, g.dispersion, no_tiling());
  std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (const Edge& e : flat.edges) pairs.insert({e.from, e.to});
  for (const auto& [i, j] : pairs) EXPECT_TRUE(pairs.count({j, i}));
}

TEST(BuildEdges, ThreadCountDoesNotMatter) {
  const auto& g = car_graph();
  const PrimitiveGraph one = build_graph(g.system, g.vertices, g.dispersion, g.tiling, 1);
  const PrimitiveGraph four = build_graph(g.system, g.vertices, g.dispersion, g.tiling, 4);
  EXPECT_EQ(encode_graph(one), encode_graph(four));
}

TEST(BuildEdges, RejectsInfiniteDispersion) {
  EXPECT_THROW(build_graph(ReedsSheppSystem{1.0}, {State::se2(0, 0, 0)}, std::numeric_limits<double>::infinity(),
                           no_tiling()),
               DomainError);
}

TEST(TruncateRun, EqualsFreshRun) {
  const System car = ReedsSheppSystem{0.46};
  StateBox b;
  b.lower = State::se2(-1, -1, -std::numbers::pi);
  b.upper = State::se2(1, 1, std::numbers::pi);
  const auto dense = generate_dense(b, 800, SequenceKind::Sobol);
  const auto deep = min_dispersion_vertices(0.9, dense, car, square_tiling(2.0));
  const auto fresh = min_dispersion_vertices(1.2, dense, car, square_tiling(2.0));
  const auto cut = truncate_run(deep, 1.2);
  EXPECT_EQ(cut.vertices, fresh.vertices);
  EXPECT_EQ(cut.dispersion_history, fresh.dispersion_history);
  EXPECT_EQ(cut.final_dispersion, fresh.final_dispersion);
  EXPECT_THROW(truncate_run(deep, 0.1), DomainError);
}

TEST(Expand, TranslationInvariant) {
  const auto& g = car_graph();
  for (std::int32_t v = 0; v < static_cast<std::int32_t>(g.vertices.size()); ++v) {
    const auto here = expand(g, GraphNode{v, {0, 0}});
    const auto there = expand(g, GraphNode{v, {5, -3}});
    ASSERT_EQ(here.size(), g.out_degree(static_cast<std::size_t>(v)));
    ASSERT_EQ(there.size(), here.size());
    for (std::size_t i = 0; i < here.size(); ++i) {
      EXPECT_EQ(here[i].cost, there[i].cost);
      EXPECT_EQ(there[i].node.vertex, here[i].node.vertex);
      EXPECT_EQ(there[i].node.tile[0], here[i].node.tile[0] + 5);
      EXPECT_EQ(there[i].node.tile[1], here[i].node.tile[1] - 3);
      const State a = here[i].traj.at(here[i].traj.duration * 0.5);
      const State b = there[i].traj.at(there[i].traj.duration * 0.5);
      EXPECT_NEAR(b[0] - a[0], 10.0, 1e-9);
      EXPECT_NEAR(b[1] - a[1], -6.0, 1e-9);
      EXPECT_NEAR(b[2], a[2], 1e-12);
    }
  }
}

TEST(Expand, SuccessorEndpointArithmetic) {
  const auto& g = quad_graph();
  const GraphNode node{1, {-2, 7}};
  for (const Expansion& x : expand(g, node)) {
    const Edge& e = g.edges[x.edge];
    const State& v = g.vertices[e.to];
    const auto samples = sample_trajectory(x.traj, 0.5);
    const double ex = g.tiling.tile_extent[0];
    EXPECT_NEAR(samples.back()[0], v[0] + (node.tile[0] + e.offset[0]) * ex, 1e-9);
    EXPECT_NEAR(samples.back()[1], v[1] + (node.tile[1] + e.offset[1]) * ex, 1e-9);
    EXPECT_NEAR(samples.back()[2], v[2], 1e-9);
    EXPECT_NEAR(samples.back()[3], v[3], 1e-9);
    EXPECT_NEAR(samples.front()[0], g.vertices[1][0] - 2 * ex, 1e-9);
    EXPECT_NEAR(samples.front()[1], g.vertices[1][1] + 7 * ex, 1e-9);
  }
}

TEST(Expand, BadIndex) {
  EXPECT_THROW(expand(car_graph(), GraphNode{-1, {}}), DomainError);
  EXPECT_THROW(expand(car_graph(), GraphNode{100, {}}), DomainError);
}

TEST(GraphFile, RoundTripIsBitExact) {
  for (const PrimitiveGraph* g : {&car_graph(), &quad_graph()}) {
    const auto path = temp_file("roundtrip.mpg");
    save_graph(*g, path);
    const PrimitiveGraph h = load_graph(path);
    EXPECT_EQ(system_name(h.system), system_name(g->system));
    EXPECT_TRUE(bit_equal(h.dispersion, g->dispersion));
    EXPECT_EQ(h.tiling.spatial_dims, g->tiling.spatial_dims);
    EXPECT_EQ(h.tiling.tile_extent, g->tiling.tile_extent);
    EXPECT_EQ(h.tiling.origin, g->tiling.origin);
    EXPECT_EQ(h.tiling.neighbor_radius, g->tiling.neighbor_radius);
    ASSERT_EQ(h.vertices.size(), g->vertices.size());
    for (std::size_t i = 0; i < h.vertices.size(); ++i) EXPECT_TRUE(states_bit_equal(h.vertices[i], g->vertices[i]));
    ASSERT_EQ(h.edges.size(), g->edges.size());
    for (std::size_t i = 0; i < h.edges.size(); ++i) {
      const Edge &a = h.edges[i], &b = g->edges[i];
      EXPECT_EQ(a.from, b.from);
      EXPECT_EQ(a.to, b.to);
      EXPECT_EQ(a.offset, b.offset);
      EXPECT_TRUE(bit_equal(a.cost, b.cost));
      EXPECT_TRUE(bit_equal(a.traj.duration, b.traj.duration));
      EXPECT_TRUE(states_bit_equal(a.traj.at(a.traj.duration / 3), b.traj.at(b.traj.duration / 3)));
    }
    EXPECT_EQ(encode_graph(h), read_bytes(path));

    std::ifstream side(sidecar_path(path));
    const auto meta = nlohmann::json::parse(side);
    EXPECT_EQ(meta["format_version"], kGraphFormatVersion);
    EXPECT_EQ(meta["vertex_count"], g->vertices.size());
    EXPECT_EQ(meta["edge_count"], g->edges.size());
    EXPECT_EQ(meta["dispersion"].get<double>(), g->dispersion);
  }
}

TEST(GraphFile, TruncatedIsMalformed) {
  const auto path = temp_file("trunc.mpg");
  save_graph(car_graph(), path);
  auto bytes = read_bytes(path);
  for (std::size_t keep : {std::size_t{3}, std::size_t{40}, bytes.size() / 2, bytes.size() - 1}) {
    write_bytes(path, std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(keep)));
    EXPECT_THROW(load_graph(path), MalformedFileError) << keep;
  }
}

TEST(GraphFile, UnknownVersionNamesBoth) {
  const auto path = temp_file("version.mpg");
  save_graph(car_graph(), path);
  auto bytes = read_bytes(path);
  bytes[8] = 7;
  write_bytes(path, bytes);
  try {
    load_graph(path);
    FAIL() << "expected a version error";
  } catch (const VersionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('7'), std::string::npos) << msg;
    EXPECT_NE(msg.find(std::to_string(kGraphFormatVersion)), std::string::npos) << msg;
  }
}

TEST(GraphFile, CorruptPayloadFailsChecksum) {
  const auto path = temp_file("crc.mpg");
  save_graph(car_graph(), path);
  auto bytes = read_bytes(path);
  bytes[bytes.size() - 20] ^= 0x01;
  write_bytes(path, bytes);
  EXPECT_THROW(load_graph(path), ChecksumError);
}

TEST(GraphFile, MissingFile) { EXPECT_THROW(load_graph(temp_file("does_not_exist.mpg")), IoError); }
