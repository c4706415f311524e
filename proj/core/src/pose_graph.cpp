/*
 * Copyright 2026 The GridGraph Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "gridgraph/pose_graph.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "gridgraph/hash.hpp"

namespace gridgraph {

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }

constexpr double kLogOddsClamp = 6.0;  // p in [~0.0025, ~0.9975]

// Accumulates log-odds during the build; quantized once when the submap is
// finalized so the serialized bytes are exactly what lives in memory.
struct SubmapAccumulator {
  Submap submap;
  std::vector<float> log_odds;
  std::vector<std::uint8_t> touched;

  void update(int x, int y, double delta) {
    const std::size_t i = static_cast<std::size_t>(y) * submap.width + x;
    log_odds[i] = static_cast<float>(std::clamp(
        log_odds[i] + delta, -kLogOddsClamp, kLogOddsClamp));
    touched[i] = 1;
  }

  void finalize() {
    submap.cells.assign(log_odds.size(), 0);
    for (std::size_t i = 0; i < log_odds.size(); ++i) {
      if (!touched[i]) continue;
      const double p = 1.0 / (1.0 + std::exp(-log_odds[i]));
      const int b = 1 + static_cast<int>(std::lround(p * 254.0));
      submap.cells[i] = static_cast<std::uint8_t>(std::clamp(b, 1, 255));
    }
  }
};

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void merge(int a, int b) { parent[find(a)] = find(b); }
};

Eigen::Matrix3d diag_info(const std::array<double, 3>& d) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  m(0, 0) = d[0];
  m(1, 1) = d[1];
  m(2, 2) = d[2];
  return m;
}

nlohmann::json pose_json(const Pose2& p) { return {p.x, p.y, p.theta}; }

Pose2 pose_from_json(const nlohmann::json& j) {
  return Pose2(j.at(0).get<double>(), j.at(1).get<double>(),
               j.at(2).get<double>());
}

}  // namespace

bool Submap::cell_of(const Point2& world, int& x, int& y) const {
  const double c = std::cos(origin.theta);
  const double s = std::sin(origin.theta);
  const double dx = world.x - origin.x;
  const double dy = world.y - origin.y;
  const double lx = c * dx + s * dy - local_min.x;
  const double ly = -s * dx + c * dy - local_min.y;
  x = static_cast<int>(std::floor(lx / resolution));
  y = static_cast<int>(std::floor(ly / resolution));
  return x >= 0 && y >= 0 && x < width && y < height;
}

double Submap::probability_at(const Point2& world) const {
  int x, y;
  if (!cell_of(world, x, y)) return 0.0;
  if (!observed(x, y)) return 0.0;
  return probability(x, y);
}

bool information_spd(const Eigen::Matrix3d& info) {
  if (!info.isApprox(info.transpose(), 1e-9)) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(info);
  return solver.eigenvalues().minCoeff() > 0.0;
}

bool graph_connected(const PoseGraphMap& map) {
  if (map.nodes.empty()) return true;
  // Nodes take ids [0, n); submaps are offset behind them.
  std::unordered_map<int, int> node_slot, submap_slot;
  int n = 0;
  for (const auto& node : map.nodes) node_slot[node.id] = n++;
  for (const auto& sm : map.submaps) submap_slot[sm.id] = n++;
  UnionFind uf(n);
  for (const auto& c : map.constraints) {
    const auto to = node_slot.find(c.to_id);
    if (to == node_slot.end()) return false;
    if (c.kind == Constraint::Kind::NodeToSubmap) {
      const auto from = submap_slot.find(c.from_id);
      if (from == submap_slot.end()) return false;
      uf.merge(from->second, to->second);
    } else {
      const auto from = node_slot.find(c.from_id);
      if (from == node_slot.end()) return false;
      uf.merge(from->second, to->second);
    }
  }
  const int root = uf.find(0);
  for (int i = 1; i < n; ++i) {
    if (uf.find(i) != root) return false;
  }
  return true;
}

PoseGraphMap build_from_sequence(const Sequence& seq,
                                 const BuildParams& params) {
  if (seq.scans.empty()) {
    throw std::runtime_error("build_from_sequence: empty sequence");
  }
  if (seq.ground_truth.size() < seq.scans.size()) {
    throw std::runtime_error(
        "build_from_sequence: ground truth missing for some scans");
  }
  if (params.nodes_per_submap < 1) {
    throw std::runtime_error("build_from_sequence: nodes_per_submap < 1");
  }

  PoseGraphMap map;
  map.params = params;
  map.source_grid_hash = hash_hex(seq.static_map_id);

  const int k = params.nodes_per_submap;
  const int n_nodes = static_cast<int>(seq.scans.size());
  const int n_submaps = (n_nodes + k - 1) / k;

  map.nodes.reserve(seq.scans.size());
  for (int i = 0; i < n_nodes; ++i) {
    GraphNode node;
    node.id = i;
    node.stamp = seq.scans[i].stamp;
    node.pose = seq.ground_truth[i].pose;
    node.scan = seq.scans[i];
    map.nodes.push_back(std::move(node));
  }

  // Submap i owns nodes [i*k, (i+1)*k) and additionally receives the next
  // block for overlap (standard two-submap insertion).
  std::vector<SubmapAccumulator> acc(n_submaps);
  const double resolution = params.submap_resolution;

  for (int s = 0; s < n_submaps; ++s) {
    acc[s].submap.id = s;
    acc[s].submap.resolution = resolution;
    acc[s].submap.origin = map.nodes[s * k].pose;

    // Bounds from every scan that will be inserted (own block + next block).
    const int lo = s * k;
    const int hi = std::min(n_nodes, (s + 2) * k);
    double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
    bool first = true;
    const Pose2 inv = acc[s].submap.origin.inverse();
    auto grow = [&](const Point2& world) {
      const Point2 l = inv.transform(world);
      if (first) {
        min_x = max_x = l.x;
        min_y = max_y = l.y;
        first = false;
      } else {
        min_x = std::min(min_x, l.x);
        max_x = std::max(max_x, l.x);
        min_y = std::min(min_y, l.y);
        max_y = std::max(max_y, l.y);
      }
    };
    for (int i = lo; i < hi; ++i) {
      const Pose2& pose = map.nodes[i].pose;
      grow(pose.position());
      const Scan& scan = map.nodes[i].scan;
      for (int b = 0; b < scan.spec.n_beams; ++b) {
        if (!is_return(scan.ranges[b])) continue;
        const double bearing = pose.theta + scan.spec.bearing(b);
        grow({pose.x + scan.ranges[b] * std::cos(bearing),
              pose.y + scan.ranges[b] * std::sin(bearing)});
      }
    }
    const double pad = 2.0 * resolution;
    acc[s].submap.local_min = {min_x - pad, min_y - pad};
    acc[s].submap.width = static_cast<int>(
        std::ceil((max_x - min_x + 2.0 * pad) / resolution)) + 1;
    acc[s].submap.height = static_cast<int>(
        std::ceil((max_y - min_y + 2.0 * pad) / resolution)) + 1;
    // Snap the grid anchor onto the world-resolution lattice so cells line
    // up with the source grid for axis-aligned node headings.
    {
      Submap& sm = acc[s].submap;
      const Point2 anchor = sm.origin.transform(sm.local_min);
      const Point2 snapped{std::round(anchor.x / resolution) * resolution,
                           std::round(anchor.y / resolution) * resolution};
      const double c = std::cos(sm.origin.theta);
      const double si = std::sin(sm.origin.theta);
      const double dx = snapped.x - anchor.x;
      const double dy = snapped.y - anchor.y;
      sm.local_min.x += c * dx + si * dy;
      sm.local_min.y += -si * dx + c * dy;
    }
    const std::size_t n_cells =
        static_cast<std::size_t>(acc[s].submap.width) * acc[s].submap.height;
    acc[s].log_odds.assign(n_cells, 0.0f);
    acc[s].touched.assign(n_cells, 0);
  }

  const double hit_update = logit(params.hit_prob);
  const double miss_update = logit(params.miss_prob);
  const Eigen::Matrix3d matcher_info = diag_info(params.matcher_info_diag);
  const Eigen::Matrix3d odom_info = diag_info(params.odom_info_diag);

  auto insert_scan = [&](SubmapAccumulator& a, const GraphNode& node) {
    // Hits win over misses within one scan; apply one update per cell.
    std::unordered_set<std::size_t> hit_cells, miss_cells;
    const Submap& sm = a.submap;
    const Pose2 inv = sm.origin.inverse();
    const Point2 sensor_local = inv.transform(node.pose.position());
    for (int b = 0; b < node.scan.spec.n_beams; ++b) {
      const double r = node.scan.ranges[b];
      if (!is_return(r)) continue;
      const double bearing =
          node.pose.theta + node.scan.spec.bearing(b) - sm.origin.theta;
      // Ranges measure the obstacle face; pushing the endpoint half a cell
      // further puts the hit inside the obstacle cell.
      const double rr = r + 0.5 * sm.resolution;
      const double ex = sensor_local.x + rr * std::cos(bearing);
      const double ey = sensor_local.y + rr * std::sin(bearing);
      // Walk cells from the sensor to the endpoint in the local frame.
      const int end_x = static_cast<int>(
          std::floor((ex - sm.local_min.x) / sm.resolution));
      const int end_y = static_cast<int>(
          std::floor((ey - sm.local_min.y) / sm.resolution));
      int cx = static_cast<int>(
          std::floor((sensor_local.x - sm.local_min.x) / sm.resolution));
      int cy = static_cast<int>(
          std::floor((sensor_local.y - sm.local_min.y) / sm.resolution));
      const double dx = ex - sensor_local.x;
      const double dy = ey - sensor_local.y;
      const int step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
      const int step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
      constexpr double kInf = std::numeric_limits<double>::infinity();
      const double inv_dx = step_x != 0 ? sm.resolution / std::abs(dx) : kInf;
      const double inv_dy = step_y != 0 ? sm.resolution / std::abs(dy) : kInf;
      const double sx = (sensor_local.x - sm.local_min.x) / sm.resolution;
      const double sy = (sensor_local.y - sm.local_min.y) / sm.resolution;
      double t_max_x = kInf, t_max_y = kInf;
      if (step_x > 0) t_max_x = (std::floor(sx) + 1 - sx) * inv_dx;
      if (step_x < 0) t_max_x = (sx - std::floor(sx)) * inv_dx;
      if (step_y > 0) t_max_y = (std::floor(sy) + 1 - sy) * inv_dy;
      if (step_y < 0) t_max_y = (sy - std::floor(sy)) * inv_dy;

      int guard = sm.width + sm.height + 4;
      while (guard-- > 0) {
        if (cx == end_x && cy == end_y) break;
        if (cx >= 0 && cy >= 0 && cx < sm.width && cy < sm.height) {
          miss_cells.insert(static_cast<std::size_t>(cy) * sm.width + cx);
        }
        if (t_max_x < t_max_y) {
          t_max_x += inv_dx;
          cx += step_x;
        } else {
          t_max_y += inv_dy;
          cy += step_y;
        }
        if (t_max_x == kInf && t_max_y == kInf) break;
      }
      if (end_x >= 0 && end_y >= 0 && end_x < sm.width && end_y < sm.height) {
        hit_cells.insert(static_cast<std::size_t>(end_y) * sm.width + end_x);
      }
    }
    for (const std::size_t i : hit_cells) {
      a.update(static_cast<int>(i % sm.width), static_cast<int>(i / sm.width),
               hit_update);
    }
    for (const std::size_t i : miss_cells) {
      if (hit_cells.count(i)) continue;
      a.update(static_cast<int>(i % sm.width), static_cast<int>(i / sm.width),
               miss_update);
    }
    a.submap.inserted_nodes.push_back(node.id);
  };

  for (int i = 0; i < n_nodes; ++i) {
    const int current = i / k;
    insert_scan(acc[current], map.nodes[i]);
    map.constraints.push_back(
        {Constraint::Kind::NodeToSubmap, current, i,
         acc[current].submap.origin.between(map.nodes[i].pose),
         matcher_info});
    if (current > 0) {
      insert_scan(acc[current - 1], map.nodes[i]);
      map.constraints.push_back(
          {Constraint::Kind::NodeToSubmap, current - 1, i,
           acc[current - 1].submap.origin.between(map.nodes[i].pose),
           matcher_info});
    }
    if (i > 0) {
      map.constraints.push_back(
          {Constraint::Kind::NodeToNode, i - 1, i,
           map.nodes[i - 1].pose.between(map.nodes[i].pose), odom_info});
    }
  }

  map.submaps.reserve(acc.size());
  for (auto& a : acc) {
    a.finalize();
    map.submaps.push_back(std::move(a.submap));
  }

  if (!graph_connected(map)) {
    throw std::runtime_error("build_from_sequence: graph not connected");
  }
  return map;
}

namespace {
constexpr char kBase64Chars[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(const std::uint8_t* data, std::size_t n) {
  std::string out;
  out.reserve((n + 2) / 3 * 4);
  for (std::size_t i = 0; i < n; i += 3) {
    const std::uint32_t b0 = data[i];
    const std::uint32_t b1 = i + 1 < n ? data[i + 1] : 0;
    const std::uint32_t b2 = i + 2 < n ? data[i + 2] : 0;
    const std::uint32_t v = (b0 << 16) | (b1 << 8) | b2;
    out.push_back(kBase64Chars[(v >> 18) & 63]);
    out.push_back(kBase64Chars[(v >> 12) & 63]);
    out.push_back(i + 1 < n ? kBase64Chars[(v >> 6) & 63] : '=');
    out.push_back(i + 2 < n ? kBase64Chars[v & 63] : '=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  if (text.size() % 4 != 0) {
    throw std::runtime_error("base64: length not a multiple of 4");
  }
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int vals[4];
    int pad = 0;
    for (int j = 0; j < 4; ++j) {
      const char c = text[i + j];
      if (c == '=') {
        if (i + 4 != text.size() || j < 2) {
          throw std::runtime_error("base64: misplaced padding");
        }
        vals[j] = 0;
        ++pad;
      } else {
        vals[j] = value_of(c);
        if (vals[j] < 0) throw std::runtime_error("base64: invalid character");
        if (pad > 0) throw std::runtime_error("base64: data after padding");
      }
    }
    const std::uint32_t v = (vals[0] << 18) | (vals[1] << 12) |
                            (vals[2] << 6) | vals[3];
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  return out;
}

std::string serialize(const PoseGraphMap& map) {
  nlohmann::json doc;
  doc["pgbm_schema"] = 1;
  doc["meta"] = {
      {"source_grid_hash", map.source_grid_hash},
      {"params",
       {{"nodes_per_submap", map.params.nodes_per_submap},
        {"hit_prob", map.params.hit_prob},
        {"miss_prob", map.params.miss_prob},
        {"submap_resolution", map.params.submap_resolution},
        {"matcher_info_diag", map.params.matcher_info_diag},
        {"odom_info_diag", map.params.odom_info_diag}}},
  };

  doc["nodes"] = nlohmann::json::array();
  for (const auto& n : map.nodes) {
    nlohmann::json ranges = nlohmann::json::array();
    for (const double r : n.scan.ranges) {
      if (is_return(r)) {
        ranges.push_back(r);
      } else {
        ranges.push_back(nullptr);
      }
    }
    doc["nodes"].push_back({{"id", n.id},
                            {"pose", pose_json(n.pose)},
                            {"stamp", n.stamp},
                            {"scan",
                             {{"spec",
                               {{"fov", n.scan.spec.fov},
                                {"n_beams", n.scan.spec.n_beams},
                                {"range_min", n.scan.spec.range_min},
                                {"range_max", n.scan.spec.range_max},
                                {"rate", n.scan.spec.rate},
                                {"noise_sigma", n.scan.spec.noise_sigma}}},
                              {"ranges", std::move(ranges)}}}});
  }

  doc["submaps"] = nlohmann::json::array();
  for (const auto& s : map.submaps) {
    doc["submaps"].push_back(
        {{"id", s.id},
         {"origin", pose_json(s.origin)},
         {"resolution", s.resolution},
         {"width", s.width},
         {"height", s.height},
         {"local_min", {s.local_min.x, s.local_min.y}},
         {"cells", base64_encode(s.cells.data(), s.cells.size())},
         {"inserted_nodes", s.inserted_nodes}});
  }

  doc["constraints"] = nlohmann::json::array();
  for (const auto& c : map.constraints) {
    std::array<double, 9> info;
    for (int r = 0; r < 3; ++r) {
      for (int col = 0; col < 3; ++col) info[r * 3 + col] = c.information(r, col);
    }
    doc["constraints"].push_back(
        {{"kind", c.kind == Constraint::Kind::NodeToSubmap ? "node_submap"
                                                           : "node_node"},
         {"from", c.from_id},
         {"to", c.to_id},
         {"relative", pose_json(c.relative)},
         {"information", info}});
  }
  return doc.dump();
}

PoseGraphMap deserialize(const std::string& bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("pgbm: " + std::string(e.what()));
  }
  if (!doc.contains("pgbm_schema") || doc["pgbm_schema"].get<int>() != 1) {
    throw std::runtime_error("pgbm: unsupported schema version");
  }
  PoseGraphMap map;
  const auto& meta = doc.at("meta");
  map.source_grid_hash = meta.at("source_grid_hash").get<std::string>();
  const auto& p = meta.at("params");
  map.params.nodes_per_submap = p.at("nodes_per_submap").get<int>();
  map.params.hit_prob = p.at("hit_prob").get<double>();
  map.params.miss_prob = p.at("miss_prob").get<double>();
  map.params.submap_resolution = p.at("submap_resolution").get<double>();
  map.params.matcher_info_diag = p.at("matcher_info_diag").get<std::array<double, 3>>();
  map.params.odom_info_diag = p.at("odom_info_diag").get<std::array<double, 3>>();

  for (const auto& jn : doc.at("nodes")) {
    GraphNode n;
    n.id = jn.at("id").get<int>();
    n.pose = pose_from_json(jn.at("pose"));
    n.stamp = jn.at("stamp").get<double>();
    const auto& js = jn.at("scan");
    const auto& spec = js.at("spec");
    n.scan.spec.fov = spec.at("fov").get<double>();
    n.scan.spec.n_beams = spec.at("n_beams").get<int>();
    n.scan.spec.range_min = spec.at("range_min").get<double>();
    n.scan.spec.range_max = spec.at("range_max").get<double>();
    n.scan.spec.rate = spec.at("rate").get<double>();
    n.scan.spec.noise_sigma = spec.at("noise_sigma").get<double>();
    n.scan.stamp = n.stamp;
    for (const auto& r : js.at("ranges")) {
      n.scan.ranges.push_back(r.is_null() ? kNoReturn : r.get<double>());
    }
    map.nodes.push_back(std::move(n));
  }

  for (const auto& jsm : doc.at("submaps")) {
    Submap s;
    s.id = jsm.at("id").get<int>();
    s.origin = pose_from_json(jsm.at("origin"));
    s.resolution = jsm.at("resolution").get<double>();
    s.width = jsm.at("width").get<int>();
    s.height = jsm.at("height").get<int>();
    s.local_min = {jsm.at("local_min").at(0).get<double>(),
                   jsm.at("local_min").at(1).get<double>()};
    s.cells = base64_decode(jsm.at("cells").get<std::string>());
    if (s.cells.size() != static_cast<std::size_t>(s.width) * s.height) {
      throw std::runtime_error("pgbm: submap cell payload size mismatch");
    }
    s.inserted_nodes = jsm.at("inserted_nodes").get<std::vector<int>>();
    map.submaps.push_back(std::move(s));
  }

  for (const auto& jc : doc.at("constraints")) {
    Constraint c;
    const std::string kind = jc.at("kind").get<std::string>();
    if (kind == "node_submap") {
      c.kind = Constraint::Kind::NodeToSubmap;
    } else if (kind == "node_node") {
      c.kind = Constraint::Kind::NodeToNode;
    } else {
      throw std::runtime_error("pgbm: unknown constraint kind '" + kind + "'");
    }
    c.from_id = jc.at("from").get<int>();
    c.to_id = jc.at("to").get<int>();
    c.relative = pose_from_json(jc.at("relative"));
    const auto info = jc.at("information").get<std::array<double, 9>>();
    for (int r = 0; r < 3; ++r) {
      for (int col = 0; col < 3; ++col) c.information(r, col) = info[r * 3 + col];
    }
    if (!information_spd(c.information)) {
      throw std::runtime_error(
          "pgbm: constraint information matrix is not SPD");
    }
    map.constraints.push_back(std::move(c));
  }

  if (!graph_connected(map)) {
    throw std::runtime_error("pgbm: constraint graph is not connected");
  }
  return map;
}

void save_pgbm(const PoseGraphMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << serialize(map);
}

PoseGraphMap load_pgbm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

OccupancyGrid rasterize_global(const PoseGraphMap& map, double resolution) {
  if (map.submaps.empty()) {
    return OccupancyGrid(1, 1, resolution > 0 ? resolution : 0.05, Pose2(),
                         CellState::Unknown);
  }
  if (resolution <= 0.0) {
    throw std::runtime_error("rasterize_global: non-positive resolution");
  }
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = min_x;
  double max_x = -min_x;
  double max_y = -min_x;
  for (const auto& s : map.submaps) {
    for (const int cx : {0, s.width}) {
      for (const int cy : {0, s.height}) {
        const Point2 local{s.local_min.x + cx * s.resolution,
                           s.local_min.y + cy * s.resolution};
        const Point2 w = s.origin.transform(local);
        min_x = std::min(min_x, w.x);
        max_x = std::max(max_x, w.x);
        min_y = std::min(min_y, w.y);
        max_y = std::max(max_y, w.y);
      }
    }
  }
  // Anchor on the resolution lattice so the raster lines up with lattice-
  // snapped submaps.
  const double ox = std::floor(min_x / resolution - 1.0) * resolution;
  const double oy = std::floor(min_y / resolution - 1.0) * resolution;
  const int width =
      static_cast<int>(std::ceil((max_x - ox) / resolution)) + 1;
  const int height =
      static_cast<int>(std::ceil((max_y - oy) / resolution)) + 1;
  OccupancyGrid grid(width, height, resolution, Pose2(ox, oy, 0.0),
                     CellState::Unknown);

  std::vector<float> max_prob(grid.size(), -1.0f);
  for (const auto& s : map.submaps) {
    for (int y = 0; y < s.height; ++y) {
      for (int x = 0; x < s.width; ++x) {
        if (!s.observed(x, y)) continue;
        const Point2 local{s.local_min.x + (x + 0.5) * s.resolution,
                           s.local_min.y + (y + 0.5) * s.resolution};
        const CellIndex c = grid.world_to_cell(s.origin.transform(local));
        if (!grid.in_bounds(c)) continue;
        const std::size_t i =
            static_cast<std::size_t>(c.y) * grid.width() + c.x;
        max_prob[i] = std::max(max_prob[i],
                               static_cast<float>(s.probability(x, y)));
      }
    }
  }
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      const float p = max_prob[static_cast<std::size_t>(y) * grid.width() + x];
      if (p < 0.0f) continue;  // never observed
      if (p > 0.65f) {
        grid.set(x, y, CellState::Occupied);
      } else if (p < 0.196f) {
        grid.set(x, y, CellState::Free);
      }
    }
  }
  return grid;
}

}  // namespace gridgraph
