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

#include "gridgraph/map_io.hpp"

#include <yaml-cpp/yaml.h>

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gridgraph/hash.hpp"

namespace gridgraph {

namespace {

constexpr std::uint8_t kOccupiedPixel = 0;
constexpr std::uint8_t kUnknownPixel = 205;
constexpr std::uint8_t kFreePixel = 254;

struct PgmImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row 0 = top
};

class PgmReader {
 public:
  explicit PgmReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  PgmImage read() {
    const std::string magic = next_token();
    if (magic != "P5" && magic != "P2") {
      throw std::runtime_error("PGM: unsupported magic '" + magic + "'");
    }
    PgmImage img;
    img.width = next_int("width");
    img.height = next_int("height");
    const int maxval = next_int("maxval");
    if (img.width <= 0 || img.height <= 0) {
      throw std::runtime_error("PGM: non-positive dimensions");
    }
    if (maxval != 255) {
      throw std::runtime_error("PGM: maxval must be 255, got " +
                               std::to_string(maxval));
    }
    const std::size_t n =
        static_cast<std::size_t>(img.width) * img.height;
    img.pixels.reserve(n);
    if (magic == "P5") {
      // Exactly one whitespace byte separates the header from the raster.
      if (pos_ >= bytes_.size()) throw std::runtime_error("PGM: truncated");
      ++pos_;
      if (bytes_.size() - pos_ < n) {
        throw std::runtime_error("PGM: pixel count mismatch");
      }
      img.pixels.assign(bytes_.begin() + pos_, bytes_.begin() + pos_ + n);
      if (bytes_.size() - pos_ > n) {
        throw std::runtime_error("PGM: trailing bytes after raster");
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const int v = next_int("pixel");
        if (v < 0 || v > 255) throw std::runtime_error("PGM: pixel range");
        img.pixels.push_back(static_cast<std::uint8_t>(v));
      }
      skip_space_and_comments();
      if (pos_ != bytes_.size()) {
        throw std::runtime_error("PGM: pixel count mismatch");
      }
    }
    return img;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = static_cast<char>(bytes_[pos_]);
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string next_token() {
    skip_space_and_comments();
    std::string tok;
    while (pos_ < bytes_.size() &&
           !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      tok.push_back(static_cast<char>(bytes_[pos_++]));
    }
    if (tok.empty()) throw std::runtime_error("PGM: truncated header");
    return tok;
  }

  int next_int(const char* what) {
    const std::string tok = next_token();
    try {
      std::size_t used = 0;
      const int v = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw std::runtime_error(std::string("PGM: malformed ") + what + " '" +
                               tok + "'");
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t OccupancyGrid::content_hash() const {
  Fnv1a h;
  h.update_value(width_);
  h.update_value(height_);
  h.update_value(resolution_);
  h.update_value(origin_.x);
  h.update_value(origin_.y);
  h.update_value(origin_.theta);
  h.update(cells_.data(), cells_.size());
  return h.digest();
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

OccupancyGrid load_ogm(const std::vector<std::uint8_t>& pgm_bytes,
                       const MapMetadata& meta) {
  if (meta.free_thresh >= meta.occupied_thresh) {
    throw std::runtime_error("map metadata: free_thresh >= occupied_thresh");
  }
  if (meta.resolution <= 0.0) {
    throw std::runtime_error("map metadata: non-positive resolution");
  }
  const PgmImage img = PgmReader(pgm_bytes).read();
  OccupancyGrid grid(img.width, img.height, meta.resolution,
                     Pose2(meta.origin[0], meta.origin[1], meta.origin[2]));
  for (int row = 0; row < img.height; ++row) {
    const int cell_y = img.height - 1 - row;  // image top = map top
    for (int x = 0; x < img.width; ++x) {
      const std::uint8_t v =
          img.pixels[static_cast<std::size_t>(row) * img.width + x];
      const double p =
          meta.negate ? v / 255.0 : (255.0 - v) / 255.0;
      CellState s = CellState::Unknown;
      if (p > meta.occupied_thresh) {
        s = CellState::Occupied;
      } else if (p < meta.free_thresh) {
        s = CellState::Free;
      }
      grid.set(x, cell_y, s);
    }
  }
  return grid;
}

std::pair<std::vector<std::uint8_t>, MapMetadata> save_ogm(
    const OccupancyGrid& grid) {
  std::string header = "P5\n" + std::to_string(grid.width()) + " " +
                       std::to_string(grid.height()) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.reserve(bytes.size() + grid.size());
  for (int row = 0; row < grid.height(); ++row) {
    const int cell_y = grid.height() - 1 - row;
    for (int x = 0; x < grid.width(); ++x) {
      switch (grid.at(x, cell_y)) {
        case CellState::Occupied:
          bytes.push_back(kOccupiedPixel);
          break;
        case CellState::Free:
          bytes.push_back(kFreePixel);
          break;
        case CellState::Unknown:
          bytes.push_back(kUnknownPixel);
          break;
      }
    }
  }
  MapMetadata meta;
  meta.resolution = grid.resolution();
  meta.origin[0] = grid.origin().x;
  meta.origin[1] = grid.origin().y;
  meta.origin[2] = grid.origin().theta;
  return {std::move(bytes), meta};
}

OccupancyGrid classify_regions(const OccupancyGrid& structural,
                               const OccupancyGrid& full) {
  if (!structural.same_frame(full)) {
    throw std::runtime_error("classify_regions: grid frame mismatch");
  }
  const int w = full.width();
  const int h = full.height();
  std::vector<std::uint8_t> exterior(static_cast<std::size_t>(w) * h, 0);
  std::vector<CellIndex> stack;
  auto push = [&](int x, int y) {
    const std::size_t idx = static_cast<std::size_t>(y) * w + x;
    if (exterior[idx] || full.at(x, y) == CellState::Occupied) return;
    exterior[idx] = 1;
    stack.push_back({x, y});
  };
  for (int x = 0; x < w; ++x) {
    push(x, 0);
    push(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    push(0, y);
    push(w - 1, y);
  }
  // 4-connected flood: obstacles rasterized as 8-connected outlines stay
  // tight against diagonal leaks.
  while (!stack.empty()) {
    const CellIndex c = stack.back();
    stack.pop_back();
    if (c.x > 0) push(c.x - 1, c.y);
    if (c.x + 1 < w) push(c.x + 1, c.y);
    if (c.y > 0) push(c.x, c.y - 1);
    if (c.y + 1 < h) push(c.x, c.y + 1);
  }

  OccupancyGrid out = structural;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (structural.at(x, y) == CellState::Occupied) continue;
      const bool ext = exterior[static_cast<std::size_t>(y) * w + x] != 0;
      out.set(x, y, ext ? CellState::Unknown : CellState::Free);
    }
  }
  return out;
}

OccupancyGrid merge_stories(const std::vector<OccupancyGrid>& grids) {
  if (grids.empty()) {
    throw std::runtime_error("merge_stories: no grids");
  }
  OccupancyGrid out = grids.front();
  for (std::size_t i = 1; i < grids.size(); ++i) {
    const OccupancyGrid& g = grids[i];
    if (!g.same_frame(out)) {
      throw std::runtime_error("merge_stories: grid frame mismatch");
    }
    for (std::size_t k = 0; k < g.size(); ++k) {
      const CellState a = out.cells()[k];
      const CellState b = g.cells()[k];
      // Precedence Occupied > Free > Unknown matches the enum ordering.
      out.cells()[k] = static_cast<CellState>(
          std::max(static_cast<int>(a), static_cast<int>(b)));
    }
  }
  return out;
}

MapMetadata load_metadata_yaml(const std::string& yaml_path) {
  YAML::Node node;
  try {
    node = YAML::LoadFile(yaml_path);
  } catch (const YAML::Exception& e) {
    throw std::runtime_error("map yaml: " + std::string(e.what()));
  }
  MapMetadata meta;
  try {
    meta.image_path = node["image"].as<std::string>();
    meta.resolution = node["resolution"].as<double>();
    const auto origin = node["origin"];
    if (!origin.IsSequence() || origin.size() != 3) {
      throw std::runtime_error("map yaml: origin must be a 3-element list");
    }
    for (int i = 0; i < 3; ++i) meta.origin[i] = origin[i].as<double>();
    meta.negate = node["negate"].as<int>();
    meta.occupied_thresh = node["occupied_thresh"].as<double>();
    meta.free_thresh = node["free_thresh"].as<double>();
  } catch (const YAML::Exception& e) {
    throw std::runtime_error("map yaml: " + std::string(e.what()));
  }
  if (meta.free_thresh >= meta.occupied_thresh) {
    throw std::runtime_error("map yaml: free_thresh >= occupied_thresh");
  }
  return meta;
}

void save_metadata_yaml(const MapMetadata& meta,
                        const std::string& yaml_path) {
  std::ofstream out(yaml_path);
  if (!out) throw std::runtime_error("cannot write " + yaml_path);
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "image: %s\n"
                "resolution: %.6f\n"
                "origin: [%.6f, %.6f, %.6f]\n"
                "negate: %d\n"
                "occupied_thresh: %.3f\n"
                "free_thresh: %.3f\n",
                meta.image_path.c_str(), meta.resolution, meta.origin[0],
                meta.origin[1], meta.origin[2], meta.negate,
                meta.occupied_thresh, meta.free_thresh);
  out << buf;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::string& path,
                      const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

OccupancyGrid load_map_files(const std::string& yaml_path) {
  MapMetadata meta = load_metadata_yaml(yaml_path);
  std::filesystem::path img(meta.image_path);
  if (img.is_relative()) {
    img = std::filesystem::path(yaml_path).parent_path() / img;
  }
  return load_ogm(read_file_bytes(img.string()), meta);
}

void save_map_files(const OccupancyGrid& grid, const std::string& prefix) {
  auto [bytes, meta] = save_ogm(grid);
  const std::filesystem::path pgm_path(prefix + ".pgm");
  meta.image_path = pgm_path.filename().string();
  write_file_bytes(pgm_path.string(), bytes);
  save_metadata_yaml(meta, prefix + ".yaml");
}

std::vector<std::uint8_t> mask_overlay_pgm(const OccupancyGrid& grid,
                                           const CellMask& mask) {
  if (!mask.matches(grid)) {
    throw std::runtime_error("mask_overlay_pgm: mask dimension mismatch");
  }
  auto [bytes, meta] = save_ogm(grid);
  (void)meta;
  const std::size_t raster_start = bytes.size() - grid.size();
  for (int row = 0; row < grid.height(); ++row) {
    const int cell_y = grid.height() - 1 - row;
    for (int x = 0; x < grid.width(); ++x) {
      if (mask.at(x, cell_y)) {
        bytes[raster_start + static_cast<std::size_t>(row) * grid.width() +
              x] = 128;
      }
    }
  }
  return bytes;
}

}  // namespace gridgraph
