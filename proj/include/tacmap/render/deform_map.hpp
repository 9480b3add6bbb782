#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "tacmap/error.hpp"

namespace tacmap {

// H x W penetration depths in meters, row-major (row 0 is u = 0).
class DeformMap {
 public:
  DeformMap() = default;
  DeformMap(int rows, int cols, double d_max)
      : rows_(rows), cols_(cols), d_max_(d_max),
        depths_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0) {
    if (rows < 1 || cols < 1) throw InputError("deform map dimensions must be >= 1");
    if (!(d_max > 0.0)) throw InputError("deform map d_max must be > 0");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double d_max() const { return d_max_; }
  std::size_t size() const { return depths_.size(); }

  double& operator()(int u, int v) { return depths_[index(u, v)]; }
  double operator()(int u, int v) const { return depths_[index(u, v)]; }
  double& operator[](std::size_t i) { return depths_[i]; }
  double operator[](std::size_t i) const { return depths_[i]; }

  const std::vector<double>& depths() const { return depths_; }
  std::vector<double>& depths() { return depths_; }

  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(u) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(v);
  }

  bool same_shape(const DeformMap& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  double max_depth() const {
    return depths_.empty() ? 0.0 : *std::max_element(depths_.begin(), depths_.end());
  }

  // Depths as stored on disk and handed to scripting adapters.
  std::vector<float> to_f32() const {
    std::vector<float> out(depths_.size());
    std::transform(depths_.begin(), depths_.end(), out.begin(),
                   [](double d) { return static_cast<float>(d); });
    return out;
  }

  friend bool operator==(const DeformMap&, const DeformMap&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  double d_max_ = 0.0;
  std::vector<double> depths_;
};

// "TMAP" v1: magic, u32 version, u32 H, u32 W, f32 d_max, H*W f32 depths.
// Little-endian throughout.
namespace tmap {

inline constexpr char kMagic[4] = {'T', 'M', 'A', 'P'};
inline constexpr std::uint32_t kVersion = 1;
inline constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 4 + 4;

inline std::string encode(const DeformMap& map) {
  std::string bytes(kHeaderBytes + 4 * map.size(), '\0');
  char* out = bytes.data();
  auto put = [&out](const void* src, std::size_t n) {
    std::memcpy(out, src, n);
    out += n;
  };
  put(kMagic, 4);
  const std::uint32_t version = kVersion;
  const auto rows = static_cast<std::uint32_t>(map.rows());
  const auto cols = static_cast<std::uint32_t>(map.cols());
  const auto d_max = static_cast<float>(map.d_max());
  put(&version, 4);
  put(&rows, 4);
  put(&cols, 4);
  put(&d_max, 4);
  const std::vector<float> depths = map.to_f32();
  put(depths.data(), 4 * depths.size());
  return bytes;
}

inline DeformMap decode(const std::string& bytes, const std::string& label = "TMAP data") {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw InputError(label + ": not a TMAP file (bad magic)");
  }
  std::uint32_t version = 0, rows = 0, cols = 0;
  float d_max = 0.0f;
  std::memcpy(&version, bytes.data() + 4, 4);
  std::memcpy(&rows, bytes.data() + 8, 4);
  std::memcpy(&cols, bytes.data() + 12, 4);
  std::memcpy(&d_max, bytes.data() + 16, 4);
  if (version != kVersion) {
    throw InputError(label + ": unsupported TMAP version " + std::to_string(version));
  }
  const std::size_t count = static_cast<std::size_t>(rows) * cols;
  if (rows == 0 || cols == 0 || bytes.size() != kHeaderBytes + 4 * count) {
    throw InputError(label + ": TMAP payload size does not match its header");
  }
  DeformMap map(static_cast<int>(rows), static_cast<int>(cols), d_max);
  std::vector<float> depths(count);
  std::memcpy(depths.data(), bytes.data() + kHeaderBytes, 4 * count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::isfinite(depths[i])) throw InputError(label + ": non-finite depth");
    map[i] = depths[i];
  }
  return map;
}

inline void write(const DeformMap& map, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  const std::string bytes = encode(map);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline DeformMap read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode(bytes, path.string());
}

}  // namespace tmap

// 16-bit binary PGM, depth / d_max scaled to [0, 65535].
inline void write_pgm(const DeformMap& map, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "P5\n" << map.cols() << ' ' << map.rows() << "\n65535\n";
  for (std::size_t i = 0; i < map.size(); ++i) {
    const double scaled = std::clamp(map[i] / map.d_max(), 0.0, 1.0) * 65535.0;
    const auto value = static_cast<std::uint16_t>(std::lround(scaled));
    const unsigned char be[2] = {static_cast<unsigned char>(value >> 8),
                                 static_cast<unsigned char>(value & 0xff)};
    out.write(reinterpret_cast<const char*>(be), 2);
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline void write_csv(const DeformMap& map, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.precision(9);
  for (int u = 0; u < map.rows(); ++u) {
    for (int v = 0; v < map.cols(); ++v) {
      if (v > 0) out << ',';
      out << map(u, v);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace tacmap
