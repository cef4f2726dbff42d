#ifndef TGRASP_COLORMAP_HPP
#define TGRASP_COLORMAP_HPP

// Spatial "hot" colour maps of a fingertip frame, exported as plain-text
// bin matrices and binary PPM images.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "tgrasp/errors.hpp"
#include "tgrasp/fingertip.hpp"

namespace tgrasp {

inline constexpr int kColorBins = 6;

/// black, brown, red, orange, yellow, white
inline constexpr std::array<std::array<std::uint8_t, 3>, kColorBins> kHotPalette{{
    {0, 0, 0},
    {120, 60, 20},
    {220, 30, 20},
    {255, 140, 0},
    {255, 230, 40},
    {255, 255, 255},
}};

/// Equal division of [0, full_scale] into six bins; values at or above full scale land in the last bin.
inline int intensity_bin(double value, double full_scale) {
  if (!(full_scale > 0.0)) throw ConfigError("colour map full scale must be positive");
  if (!(value > 0.0)) return 0;
  const auto b = static_cast<int>(std::floor(value / full_scale * kColorBins));
  return std::clamp(b, 0, kColorBins - 1);
}

struct SpatialMap {
  int rows = 0;
  int cols = 0;
  std::vector<int> bins; // row-major

  int at(int r, int c) const { return bins[static_cast<std::size_t>(r * cols + c)]; }
};

struct MapGrid {
  int rows = 8;
  int cols = 4;
};

/// Grid matching the sensor arrangement: the 8 x 4 cell matrix for WtsFt, a square raster for BioTacSP.
inline MapGrid default_grid(FingertipKind kind) {
  return kind == FingertipKind::WtsFt ? MapGrid{8, 4} : MapGrid{9, 9};
}

/// Places each sensor in the grid cell containing its surface position; a
/// cell shared by several sensors shows the strongest, empty cells stay black.
inline SpatialMap render_spatial_map(std::span<const double> values, const SensorLayout &layout, double full_scale,
                                     MapGrid grid) {
  if (values.size() != layout.positions.size()) throw ConfigError("frame size does not match the sensor layout");
  if (grid.rows < 1 || grid.cols < 1) throw ConfigError("colour map grid must be at least 1 x 1");
  SpatialMap m{grid.rows, grid.cols, std::vector<int>(static_cast<std::size_t>(grid.rows * grid.cols), 0)};
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto &p = layout.positions[i];
    const int c = std::clamp(static_cast<int>(p.u * grid.cols), 0, grid.cols - 1);
    const int r = std::clamp(static_cast<int>(p.v * grid.rows), 0, grid.rows - 1);
    auto &cell = m.bins[static_cast<std::size_t>(r * grid.cols + c)];
    cell = std::max(cell, intensity_bin(values[i], full_scale));
  }
  return m;
}

inline SpatialMap render_spatial_map(std::span<const double> values, const SensorLayout &layout, double full_scale) {
  return render_spatial_map(values, layout, full_scale, default_grid(layout.kind));
}

inline std::string to_text(const SpatialMap &m) {
  std::ostringstream os;
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) os << (c ? " " : "") << m.at(r, c);
    os << '\n';
  }
  return os.str();
}

/// Binary PPM (P6), each cell drawn as a `scale` x `scale` block.
inline std::string to_ppm(const SpatialMap &m, int scale = 16) {
  std::ostringstream os;
  os << "P6\n" << m.cols * scale << ' ' << m.rows * scale << "\n255\n";
  for (int y = 0; y < m.rows * scale; ++y)
    for (int x = 0; x < m.cols * scale; ++x) {
      const auto &rgb = kHotPalette[static_cast<std::size_t>(m.at(y / scale, x / scale))];
      os.write(reinterpret_cast<const char *>(rgb.data()), 3);
    }
  return os.str();
}

inline void write_text_file(const std::string &path, const std::string &content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << content;
}

} // namespace tgrasp

#endif // TGRASP_COLORMAP_HPP
