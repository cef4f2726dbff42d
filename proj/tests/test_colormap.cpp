#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "tgrasp/colormap.hpp"

using namespace tgrasp;

TEST(Colormap, BinEdges) {
  EXPECT_EQ(intensity_bin(0.0, 4095.0), 0);
  EXPECT_EQ(intensity_bin(-3.0, 4095.0), 0);
  EXPECT_EQ(intensity_bin(4095.0, 4095.0), 5);
  EXPECT_EQ(intensity_bin(9000.0, 4095.0), 5);
  EXPECT_EQ(intensity_bin(0.5, 1.0), 3);
  EXPECT_EQ(intensity_bin(1.0 / 6.0 - 1e-9, 1.0), 0);
  EXPECT_EQ(intensity_bin(1.0 / 6.0 + 1e-9, 1.0), 1);
  EXPECT_THROW(intensity_bin(1.0, 0.0), ConfigError);
}

TEST(Colormap, AllZeroFrameIsBlack) {
  const auto layout = default_layout(FingertipKind::BioTacSP);
  const std::vector<double> zeros(layout.positions.size(), 0.0);
  const auto m = render_spatial_map(zeros, layout, 1.0);
  EXPECT_EQ(m.rows, 9);
  EXPECT_EQ(m.cols, 9);
  for (int b : m.bins) EXPECT_EQ(b, 0);
}

TEST(Colormap, WtsGridMapsOneCellPerSensor) {
  const auto layout = default_layout(FingertipKind::WtsFt);
  std::vector<double> v(layout.positions.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i % 6) / 6.0 + 0.01;
  const auto m = render_spatial_map(v, layout, 1.0);
  ASSERT_EQ(m.rows * m.cols, 32);
  std::vector<int> sorted_map = m.bins, expected;
  for (double x : v) expected.push_back(intensity_bin(x, 1.0));
  std::sort(sorted_map.begin(), sorted_map.end());
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(sorted_map, expected);
}

TEST(Colormap, SizeMismatchIsRejected) {
  const auto layout = default_layout(FingertipKind::WtsFt);
  EXPECT_THROW(render_spatial_map(std::vector<double>(3, 0.0), layout, 1.0), ConfigError);
}

TEST(Colormap, PpmHeaderAndPayload) {
  SpatialMap m{2, 3, {0, 1, 2, 3, 4, 5}};
  const auto ppm = to_ppm(m, 2);
  const std::string header = "P6\n6 4\n255\n";
  ASSERT_EQ(ppm.substr(0, header.size()), header);
  EXPECT_EQ(ppm.size(), header.size() + 6u * 4u * 3u);
  // last pixel carries the top colour
  EXPECT_EQ(static_cast<std::uint8_t>(ppm[ppm.size() - 3]), kHotPalette[5][0]);
  EXPECT_EQ(to_text(m), "0 1 2\n3 4 5\n");
}
