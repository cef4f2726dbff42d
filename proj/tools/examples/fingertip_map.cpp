// Presses a fingertip into a flat indenter and prints the spatial colour map
// at a few depths.
//   fingertip_map [biotac|wts]

#include <cmath>
#include <cstdio>
#include <string>

#include "tgrasp/tgrasp.hpp"

int main(int argc, char **argv) {
  using namespace tgrasp;
  const Config cfg;
  const FingertipKind kind = parse_kind(argc > 1 ? argv[1] : "wts");
  const SensorLayout &layout = cfg.kind(kind).layout;
  NoiseConfig quiet;
  quiet.sigma_counts = 0.0;

  for (double depth : {layout.delta_min_mm + 2.0, layout.delta_min_mm + 5.0, layout.delta_min_mm + 12.0}) {
    ContactField field;
    field.depths_mm.resize(static_cast<std::size_t>(layout.sensor_count));
    // shallower away from the pad centre
    for (std::size_t i = 0; i < field.depths_mm.size(); ++i) {
      const auto &p = layout.positions[i];
      const double off = std::abs(p.u - 0.5) + std::abs(p.v - 0.5);
      field.depths_mm[i] = depth - 6.0 * off;
    }
    const FingertipFrame frame = synthesize_frame(layout, field, 0, 0, quiet);
    const SpatialMap map = render_spatial_map(to_doubles(frame), layout, 4095.0);
    std::printf("depth %.1f mm\n%s\n", depth, to_text(map).c_str());
  }
  return 0;
}
