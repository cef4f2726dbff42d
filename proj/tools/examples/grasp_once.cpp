// Runs one pick-and-shake sequence and prints the phase trace and outcome.
//   grasp_once [object] [biotac|wts] [added_mass_g] [seed]

#include <cstdio>
#include <cstdlib>
#include <string>

#include "tgrasp/tgrasp.hpp"

int main(int argc, char **argv) {
  using namespace tgrasp;
  const std::string object = argc > 1 ? argv[1] : "can";
  const FingertipKind kind = parse_kind(argc > 2 ? argv[2] : "biotac");
  const double added = argc > 3 ? std::atof(argv[3]) : 0.0;
  const auto seed = argc > 4 ? std::strtoull(argv[4], nullptr, 10) : 1ULL;

  const Config cfg;
  const RunResult r = run_main_sequence(cfg, object, kind, added, seed);
  std::printf("phases:");
  for (Phase p : r.trace) std::printf(" %s", std::string(to_string(p)).c_str());
  std::printf("\noutcome: %s, slip %.3f mm, peak load factor %.5f, %ld ticks\n",
              std::string(to_string(r.outcome.status)).c_str(), r.outcome.slip_mm, r.outcome.peak_load_factor, static_cast<long>(r.ticks));
  return r.outcome.failed() ? 1 : 0;
}
