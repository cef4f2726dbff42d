#ifndef TGRASP_CALIBRATION_HPP
#define TGRASP_CALIBRATION_HPP

// Contact-threshold calibration and the fit of the per-object hold
// parameters against the reference max-mass table.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tgrasp/config.hpp"
#include "tgrasp/harness.hpp"
#include "tgrasp/stages.hpp"

namespace tgrasp {

// ---- contact threshold ---------------------------------------------------------

/// Raw criteria of one scripted grasp series at a candidate threshold.
struct ZetaCriteria {
  double zeta = 0.0;
  double deformation_mm = 0.0; // mean object deformation when each finger first reports contact
  double efficiency = 0.0;     // share of repetitions with a clean three-finger detection
  double slip_mm = 0.0;        // mean slip under the standard pull at the detection forces
};

struct ZetaScore {
  ZetaCriteria criteria;
  double score = 0.0;
};

struct ZetaCalibration {
  double zeta = 0.0;
  std::vector<ZetaScore> scores; // one per grid candidate, grid order
};

namespace detail {

struct ScriptedGrasp {
  bool phantom = false; // contact reported on a finger that carries no force
  std::array<bool, kFingers> detected{};
  std::array<double, kFingers> deformation_mm{};
  std::array<double, kFingers> force_n{};
};

/// Pick-up and adaptive close at the tracking force, stopping when the grasp phase ends.
inline ScriptedGrasp scripted_grasp(const Config &cfg, FingertipKind kind, const ObjectSpec &object,
                                    std::uint64_t seed) {
  FrameSourceStage source(cfg, object, kind, seed);
  ContactDetectorStage detector(cfg, kind);
  AdaptiveGraspStage controller(cfg, object.name);
  ControllerInputs in;
  in.actual = cfg.limits.max;
  ScriptedGrasp g;
  for (std::int64_t tick = 0;; ++tick) {
    const ControlCommand cmd = controller.on_inputs(in);
    if (cmd.done || static_cast<int>(cmd.phase) > static_cast<int>(Phase::Grasp)) break;
    const SourceOutput out = source.on_command(cmd, tick);
    const DetectorOutput d = detector.on_raw(out.raw);
    const HandState &hand = source.plant().hand();
    for (std::size_t k = 0; k < kFingers; ++k) {
      if (!d.contact[k]) continue;
      if (hand.normal_force_n[k] <= 0.0) g.phantom = true;
      else if (!g.detected[k]) {
        g.detected[k] = true;
        g.deformation_mm[k] = hand.object_deformation_mm[k];
        g.force_n[k] = hand.normal_force_n[k];
      }
    }
    in = {d.contact, out.actual.q, out.status};
  }
  for (std::size_t k = 0; k < kFingers; ++k)
    if (!g.detected[k]) {
      g.deformation_mm[k] = 0.0;
      g.force_n[k] = 0.0;
    }
  return g;
}

} // namespace detail

/// Runs the calibration repetitions for a single threshold value.
inline ZetaCriteria zeta_criteria(const Config &base, FingertipKind kind, double zeta, std::uint64_t seed) {
  Config cfg = base;
  cfg.kind(kind).zeta = zeta;
  const ObjectSpec &object = cfg.object(cfg.calibration.reference_object);
  const SensorLayout &layout = cfg.kind(kind).layout;
  double eta = object.engagement * (layout.surface_shape == SurfaceShape::Flat ? object.flat_engagement_ratio : 1.0);
  const double mu_eta = std::min(layout.friction_mu, object.surface_friction) * eta;
  // Undetected fingers are charged the worst case: full tracking-force deformation.
  const double worst_deformation =
      cfg.plant.tracking_force_n * object.deformability_mm_per_n;

  ZetaCriteria c;
  c.zeta = zeta;
  const int reps = cfg.calibration.repetitions;
  for (int rep = 0; rep < reps; ++rep) {
    const auto g = detail::scripted_grasp(cfg, kind, object, repetition_seed(seed, rep));
    const bool clean = !g.phantom && g.detected[0] && g.detected[1] && g.detected[2];
    double onset = 0.0;
    for (std::size_t k = 0; k < kFingers; ++k) {
      c.deformation_mm += (g.detected[k] ? g.deformation_mm[k] : worst_deformation) / kFingers;
      onset += g.force_n[k] * mu_eta;
    }
    if (clean) c.efficiency += 1.0;
    c.slip_mm += slip_pull(cfg.calibration.standard_pull_n, onset, cfg.kind(kind).slip);
  }
  c.deformation_mm /= reps;
  c.efficiency /= reps;
  c.slip_mm /= reps;
  return c;
}

/// Composite score over a grid: deformation and slip are scaled by their
/// largest value across the grid, efficiency is already a rate.
inline std::vector<ZetaScore> score_candidates(const std::vector<ZetaCriteria> &criteria,
                                               const CalibrationConfig &w) {
  double max_def = 0.0, max_slip = 0.0;
  for (const auto &c : criteria) {
    max_def = std::max(max_def, c.deformation_mm);
    max_slip = std::max(max_slip, c.slip_mm);
  }
  std::vector<ZetaScore> out;
  for (const auto &c : criteria) {
    const double def = max_def > 0.0 ? c.deformation_mm / max_def : 0.0;
    const double slip = max_slip > 0.0 ? c.slip_mm / max_slip : 0.0;
    out.push_back({c, w.weight_efficiency * c.efficiency - w.weight_deformation * def - w.weight_slip * slip});
  }
  return out;
}

/// Grid search for the contact threshold; ties go to the larger threshold.
inline ZetaCalibration calibrate_zeta(const Config &cfg, FingertipKind kind, const std::vector<double> &grid,
                                      std::uint64_t seed = 1) {
  if (grid.empty()) throw ConfigError("threshold candidate grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end())) throw ConfigError("threshold candidate grid must be ascending");
  std::vector<ZetaCriteria> criteria;
  for (double z : grid) criteria.push_back(zeta_criteria(cfg, kind, z, seed));
  ZetaCalibration out;
  out.scores = score_candidates(criteria, cfg.calibration);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto &s : out.scores)
    if (s.score >= best) {
      best = s.score;
      out.zeta = s.criteria.zeta;
    }
  return out;
}

// ---- hold parameters against the reference table --------------------------------

struct TableCell {
  std::string object;
  FingertipKind kind = FingertipKind::BioTacSP;
  double max_mass_g = 0.0;
  bool contact_lost = false; // expected contact-loss annotation
};

/// Heaviest total mass held in the reference experiments.
inline std::vector<TableCell> reference_table() {
  using K = FingertipKind;
  return {
      {"can", K::BioTacSP, 850.0},        {"can", K::WtsFt, 300.0},
      {"cube_box", K::BioTacSP, 450.0},   {"cube_box", K::WtsFt, 350.0},
      {"tea_cup", K::BioTacSP, 500.0},    {"tea_cup", K::WtsFt, 400.0},
      {"bottle", K::BioTacSP, 510.0},     {"bottle", K::WtsFt, 510.0, true},
      {"plastic_cup", K::BioTacSP, 350.0}, {"plastic_cup", K::WtsFt, 350.0},
  };
}

struct PlantFitStep {
  std::string object;
  std::string parameter;
  double value = 0.0;
  double simulated_g = 0.0;
  double target_g = 0.0;
};

struct PlantFit {
  Config config;
  std::vector<PlantFitStep> steps;
  double total_abs_error_g = 0.0;
};

namespace detail {

inline double sweep_max(const Config &cfg, const std::string &object, FingertipKind kind, std::uint64_t seed) {
  return perturbation_weight_sweep(cfg, object, kind, seed).max_held_total_g.value_or(0.0);
}

/// Smallest x in [lo, hi] with f(x) >= target, for f non-decreasing.
inline double lower_crossing(const std::function<double(double)> &f, double lo, double hi, double target,
                             double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) >= target - 1e-9 ? hi : lo) = mid;
  }
  return hi;
}

} // namespace detail

/// Fits each object's engagement to the curved-pad cell and its flat-pad
/// ratio to the flat-pad cell. The simulated max mass is non-decreasing in
/// both, so each parameter is placed in the middle of the interval that
/// reproduces the reference value. A cell at the object's capacity is
/// reproduced by every value above the crossing; there the engagement is
/// raised far enough for the flat-pad cell as well. When the flat-pad cell
/// is out of reach even at ratio 1, the object's friction is lowered to the
/// flat pad's and the object is fitted again.
inline PlantFit calibrate_plant(Config cfg, std::uint64_t seed = 1, double tol = 1e-3) {
  PlantFit fit;
  const auto table = reference_table();
  auto target = [&](const std::string &obj, FingertipKind k) {
    for (const auto &c : table)
      if (c.object == obj && c.kind == k) return c.max_mass_g;
    throw LookupError("no reference cell for '" + obj + "'");
  };
  const double step = cfg.sweep.mass_step_g;
  const double flat_mu = cfg.kind(FingertipKind::WtsFt).layout.friction_mu;

  for (auto &object : cfg.objects) {
    const double t_bio = target(object.name, FingertipKind::BioTacSP);
    const double t_wts = target(object.name, FingertipKind::WtsFt);
    auto at_capacity = [&](double t) { return object.capacity_total_g > 0.0 && t >= object.capacity_total_g - 1e-9; };
    auto simulate = [&](FingertipKind kind, double engagement, double ratio) {
      const ObjectSpec saved = object;
      object.engagement = engagement;
      object.flat_engagement_ratio = ratio;
      const double m = detail::sweep_max(cfg, object.name, kind, seed);
      object = saved;
      return m;
    };
    auto place = [&](const std::function<double(double)> &f, double t, bool capped, double floor) {
      const double lo = detail::lower_crossing(f, floor, 1.0, t, tol);
      const double hi = capped ? std::min(1.0, lo * 1.25) : detail::lower_crossing(f, lo, 1.0, t + step, tol);
      return 0.5 * (lo + hi);
    };

    for (int attempt = 0; attempt < 2; ++attempt) {
      auto bio = [&](double e) { return simulate(FingertipKind::BioTacSP, e, 1.0); };
      double engagement = 0.0;
      if (at_capacity(t_bio)) {
        auto flat_full = [&](double e) { return simulate(FingertipKind::WtsFt, e, 1.0); };
        const double need = std::max(detail::lower_crossing(bio, 1e-3, 1.0, t_bio, tol),
                                     detail::lower_crossing(flat_full, 1e-3, 1.0, t_wts, tol));
        engagement = std::min(1.0, need * 1.25);
      } else {
        engagement = place(bio, t_bio, false, 1e-3);
      }
      auto flat = [&](double r) { return simulate(FingertipKind::WtsFt, engagement, r); };
      const double reach = flat(1.0);
      if (reach < t_wts && object.surface_friction > flat_mu && attempt == 0) {
        fit.steps.push_back({object.name, "surface_friction", flat_mu, reach, t_wts});
        object.surface_friction = flat_mu;
        continue;
      }
      object.engagement = engagement;
      fit.steps.push_back({object.name, "engagement", engagement, bio(engagement), t_bio});
      object.flat_engagement_ratio = place(flat, t_wts, at_capacity(t_wts), 1e-3);
      fit.steps.push_back({object.name, "flat_engagement_ratio", object.flat_engagement_ratio,
                           flat(object.flat_engagement_ratio), t_wts});
      break;
    }
  }
  for (const auto &c : table)
    fit.total_abs_error_g += std::abs(detail::sweep_max(cfg, c.object, c.kind, seed) - c.max_mass_g);
  fit.config = std::move(cfg);
  return fit;
}

} // namespace tgrasp

#endif // TGRASP_CALIBRATION_HPP
