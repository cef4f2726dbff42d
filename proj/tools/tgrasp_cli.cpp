// Command-line front end for the grasp assessment simulator.

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tgrasp/tgrasp.hpp"

using namespace tgrasp;

namespace {

FingertipKind kind_arg(const std::string &s) { return parse_kind(s); }

void print_outcome(const GraspOutcome &o) {
  std::cout << "outcome " << to_string(o.status) << " slip_mm " << o.slip_mm << " peak_load_factor "
            << o.peak_load_factor << (o.held_by_palm ? " held_by_palm" : "") << "\n";
}

int cmd_touch(const Config &cfg, const std::string &kind) {
  const double d = touch_sensitivity_test(cfg.kind(kind_arg(kind)).layout);
  std::cout << "touch_depth_mm " << d << "\n";
  return 0;
}

int cmd_slip(const Config &cfg, const std::string &kind, const std::string &object, const std::string &out) {
  const auto r = slip_resistance_test(cfg, kind_arg(kind), object);
  std::cout << "force_n,slip_mm\n";
  for (const auto &p : r.samples) std::cout << p.x << "," << p.y << "\n";
  std::cout << "# fit a=" << r.fit.a << " b=" << r.fit.b << " c=" << r.fit.c << " onset_n=" << r.fitted_onset_n << "\n";
  if (!out.empty()) {
    nlohmann::json j{{"kind", kind},
                     {"object", object},
                     {"a", r.fit.a},
                     {"b", r.fit.b},
                     {"c", r.fit.c},
                     {"onset_n", r.onset_n},
                     {"fitted_onset_n", r.fitted_onset_n}};
    write_text_file(out, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_sweep(const Config &cfg, const std::string &object, const std::string &kind, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = perturbation_weight_sweep(cfg, object, kind_arg(kind), seed);
  for (const auto &s : r.steps)
    std::cout << "mass_g " << s.total_mass_g << " failures " << s.failures << "/" << cfg.sweep.repetitions
              << " contact_lost " << s.contact_lost << (s.passed ? " pass" : " FAIL") << "\n";
  std::cout << "max_held_g " << (r.max_held_total_g ? detail::fmt_double(*r.max_held_total_g) : "none");
  if (r.contact_lost_above_g) std::cout << " contact_lost_above_g " << *r.contact_lost_above_g;
  std::cout << " elapsed_s "
            << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << "\n";
  return 0;
}

struct RunArgs {
  std::string object, kind, log, csv, colormap;
  double mass = 0.0;
  std::uint64_t seed = 1;
  bool concurrent = false;
};

int cmd_run(const Config &cfg, const RunArgs &a) {
  const FingertipKind kind = kind_arg(a.kind);
  RunOptions opts;
  opts.mode = a.concurrent ? ExecutionMode::Concurrent : ExecutionMode::Deterministic;
  const RunResult r = run_main_sequence(cfg, a.object, kind, a.mass, a.seed, opts);
  std::cout << "run_id " << r.log.meta.at("run_id").get<std::string>() << "\nphases";
  for (Phase p : r.trace) std::cout << " " << static_cast<int>(p);
  std::cout << "\n";
  print_outcome(r.outcome);
  if (!a.log.empty()) write_file(a.log, encode_log(r.log));
  if (!a.csv.empty()) write_text_file(a.csv, to_csv(record_from_log(r.log)));
  if (!a.colormap.empty()) {
    // Detection-source frame at the last tick of the shake.
    const SensorLayout &layout = cfg.kind(kind).layout;
    const bool raw = cfg.kind(kind).source == ContactSource::Raw;
    const double full_scale = raw ? kAdcMax : cfg.delta_max;
    const TopicId wanted = raw ? TopicId::Raw : TopicId::Normalized;
    std::int64_t cutoff = 0;
    for (const auto &rec : r.log.records)
      if (rec.topic == TopicId::JointsTarget && std::get<ControlCommand>(rec.payload).phase == Phase::Shake)
        cutoff = rec.timestamp_us;
    const LogRecord *pick = nullptr;
    for (const auto &rec : r.log.records)
      if (rec.topic == wanted && rec.timestamp_us <= cutoff) pick = &rec;
    for (std::size_t k = 0; pick && k < kFingers; ++k) {
      std::vector<double> v;
      if (pick->topic == TopicId::Raw) v = to_doubles(std::get<RawFrames>(pick->payload).fingers[k]);
      else v = std::get<NormalizedFrames>(pick->payload).fingers[k].values;
      const SpatialMap m = render_spatial_map(v, layout, full_scale);
      const std::string base = a.colormap + "_finger" + std::to_string(k);
      write_text_file(base + ".txt", to_text(m));
      write_text_file(base + ".ppm", to_ppm(m));
    }
  }
  return r.outcome.failed() ? 2 : 0;
}

int cmd_replay(const std::string &path, const std::string &out) {
  const auto bytes = read_file(path);
  const ReplayResult r = replay(bytes);
  std::cout << "records " << r.regenerated.records.size() << " mismatched " << r.mismatched_records
            << " byte_identical " << (r.bytes == bytes ? "yes" : "no") << " outcome_matches "
            << (r.outcome_matches ? "yes" : "no") << "\n";
  print_outcome(r.regenerated.outcome);
  if (!out.empty()) write_file(out, r.bytes);
  return r.mismatched_records == 0 && r.outcome_matches ? 0 : 1;
}

int cmd_report(const std::vector<std::string> &paths, int fail_threshold) {
  std::vector<RunLog> logs;
  for (const auto &p : paths) logs.push_back(decode_log(read_file(p)));
  const auto table = summarize_logs(logs, fail_threshold);
  std::cout << std::left << std::setw(14) << "object" << std::setw(8) << "kind" << "max_held_g\n";
  for (const auto &[cell, rc] : table) {
    std::cout << std::setw(14) << cell.first << std::setw(8) << cell.second
              << (rc.max_held_total_g ? detail::fmt_double(*rc.max_held_total_g) : "none")
              << (rc.contact_lost ? " (contact lost)" : "") << "\n";
  }
  return 0;
}

int cmd_calibrate(Config cfg, const std::string &kind, std::uint64_t seed) {
  const FingertipKind k = kind_arg(kind);
  const ZetaCalibration c = calibrate_zeta(cfg, k, cfg.kind(k).zeta_grid, seed);
  std::cout << "zeta,deformation_mm,efficiency,slip_mm,score\n";
  for (const auto &s : c.scores)
    std::cout << s.criteria.zeta << "," << s.criteria.deformation_mm << "," << s.criteria.efficiency << ","
              << s.criteria.slip_mm << "," << s.score << "\n";
  std::cout << "zeta " << c.zeta << "\n";
  return 0;
}

int cmd_calibrate_plant(const Config &cfg, std::uint64_t seed, const std::string &out) {
  const PlantFit fit = calibrate_plant(cfg, seed);
  for (const auto &s : fit.steps)
    std::cout << s.object << " " << s.parameter << " " << std::setprecision(6) << s.value << " simulated_g "
              << s.simulated_g << " target_g " << s.target_g << "\n";
  std::cout << "total_abs_error_g " << fit.total_abs_error_g << "\n";
  if (!out.empty()) write_text_file(out, to_json(fit.config).dump(2) + "\n");
  return 0;
}

int cmd_table(const Config &cfg, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  std::cout << std::left << std::setw(14) << "object" << std::setw(8) << "kind" << std::setw(12) << "simulated_g"
            << "reference_g\n";
  for (const auto &cell : reference_table()) {
    const auto r = perturbation_weight_sweep(cfg, cell.object, cell.kind, seed);
    std::cout << std::setw(14) << cell.object << std::setw(8) << to_string(cell.kind) << std::setw(12)
              << (r.max_held_total_g ? detail::fmt_double(*r.max_held_total_g) : "none") << cell.max_mass_g
              << (r.contact_lost_above_g ? " contact lost above " + detail::fmt_double(*r.contact_lost_above_g) + " g"
                                         : "")
              << "\n";
  }
  std::cout << "elapsed_s " << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << "\n";
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Tactile grasp assessment simulator"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON configuration file (merged over the defaults)");

  const std::vector<std::string> kinds{"biotac", "wts"};
  std::string kind, object, out;
  std::uint64_t seed = 1;

  auto *touch = app.add_subcommand("touch-test", "Smallest indentation producing a nonzero reading");
  touch->add_option("--kind", kind)->required()->check(CLI::IsMember(kinds));

  auto *slip = app.add_subcommand("slip-test", "Slip distance versus pull force with a quadratic fit");
  slip->add_option("--kind", kind)->required()->check(CLI::IsMember(kinds));
  slip->add_option("--object", object)->required();
  slip->add_option("--out", out, "write fitted coefficients (JSON)");

  auto *sweep = app.add_subcommand("sweep", "Perturbation weight sweep for one object");
  sweep->add_option("--object", object)->required();
  sweep->add_option("--kind", kind)->required()->check(CLI::IsMember(kinds));
  sweep->add_option("--seed", seed);

  RunArgs run_args;
  auto *run = app.add_subcommand("run", "One full assessment run");
  run->add_option("--object", run_args.object)->required();
  run->add_option("--kind", run_args.kind)->required()->check(CLI::IsMember(kinds));
  run->add_option("--mass", run_args.mass, "added mass in grams");
  run->add_option("--seed", run_args.seed);
  run->add_option("--log", run_args.log, "binary log output");
  run->add_option("--csv", run_args.csv, "CSV output");
  run->add_option("--colormap", run_args.colormap, "colour map output prefix (.txt and .ppm per finger)");
  run->add_flag("--concurrent", run_args.concurrent, "one thread per pipeline stage");

  std::string log_path;
  auto *rep = app.add_subcommand("replay", "Re-derive a recorded run from its raw inputs");
  rep->add_option("log", log_path)->required()->check(CLI::ExistingFile);
  rep->add_option("--out", out, "write the regenerated log");

  std::vector<std::string> logs;
  int fail_threshold = 5;
  auto *report = app.add_subcommand("report", "Max held mass per object and kind from run logs");
  report->add_option("logs", logs)->required()->check(CLI::ExistingFile);
  report->add_option("--fail-threshold", fail_threshold);

  auto *cal = app.add_subcommand("calibrate", "Grid search for the contact threshold");
  cal->add_option("--kind", kind)->required()->check(CLI::IsMember(kinds));
  cal->add_option("--seed", seed);

  auto *calp = app.add_subcommand("calibrate-plant", "Fit per-object hold parameters to the reference table");
  calp->add_option("--seed", seed);
  calp->add_option("--out", out, "write the fitted configuration (JSON)");

  auto *table = app.add_subcommand("table", "Weight sweeps for every reference cell");
  table->add_option("--seed", seed);

  auto *show = app.add_subcommand("show-config", "Print the effective configuration as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    const Config cfg = load_config(config_path);
    if (*touch) return cmd_touch(cfg, kind);
    if (*slip) return cmd_slip(cfg, kind, object, out);
    if (*sweep) return cmd_sweep(cfg, object, kind, seed);
    if (*run) return cmd_run(cfg, run_args);
    if (*rep) return cmd_replay(log_path, out);
    if (*report) return cmd_report(logs, fail_threshold);
    if (*cal) return cmd_calibrate(cfg, kind, seed);
    if (*calp) return cmd_calibrate_plant(cfg, seed, out);
    if (*table) return cmd_table(cfg, seed);
    if (*show) std::cout << to_json(cfg).dump(2) << "\n";
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
