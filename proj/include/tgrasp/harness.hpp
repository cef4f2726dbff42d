#ifndef TGRASP_HARNESS_HPP
#define TGRASP_HARNESS_HPP

// Experiment harness: full assessment runs under either scheduler, the
// touch-sensitivity, slip-resistance and weight-sweep protocols, and log
// replay.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "tgrasp/bus.hpp"
#include "tgrasp/config.hpp"
#include "tgrasp/log.hpp"
#include "tgrasp/stages.hpp"

namespace tgrasp {

enum class ExecutionMode : std::uint8_t { Deterministic, Concurrent };

struct RunOptions {
  ExecutionMode mode = ExecutionMode::Deterministic;
  bool record = true;
  bool grasp_request = true;
  int idle_limit_ticks = 50;
};

struct RunResult {
  GraspOutcome outcome;
  std::vector<Phase> trace;
  int limit_violations = 0;
  int grasp_ticks = 0;
  std::int64_t ticks = 0;
  RunLog log; // empty records unless RunOptions::record
};

inline std::string run_id(std::string_view object, FingertipKind kind, double added_mass_g, std::uint64_t seed) {
  std::ostringstream os;
  os << object << "-" << to_string(kind) << "-" << detail::fmt_double(added_mass_g) << "g-s" << seed;
  return os.str();
}

inline nlohmann::json run_meta(const Config &cfg, std::string_view object, FingertipKind kind, double added_mass_g,
                               std::uint64_t seed) {
  return {{"format", "tgrasp-log"},
          {"run_id", run_id(object, kind, added_mass_g, seed)},
          {"kind", std::string(to_string(kind))},
          {"object", std::string(object)},
          {"added_mass_g", added_mass_g},
          {"seed", seed},
          {"config", to_json(cfg)}};
}

namespace detail {

/// Drains recorder subscriptions into canonical log records.
inline std::vector<LogRecord> drain_records(std::vector<std::shared_ptr<Subscription>> &subs) {
  std::vector<LogRecord> out;
  for (auto &sub : subs)
    while (auto m = sub->try_next())
      if (auto id = topic_id_for(m->topic)) out.push_back({*id, m->timestamp_us, std::move(m->payload)});
  sort_records(out);
  return out;
}

template <typename T> const T &as(const std::optional<BusMessage> &m) {
  if (!m) throw StateError("pipeline stream ended early");
  return std::get<T>(m->payload);
}

} // namespace detail

/// One complete grasp assessment: idle, pick-up, grasp, lift, shake, drop-off, release.
inline RunResult run_main_sequence(const Config &cfg, std::string_view object_name, FingertipKind kind,
                                   double added_mass_g, std::uint64_t seed, const RunOptions &opts = {}) {
  cfg.kind(kind).contact(); // throws when uncalibrated
  ObjectSpec object = cfg.object(object_name);
  object.added_mass_g = added_mass_g;

  FrameSourceStage source(cfg, object, kind, seed);
  ContactDetectorStage detector(cfg, kind);
  ContactCallbackStage callback;
  AdaptiveGraspStage controller(cfg, object_name, opts.grasp_request, opts.idle_limit_ticks);

  MessageBus bus;
  advertise_standard_topics(bus);
  auto src_cmd = bus.subscribe(topics::kJointsTarget);
  auto det_raw = bus.subscribe(topics::kRaw);
  auto cb_contact = bus.subscribe(topics::kContact);
  auto ctl_global = bus.subscribe(topics::kContactGlobal);
  auto ctl_actual = bus.subscribe(topics::kJointsActual);
  auto ctl_status = bus.subscribe(topics::kGraspStatus);
  std::vector<std::shared_ptr<Subscription>> recorders;
  if (opts.record)
    for (auto topic : {topics::kRaw, topics::kNormalized, topics::kContact, topics::kJointsActual,
                       topics::kJointsTarget, topics::kImu, topics::kGraspStatus})
      recorders.push_back(bus.subscribe(topic));

  const std::int64_t tick_us = cfg.timing.tick_us();

  auto source_step = [&](const BusMessage &m) {
    const auto &cmd = std::get<ControlCommand>(m.payload);
    const SourceOutput out = source.on_command(cmd, m.timestamp_us / tick_us);
    bus.publish(topics::kRaw, out.timestamp_us, out.raw);
    bus.publish(topics::kJointsActual, out.timestamp_us, out.actual);
    bus.publish(topics::kImu, out.timestamp_us, out.imu);
    bus.publish(topics::kGraspStatus, out.timestamp_us, out.status);
  };
  auto detector_step = [&](const BusMessage &m) {
    const DetectorOutput d = detector.on_raw(std::get<RawFrames>(m.payload));
    bus.publish(topics::kNormalized, m.timestamp_us, d.normalized);
    bus.publish(topics::kContact, m.timestamp_us, d.contact);
  };
  auto callback_step = [&](const BusMessage &m) {
    bus.publish(topics::kContactGlobal, m.timestamp_us, callback.on_contact(std::get<ContactVector>(m.payload)));
  };

  ControllerInputs inputs;
  inputs.actual = cfg.limits.max;
  std::int64_t tick = 0;

  if (opts.mode == ExecutionMode::Deterministic) {
    for (;; ++tick) {
      const ControlCommand cmd = controller.on_inputs(inputs);
      bus.publish(topics::kJointsTarget, tick * tick_us, cmd);
      if (cmd.done) break;
      source_step(*src_cmd->try_next());
      detector_step(*det_raw->try_next());
      callback_step(*cb_contact->try_next());
      inputs.contact = detail::as<ContactVector>(ctl_global->try_next());
      inputs.actual = detail::as<JointState>(ctl_actual->try_next()).q;
      inputs.status = detail::as<GraspStatus>(ctl_status->try_next());
    }
  } else {
    std::mutex err_mutex;
    std::exception_ptr error;
    auto guarded = [&](auto &&body) {
      return [&, body]() mutable {
        try {
          body();
        } catch (...) {
          {
            std::lock_guard lock(err_mutex);
            if (!error) error = std::current_exception();
          }
          bus.close();
        }
      };
    };
    std::thread source_thread(guarded([&] {
      while (auto m = src_cmd->next()) {
        if (std::get<ControlCommand>(m->payload).done) break;
        source_step(*m);
      }
    }));
    std::thread detector_thread(guarded([&] {
      while (auto m = det_raw->next()) detector_step(*m);
    }));
    std::thread callback_thread(guarded([&] {
      while (auto m = cb_contact->next()) callback_step(*m);
    }));
    std::thread control_thread(guarded([&] {
      for (;; ++tick) {
        const ControlCommand cmd = controller.on_inputs(inputs);
        bus.publish(topics::kJointsTarget, tick * tick_us, cmd);
        if (cmd.done) break;
        inputs.actual = detail::as<JointState>(ctl_actual->next()).q;
        inputs.status = detail::as<GraspStatus>(ctl_status->next());
        inputs.contact = detail::as<ContactVector>(ctl_global->next());
      }
    }));
    control_thread.join();
    source_thread.join();
    bus.close();
    detector_thread.join();
    callback_thread.join();
    if (error) std::rethrow_exception(error);
  }

  RunResult result;
  result.outcome = controller.outcome();
  result.trace = controller.trace();
  result.limit_violations = controller.limit_violations();
  result.grasp_ticks = controller.grasp_ticks();
  result.ticks = tick;
  if (opts.record) {
    result.log.meta = run_meta(cfg, object_name, kind, added_mass_g, seed);
    result.log.records = detail::drain_records(recorders);
    result.log.outcome = result.outcome;
    result.log.outcome_timestamp_us = tick * tick_us;
  }
  return result;
}

// ---- touch sensitivity -----------------------------------------------------------

/// Smallest uniform indentation (in `step_mm` increments) at which any sensor reads above zero.
inline double touch_sensitivity_test(const SensorLayout &layout, double step_mm = 0.5, double max_depth_mm = 50.0) {
  NoiseConfig quiet;
  quiet.sigma_counts = 0.0;
  ContactField field;
  for (int i = 0;; ++i) {
    const double depth = i * step_mm;
    if (depth > max_depth_mm) break;
    field.depths_mm.assign(static_cast<std::size_t>(layout.sensor_count), depth);
    const FingertipFrame f = synthesize_frame(layout, field, 0, 0, quiet);
    if (std::any_of(f.values.begin(), f.values.end(), [](std::uint16_t v) { return v > 0; })) return depth;
  }
  throw ProtocolError("no contact registered within " + detail::fmt_double(max_depth_mm) + " mm");
}

// ---- least squares -------------------------------------------------------------

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Quadratic {
  double a = 0.0, b = 0.0, c = 0.0; // y = a x^2 + b x + c
  double operator()(double x) const noexcept { return (a * x + b) * x + c; }
};

/// Least-squares quadratic through `points` (column-pivoted QR of the Vandermonde system).
inline Quadratic polyfit2(std::span<const Point2> points) {
  std::set<double> distinct;
  for (const auto &p : points) distinct.insert(p.x);
  if (points.size() < 3 || distinct.size() < 3) throw FitError("quadratic fit needs at least 3 distinct x values");
  Eigen::MatrixXd v(static_cast<Eigen::Index>(points.size()), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    v(r, 0) = points[i].x * points[i].x;
    v(r, 1) = points[i].x;
    v(r, 2) = 1.0;
    y(r) = points[i].y;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(v);
  if (qr.rank() < 3) throw FitError("rank-deficient quadratic fit");
  const Eigen::Vector3d coef = qr.solve(y);
  return {coef(0), coef(1), coef(2)};
}

// ---- slip resistance -----------------------------------------------------------

struct SlipTestResult {
  std::vector<Point2> samples; // (force N, slip mm)
  Quadratic fit;
  double onset_n = 0.0;        // static friction capacity of the grasp
  double fitted_onset_n = 0.0; // larger root of the fitted curve
};

/// Static friction capacity of a grasp held at the tracking force.
inline double grasp_onset_force(const Config &cfg, FingertipKind kind, const ObjectSpec &object) {
  const SensorLayout &layout = cfg.kind(kind).layout;
  double engagement = object.engagement;
  if (layout.surface_shape == SurfaceShape::Flat) engagement *= object.flat_engagement_ratio;
  return static_cast<double>(kFingers) * cfg.plant.tracking_force_n * std::min(layout.friction_mu, object.surface_friction) *
         engagement;
}

inline SlipTestResult slip_resistance_test(const Config &cfg, FingertipKind kind, std::string_view object_name) {
  const ObjectSpec &object = cfg.object(object_name);
  SlipTestResult out;
  out.onset_n = grasp_onset_force(cfg, kind, object);
  const SlipCurve &curve = cfg.kind(kind).slip;
  std::vector<Point2> slipping;
  for (int i = 0;; ++i) {
    const double f = i * cfg.slip_test.force_step_n;
    if (f > cfg.slip_test.max_force_n) break;
    const double s = slip_pull(f, out.onset_n, curve);
    out.samples.push_back({f, s});
    if (s > 0.0) slipping.push_back({f, s});
  }
  out.fit = polyfit2(slipping);
  const double disc = out.fit.b * out.fit.b - 4.0 * out.fit.a * out.fit.c;
  out.fitted_onset_n = (-out.fit.b + std::sqrt(std::max(0.0, disc))) / (2.0 * out.fit.a);
  return out;
}

// ---- perturbation weight sweep -------------------------------------------------

struct SweepStep {
  double total_mass_g = 0.0;
  int failures = 0;
  int contact_lost = 0;
  bool passed = false;
};

struct SweepResult {
  std::optional<double> max_held_total_g;
  std::vector<SweepStep> steps;
  std::optional<double> contact_lost_above_g; // heaviest passing mass without contact loss, if loss occurred
  int limit_violations = 0;
};

inline std::uint64_t repetition_seed(std::uint64_t seed, int rep) {
  return derive_seed({seed, static_cast<std::uint64_t>(rep), 0x5eedULL});
}

/// Adds mass in fixed increments until a mass fails (>= fail_threshold of the
/// repetitions dropped or lost contact unsupported) or the object is full.
inline SweepResult perturbation_weight_sweep(const Config &cfg, std::string_view object_name, FingertipKind kind,
                                             std::uint64_t seed, ExecutionMode mode = ExecutionMode::Deterministic) {
  const ObjectSpec &object = cfg.object(object_name);
  SweepResult result;
  std::optional<double> last_clean;
  RunOptions opts;
  opts.mode = mode;
  opts.record = false;
  for (int step = 0;; ++step) {
    const double added = step * cfg.sweep.mass_step_g;
    const double total = object.base_mass_g + added;
    if (added > cfg.sweep.max_added_g) break;
    if (object.capacity_total_g > 0.0 && total > object.capacity_total_g + 1e-9) break;
    SweepStep s;
    s.total_mass_g = total;
    for (int rep = 0; rep < cfg.sweep.repetitions; ++rep) {
      const RunResult r = run_main_sequence(cfg, object_name, kind, added, repetition_seed(seed, rep), opts);
      result.limit_violations += r.limit_violations;
      if (r.outcome.failed()) ++s.failures;
      if (r.outcome.status == OutcomeStatus::ContactLost) ++s.contact_lost;
    }
    s.passed = s.failures < cfg.sweep.fail_threshold;
    result.steps.push_back(s);
    if (!s.passed) break;
    result.max_held_total_g = total;
    if (s.contact_lost == 0) last_clean = total;
    else if (!result.contact_lost_above_g) result.contact_lost_above_g = last_clean.value_or(0.0);
  }
  return result;
}

// ---- replay --------------------------------------------------------------------

struct ReplayResult {
  RunLog regenerated;
  std::vector<std::uint8_t> bytes; // regenerated log, encoded
  std::vector<ContactVector> contacts;
  std::size_t mismatched_records = 0;
  bool outcome_matches = true; // only evaluated when resimulating
};

/// Re-derives every processed stream from the recorded raw inputs. With
/// `resimulate` the run is also repeated to check the outcome.
inline ReplayResult replay(const std::vector<std::uint8_t> &bytes, bool resimulate = true) {
  const RunLog log = decode_log(bytes);
  const Config cfg = config_from_json(log.meta.at("config"));
  const FingertipKind kind = parse_kind(log.meta.at("kind").get<std::string>());
  const std::string object = log.meta.at("object").get<std::string>();
  const double added = log.meta.at("added_mass_g").get<double>();
  const std::uint64_t seed = log.meta.at("seed").get<std::uint64_t>();

  ContactDetectorStage detector(cfg, kind);
  ContactCallbackStage callback;
  AdaptiveGraspStage controller(cfg, object);
  ControllerInputs inputs;
  inputs.actual = cfg.limits.max;

  ReplayResult out;
  out.regenerated.meta = log.meta;
  out.regenerated.outcome = log.outcome;
  out.regenerated.outcome_timestamp_us = log.outcome_timestamp_us;

  std::size_t i = 0;
  while (i < log.records.size()) {
    const std::int64_t ts = log.records[i].timestamp_us;
    std::size_t end = i;
    while (end < log.records.size() && log.records[end].timestamp_us == ts) ++end;

    std::vector<LogRecord> group;
    const ControlCommand cmd = controller.done() ? ControlCommand{} : controller.on_inputs(inputs);
    for (std::size_t r = i; r < end; ++r) {
      const LogRecord &rec = log.records[r];
      switch (rec.topic) {
      case TopicId::Raw: {
        const DetectorOutput d = detector.on_raw(std::get<RawFrames>(rec.payload));
        group.push_back(rec);
        group.push_back({TopicId::Normalized, ts, d.normalized});
        group.push_back({TopicId::Contact, ts, d.contact});
        out.contacts.push_back(d.contact);
        inputs.contact = callback.on_contact(d.contact);
        break;
      }
      case TopicId::JointsTarget: group.push_back({TopicId::JointsTarget, ts, cmd}); break;
      case TopicId::JointsActual:
        inputs.actual = std::get<JointState>(rec.payload).q;
        group.push_back(rec);
        break;
      case TopicId::GraspStatus:
        inputs.status = std::get<GraspStatus>(rec.payload);
        group.push_back(rec);
        break;
      case TopicId::Normalized:
      case TopicId::Contact: break; // regenerated from raw
      default: group.push_back(rec); break;
      }
    }
    sort_records(group);
    for (std::size_t r = i, g = 0; r < end || g < group.size(); ++r, ++g) {
      if (r >= end || g >= group.size() || !(log.records[r] == group[g])) ++out.mismatched_records;
    }
    out.regenerated.records.insert(out.regenerated.records.end(), group.begin(), group.end());
    i = end;
  }
  out.bytes = encode_log(out.regenerated);
  if (resimulate) {
    const RunResult r = run_main_sequence(cfg, object, kind, added, seed, {ExecutionMode::Deterministic, false});
    out.outcome_matches = r.outcome == log.outcome;
  }
  return out;
}

// ---- report --------------------------------------------------------------------

struct ReportCell {
  std::optional<double> max_held_total_g;
  bool contact_lost = false;
};

/// Table of heaviest passing mass per (object, kind) from a set of run logs.
inline std::map<std::pair<std::string, std::string>, ReportCell> summarize_logs(const std::vector<RunLog> &logs,
                                                                                int fail_threshold = 5) {
  struct Tally {
    int runs = 0, failures = 0, contact_lost = 0;
  };
  std::map<std::pair<std::string, std::string>, std::map<double, Tally>> by_cell;
  for (const auto &log : logs) {
    const auto cfg = log.meta.at("config");
    const std::string object = log.meta.at("object").get<std::string>();
    double base = 0.0;
    for (const auto &o : cfg.at("objects"))
      if (o.at("name") == object) base = o.at("base_mass_g").get<double>();
    auto &t = by_cell[{object, log.meta.at("kind").get<std::string>()}][base + log.meta.at("added_mass_g").get<double>()];
    ++t.runs;
    if (log.outcome.failed()) ++t.failures;
    if (log.outcome.status == OutcomeStatus::ContactLost) ++t.contact_lost;
  }
  std::map<std::pair<std::string, std::string>, ReportCell> out;
  for (const auto &[cell, masses] : by_cell) {
    ReportCell rc;
    for (const auto &[mass, t] : masses) {
      if (t.failures >= fail_threshold) break;
      rc.max_held_total_g = mass;
      rc.contact_lost = rc.contact_lost || t.contact_lost > 0;
    }
    out[cell] = rc;
  }
  return out;
}

} // namespace tgrasp

#endif // TGRASP_HARNESS_HPP
