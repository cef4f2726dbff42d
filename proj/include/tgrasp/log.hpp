#ifndef TGRASP_LOG_HPP
#define TGRASP_LOG_HPP

// Binary run logs and CSV export. The byte layout is specified in
// docs/log-format.md; all integers and doubles are little-endian.

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tgrasp/errors.hpp"
#include "tgrasp/messages.hpp"

namespace tgrasp {

inline constexpr std::array<char, 8> kLogMagic{'T', 'G', 'R', 'A', 'S', 'P', 'L', 'G'};
inline constexpr std::uint16_t kLogVersion = 1;

enum class TopicId : std::uint8_t {
  Raw = 1,
  Normalized = 2,
  Contact = 3,
  JointsActual = 4,
  JointsTarget = 5,
  Imu = 6,
  GraspStatus = 7,
  Outcome = 8,
};

inline std::optional<TopicId> topic_id_for(std::string_view topic) {
  if (topic == topics::kRaw) return TopicId::Raw;
  if (topic == topics::kNormalized) return TopicId::Normalized;
  if (topic == topics::kContact) return TopicId::Contact;
  if (topic == topics::kJointsActual) return TopicId::JointsActual;
  if (topic == topics::kJointsTarget) return TopicId::JointsTarget;
  if (topic == topics::kImu) return TopicId::Imu;
  if (topic == topics::kGraspStatus) return TopicId::GraspStatus;
  return std::nullopt;
}

struct LogRecord {
  TopicId topic = TopicId::Raw;
  std::int64_t timestamp_us = 0;
  Payload payload;

  bool operator==(const LogRecord &) const = default;
};

struct RunLog {
  nlohmann::json meta;
  std::vector<LogRecord> records; // sorted by (timestamp, topic id)
  GraspOutcome outcome;
  std::int64_t outcome_timestamp_us = 0;
};

/// Canonical record order: by timestamp, then topic id.
inline void sort_records(std::vector<LogRecord> &records) {
  std::stable_sort(records.begin(), records.end(), [](const LogRecord &a, const LogRecord &b) {
    if (a.timestamp_us != b.timestamp_us) return a.timestamp_us < b.timestamp_us;
    return a.topic < b.topic;
  });
}

namespace detail {

class Writer {
public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) { put(v); }
  void u32(std::uint32_t v) { put(v); }
  void i64(std::int64_t v) { put(static_cast<std::uint64_t>(v)); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t> &buffer() { return buf_; }

private:
  template <typename U> void put(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> buf_;
};

class Reader {
public:
  Reader(const std::uint8_t *data, std::size_t size, std::size_t base) : data_(data), size_(size), base_(base) {}

  std::uint8_t u8() { return get<std::uint8_t>(); }
  std::uint16_t u16() { return get<std::uint16_t>(); }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::int64_t i64() { return static_cast<std::int64_t>(get<std::uint64_t>()); }
  double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char *>(data_ + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t offset() const { return base_ + pos_; }
  bool at_end() const { return pos_ == size_; }

private:
  void need(std::size_t n) const {
    if (size_ - pos_ < n) throw ParseError("truncated log", base_ + pos_);
  }
  template <typename U> U get() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<U>(data_[pos_ + i]) << (8 * i));
    pos_ += sizeof(U);
    return v;
  }

  const std::uint8_t *data_;
  std::size_t size_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

inline void write_outcome(Writer &w, const GraspOutcome &o) {
  w.u8(static_cast<std::uint8_t>(o.status));
  w.u8(o.held_by_palm ? 1 : 0);
  w.f64(o.slip_mm);
  w.f64(o.peak_load_factor);
}

inline GraspOutcome read_outcome(Reader &r) {
  GraspOutcome o;
  const auto status = r.u8();
  if (status > 3) throw ParseError("bad outcome status", r.offset() - 1);
  o.status = static_cast<OutcomeStatus>(status);
  o.held_by_palm = r.u8() != 0;
  o.slip_mm = r.f64();
  o.peak_load_factor = r.f64();
  return o;
}

inline void write_payload(Writer &w, TopicId id, const Payload &p) {
  switch (id) {
  case TopicId::Raw: {
    const auto &raw = std::get<RawFrames>(p);
    w.u8(static_cast<std::uint8_t>(raw.fingers[0].kind));
    for (const auto &f : raw.fingers) {
      w.i64(f.timestamp_us);
      w.u16(static_cast<std::uint16_t>(f.values.size()));
      for (auto v : f.values) w.u16(v);
      if (f.kind == FingertipKind::BioTacSP) {
        w.u16(f.pac);
        w.u16(f.pdc);
        w.u16(f.tac);
        w.u16(f.tdc);
      }
    }
    break;
  }
  case TopicId::Normalized:
    for (const auto &f : std::get<NormalizedFrames>(p).fingers) {
      w.i64(f.timestamp_us);
      w.u16(static_cast<std::uint16_t>(f.values.size()));
      for (double v : f.values) w.f64(v);
    }
    break;
  case TopicId::Contact: w.u8(std::get<ContactVector>(p).bits()); break;
  case TopicId::JointsActual:
    for (double q : std::get<JointState>(p).q) w.f64(q);
    break;
  case TopicId::JointsTarget: {
    const auto &c = std::get<ControlCommand>(p);
    w.u8(static_cast<std::uint8_t>(c.phase));
    w.u8(c.done ? 1 : 0);
    for (double q : c.targets) w.f64(q);
    break;
  }
  case TopicId::Imu: {
    const auto &s = std::get<ImuSample>(p);
    w.f64(s.yaw_deg);
    w.f64(s.pitch_deg);
    break;
  }
  case TopicId::GraspStatus: write_outcome(w, std::get<GraspStatus>(p)); break;
  case TopicId::Outcome: break;
  }
}

inline Payload read_payload(Reader &r, TopicId id, std::int64_t ts) {
  switch (id) {
  case TopicId::Raw: {
    RawFrames raw;
    const auto kind_byte = r.u8();
    if (kind_byte > 1) throw ParseError("bad fingertip kind", r.offset() - 1);
    const auto kind = static_cast<FingertipKind>(kind_byte);
    for (auto &f : raw.fingers) {
      f.kind = kind;
      f.timestamp_us = r.i64();
      const auto n = r.u16();
      f.values.resize(n);
      for (auto &v : f.values) v = r.u16();
      if (kind == FingertipKind::BioTacSP) {
        f.pac = r.u16();
        f.pdc = r.u16();
        f.tac = r.u16();
        f.tdc = r.u16();
      }
    }
    return raw;
  }
  case TopicId::Normalized: {
    NormalizedFrames nf;
    for (auto &f : nf.fingers) {
      f.timestamp_us = r.i64();
      const auto n = r.u16();
      f.values.resize(n);
      for (double &v : f.values) v = r.f64();
    }
    return nf;
  }
  case TopicId::Contact: return ContactVector::from_bits(r.u8());
  case TopicId::JointsActual: {
    JointState s;
    for (double &q : s.q) q = r.f64();
    return s;
  }
  case TopicId::JointsTarget: {
    ControlCommand c;
    const auto phase = r.u8();
    if (phase < 1 || phase > 7) throw ParseError("bad phase", r.offset() - 1);
    c.phase = static_cast<Phase>(phase);
    c.done = r.u8() != 0;
    for (double &q : c.targets) q = r.f64();
    return c;
  }
  case TopicId::Imu: {
    ImuSample s;
    s.timestamp_us = ts;
    s.yaw_deg = r.f64();
    s.pitch_deg = r.f64();
    return s;
  }
  case TopicId::GraspStatus: return read_outcome(r);
  case TopicId::Outcome: break;
  }
  throw ParseError("unexpected topic", r.offset());
}

} // namespace detail

inline std::vector<std::uint8_t> encode_log(const RunLog &log) {
  detail::Writer w;
  for (char c : kLogMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u16(kLogVersion);
  w.u16(0);
  const std::string meta = log.meta.dump();
  w.u32(static_cast<std::uint32_t>(meta.size()));
  w.bytes(meta);

  detail::Writer body;
  auto emit = [&](TopicId id, std::int64_t ts, auto &&write_body) {
    body.buffer().clear();
    body.u8(static_cast<std::uint8_t>(id));
    body.i64(ts);
    write_body(body);
    w.u32(static_cast<std::uint32_t>(body.buffer().size()));
    w.buffer().insert(w.buffer().end(), body.buffer().begin(), body.buffer().end());
  };
  for (const auto &rec : log.records)
    emit(rec.topic, rec.timestamp_us, [&](detail::Writer &b) { detail::write_payload(b, rec.topic, rec.payload); });
  emit(TopicId::Outcome, log.outcome_timestamp_us, [&](detail::Writer &b) { detail::write_outcome(b, log.outcome); });
  return std::move(w.buffer());
}

/// Parses a complete log. Any truncation or malformed record throws ParseError
/// naming the byte offset; nothing is returned for a partial log.
inline RunLog decode_log(const std::vector<std::uint8_t> &bytes) {
  detail::Reader header(bytes.data(), bytes.size(), 0);
  for (char c : kLogMagic)
    if (header.u8() != static_cast<std::uint8_t>(c)) throw ParseError("bad magic", header.offset() - 1);
  const auto version = header.u16();
  if (version != kLogVersion) throw ParseError("unsupported log version " + std::to_string(version), 8);
  header.u16();
  const auto meta_len = header.u32();
  const std::size_t meta_at = header.offset();
  RunLog log;
  log.meta = nlohmann::json::parse(header.str(meta_len), nullptr, false);
  if (log.meta.is_discarded()) throw ParseError("log metadata is not valid JSON", meta_at);

  std::size_t pos = header.offset();
  bool have_outcome = false;
  while (pos < bytes.size()) {
    if (have_outcome) throw ParseError("data after the outcome record", pos);
    detail::Reader len_reader(bytes.data() + pos, bytes.size() - pos, pos);
    const auto body_len = len_reader.u32();
    const std::size_t body_at = pos + 4;
    if (bytes.size() - body_at < body_len) throw ParseError("truncated record", body_at);
    detail::Reader r(bytes.data() + body_at, body_len, body_at);
    const auto id_byte = r.u8();
    if (id_byte < 1 || id_byte > 8) throw ParseError("unknown topic id " + std::to_string(id_byte), body_at);
    const auto id = static_cast<TopicId>(id_byte);
    const auto ts = r.i64();
    if (id == TopicId::Outcome) {
      log.outcome = detail::read_outcome(r);
      log.outcome_timestamp_us = ts;
      have_outcome = true;
    } else {
      log.records.push_back({id, ts, detail::read_payload(r, id, ts)});
    }
    if (!r.at_end()) throw ParseError("record length mismatch", r.offset());
    pos = body_at + body_len;
  }
  if (!have_outcome) throw ParseError("log ends without an outcome record", pos);
  return log;
}

inline void write_file(const std::string &path, const std::vector<std::uint8_t> &bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline std::vector<std::uint8_t> read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---- experiment record / CSV -----------------------------------------------

struct RecordRow {
  std::int64_t timestamp_us = 0;
  Phase phase = Phase::Idle;
  JointVector actual{};
  JointVector target{};
  ContactVector contact;
  std::array<std::vector<double>, kFingers> normalized;
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
  double slip_mm = 0.0;

  bool operator==(const RecordRow &) const = default;
};

struct ExperimentRecord {
  std::string run_id;
  FingertipKind kind = FingertipKind::BioTacSP;
  std::string object;
  double added_mass_g = 0.0;
  std::vector<RecordRow> rows;
  GraspOutcome outcome;

  bool operator==(const ExperimentRecord &) const = default;
};

/// Rows from a log's per-tick messages. Each row is a tick that produced plant output.
inline ExperimentRecord record_from_log(const RunLog &log) {
  ExperimentRecord rec;
  rec.run_id = log.meta.value("run_id", "");
  rec.kind = parse_kind(log.meta.value("kind", "biotac"));
  rec.object = log.meta.value("object", "");
  rec.added_mass_g = log.meta.value("added_mass_g", 0.0);
  rec.outcome = log.outcome;
  RecordRow *row = nullptr;
  for (const auto &r : log.records) {
    if (!row || row->timestamp_us != r.timestamp_us) {
      rec.rows.emplace_back();
      row = &rec.rows.back();
      row->timestamp_us = r.timestamp_us;
    }
    switch (r.topic) {
    case TopicId::Normalized: {
      const auto &nf = std::get<NormalizedFrames>(r.payload);
      for (std::size_t k = 0; k < kFingers; ++k) row->normalized[k] = nf.fingers[k].values;
      break;
    }
    case TopicId::Contact: row->contact = std::get<ContactVector>(r.payload); break;
    case TopicId::JointsActual: row->actual = std::get<JointState>(r.payload).q; break;
    case TopicId::JointsTarget: {
      const auto &c = std::get<ControlCommand>(r.payload);
      row->phase = c.phase;
      row->target = c.targets;
      break;
    }
    case TopicId::Imu: {
      const auto &s = std::get<ImuSample>(r.payload);
      row->yaw_deg = s.yaw_deg;
      row->pitch_deg = s.pitch_deg;
      break;
    }
    case TopicId::GraspStatus: row->slip_mm = std::get<GraspStatus>(r.payload).slip_mm; break;
    default: break;
    }
  }
  std::erase_if(rec.rows, [](const RecordRow &r) { return r.normalized[0].empty(); });
  return rec;
}

namespace detail {
inline std::string fmt_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}
inline double parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad number '" + std::string(s) + "'", 0);
  return v;
}
inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto p = line.find(sep, start);
    out.push_back(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}
} // namespace detail

/// CSV layout: two `#` metadata lines, a header row, one row per tick, and a
/// trailing `# outcome` line. Doubles use shortest round-trip formatting.
inline std::string to_csv(const ExperimentRecord &rec) {
  std::ostringstream os;
  os << "# run_id=" << rec.run_id << ",kind=" << to_string(rec.kind) << ",object=" << rec.object
     << ",added_mass_g=" << detail::fmt_double(rec.added_mass_g) << "\n";
  std::array<std::size_t, kFingers> widths{};
  if (!rec.rows.empty())
    for (std::size_t k = 0; k < kFingers; ++k) widths[k] = rec.rows.front().normalized[k].size();
  os << "# sensors=" << widths[0] << "," << widths[1] << "," << widths[2] << "\n";
  os << "timestamp_us,phase";
  for (int i = 0; i < 6; ++i) os << ",actual_" << i;
  for (int i = 0; i < 6; ++i) os << ",target_" << i;
  os << ",contact_thumb,contact_index,contact_ring,yaw_deg,pitch_deg,slip_mm";
  for (std::size_t k = 0; k < kFingers; ++k)
    for (std::size_t j = 0; j < widths[k]; ++j) os << ",f" << k << "_s" << j;
  os << "\n";
  for (const auto &r : rec.rows) {
    os << r.timestamp_us << "," << static_cast<int>(r.phase);
    for (double q : r.actual) os << "," << detail::fmt_double(q);
    for (double q : r.target) os << "," << detail::fmt_double(q);
    for (std::size_t k = 0; k < kFingers; ++k) os << "," << (r.contact[k] ? 1 : 0);
    os << "," << detail::fmt_double(r.yaw_deg) << "," << detail::fmt_double(r.pitch_deg) << ","
       << detail::fmt_double(r.slip_mm);
    for (std::size_t k = 0; k < kFingers; ++k) {
      if (r.normalized[k].size() != widths[k]) throw ConfigError("ragged normalized rows in record");
      for (double v : r.normalized[k]) os << "," << detail::fmt_double(v);
    }
    os << "\n";
  }
  os << "# outcome=" << to_string(rec.outcome.status) << ",held_by_palm=" << (rec.outcome.held_by_palm ? 1 : 0)
     << ",slip_mm=" << detail::fmt_double(rec.outcome.slip_mm)
     << ",peak_load_factor=" << detail::fmt_double(rec.outcome.peak_load_factor) << "\n";
  return os.str();
}

inline ExperimentRecord parse_csv(const std::string &text) {
  ExperimentRecord rec;
  std::istringstream in(text);
  std::string line;
  std::array<std::size_t, kFingers> widths{};
  bool have_outcome = false;
  auto kv = [](std::string_view item) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value in CSV metadata", 0);
    return std::pair{item.substr(0, eq), item.substr(eq + 1)};
  };
  while (std::getline(in, line)) {
    if (line.rfind("# run_id=", 0) == 0) {
      for (auto item : detail::split(std::string_view(line).substr(2), ',')) {
        auto [k, v] = kv(item);
        if (k == "run_id") rec.run_id = v;
        else if (k == "kind") rec.kind = parse_kind(v);
        else if (k == "object") rec.object = v;
        else if (k == "added_mass_g") rec.added_mass_g = detail::parse_double(v);
      }
    } else if (line.rfind("# sensors=", 0) == 0) {
      auto parts = detail::split(std::string_view(line).substr(10), ',');
      for (std::size_t k = 0; k < kFingers && k < parts.size(); ++k)
        widths[k] = static_cast<std::size_t>(detail::parse_double(parts[k]));
    } else if (line.rfind("# outcome=", 0) == 0) {
      for (auto item : detail::split(std::string_view(line).substr(2), ',')) {
        auto [k, v] = kv(item);
        if (k == "outcome") {
          if (v == "held") rec.outcome.status = OutcomeStatus::Held;
          else if (v == "slipped") rec.outcome.status = OutcomeStatus::Slipped;
          else if (v == "dropped") rec.outcome.status = OutcomeStatus::Dropped;
          else if (v == "contact_lost") rec.outcome.status = OutcomeStatus::ContactLost;
          else throw ParseError("unknown outcome '" + std::string(v) + "'", 0);
        } else if (k == "held_by_palm") rec.outcome.held_by_palm = v == "1";
        else if (k == "slip_mm") rec.outcome.slip_mm = detail::parse_double(v);
        else if (k == "peak_load_factor") rec.outcome.peak_load_factor = detail::parse_double(v);
      }
      have_outcome = true;
    } else if (line.rfind("timestamp_us", 0) == 0 || line.empty()) {
      continue;
    } else {
      auto f = detail::split(line, ',');
      const std::size_t expected = 2 + 12 + 3 + 3 + widths[0] + widths[1] + widths[2];
      if (f.size() != expected) throw ParseError("CSV row has " + std::to_string(f.size()) + " fields", 0);
      RecordRow r;
      std::size_t i = 0;
      r.timestamp_us = static_cast<std::int64_t>(std::stoll(std::string(f[i++])));
      r.phase = static_cast<Phase>(std::stoi(std::string(f[i++])));
      for (double &q : r.actual) q = detail::parse_double(f[i++]);
      for (double &q : r.target) q = detail::parse_double(f[i++]);
      for (std::size_t k = 0; k < kFingers; ++k) r.contact.c[k] = f[i++] == "1";
      r.yaw_deg = detail::parse_double(f[i++]);
      r.pitch_deg = detail::parse_double(f[i++]);
      r.slip_mm = detail::parse_double(f[i++]);
      for (std::size_t k = 0; k < kFingers; ++k) {
        r.normalized[k].resize(widths[k]);
        for (double &v : r.normalized[k]) v = detail::parse_double(f[i++]);
      }
      rec.rows.push_back(std::move(r));
    }
  }
  if (!have_outcome) throw ParseError("CSV has no outcome line", text.size());
  return rec;
}

} // namespace tgrasp

#endif // TGRASP_LOG_HPP
