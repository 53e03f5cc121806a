#include "meteor/events.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "meteor/error.hpp"

namespace meteor {

void block_hits(std::uint64_t seed, Vertex v, std::int64_t block, std::vector<double>& out) {
  const std::uint64_t vertex_key = derive_key(seed, StreamDomain::vertex_clock, static_cast<std::uint64_t>(v));
  Stream s(derive_key(vertex_key, StreamDomain::vertex_clock, static_cast<std::uint64_t>(block)), 0);
  // Poisson(1) by inversion; the cap only guards rounding in the tail.
  const double u = s.uniform();
  double p = 0.36787944117144233, cdf = p;
  int count = 0;
  while (u >= cdf && count < 40) {
    ++count;
    p /= count;
    cdf += p;
  }
  out.clear();
  const double base = static_cast<double>(block);
  for (int i = 0; i < count; ++i) out.push_back(base + s.uniform_positive());
  std::sort(out.begin(), out.end());
}

EventLog EventLog::sample(int vertex_count, double horizon, std::uint64_t seed) {
  require(vertex_count >= 1, ErrorKind::invalid_parameter, "event log needs at least one vertex");
  require(horizon >= 0.0 && std::isfinite(horizon), ErrorKind::invalid_parameter,
          "horizon must be finite and >= 0");
  EventLog log;
  log.horizon_ = horizon;
  log.seed_ = seed;
  log.offsets_.reserve(static_cast<std::size_t>(vertex_count) + 1);
  log.times_.reserve(static_cast<std::size_t>(vertex_count * horizon * 1.05) + 16);
  for (Vertex v = 0; v < vertex_count; ++v) {
    VertexClock clock(seed, v);
    for (double t = clock.next(); t <= horizon; t = clock.next()) log.times_.push_back(t);
    log.offsets_.push_back(log.times_.size());
  }
  return log;
}

EventLog EventLog::from_hits(std::vector<std::vector<double>> per_vertex, double horizon,
                             std::uint64_t seed) {
  require(!per_vertex.empty(), ErrorKind::invalid_parameter, "event log needs at least one vertex");
  require(horizon >= 0.0 && std::isfinite(horizon), ErrorKind::invalid_parameter,
          "horizon must be finite and >= 0");
  EventLog log;
  log.horizon_ = horizon;
  log.seed_ = seed;
  for (const auto& hits : per_vertex) {
    double prev = 0.0;
    for (double t : hits) {
      require(t > prev && t <= horizon, ErrorKind::invalid_parameter,
              "hit times must be strictly increasing inside (0, horizon]");
      prev = t;
      log.times_.push_back(t);
    }
    log.offsets_.push_back(log.times_.size());
  }
  return log;
}

double EventLog::last_hit_before(Vertex v, double t) const {
  require(t >= 0.0 && t <= horizon_, ErrorKind::invalid_parameter,
          "query time outside [0, horizon]");
  auto h = hits(v);
  auto it = std::upper_bound(h.begin(), h.end(), t);
  return it == h.begin() ? kNoHit : *std::prev(it);
}

double EventLog::next_hit_after(Vertex v, double t) const noexcept {
  auto h = hits(v);
  auto it = std::upper_bound(h.begin(), h.end(), t);
  return it == h.end() ? kNever : *it;
}

std::vector<Event> merged_events(const EventLog& log) {
  std::vector<Event> out;
  out.reserve(log.total_events());
  for (Vertex v = 0; v < log.vertex_count(); ++v)
    for (double t : log.hits(v)) out.push_back({t, v});
  std::sort(out.begin(), out.end(), [](const Event& a, const Event& b) {
    return a.time < b.time || (a.time == b.time && a.vertex < b.vertex);
  });
  return out;
}

LazyClockField::LazyClockField(int vertex_count, std::uint64_t seed, double horizon)
    : n_(vertex_count), seed_(seed), horizon_(horizon) {
  require(vertex_count >= 1, ErrorKind::invalid_parameter, "clock field needs at least one vertex");
}

double LazyClockField::next_hit_after(Vertex v, double t) {
  require(v >= 0 && v < n_, ErrorKind::invalid_parameter, "vertex out of range");
  for (auto block = static_cast<std::int64_t>(std::floor(std::max(t, 0.0)));; ++block) {
    if (static_cast<double>(block) > horizon_) return kNever;
    block_hits(seed_, v, block, scratch_);
    for (double h : scratch_)
      if (h > t) return h > horizon_ ? kNever : h;
  }
}

EventLog StreamingClock::materialize(int vertex_count, std::uint64_t seed, double t0, double t1) {
  require(0.0 <= t0 && t0 <= t1 && std::isfinite(t1), ErrorKind::invalid_parameter,
          "materialize needs 0 <= t0 <= t1 < inf");
  StreamingClock clock(vertex_count, seed);
  std::vector<std::vector<double>> hits(static_cast<std::size_t>(vertex_count));
  const double horizon = t1 - t0;
  for (Event e = clock.next(); e.time <= t1; e = clock.next()) {
    if (e.time <= t0) continue;
    const double shifted = e.time - t0;
    auto& h = hits[static_cast<std::size_t>(e.vertex)];
    // Shifting can merge two hits into one double; such (measure-zero) pairs
    // keep only the first.
    if (shifted > 0.0 && shifted <= horizon && (h.empty() || shifted > h.back()))
      h.push_back(shifted);
  }
  return EventLog::from_hits(std::move(hits), horizon, seed);
}

namespace {

constexpr std::array<char, 8> kMagic = {'M', 'E', 'T', 'E', 'O', 'R', 'L', 'G'};

template <class T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::uint64_t bits = 0;
  if constexpr (sizeof(T) == 8) bits = std::bit_cast<std::uint64_t>(value);
  else bits = static_cast<std::uint64_t>(std::bit_cast<std::uint32_t>(value));
  std::array<char, sizeof(T)> buf{};
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(buf.data(), buf.size());
}

template <class T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> buf{};
  in.read(reinterpret_cast<char*>(buf.data()), buf.size());
  require(static_cast<bool>(in), ErrorKind::io_error, "event log truncated");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  if constexpr (sizeof(T) == 8) return std::bit_cast<T>(bits);
  else return std::bit_cast<T>(static_cast<std::uint32_t>(bits));
}

}  // namespace

void write_event_log(std::ostream& out, const EventLog& log) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kEventLogVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(log.vertex_count()));
  put_le<double>(out, log.horizon());
  put_le<std::uint64_t>(out, log.seed());
  for (Vertex v = 0; v < log.vertex_count(); ++v)
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(log.hits(v).size()));
  for (Vertex v = 0; v < log.vertex_count(); ++v)
    for (double t : log.hits(v)) put_le<double>(out, t);
  require(static_cast<bool>(out), ErrorKind::io_error, "failed writing event log");
}

EventLog read_event_log(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  require(static_cast<bool>(in) && magic == kMagic, ErrorKind::io_error, "bad event log magic");
  const auto version = get_le<std::uint32_t>(in);
  require(version == kEventLogVersion, ErrorKind::io_error,
          "unsupported event log version " + std::to_string(version));
  const auto n = get_le<std::uint32_t>(in);
  const auto horizon = get_le<double>(in);
  const auto seed = get_le<std::uint64_t>(in);
  require(n >= 1, ErrorKind::io_error, "event log with no vertices");
  std::vector<std::uint64_t> counts(n);
  for (auto& c : counts) c = get_le<std::uint64_t>(in);
  std::vector<std::vector<double>> hits(n);
  for (std::uint32_t v = 0; v < n; ++v) {
    hits[v].resize(counts[v]);
    for (auto& t : hits[v]) t = get_le<double>(in);
  }
  return EventLog::from_hits(std::move(hits), horizon, seed);
}

void write_event_log_file(const std::string& path, const EventLog& log) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::io_error, "cannot open " + path);
  write_event_log(out, log);
}

EventLog read_event_log_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::io_error, "cannot open " + path);
  return read_event_log(in);
}

void write_event_csv(std::ostream& out, const EventLog& log) {
  out << "time,vertex\n";
  char buf[64];
  for (const Event& e : merged_events(log)) {
    std::snprintf(buf, sizeof buf, "%.17g,%d\n", e.time, e.vertex);
    out << buf;
  }
}

}  // namespace meteor
