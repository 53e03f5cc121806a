#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "meteor/graph.hpp"
#include "meteor/rng.hpp"

namespace meteor {

struct Event {
  double time;
  Vertex vertex;

  friend bool operator==(const Event&, const Event&) = default;
};

inline constexpr double kNoHit = -1.0;
inline constexpr double kNever = std::numeric_limits<double>::infinity();

// Hits of vertex v in the unit block (b, b+1]: a Poisson(1) count by
// inversion, then that many uniform positions, sorted. Block b of v reads the
// stream keyed derive_key(derive_key(seed, vertex_clock, v), vertex_clock, b),
// so any window of any vertex is reachable without sampling its past.
void block_hits(std::uint64_t seed, Vertex v, std::int64_t block, std::vector<double>& out);

// Successive hit times of one vertex, block by block.
class VertexClock {
 public:
  VertexClock(std::uint64_t seed, Vertex v) : seed_(seed), v_(v) {}
  double next() {
    while (pos_ == buf_.size()) {
      block_hits(seed_, v_, block_++, buf_);
      pos_ = 0;
    }
    return buf_[pos_++];
  }

 private:
  std::uint64_t seed_;
  Vertex v_;
  std::int64_t block_ = 0;
  std::vector<double> buf_;
  std::size_t pos_ = 0;
};

// The clock field {N^v} on (0, horizon], materialized.
//
// Immutable once sampled; hit times are stored in one contiguous array with
// per-vertex offsets.
class EventLog {
 public:
  EventLog() = default;

  static EventLog sample(int vertex_count, double horizon, std::uint64_t seed);
  static EventLog sample(const Graph& g, double horizon, std::uint64_t seed) {
    return sample(g.vertex_count(), horizon, seed);
  }
  // Explicit hit times, validated (strictly increasing, inside (0, horizon]).
  static EventLog from_hits(std::vector<std::vector<double>> per_vertex, double horizon,
                            std::uint64_t seed = 0);

  int vertex_count() const noexcept { return static_cast<int>(offsets_.size()) - 1; }
  double horizon() const noexcept { return horizon_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t total_events() const noexcept { return times_.size(); }

  std::span<const double> hits(Vertex v) const noexcept {
    return {times_.data() + offsets_[v], times_.data() + offsets_[v + 1]};
  }
  // Global index of the first hit of v; hits are numbered contiguously per vertex.
  std::size_t first_index(Vertex v) const noexcept { return offsets_[v]; }

  // Largest hit time of v in [0, t], or kNoHit.
  double last_hit_before(Vertex v, double t) const;
  // Smallest hit time of v strictly after t, or kNever past the horizon.
  double next_hit_after(Vertex v, double t) const noexcept;

  friend bool operator==(const EventLog&, const EventLog&) = default;

 private:
  double horizon_ = 0.0;
  std::uint64_t seed_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<double> times_;
};

// All hits in ascending time; equal times ordered by vertex index.
std::vector<Event> merged_events(const EventLog& log);

// The clock field of EventLog::sample for the same seed, evaluated on demand
// and without a horizon. Intended for large lattices where only a few
// vertices are ever queried.
class LazyClockField {
 public:
  LazyClockField(int vertex_count, std::uint64_t seed, double horizon = kNever);

  double next_hit_after(Vertex v, double t);
  double horizon() const noexcept { return horizon_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  int n_;
  std::uint64_t seed_;
  double horizon_;
  std::vector<double> scratch_;
};

// Superposed clock: global rate-|V| exponential gaps, uniform vertex. Equal in
// law to the per-vertex field; used for long runs without oracle replay.
class StreamingClock {
 public:
  StreamingClock(int vertex_count, std::uint64_t seed)
      : n_(static_cast<std::uint64_t>(vertex_count)),
        rate_(static_cast<double>(vertex_count)),
        seed_(seed),
        stream_(seed, StreamDomain::global_clock, 0) {}

  Event next() noexcept {
    now_ += stream_.exponential(rate_);
    ++count_;
    return {now_, static_cast<Vertex>(stream_.below(n_))};
  }
  // Skips time bookkeeping when only the order of hits matters.
  Vertex next_vertex() noexcept {
    ++count_;
    return static_cast<Vertex>(stream_.below(n_));
  }

  double now() const noexcept { return now_; }
  std::uint64_t events() const noexcept { return count_; }
  std::uint64_t seed() const noexcept { return seed_; }

  // Replays the stream from its origin and returns the hits in (t0, t1] as
  // an EventLog with times shifted by -t0 (horizon t1 - t0).
  static EventLog materialize(int vertex_count, std::uint64_t seed, double t0, double t1);

 private:
  std::uint64_t n_;
  double rate_;
  std::uint64_t seed_;
  Stream stream_;
  double now_ = 0.0;
  std::uint64_t count_ = 0;
};

// Binary layout (little-endian): magic "METEORLG", u32 version, u32 vertex
// count, f64 horizon, u64 seed, vertex_count x u64 hit counts, then all hit
// times as f64 in vertex order.
inline constexpr std::uint32_t kEventLogVersion = 1;
void write_event_log(std::ostream& out, const EventLog& log);
EventLog read_event_log(std::istream& in);
void write_event_log_file(const std::string& path, const EventLog& log);
EventLog read_event_log_file(const std::string& path);
// Debug form: "time,vertex" rows in merged order.
void write_event_csv(std::ostream& out, const EventLog& log);

}  // namespace meteor
