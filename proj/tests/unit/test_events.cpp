#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "meteor/events.hpp"
#include "unit/helpers.hpp"

using namespace meteor;

TEST_SUITE("events") {

TEST_CASE("zero horizon gives an empty log") {
  const EventLog log = EventLog::sample(10, 0.0, 3);
  CHECK(log.total_events() == 0);
  for (Vertex v = 0; v < 10; ++v) CHECK(log.hits(v).empty());
  CHECK(merged_events(log).empty());
  CHECK(error_kind([] { EventLog::sample(10, -1.0, 3); }) == ErrorKind::invalid_parameter);
}

TEST_CASE("sampling is a pure function of its inputs") {
  CHECK(EventLog::sample(20, 7.5, 42) == EventLog::sample(20, 7.5, 42));
  CHECK_FALSE(EventLog::sample(20, 7.5, 42) == EventLog::sample(20, 7.5, 43));
  // a longer horizon extends the same realization
  const EventLog a = EventLog::sample(5, 3.0, 9), b = EventLog::sample(5, 6.0, 9);
  for (Vertex v = 0; v < 5; ++v) {
    const auto ha = a.hits(v), hb = b.hits(v);
    REQUIRE(ha.size() <= hb.size());
    CHECK(std::equal(ha.begin(), ha.end(), hb.begin()));
  }
}

TEST_CASE("per-vertex times strictly increase inside (0, horizon]") {
  const EventLog log = EventLog::sample(50, 10.0, 1);
  for (Vertex v = 0; v < 50; ++v) {
    double prev = 0.0;
    for (double t : log.hits(v)) {
      CHECK(t > prev);
      CHECK(t <= 10.0);
      prev = t;
    }
  }
}

TEST_CASE("unit rate on C_100 over 20 seeds") {
  std::size_t total = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) total += EventLog::sample(100, 50.0, seed).total_events();
  const double ratio = static_cast<double>(total) / (20.0 * 100.0 * 50.0);
  CHECK(ratio >= 0.95);
  CHECK(ratio <= 1.05);
}

TEST_CASE("inter-arrival gaps are Exp(1) (Kolmogorov-Smirnov at level 0.01)") {
  const EventLog log = EventLog::sample(200, 30.0, 77);
  std::vector<double> gaps;
  for (Vertex v = 0; v < 200; ++v) {
    double prev = 0.0;
    for (double t : log.hits(v)) {
      gaps.push_back(t - prev);
      prev = t;
    }
  }
  std::sort(gaps.begin(), gaps.end());
  const double n = static_cast<double>(gaps.size());
  double D = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const double F = 1.0 - std::exp(-gaps[i]);
    D = std::max({D, std::abs(F - i / n), std::abs((i + 1) / n - F)});
  }
  CHECK(D < 1.628 / std::sqrt(n));
}

TEST_CASE("merged events") {
  const EventLog log = EventLog::from_hits({{0.3}, {0.5}, {0.1}, {0.5}}, 1.0);
  const auto ev = merged_events(log);
  REQUIRE(ev.size() == 4);
  CHECK(ev[0] == Event{0.1, 2});
  CHECK(ev[1] == Event{0.3, 0});
  // equal times: lower vertex first
  CHECK(ev[2] == Event{0.5, 1});
  CHECK(ev[3] == Event{0.5, 3});

  const EventLog big = EventLog::sample(30, 5.0, 8);
  const auto all = merged_events(big);
  CHECK(all.size() == big.total_events());
  CHECK(std::is_sorted(all.begin(), all.end(), [](const Event& a, const Event& b) {
    return a.time < b.time || (a.time == b.time && a.vertex < b.vertex);
  }));
}

TEST_CASE("last hit before t") {
  const EventLog log = EventLog::from_hits({{}, {0.2, 0.7}}, 1.0);
  CHECK(log.last_hit_before(0, 0.9) == kNoHit);
  CHECK(log.last_hit_before(1, 0.5) == 0.2);
  CHECK(log.last_hit_before(1, 0.7) == 0.7);
  CHECK(log.last_hit_before(1, 0.1) == kNoHit);
  CHECK(error_kind([&] { (void)log.last_hit_before(1, 1.5); }) == ErrorKind::invalid_parameter);
  CHECK(error_kind([&] { (void)log.last_hit_before(1, -0.1); }) == ErrorKind::invalid_parameter);
  CHECK(log.next_hit_after(1, 0.2) == 0.7);
  CHECK(log.next_hit_after(1, 0.7) == kNever);

  const EventLog r = EventLog::sample(3, 10.0, 2);
  for (Vertex v = 0; v < 3; ++v) {
    double prev = kNoHit;
    for (double t = 0.0; t <= 10.0; t += 0.01) {
      const double h = r.last_hit_before(v, t);
      CHECK(h >= prev);
      prev = h;
    }
  }
}

TEST_CASE("explicit logs are validated") {
  CHECK(error_kind([] { EventLog::from_hits({{0.5, 0.4}}, 1.0); }) == ErrorKind::invalid_parameter);
  CHECK(error_kind([] { EventLog::from_hits({{0.0}}, 1.0); }) == ErrorKind::invalid_parameter);
  CHECK(error_kind([] { EventLog::from_hits({{2.0}}, 1.0); }) == ErrorKind::invalid_parameter);
}

TEST_CASE("binary and csv serialization") {
  const EventLog log = EventLog::sample(12, 4.0, 31);
  std::stringstream io;
  write_event_log(io, log);
  CHECK(read_event_log(io) == log);

  std::stringstream corrupt("METEORXX");
  CHECK(error_kind([&] { read_event_log(corrupt); }) == ErrorKind::io_error);

  std::stringstream csv;
  write_event_csv(csv, log);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(csv, line))
    if (!line.empty() && line[0] != 't' && line[0] != '#') ++rows;
  CHECK(rows == log.total_events());
}

TEST_CASE("lazy field reproduces the sampled log") {
  const EventLog log = EventLog::sample(8, 20.0, 5);
  LazyClockField lazy(8, 5, 20.0);
  // query vertices out of order
  for (Vertex v : {5, 0, 7, 3, 1, 6, 2, 4}) {
    double t = 0.0;
    for (double h : log.hits(v)) {
      const double next = lazy.next_hit_after(v, t);
      CHECK(next == h);
      t = next;
    }
    CHECK(lazy.next_hit_after(v, t) == kNever);
  }
}

TEST_CASE("streaming clock and its materialized window") {
  StreamingClock clock(6, 12);
  std::vector<Event> seen;
  while (clock.now() < 3.0) seen.push_back(clock.next());
  const EventLog window = StreamingClock::materialize(6, 12, 1.0, 2.5);
  std::vector<Event> expect;
  for (const Event& e : seen)
    if (e.time > 1.0 && e.time <= 2.5) expect.push_back({e.time - 1.0, e.vertex});
  const auto got = merged_events(window);
  REQUIRE(got.size() == expect.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].vertex == expect[i].vertex);
    CHECK(got[i].time == doctest::Approx(expect[i].time).epsilon(1e-12));
  }

  // the superposed clock runs at rate |V|
  StreamingClock fast(50, 3);
  for (int i = 0; i < 100000; ++i) fast.next();
  CHECK(fast.now() == doctest::Approx(2000.0).epsilon(0.02));
}

}  // TEST_SUITE
