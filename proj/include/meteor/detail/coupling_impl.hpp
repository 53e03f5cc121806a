#pragma once

// Implementation of mirror_couple; included from wimps.hpp.

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <vector>

namespace meteor {
namespace detail {

// Skeleton of one coupling stage. y[j], yt[j] are the unwrapped positions of
// the two embedded walks after j steps.
class MirrorSkeleton {
 public:
  MirrorSkeleton(int d, std::vector<std::int64_t> x0, std::vector<std::int64_t> xt0,
                 std::uint64_t seed, int stage)
      : d_(d), stream_(seed, StreamDomain::coupling, static_cast<std::uint64_t>(stage)) {
    y_ = std::move(x0);
    yt_ = std::move(xt0);
    note_parallel(0);
  }

  const std::int64_t* y(std::size_t j) { extend(j); return &y_[j * d_]; }
  const std::int64_t* yt(std::size_t j) { extend(j); return &yt_[j * d_]; }

  // First index at which every coordinate gap is <= 1, if reached so far.
  std::size_t all_parallel_index() const noexcept { return parallel_at_; }
  static constexpr std::size_t kNotYet = std::numeric_limits<std::size_t>::max();

 private:
  void extend(std::size_t j) {
    while (steps() < j) {
      const std::size_t k = steps();
      const auto draw = keyed_below(stream_, k, 2 * static_cast<std::uint64_t>(d_));
      const int coord = static_cast<int>(draw / 2);
      const int sign = draw % 2 == 0 ? 1 : -1;
      for (int i = 0; i < d_; ++i) {
        y_.push_back(y_[k * d_ + i]);
        yt_.push_back(yt_[k * d_ + i]);
      }
      const std::size_t base = (k + 1) * d_;
      const bool mirrored = std::llabs(y_[k * d_ + coord] - yt_[k * d_ + coord]) > 1;
      y_[base + coord] += sign;
      yt_[base + coord] += mirrored ? -sign : sign;
      note_parallel(k + 1);
    }
  }
  std::size_t steps() const noexcept { return y_.size() / d_ - 1; }
  void note_parallel(std::size_t j) {
    if (parallel_at_ != kNotYet) return;
    for (int i = 0; i < d_; ++i)
      if (std::llabs(y_[j * d_ + i] - yt_[j * d_ + i]) > 1) return;
    parallel_at_ = j;
  }

  int d_;
  Stream stream_;
  std::vector<std::int64_t> y_, yt_;
  std::size_t parallel_at_ = kNotYet;
};

inline std::vector<std::int64_t> lattice_coords(const Graph& g, Vertex v) {
  const auto c = g.coordinates(v);
  return {c.begin(), c.end()};
}

inline Vertex wrap_coords(const Graph& g, const std::vector<std::int64_t>& c) {
  std::vector<int> w(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto x = c[i] % g.side();
    if (x < 0) x += g.side();
    w[i] = static_cast<int>(x);
  }
  return g.index_of(w);
}

}  // namespace detail

template <class Clock>
CouplingRun mirror_couple(const Graph& g, Vertex z0, Vertex z0_tilde, Clock& clock, double t_end,
                          std::uint64_t seed, CouplingOptions options) {
  require(g.is_vertex_transitive(), ErrorKind::unsupported_topology,
          "mirror coupling needs a cycle or torus window");
  require(t_end >= 0.0 && t_end <= clock.horizon(), ErrorKind::invalid_parameter,
          "t_end beyond the clock horizon");
  require(z0 >= 0 && z0 < g.vertex_count() && z0_tilde >= 0 && z0_tilde < g.vertex_count(),
          ErrorKind::invalid_parameter, "start vertex out of range");
  const int d = g.dimension();
  CouplingRun run;
  run.z0 = z0;
  run.z0_tilde = z0_tilde;

  std::vector<std::int64_t> origin[2] = {detail::lattice_coords(g, z0), detail::lattice_coords(g, z0_tilde)};
  std::vector<std::int64_t> pos[2] = {origin[0], origin[1]};
  Vertex vertex[2] = {z0, z0_tilde};
  double since[2] = {0.0, 0.0};
  std::size_t index[2] = {0, 0};
  const std::int64_t half = g.side() / 2;

  if (options.record)
    for (int w = 0; w < 2; ++w) (w ? run.path_tilde : run.path).vertices.push_back(vertex[w]);

  auto moved = [&](int w, double time) {
    vertex[w] = detail::wrap_coords(g, pos[w]);
    since[w] = time;
    std::int64_t l1 = 0;
    for (int i = 0; i < d; ++i) {
      const auto off = pos[w][i] - origin[w][i];
      l1 += std::llabs(off);
      if (!run.meeting_time && std::llabs(off) >= half) run.window_exceeded = true;
    }
    run.displacement_max[w] = std::max(run.displacement_max[w], l1);
    if (options.record) {
      auto& tr = w ? run.path_tilde : run.path;
      tr.jump_times.push_back(time);
      tr.vertices.push_back(vertex[w]);
    }
  };

  if (z0 == z0_tilde) run.meeting_time = 0.0;
  detail::MirrorSkeleton skel(d, pos[0], pos[1], seed, 0);

  while (true) {
    const double next[2] = {clock.next_hit_after(vertex[0], since[0]),
                            clock.next_hit_after(vertex[1], since[1])};
    const int w = next[1] < next[0] ? 1 : 0;
    const double time = next[w];
    if (time > t_end) break;

    if (run.meeting_time) {
      // Co-located: one shared hit moves both walks along the first skeleton.
      const std::int64_t* b = skel.y(index[0] + 1);  // extends first; pointers stay valid
      const std::int64_t* a = skel.y(index[0]);
      for (int i = 0; i < d; ++i) {
        pos[0][i] += b[i] - a[i];
        pos[1][i] += b[i] - a[i];
      }
      ++index[0];
      moved(0, time);
      moved(1, time);
      if (pos[0] != pos[1]) run.suffix_equal = false;
      continue;
    }

    const std::int64_t* to = w == 0 ? skel.y(index[w] + 1) : skel.yt(index[w] + 1);
    const std::int64_t* from = w == 0 ? skel.y(index[w]) : skel.yt(index[w]);
    for (int i = 0; i < d; ++i) pos[w][i] += to[i] - from[i];
    ++index[w];
    moved(w, time);

    // A wrapped coincidence with different unwrapped positions is not a meeting in Z^d.
    if (pos[0] == pos[1]) {
      run.meeting_time = time;
      // Continue both along the first walk's skeleton from its current index.
      continue;
    }
    const std::size_t j = skel.all_parallel_index();
    if (j != detail::MirrorSkeleton::kNotYet && std::min(index[0], index[1]) >= j) {
      skel = detail::MirrorSkeleton(d, pos[0], pos[1], seed, run.stages);
      ++run.stages;
      index[0] = index[1] = 0;
    }
  }
  return run;
}

}  // namespace meteor
