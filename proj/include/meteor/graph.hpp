#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace meteor {

using Vertex = std::int32_t;

enum class Topology { cycle, torus, window, custom };

const char* to_string(Topology t) noexcept;

// Finite, connected, simple, undirected graph in compressed adjacency form.
//
// Vertices are dense indices 0..n-1. Tori and windows map coordinates to
// indices row-major, first coordinate slowest. Immutable once built.
class Graph {
 public:
  // C_k: edges (j, j+1 mod k).
  static Graph cycle(int k);
  // Product of d cycles of length `side`.
  static Graph torus(int side, int d);
  // The box {0..side-1}^d of Z^d with nearest-neighbour edges (no wrap).
  static Graph window(int side, int d);
  static Graph from_edges(int n, std::span<const std::pair<Vertex, Vertex>> edges);

  int vertex_count() const noexcept { return static_cast<int>(offsets_.size()) - 1; }
  std::int64_t edge_count() const noexcept { return static_cast<std::int64_t>(adjacency_.size()) / 2; }

  std::span<const Vertex> neighbors(Vertex v) const noexcept {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  int degree(Vertex v) const noexcept { return offsets_[v + 1] - offsets_[v]; }
  bool adjacent(Vertex u, Vertex v) const noexcept;

  Topology topology() const noexcept { return topology_; }
  // Lattice metadata; side() and dimension() are 0 for custom graphs.
  int side() const noexcept { return side_; }
  int dimension() const noexcept { return dim_; }
  bool is_lattice() const noexcept { return topology_ != Topology::custom; }
  bool is_one_dimensional() const noexcept;
  bool is_vertex_transitive() const noexcept {
    return topology_ == Topology::cycle || topology_ == Topology::torus;
  }

  std::vector<int> coordinates(Vertex v) const;
  Vertex index_of(std::span<const int> coords) const;
  // Lattice vertex displaced by `offset`, wrapping on cycles/tori.
  // Returns -1 for windows when the target falls outside the box.
  Vertex translate(Vertex v, std::span<const int> offset) const;

  // Boundary layer used to certify that a lattice graph emulates Z^d on a
  // central region: the outer face of a window, or the seam opposite the
  // centre (vertices with some coordinate equal to 0) on a cycle/torus.
  std::vector<Vertex> boundary_layer() const;
  // Vertices within L-infinity distance `radius` of the centre vertex.
  std::vector<Vertex> central_ball(int radius) const;
  Vertex center() const;

  std::string describe() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.offsets_ == b.offsets_ && a.adjacency_ == b.adjacency_;
  }

 private:
  Graph() = default;
  static Graph from_sorted_lists(std::vector<std::vector<Vertex>> lists);

  std::vector<std::int32_t> offsets_;
  std::vector<Vertex> adjacency_;
  Topology topology_ = Topology::custom;
  int side_ = 0;
  int dim_ = 0;
};

// Edge-list text format: first line "n m", then m lines "u v".
Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);

}  // namespace meteor
