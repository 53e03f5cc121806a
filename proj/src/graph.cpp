#include "meteor/graph.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "meteor/error.hpp"

namespace meteor {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::invalid_graph: return "invalid-graph";
    case ErrorKind::invalid_edge: return "invalid-edge";
    case ErrorKind::invalid_state: return "invalid-state";
    case ErrorKind::invalid_target: return "invalid-target";
    case ErrorKind::budget_exceeded: return "budget-exceeded";
    case ErrorKind::unsupported_topology: return "unsupported-topology";
    case ErrorKind::window_exhausted: return "window-exhausted";
    case ErrorKind::insufficient_samples: return "insufficient-samples";
    case ErrorKind::io_error: return "io-error";
  }
  return "unknown";
}

const char* to_string(Topology t) noexcept {
  switch (t) {
    case Topology::cycle: return "cycle";
    case Topology::torus: return "torus";
    case Topology::window: return "window";
    case Topology::custom: return "custom";
  }
  return "unknown";
}

namespace {

std::int64_t checked_power(int side, int d) {
  std::int64_t n = 1;
  for (int i = 0; i < d; ++i) {
    n *= side;
    // Adjacency storage is indexed by int32 offsets: n * 2d must fit.
    require(n * 2 * d <= std::numeric_limits<std::int32_t>::max(), ErrorKind::invalid_parameter,
            "side^d overflows the supported vertex range");
  }
  return n;
}

bool connected(const std::vector<std::vector<Vertex>>& lists) {
  if (lists.empty()) return false;
  std::vector<char> seen(lists.size(), 0);
  std::vector<Vertex> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (Vertex u : lists[v]) {
      if (!seen[u]) {
        seen[u] = 1;
        ++reached;
        stack.push_back(u);
      }
    }
  }
  return reached == lists.size();
}

// Lattice builder shared by cycles, tori and windows.
std::vector<std::vector<Vertex>> lattice_lists(int side, int d, bool wrap) {
  const auto n = static_cast<Vertex>(checked_power(side, d));
  std::vector<std::vector<Vertex>> lists(n);
  std::vector<int> coords(d, 0);
  std::vector<Vertex> stride(d, 1);
  for (int i = d - 2; i >= 0; --i) stride[i] = stride[i + 1] * side;
  for (Vertex v = 0; v < n; ++v) {
    Vertex rem = v;
    for (int i = 0; i < d; ++i) {
      coords[i] = rem / stride[i];
      rem %= stride[i];
    }
    auto& adj = lists[v];
    for (int i = 0; i < d; ++i) {
      for (int step : {-1, 1}) {
        int c = coords[i] + step;
        if (c < 0 || c >= side) {
          if (!wrap) continue;
          c = (c + side) % side;
        }
        adj.push_back(v + (c - coords[i]) * stride[i]);
      }
    }
    std::sort(adj.begin(), adj.end());
  }
  return lists;
}

}  // namespace

Graph Graph::from_sorted_lists(std::vector<std::vector<Vertex>> lists) {
  Graph g;
  g.offsets_.reserve(lists.size() + 1);
  g.offsets_.push_back(0);
  for (auto& l : lists) {
    g.adjacency_.insert(g.adjacency_.end(), l.begin(), l.end());
    g.offsets_.push_back(static_cast<std::int32_t>(g.adjacency_.size()));
  }
  return g;
}

Graph Graph::cycle(int k) {
  require(k >= 3, ErrorKind::invalid_parameter, "cycle needs k >= 3");
  Graph g = torus(k, 1);
  g.topology_ = Topology::cycle;
  return g;
}

Graph Graph::torus(int side, int d) {
  require(side >= 3, ErrorKind::invalid_parameter, "torus side must be >= 3");
  require(d >= 1, ErrorKind::invalid_parameter, "torus dimension must be >= 1");
  Graph g = from_sorted_lists(lattice_lists(side, d, true));
  g.topology_ = d == 1 ? Topology::cycle : Topology::torus;
  g.side_ = side;
  g.dim_ = d;
  return g;
}

Graph Graph::window(int side, int d) {
  require(side >= 2, ErrorKind::invalid_parameter, "window side must be >= 2");
  require(d >= 1, ErrorKind::invalid_parameter, "window dimension must be >= 1");
  Graph g = from_sorted_lists(lattice_lists(side, d, false));
  g.topology_ = Topology::window;
  g.side_ = side;
  g.dim_ = d;
  return g;
}

Graph Graph::from_edges(int n, std::span<const std::pair<Vertex, Vertex>> edges) {
  require(n >= 2, ErrorKind::invalid_parameter, "graph needs at least two vertices");
  std::vector<std::vector<Vertex>> lists(n);
  for (auto [u, v] : edges) {
    require(u >= 0 && u < n && v >= 0 && v < n, ErrorKind::invalid_edge,
            "edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
    require(u != v, ErrorKind::invalid_edge, "self-loop at " + std::to_string(u));
    lists[u].push_back(v);
    lists[v].push_back(u);
  }
  for (auto& l : lists) {
    std::sort(l.begin(), l.end());
    require(std::adjacent_find(l.begin(), l.end()) == l.end(), ErrorKind::invalid_edge,
            "duplicate edge");
  }
  require(connected(lists), ErrorKind::invalid_graph, "graph is disconnected");
  return from_sorted_lists(std::move(lists));
}

bool Graph::adjacent(Vertex u, Vertex v) const noexcept {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

bool Graph::is_one_dimensional() const noexcept {
  return (topology_ == Topology::cycle || topology_ == Topology::window) && dim_ == 1;
}

std::vector<int> Graph::coordinates(Vertex v) const {
  require(is_lattice(), ErrorKind::unsupported_topology, "coordinates need a lattice graph");
  std::vector<int> c(dim_);
  for (int i = dim_ - 1; i >= 0; --i) {
    c[i] = v % side_;
    v /= side_;
  }
  return c;
}

Vertex Graph::index_of(std::span<const int> coords) const {
  require(is_lattice() && static_cast<int>(coords.size()) == dim_, ErrorKind::invalid_parameter,
          "coordinate arity mismatch");
  Vertex v = 0;
  for (int c : coords) {
    require(c >= 0 && c < side_, ErrorKind::invalid_parameter, "coordinate out of range");
    v = v * side_ + c;
  }
  return v;
}

Vertex Graph::translate(Vertex v, std::span<const int> offset) const {
  auto c = coordinates(v);
  require(static_cast<int>(offset.size()) == dim_, ErrorKind::invalid_parameter,
          "offset arity mismatch");
  for (int i = 0; i < dim_; ++i) {
    int x = c[i] + offset[i];
    if (topology_ == Topology::window) {
      if (x < 0 || x >= side_) return -1;
    } else {
      x %= side_;
      if (x < 0) x += side_;
    }
    c[i] = x;
  }
  return index_of(c);
}

Vertex Graph::center() const {
  require(is_lattice(), ErrorKind::unsupported_topology, "center needs a lattice graph");
  std::vector<int> c(dim_, side_ / 2);
  return index_of(c);
}

std::vector<Vertex> Graph::boundary_layer() const {
  require(is_lattice(), ErrorKind::unsupported_topology, "boundary layer needs a lattice graph");
  std::vector<Vertex> out;
  for (Vertex v = 0; v < vertex_count(); ++v) {
    const auto c = coordinates(v);
    const bool on = std::any_of(c.begin(), c.end(), [&](int x) {
      return x == 0 || (topology_ == Topology::window && x == side_ - 1);
    });
    if (on) out.push_back(v);
  }
  return out;
}

std::vector<Vertex> Graph::central_ball(int radius) const {
  require(is_lattice(), ErrorKind::unsupported_topology, "central ball needs a lattice graph");
  std::vector<Vertex> out;
  const int mid = side_ / 2;
  for (Vertex v = 0; v < vertex_count(); ++v) {
    const auto c = coordinates(v);
    if (std::all_of(c.begin(), c.end(), [&](int x) { return std::abs(x - mid) <= radius; }))
      out.push_back(v);
  }
  return out;
}

std::string Graph::describe() const {
  std::ostringstream os;
  os << to_string(topology_);
  if (is_lattice()) os << "(side=" << side_ << ",d=" << dim_ << ")";
  os << " n=" << vertex_count() << " m=" << edge_count();
  return os.str();
}

Graph read_edge_list(std::istream& in) {
  long long n = 0, m = 0;
  require(static_cast<bool>(in >> n >> m), ErrorKind::io_error, "edge list header must be 'n m'");
  require(n >= 0 && n <= std::numeric_limits<Vertex>::max() && m >= 0, ErrorKind::io_error,
          "edge list header out of range");
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    long long u = 0, v = 0;
    require(static_cast<bool>(in >> u >> v), ErrorKind::io_error,
            "edge list truncated at edge " + std::to_string(i));
    require(u >= 0 && u < n && v >= 0 && v < n, ErrorKind::invalid_edge,
            "edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  return Graph::from_edges(static_cast<int>(n), edges);
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::io_error, "cannot open " + path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (Vertex u = 0; u < g.vertex_count(); ++u)
    for (Vertex v : g.neighbors(u))
      if (u < v) out << u << ' ' << v << '\n';
}

}  // namespace meteor
