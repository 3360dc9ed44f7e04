/// Base discretizations: flat-torus grids with physical edge lengths and
/// weighted graphs.
#pragma once

#include <numeric>
#include <stdexcept>
#include <vector>

namespace kks {

struct BaseLattice {
  enum class Kind { torus_grid, graph };

  struct Edge {
    int u = 0, v = 0;
    double w = 1.0;
  };

  Kind kind = Kind::torus_grid;
  std::vector<int> sizes;       // grid: m_1..m_n
  std::vector<double> lengths;  // grid: L_1..L_n
  int graph_vertices = 0;
  std::vector<Edge> edges;

  int dims() const { return static_cast<int>(sizes.size()); }

  int n_vertices() const {
    if (kind == Kind::graph) return graph_vertices;
    int n = 1;
    for (int m : sizes) n *= m;
    return n;
  }

  double mesh(int dir) const { return lengths[dir] / sizes[dir]; }

  double cell_volume() const {
    double v = 1.0;
    for (int d = 0; d < dims(); ++d) v *= mesh(d);
    return v;
  }

  // row-major multi-index: last coordinate fastest
  int vertex_index(const std::vector<int>& c) const {
    int idx = 0;
    for (int d = 0; d < dims(); ++d) idx = idx * sizes[d] + ((c[d] % sizes[d]) + sizes[d]) % sizes[d];
    return idx;
  }

  std::vector<int> coords(int idx) const {
    std::vector<int> c(dims());
    for (int d = dims() - 1; d >= 0; --d) {
      c[d] = idx % sizes[d];
      idx /= sizes[d];
    }
    return c;
  }

  int neighbor(int idx, int dir, int step) const {
    std::vector<int> c = coords(idx);
    c[dir] += step;
    return vertex_index(c);
  }

  static BaseLattice torus(std::vector<int> sizes_, std::vector<double> lengths_) {
    if (sizes_.size() != lengths_.size()) throw std::invalid_argument("size/length mismatch");
    for (int m : sizes_)
      if (m < 1) throw std::invalid_argument("grid sizes must be positive");
    BaseLattice b;
    b.kind = Kind::torus_grid;
    b.sizes = std::move(sizes_);
    b.lengths = std::move(lengths_);
    return b;
  }

  /// Covers of trivially-voltaged graphs are disconnected, so
  /// connectivity is not enforced here; metric constructions check it.
  static BaseLattice graph(int n, std::vector<Edge> edges_) {
    BaseLattice b;
    b.kind = Kind::graph;
    b.graph_vertices = n;
    b.edges = std::move(edges_);
    for (const auto& e : b.edges)
      if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
        throw std::invalid_argument("edge endpoint out of range");
    return b;
  }

  bool is_connected() const {
    if (kind == Kind::torus_grid) return true;
    const int n = graph_vertices;
    if (n == 0) return true;
    std::vector<int> comp(n, -1);
    std::vector<int> stack = {0};
    comp[0] = 0;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const auto& e : edges) {
        const int other = e.u == u ? e.v : (e.v == u ? e.u : -1);
        if (other >= 0 && comp[other] < 0) {
          comp[other] = 0;
          stack.push_back(other);
        }
      }
    }
    for (int u = 0; u < n; ++u)
      if (comp[u] < 0) return false;
    return true;
  }

  /// Cycle graph C_m with the given edge weight.
  static BaseLattice cycle(int m, double w = 1.0) {
    std::vector<Edge> e;
    for (int i = 0; i < m; ++i) e.push_back({i, (i + 1) % m, w});
    return graph(m, std::move(e));
  }
};

}  // namespace kks
