#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ks1d {

// Uniform cell-centered mesh on (0,1): N cells, centers x_i = (i+1/2)/N.
struct Grid {
  int n = 0;
  double dx = 0.0;

  explicit Grid(int cells) : n(cells), dx(1.0 / static_cast<double>(cells)) {
    if (cells < 4) throw std::invalid_argument("grid needs at least 4 cells");
  }

  double center(int i) const { return (static_cast<double>(i) + 0.5) * dx; }
  std::size_t size() const { return static_cast<std::size_t>(n); }
  std::size_t interfaces() const { return static_cast<std::size_t>(n) + 1; }
};

// Cell averages of density u and chemoattractant v at time t.
struct State {
  double t = 0.0;
  std::vector<double> u;
  std::vector<double> v;

  State() = default;
  State(const Grid& g, double t0) : t(t0), u(g.size(), 0.0), v(g.size(), 0.0) {}
};

}  // namespace ks1d
