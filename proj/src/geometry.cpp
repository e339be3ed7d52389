#include "mixhom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "mixhom/error.hpp"
#include "mixhom/test_function.hpp"

namespace mixhom {

Grid::Grid(int dim, int m) : dim_(dim), m_(m), h_(1.0 / m) {}

std::size_t Grid::cell_count() const noexcept {
  const auto side = static_cast<std::size_t>(m_);
  return dim_ == 1 ? side : side * side;
}

std::size_t Grid::index(int ix, int iy) const noexcept {
  return static_cast<std::size_t>(iy) * static_cast<std::size_t>(m_) + static_cast<std::size_t>(ix);
}

Point Grid::center(std::size_t cell) const noexcept {
  Point p{(ix(cell) + 0.5) * h_, 0.0};
  if (dim_ == 2) p.y = (iy(cell) + 0.5) * h_;
  return p;
}

Point Grid::corner(std::size_t cell) const noexcept {
  Point p{ix(cell) * h_, 0.0};
  if (dim_ == 2) p.y = iy(cell) * h_;
  return p;
}

std::size_t Grid::locate(Point p) const noexcept {
  auto axis = [this](double c) {
    const auto i = static_cast<int>(std::floor(c * m_));
    return std::clamp(i, 0, m_ - 1);
  };
  return dim_ == 1 ? index(axis(p.x)) : index(axis(p.x), axis(p.y));
}

Grid make_grid(int dim, int m) {
  if (dim != 1 && dim != 2) {
    throw Error(ErrorKind::config, "grid dimension must be 1 or 2, got " + std::to_string(dim));
  }
  if (m < 2) {
    throw Error(ErrorKind::config, "invalid resolution: need at least 2 cells per axis, got " + std::to_string(m));
  }
  return Grid(dim, m);
}

std::string_view to_string(PartitionFamily family) noexcept {
  switch (family) {
    case PartitionFamily::alternating1d: return "alternating1d";
    case PartitionFamily::chessboard: return "chessboard";
    case PartitionFamily::balls: return "balls";
    case PartitionFamily::strips: return "strips";
  }
  return "unknown";
}

PartitionFamily parse_partition_family(std::string_view name) {
  for (auto f : {PartitionFamily::alternating1d, PartitionFamily::chessboard, PartitionFamily::balls,
                 PartitionFamily::strips}) {
    if (to_string(f) == name) return f;
  }
  throw Error(ErrorKind::config, "unknown partition family '" + std::string(name) + "'");
}

std::size_t Partition::count(Region region) const noexcept {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), region));
}

double Partition::b_measure() const noexcept {
  return static_cast<double>(count(Region::B)) * grid_.cell_volume();
}

double Partition::min_component_width() const noexcept {
  double width = std::numeric_limits<double>::infinity();
  for (const auto& c : components_) {
    double w = (c.bounds.ix1 - c.bounds.ix0) * grid_.h();
    if (grid_.dim() == 2) w = std::min(w, (c.bounds.iy1 - c.bounds.iy0) * grid_.h());
    width = std::min(width, w);
  }
  return width;
}

double cells_diameter(const Grid& grid, const std::vector<std::size_t>& cells) {
  if (cells.empty()) return 0.0;
  // The farthest pair of points in a union of squares sits on corners of the
  // leftmost/rightmost cells of some pair of rows, so only row extremes matter.
  std::map<int, std::pair<int, int>> rows;
  for (auto c : cells) {
    const int ix = grid.ix(c);
    auto [it, inserted] = rows.try_emplace(grid.iy(c), ix, ix);
    if (!inserted) {
      it->second.first = std::min(it->second.first, ix);
      it->second.second = std::max(it->second.second, ix);
    }
  }
  std::vector<std::pair<int, int>> extremes;  // (ix, iy)
  for (const auto& [iy, span] : rows) {
    extremes.emplace_back(span.first, iy);
    if (span.second != span.first) extremes.emplace_back(span.second, iy);
  }
  double best = 0.0;
  for (std::size_t a = 0; a < extremes.size(); ++a) {
    for (std::size_t b = a; b < extremes.size(); ++b) {
      const double dx = std::abs(extremes[a].first - extremes[b].first) + 1.0;
      const double dy = grid.dim() == 2 ? std::abs(extremes[a].second - extremes[b].second) + 1.0 : 0.0;
      best = std::max(best, std::sqrt(dx * dx + dy * dy));
    }
  }
  return best * grid.h();
}

class PartitionBuilder {
 public:
  PartitionBuilder(PartitionFamily family, int n, const Grid& grid) {
    p_.family_ = family;
    p_.n_ = n;
    p_.grid_ = grid;
    p_.labels_.assign(grid.cell_count(), Region::A);
    p_.component_of_.assign(grid.cell_count(), -1);
  }

  void set_k(double k) { p_.k_ = k; }
  void set_r(double r) { p_.r_ = r; }

  void mark(std::size_t cell, int component) {
    p_.labels_[cell] = Region::B;
    p_.component_of_[cell] = component;
  }

  Partition finish(double theta) {
    if (!(theta > 0.0 && theta < 1.0)) {
      throw Error(ErrorKind::config, "partition '" + std::string(to_string(p_.family_)) +
                                         "' has B fraction outside (0,1); refine the grid or change parameters");
    }
    const Grid& g = p_.grid_;
    std::map<int, Component> by_id;
    for (std::size_t cell = 0; cell < g.cell_count(); ++cell) {
      const int id = p_.component_of_[cell];
      if (id < 0) continue;
      auto [it, inserted] = by_id.try_emplace(id);
      Component& c = it->second;
      const int ix = g.ix(cell);
      const int iy = g.iy(cell);
      if (inserted) {
        c.bounds = CellRect{ix, ix + 1, iy, iy + 1};
      } else {
        c.bounds.ix0 = std::min(c.bounds.ix0, ix);
        c.bounds.ix1 = std::max(c.bounds.ix1, ix + 1);
        c.bounds.iy0 = std::min(c.bounds.iy0, iy);
        c.bounds.iy1 = std::max(c.bounds.iy1, iy + 1);
      }
      c.cells.push_back(cell);
    }
    // Renumber densely in id order.
    std::map<int, int> dense;
    for (auto& [id, c] : by_id) {
      const auto area = static_cast<std::size_t>(c.bounds.ix1 - c.bounds.ix0) *
                        static_cast<std::size_t>(c.bounds.iy1 - c.bounds.iy0);
      c.rectangular = area == c.cells.size();
      c.diameter = cells_diameter(g, c.cells);
      p_.max_diam_ = std::max(p_.max_diam_, c.diameter);
      dense[id] = static_cast<int>(p_.components_.size());
      p_.components_.push_back(std::move(c));
    }
    for (auto& id : p_.component_of_) {
      if (id >= 0) id = dense[id];
    }
    p_.theta_.assign(g.cell_count(), theta);
    return std::move(p_);
  }

 private:
  Partition p_;
};

namespace {

void require_dim(const Grid& grid, int dim, PartitionFamily family) {
  if (grid.dim() != dim) {
    throw Error(ErrorKind::config, std::string(to_string(family)) + " partition needs a " + std::to_string(dim) +
                                       "-d grid, got " + std::to_string(grid.dim()) + "-d");
  }
}

void require_positive_n(int n) {
  if (n < 1) throw Error(ErrorKind::config, "refinement index n must be positive, got " + std::to_string(n));
}

int cells_per_block(const Grid& grid, int n, PartitionFamily family) {
  if (grid.m() % n != 0) {
    throw Error(ErrorKind::alignment, std::string(to_string(family)) + ": m = " + std::to_string(grid.m()) +
                                          " must be divisible by n = " + std::to_string(n));
  }
  return grid.m() / n;
}

}  // namespace

Partition make_alternating_1d(int n, double k, const Grid& grid) {
  constexpr auto family = PartitionFamily::alternating1d;
  require_positive_n(n);
  require_dim(grid, 1, family);
  if (!(k > 0.0 && k < 1.0)) throw Error(ErrorKind::config, "alternating1d: k must lie in (0,1)");
  const int per = cells_per_block(grid, n, family);
  const double b_cells_exact = k * per;
  const auto b_cells = static_cast<int>(std::lround(b_cells_exact));
  if (std::abs(b_cells_exact - b_cells) > 1e-9 || b_cells == 0 || b_cells == per) {
    throw Error(ErrorKind::alignment, "alternating1d: k*m/n = " + std::to_string(b_cells_exact) +
                                          " must be an integer strictly between 0 and m/n (m divisible by n, "
                                          "k*m/n integral)");
  }
  PartitionBuilder builder(family, n, grid);
  builder.set_k(k);
  for (int j = 0; j < n; ++j) {
    for (int c = per - b_cells; c < per; ++c) builder.mark(grid.index(j * per + c), j);
  }
  return builder.finish(static_cast<double>(b_cells) / per);
}

Partition make_chessboard(int n, const Grid& grid) {
  constexpr auto family = PartitionFamily::chessboard;
  require_positive_n(n);
  require_dim(grid, 2, family);
  const int per = cells_per_block(grid, n, family);
  PartitionBuilder builder(family, n, grid);
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    const int qx = grid.ix(cell) / per;
    const int qy = grid.iy(cell) / per;
    if ((qx + qy) % 2 == 1) builder.mark(cell, qy * n + qx);
  }
  // Both parities cover half the squares for even n; for odd n the B squares
  // are one fewer than half, which is still the exact cell fraction.
  const double theta = static_cast<double>(n * n / 2) / (n * n);
  return builder.finish(theta);
}

Partition make_balls(int n, double r, const Grid& grid) {
  constexpr auto family = PartitionFamily::balls;
  require_positive_n(n);
  require_dim(grid, 2, family);
  if (!(r > 0.0 && r < 0.5)) throw Error(ErrorKind::config, "balls: radius factor r must lie in (0, 1/2)");
  const int per = cells_per_block(grid, n, family);
  PartitionBuilder builder(family, n, grid);
  builder.set_r(r);
  const double radius = r / n;
  std::size_t b_count = 0;
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    const int qx = grid.ix(cell) / per;
    const int qy = grid.iy(cell) / per;
    const Point c = grid.center(cell);
    const double dx = c.x - (qx + 0.5) / n;
    const double dy = c.y - (qy + 0.5) / n;
    if (dx * dx + dy * dy < radius * radius) {
      builder.mark(cell, qy * n + qx);
      ++b_count;
    }
  }
  return builder.finish(static_cast<double>(b_count) / static_cast<double>(grid.cell_count()));
}

Partition make_strips(int n, const Grid& grid) {
  constexpr auto family = PartitionFamily::strips;
  require_positive_n(n);
  require_dim(grid, 2, family);
  const int per = cells_per_block(grid, n, family);
  PartitionBuilder builder(family, n, grid);
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    const int strip = grid.ix(cell) / per;
    if (strip % 2 == 1) builder.mark(cell, strip);
  }
  return builder.finish(static_cast<double>(n / 2) / n);
}

double weak_density_gap(const Partition& partition, const Grid& grid, const TestFunction& phi) {
  if (!(partition.grid() == grid)) throw Error(ErrorKind::mismatch, "partition was built on a different grid");
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    const double chi = partition.in_b(i) ? 1.0 : 0.0;
    acc += (chi - partition.theta()[i]) * phi(grid.center(i), 0.0);
  }
  return std::abs(acc * grid.cell_volume());
}

}  // namespace mixhom
