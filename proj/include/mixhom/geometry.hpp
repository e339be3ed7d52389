#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace mixhom {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Uniform midpoint grid on (0,1)^dim. Cells are numbered row-major:
/// index = iy * m + ix (iy is always 0 in 1-d).
class Grid {
 public:
  Grid() = default;

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] int m() const noexcept { return m_; }
  [[nodiscard]] double h() const noexcept { return h_; }
  [[nodiscard]] std::size_t cell_count() const noexcept;
  [[nodiscard]] double cell_volume() const noexcept { return dim_ == 1 ? h_ : h_ * h_; }

  [[nodiscard]] int ix(std::size_t cell) const noexcept { return static_cast<int>(cell % static_cast<std::size_t>(m_)); }
  [[nodiscard]] int iy(std::size_t cell) const noexcept { return static_cast<int>(cell / static_cast<std::size_t>(m_)); }
  [[nodiscard]] std::size_t index(int ix, int iy = 0) const noexcept;
  [[nodiscard]] Point center(std::size_t cell) const noexcept;
  /// Lower-left corner of a cell.
  [[nodiscard]] Point corner(std::size_t cell) const noexcept;
  /// Cell containing p; points on the outer boundary are assigned to the
  /// adjacent cell.
  [[nodiscard]] std::size_t locate(Point p) const noexcept;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  friend Grid make_grid(int dim, int m);
  Grid(int dim, int m);

  int dim_ = 1;
  int m_ = 2;
  double h_ = 0.5;
};

/// Throws Error(config) for dim outside {1,2} or m < 2.
Grid make_grid(int dim, int m);

enum class PartitionFamily { alternating1d, chessboard, balls, strips };
enum class Region : std::uint8_t { A, B };

std::string_view to_string(PartitionFamily family) noexcept;
PartitionFamily parse_partition_family(std::string_view name);

/// Half-open range of cell indices [ix0, ix1) x [iy0, iy1).
struct CellRect {
  int ix0 = 0;
  int ix1 = 0;
  int iy0 = 0;
  int iy1 = 1;
};

/// One connected component of the B region.
struct Component {
  CellRect bounds;
  std::vector<std::size_t> cells;
  double diameter = 0.0;
  /// True when the component fills its bounding rectangle.
  bool rectangular = true;
};

/// Decomposition of the closed domain into the nonlocal set A and the local
/// set B. Immutable once built.
class Partition {
 public:
  [[nodiscard]] PartitionFamily family() const noexcept { return family_; }
  [[nodiscard]] int n() const noexcept { return n_; }
  /// B-fraction of the alternating family; 0 for the others.
  [[nodiscard]] double k() const noexcept { return k_; }
  /// Radius factor of the balls family; 0 for the others.
  [[nodiscard]] double r() const noexcept { return r_; }
  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }

  [[nodiscard]] Region label(std::size_t cell) const noexcept { return labels_[cell]; }
  [[nodiscard]] bool in_b(std::size_t cell) const noexcept { return labels_[cell] == Region::B; }
  [[nodiscard]] const std::vector<Region>& labels() const noexcept { return labels_; }
  /// Component index of a B cell, -1 for A cells.
  [[nodiscard]] int component_of(std::size_t cell) const noexcept { return component_of_[cell]; }
  [[nodiscard]] const std::vector<Component>& components() const noexcept { return components_; }
  [[nodiscard]] const std::vector<double>& theta() const noexcept { return theta_; }
  [[nodiscard]] double max_diam() const noexcept { return max_diam_; }

  [[nodiscard]] std::size_t count(Region region) const noexcept;
  /// Lebesgue measure of B (cell count times cell volume).
  [[nodiscard]] double b_measure() const noexcept;
  /// Narrowest side of any B-component bounding box, in length units.
  [[nodiscard]] double min_component_width() const noexcept;

 private:
  friend class PartitionBuilder;
  Partition() = default;

  PartitionFamily family_ = PartitionFamily::alternating1d;
  int n_ = 1;
  double k_ = 0.0;
  double r_ = 0.0;
  Grid grid_;
  std::vector<Region> labels_;
  std::vector<int> component_of_;
  std::vector<Component> components_;
  std::vector<double> theta_;
  double max_diam_ = 0.0;
};

/// n subintervals, each split A-left / B-right with |B^j| = k/n.
Partition make_alternating_1d(int n, double k, const Grid& grid);
/// n x n board; squares with odd (i + j) are B.
Partition make_chessboard(int n, const Grid& grid);
/// One rasterized disc of radius r/n per square of side 1/n; a cell is B
/// when its center lies strictly inside the disc.
Partition make_balls(int n, double r, const Grid& grid);
/// n full-height vertical strips of width 1/n; odd strips are B.
Partition make_strips(int n, const Grid& grid);

/// Diameter of a union of grid cells, measured between cell corners.
double cells_diameter(const Grid& grid, const std::vector<std::size_t>& cells);

struct TestFunction;


/// |sum_i (chi_B(x_i) - theta(x_i)) phi(x_i, 0) h^dim|, the discrete pairing
/// that tends to zero when chi_B converges weakly to theta.
double weak_density_gap(const Partition& partition, const Grid& grid, const TestFunction& phi);

}  // namespace mixhom
