#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "mixhom/geometry.hpp"
#include "mixhom/kernels.hpp"

namespace mixhom {

enum class KernelFamily { constant, gaussian, bump };

std::string_view to_string(KernelFamily family) noexcept;
KernelFamily parse_kernel_family(std::string_view name);

struct KernelSpec {
  KernelFamily family = KernelFamily::constant;
  /// Gaussian standard deviation or bump support radius.
  double width = 0.2;
  double sinkhorn_tol = 1e-13;
  int sinkhorn_max_iter = 20000;

  /// Throws Error(config) unless 0 < width <= 1, 0 < tol <= 1e-8, max_iter > 0.
  void validate() const;
};

/// Dense row-major square matrix.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t size, double fill = 0.0) : n(size), data(size * size, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

/// Symmetric diagonal scaling D M D with every row sum within tol of 1.
/// M must be symmetric, nonnegative and irreducible. Throws
/// Error(normalization) when the iteration does not reach tol within
/// max_iter sweeps (or breaks down on a zero row).
DenseMatrix sinkhorn_normalize(const DenseMatrix& m, double tol, int max_iter);

/// Quadrature matrix W[i][j] ~ J(x_i, x_j) h^dim of a symmetric unit-mass
/// kernel. The constant family is held implicitly (every entry equals the
/// cell volume, which is exactly J = 1 on the unit domain); the others are
/// dense.
class DiscreteKernel {
 public:
  [[nodiscard]] const KernelSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] bool is_uniform() const noexcept { return dense_.data.empty(); }
  /// Entry value of the implicit constant kernel.
  [[nodiscard]] double uniform_value() const noexcept { return uniform_value_; }
  /// Dense storage; empty for the constant family.
  [[nodiscard]] std::span<const double> dense() const noexcept { return dense_.data; }

  [[nodiscard]] double weight(std::size_t i, std::size_t j) const noexcept {
    return is_uniform() ? uniform_value_ : dense_(i, j);
  }
  [[nodiscard]] const std::vector<double>& row_sums() const noexcept { return row_sums_; }
  [[nodiscard]] double row_sum_defect() const noexcept { return row_sum_defect_; }
  [[nodiscard]] double symmetry_defect() const noexcept { return symmetry_defect_; }
  /// sup J = max W / h^dim.
  [[nodiscard]] double sup_density() const noexcept;

  /// y = W x.
  void apply(std::span<const double> x, std::span<double> y, Exec exec = Exec::parallel) const;

 private:
  friend DiscreteKernel discretize(const KernelSpec& spec, const Grid& grid);
  DiscreteKernel() = default;
  void finalize();

  KernelSpec spec_;
  Grid grid_;
  std::size_t size_ = 0;
  double uniform_value_ = 0.0;
  DenseMatrix dense_;
  std::vector<double> row_sums_;
  double row_sum_defect_ = 0.0;
  double symmetry_defect_ = 0.0;
};

/// Resolution caps for the dense families (cells per axis).
inline constexpr int dense_cap_1d = 512;
inline constexpr int dense_cap_2d = 96;

/// Throws Error(config) above the dense caps and Error(normalization) when a gaussian/bump kernel cannot be scaled,
/// in particular when its support does not connect the grid.
DiscreteKernel discretize(const KernelSpec& spec, const Grid& grid);

using Rng = std::mt19937_64;

struct JumpTarget {
  std::size_t cell = 0;
  Point position;
};

/// Draws a cell with probability W[from][j] and a uniform point inside it.
/// Mass missing from the row (at most the normalization tolerance) falls on
/// from_cell itself. O(size) per draw; use JumpSampler for repeated draws.
JumpTarget sample_target(const DiscreteKernel& kernel, std::size_t from_cell, Rng& rng);

/// Uniform point inside a grid cell.
Point uniform_in_cell(const Grid& grid, std::size_t cell, Rng& rng);

/// Precomputed row CDFs for repeated jump draws. Same law as sample_target.
class JumpSampler {
 public:
  explicit JumpSampler(const DiscreteKernel& kernel);

  [[nodiscard]] JumpTarget operator()(std::size_t from_cell, Rng& rng) const;
  [[nodiscard]] const DiscreteKernel& kernel() const noexcept { return *kernel_; }

 private:
  [[nodiscard]] std::size_t draw_cell(std::size_t from_cell, double u) const;

  const DiscreteKernel* kernel_;
  std::vector<double> cdf_;  // row-major cumulative sums, dense kernels only
};

}  // namespace mixhom
