#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mixhom/field.hpp"
#include "mixhom/geometry.hpp"
#include "mixhom/kernel.hpp"
#include "mixhom/rk4.hpp"

namespace mixhom {

/// Generator of the mixed local/nonlocal evolution on a partitioned grid.
///
///   (L u)_i = sum_j W_ij (1 - chi_B(i) chi_B(j)) (u_j - u_i)
///             + chi_B(i) * 1/2 * (Neumann Laplacian of u inside i's component)_i
///
/// The Laplacian uses mirrored ghosts on every component boundary, so only
/// neighbours in the same component contribute. The operator keeps
/// references to the partition and kernel; both must outlive it.
class CoupledOperator {
 public:
  [[nodiscard]] const Partition& partition() const noexcept { return *partition_; }
  [[nodiscard]] const DiscreteKernel& kernel() const noexcept { return *kernel_; }
  [[nodiscard]] const Grid& grid() const noexcept { return partition_->grid(); }
  [[nodiscard]] std::size_t size() const noexcept { return is_b_.size(); }
  [[nodiscard]] kernels::StencilView stencil() const noexcept { return {offsets_, neighbours_}; }
  /// 1/2 h^-2
  [[nodiscard]] double laplacian_coefficient() const noexcept { return lap_coef_; }

  /// out = L u. Pure; safe to call concurrently.
  void apply(std::span<const double> u, std::span<double> out, Exec exec = Exec::parallel) const;

 private:
  friend CoupledOperator assemble(const Partition& partition, const DiscreteKernel& kernel, const Grid& grid);
  CoupledOperator() = default;

  const Partition* partition_ = nullptr;
  const DiscreteKernel* kernel_ = nullptr;
  std::vector<std::uint8_t> is_b_;
  std::vector<double> chi_a_;
  // sum over A-columns of W for each row; the full row sum for A rows
  std::vector<double> diag_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> neighbours_;
  double lap_coef_ = 0.0;
  std::size_t a_count_ = 0;
};

/// Throws Error(mismatch) when partition or kernel live on a grid other than
/// `grid`.
CoupledOperator assemble(const Partition& partition, const DiscreteKernel& kernel, const Grid& grid);
CoupledOperator assemble(Partition&&, const DiscreteKernel&, const Grid&) = delete;
CoupledOperator assemble(const Partition&, DiscreteKernel&&, const Grid&) = delete;

Field apply_generator(const CoupledOperator& op, const Field& u, Exec exec = Exec::parallel);

/// Discrete Dirichlet energy, E = -1/2 <u, L u> in the h^dim weighted
/// product, evaluated by direct summation:
///   1/4 sum over component edges ((u_j - u_i)/h)^2 h^dim
///   + 1/4 sum_{i,j in A} W_ij (u_j - u_i)^2 h^dim
///   + 1/2 sum_{i in A, j in B} W_ij (u_j - u_i)^2 h^dim
double energy(const CoupledOperator& op, const Field& u);

/// Fields at every snapshot time. Throws Error(stability) when
/// dt > cfl_factor h^2, or when the L2 norm or the energy grows between
/// snapshots by more than 1e-12 (relative).
std::vector<Field> integrate(const CoupledOperator& op, const Field& u0, const IntegrationOptions& options);

}  // namespace mixhom
