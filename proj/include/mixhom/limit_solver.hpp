#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mixhom/field.hpp"
#include "mixhom/geometry.hpp"
#include "mixhom/kernel.hpp"
#include "mixhom/rk4.hpp"

namespace mixhom {

/// Densities of the white (label 1) and black (label 2) particles.
struct DensityPair {
  Field a;
  Field b;
  double t = 0.0;
};

/// Extra y-diffusion of b for the thin-strips limit.
struct StripMode {
  bool enabled = false;
  double coefficient = 0.5;
};

/// Right-hand side of the homogenized system
///
///   a' = W a - r a - theta W a + (1 - theta) W b
///   b' = theta W a - b W(1 - theta)           [+ c d_yy b in strip mode]
///
/// with r the kernel row sums. Holds a reference to the kernel.
class LimitOperator {
 public:
  [[nodiscard]] const Grid& grid() const noexcept { return kernel_->grid(); }
  [[nodiscard]] const DiscreteKernel& kernel() const noexcept { return *kernel_; }
  [[nodiscard]] const std::vector<double>& theta() const noexcept { return theta_; }
  [[nodiscard]] const StripMode& strip() const noexcept { return strip_; }
  [[nodiscard]] std::size_t size() const noexcept { return theta_.size(); }

  /// State layout: [a_0 .. a_{N-1}, b_0 .. b_{N-1}].
  void apply(std::span<const double> state, std::span<double> out, Exec exec = Exec::parallel) const;

 private:
  friend LimitOperator make_limit_operator(std::vector<double> theta, const DiscreteKernel& kernel, StripMode strip);
  LimitOperator() = default;

  const DiscreteKernel* kernel_ = nullptr;
  std::vector<double> theta_;
  std::vector<double> one_minus_theta_;
  // (W (1 - theta))_i
  std::vector<double> loss_;
  StripMode strip_;
  std::vector<std::size_t> y_offsets_;
  std::vector<std::size_t> y_neighbours_;
  double y_coef_ = 0.0;
};

/// Throws Error(config) unless every theta lies in (0,1) and strip mode is
/// only requested on 2-d grids; Error(mismatch) when sizes disagree.
LimitOperator make_limit_operator(std::vector<double> theta, const DiscreteKernel& kernel, StripMode strip = {});
LimitOperator make_limit_operator(const Partition& partition, const DiscreteKernel& kernel, StripMode strip = {});
LimitOperator make_limit_operator(std::vector<double>, DiscreteKernel&&, StripMode = {}) = delete;
LimitOperator make_limit_operator(const Partition&, DiscreteKernel&&, StripMode = {}) = delete;

/// a = (1 - theta) u0, b = theta u0.
DensityPair split_initial(const LimitOperator& op, const Field& u0);

DensityPair apply_limit_rhs(const LimitOperator& op, const DensityPair& s, Exec exec = Exec::parallel);

/// Throws Error(stability) when dt > cfl_factor h^2 in strip mode or
/// dt > 0.25 otherwise.
std::vector<DensityPair> integrate_limit(const LimitOperator& op, const DensityPair& s0,
                                         const IntegrationOptions& options);

/// (int a, int b)
std::pair<double, double> mass_pair(const DensityPair& s);

/// Gronwall rate C = 4 (1 + sup J^2) on the unit domain: solutions from data
/// a distance d apart in L2 stay within d e^{C t}.
double gronwall_rate(const LimitOperator& op);

/// L2 distance of two pairs, (|a - a'|^2 + |b - b'|^2)^(1/2).
double pair_distance(const DensityPair& x, const DensityPair& y);

}  // namespace mixhom
