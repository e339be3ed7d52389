#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mixhom/coupled_solver.hpp"
#include "mixhom/field.hpp"
#include "mixhom/geometry.hpp"
#include "mixhom/kernel.hpp"
#include "mixhom/limit_solver.hpp"
#include "mixhom/test_function.hpp"

namespace mixhom {

/// Built-in test functions. 1-d: 1, x, x2, cos_pi_x, damped_cos_pi_x.
/// 2-d adds y, xy, cos_pi_y and cos_pi_x_cos_pi_y.
std::vector<TestFunction> test_dictionary(int dim);
/// Dictionary entry by id; throws Error(config) for an unknown id.
TestFunction find_test_function(int dim, const std::string& id);

/// phi(x, t) (T - t) / T, which vanishes at t = T.
TestFunction vanishing_at(const TestFunction& phi, double horizon);

/// phi at A cell centers; on B cells the average of phi over the cell centers
/// of the containing component.
Field project_piecewise_constant(const TestFunction& phi, const Partition& partition, const Grid& grid, double t);

/// max_i |phi_n(x_i) - phi(x_i)|
double projection_error(const TestFunction& phi, const Partition& partition, double t);

struct WeakGaps {
  double gap_u = 0.0;
  double gap_a = 0.0;
  double gap_b = 0.0;
};

/// Space-time pairings |int int (u - (a + b)) phi|, |int int (chi_A u - a) phi|
/// and |int int (chi_B u - b) phi|: midpoint rule in space, trapezoid over the
/// snapshot times. Throws Error(mismatch) when the snapshot times or grids
/// differ.
WeakGaps weak_gap(const std::vector<Field>& u_traj, const std::vector<DensityPair>& limit_traj,
                  const TestFunction& phi, const Partition& partition);

/// Discrete integrated-by-parts balance of the A-side equation:
///   - int int d_t phi chi_A u - int chi_A u0 phi(., 0) - int int chi_A phi L u
/// which vanishes up to time-quadrature error. The trajectory must start at
/// t = 0. Throws Error(precondition) unless phi(., T) = 0 at every center.
double weak_form_residual(const std::vector<Field>& u_traj, const CoupledOperator& op, const TestFunction& phi);

enum class LimitVariant { standard, strip, strip_literal };
std::string_view to_string(LimitVariant v) noexcept;

struct SweepSpec {
  PartitionFamily family = PartitionFamily::alternating1d;
  std::vector<int> n_list{2, 4, 8, 16};
  double k = 0.5;
  double r = 0.25;
  KernelSpec kernel;
  InitialSpec initial;
  double horizon = 1.0;
  std::size_t snapshot_count = 11;
  double cfl_factor = 0.2;
  /// Time step of the limit system without strip diffusion.
  double limit_dt = 1e-3;
  /// Cells per axis per unit of n; 0 picks 64 in 1-d and 8 in 2-d.
  int base = 0;
  double strip_coefficient = 0.5;
  /// Test ids to report; empty means the whole dictionary.
  std::vector<std::string> tests;
  Exec exec = Exec::parallel;

  [[nodiscard]] int dim() const noexcept;
  [[nodiscard]] int resolution(int n) const noexcept;
  /// Throws Error(config) or Error(alignment) before any computation.
  void validate() const;
};

struct ReportRow {
  PartitionFamily family = PartitionFamily::alternating1d;
  int n = 0;
  std::string test_id;
  WeakGaps gaps;
  double weak_residual = 0.0;
  LimitVariant limit = LimitVariant::standard;
};

struct ConvergenceReport {
  SweepSpec spec;
  /// (n, m) per sweep entry.
  std::vector<std::pair<int, int>> resolutions;
  /// Sorted by n, then dictionary order, then limit variant.
  std::vector<ReportRow> rows;
};

ConvergenceReport run_sweep(const SweepSpec& spec);

/// Gaps at or below this size are round-off: every ratio criterion counts as
/// met once the finest gap falls under it.
inline constexpr double gap_floor = 2e-10;

struct RatioCheck {
  double gap_first = 0.0;
  double gap_last = 0.0;
  double ratio = 0.0;
  bool at_floor = false;
};

/// gap_u(n_max) / gap_u(n_min) for one test function and limit variant.
/// Throws Error(precondition) when the report lacks the rows.
RatioCheck end_to_end_ratio(const ConvergenceReport& report, const std::string& test_id,
                            LimitVariant limit = LimitVariant::standard);

}  // namespace mixhom
