#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mixhom/error.hpp"
#include "mixhom/kernels.hpp"

namespace mixhom {

/// Time stepping request shared by the deterministic solvers.
struct IntegrationOptions {
  double horizon = 1.0;
  double dt = 1e-3;
  /// Sorted output times in [0, horizon].
  std::vector<double> snapshots;
  /// Stability bound factor: dt must not exceed cfl_factor * h^2 for
  /// operators with a diffusion part.
  double cfl_factor = 0.2;
  Exec exec = Exec::parallel;
};

/// n equally spaced times 0, T/(n-1), ..., T.
std::vector<double> uniform_snapshots(double horizon, std::size_t count);

/// Throws Error(precondition) unless the snapshot list is sorted and inside
/// [0, horizon], and dt is positive.
void validate_schedule(const IntegrationOptions& options);

/// Classical four-stage Runge-Kutta march through the snapshot times.
/// `rhs(state, derivative)` evaluates the right-hand side; `on_snapshot(t,
/// state)` is called at every requested time. Full steps of dt are taken and
/// the last substep before each snapshot is shortened to land on it exactly.
template <class Rhs, class OnSnapshot>
void integrate_rk4(Rhs&& rhs, std::vector<double>& state, const IntegrationOptions& options, OnSnapshot&& on_snapshot) {
  validate_schedule(options);
  const std::size_t n = state.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  const Exec exec = options.exec;

  auto step = [&](double dt) {
    rhs(std::span<const double>(state), std::span<double>(k1));
    kernels::axpy_into(exec, state, 0.5 * dt, k1, tmp);
    rhs(std::span<const double>(tmp), std::span<double>(k2));
    kernels::axpy_into(exec, state, 0.5 * dt, k2, tmp);
    rhs(std::span<const double>(tmp), std::span<double>(k3));
    kernels::axpy_into(exec, state, dt, k3, tmp);
    rhs(std::span<const double>(tmp), std::span<double>(k4));
    kernels::rk4_combine(exec, state, dt, k1, k2, k3, k4);
  };

  double t = 0.0;
  for (double target : options.snapshots) {
    const double span = target - t;
    if (span > 0.0) {
      const double ratio = span / options.dt;
      // Steps that fit entirely; a remainder below 1e-9 dt is absorbed by the
      // last full step instead of producing a degenerate substep.
      auto full = static_cast<std::size_t>(std::floor(ratio));
      double remainder = span - static_cast<double>(full) * options.dt;
      if (remainder < 1e-9 * options.dt) {
        if (full > 0) {
          --full;
          remainder += options.dt;
        }
      }
      for (std::size_t s = 0; s < full; ++s) step(options.dt);
      if (remainder > 0.0) step(remainder);
    }
    t = target;
    on_snapshot(t, std::span<const double>(state));
  }
}

}  // namespace mixhom
