#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mixhom/geometry.hpp"

namespace mixhom {

/// One value per grid cell (a density: mass per unit volume) at time t.
struct Field {
  Grid grid;
  std::vector<double> values;
  double t = 0.0;

  Field() = default;
  Field(const Grid& g, double fill = 0.0, double time = 0.0) : grid(g), values(g.cell_count(), fill), t(time) {}
  Field(const Grid& g, std::vector<double> v, double time = 0.0) : grid(g), values(std::move(v)), t(time) {}
};

/// sum_i u_i h^dim
double total_mass(const Field& u);
/// (sum_i u_i^2 h^dim)^(1/2)
double l2_norm(const Field& u);
double min_value(const Field& u);

/// Cell averages of u on a coarser grid of the same dimension whose
/// resolution divides u's. Throws Error(mismatch) otherwise.
Field coarsen(const Field& u, const Grid& coarse);

enum class InitialKind { uniform, cosine_bump, indicator };

/// Initial densities. `uniform` is u0 = 1. `cosine-bump` is
/// u0 = 1 + alpha * mean of the selected modes, where mode "x" is cos(pi x),
/// "y" is cos(pi y) and "xy" is cos(pi x) cos(pi y); |alpha| < 1 keeps u0
/// positive. `indicator` is the normalized indicator of the box
/// [lo, hi] (cells whose centers fall inside).
struct InitialSpec {
  InitialKind kind = InitialKind::uniform;
  double alpha = 0.5;
  std::vector<std::string> modes;  // empty: "x" in 1-d, "xy" in 2-d
  Point lo{0.0, 0.0};
  Point hi{1.0, 1.0};

  void validate(int dim) const;
};

std::string_view to_string(InitialKind kind) noexcept;
InitialKind parse_initial_kind(std::string_view name);

Field make_initial(const InitialSpec& spec, const Grid& grid);

}  // namespace mixhom
