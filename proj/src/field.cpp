#include "mixhom/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mixhom/error.hpp"

namespace mixhom {

double total_mass(const Field& u) {
  double acc = 0.0;
  for (double v : u.values) acc += v;
  return acc * u.grid.cell_volume();
}

double l2_norm(const Field& u) {
  double acc = 0.0;
  for (double v : u.values) acc += v * v;
  return std::sqrt(acc * u.grid.cell_volume());
}

double min_value(const Field& u) { return *std::min_element(u.values.begin(), u.values.end()); }

Field coarsen(const Field& u, const Grid& coarse) {
  const Grid& fine = u.grid;
  if (fine.dim() != coarse.dim() || fine.m() % coarse.m() != 0) {
    throw Error(ErrorKind::mismatch, "cannot coarsen a " + std::to_string(fine.m()) + "-cell axis onto " +
                                         std::to_string(coarse.m()) + " cells");
  }
  const int f = fine.m() / coarse.m();
  Field out(coarse, 0.0, u.t);
  for (std::size_t i = 0; i < fine.cell_count(); ++i) {
    out.values[coarse.index(fine.ix(i) / f, fine.iy(i) / f)] += u.values[i];
  }
  const double share = fine.cell_volume() / coarse.cell_volume();
  for (auto& v : out.values) v *= share;
  return out;
}

std::string_view to_string(InitialKind kind) noexcept {
  switch (kind) {
    case InitialKind::uniform: return "uniform";
    case InitialKind::cosine_bump: return "cosine-bump";
    case InitialKind::indicator: return "indicator";
  }
  return "unknown";
}

InitialKind parse_initial_kind(std::string_view name) {
  for (auto k : {InitialKind::uniform, InitialKind::cosine_bump, InitialKind::indicator}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorKind::config, "unknown initial condition '" + std::string(name) + "'");
}

void InitialSpec::validate(int dim) const {
  if (kind == InitialKind::cosine_bump) {
    if (!(alpha > -1.0 && alpha < 1.0)) throw Error(ErrorKind::config, "cosine-bump alpha must lie in (-1, 1)");
    for (const auto& mode : modes) {
      if (mode != "x" && mode != "y" && mode != "xy") {
        throw Error(ErrorKind::config, "cosine-bump mode must be one of x, y, xy; got '" + mode + "'");
      }
      if (dim == 1 && mode != "x") throw Error(ErrorKind::config, "cosine-bump mode '" + mode + "' needs a 2-d grid");
    }
  }
  if (kind == InitialKind::indicator) {
    if (!(lo.x < hi.x) || (dim == 2 && !(lo.y < hi.y))) {
      throw Error(ErrorKind::config, "indicator box must have lo < hi on every axis");
    }
  }
}

Field make_initial(const InitialSpec& spec, const Grid& grid) {
  spec.validate(grid.dim());
  Field u(grid, 1.0);
  switch (spec.kind) {
    case InitialKind::uniform:
      break;
    case InitialKind::cosine_bump: {
      std::vector<std::string> modes = spec.modes;
      if (modes.empty()) modes.push_back(grid.dim() == 1 ? "x" : "xy");
      const double pi = std::numbers::pi;
      for (std::size_t i = 0; i < grid.cell_count(); ++i) {
        const Point p = grid.center(i);
        double acc = 0.0;
        for (const auto& mode : modes) {
          if (mode == "x") acc += std::cos(pi * p.x);
          else if (mode == "y") acc += std::cos(pi * p.y);
          else acc += std::cos(pi * p.x) * std::cos(pi * p.y);
        }
        u.values[i] = 1.0 + spec.alpha * acc / static_cast<double>(modes.size());
      }
      break;
    }
    case InitialKind::indicator: {
      std::size_t inside = 0;
      for (std::size_t i = 0; i < grid.cell_count(); ++i) {
        const Point p = grid.center(i);
        const bool in = p.x >= spec.lo.x && p.x <= spec.hi.x &&
                        (grid.dim() == 1 || (p.y >= spec.lo.y && p.y <= spec.hi.y));
        u.values[i] = in ? 1.0 : 0.0;
        inside += in ? 1 : 0;
      }
      if (inside == 0) throw Error(ErrorKind::config, "indicator box contains no cell centers");
      const double scale = 1.0 / (static_cast<double>(inside) * grid.cell_volume());
      for (auto& v : u.values) v *= scale;
      break;
    }
  }
  return u;
}

}  // namespace mixhom
