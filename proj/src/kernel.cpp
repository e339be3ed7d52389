#include "mixhom/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "mixhom/error.hpp"

namespace mixhom {

std::string_view to_string(KernelFamily family) noexcept {
  switch (family) {
    case KernelFamily::constant: return "constant";
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::bump: return "bump";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  for (auto f : {KernelFamily::constant, KernelFamily::gaussian, KernelFamily::bump}) {
    if (to_string(f) == name) return f;
  }
  throw Error(ErrorKind::config, "unknown kernel family '" + std::string(name) + "'");
}

void KernelSpec::validate() const {
  if (!(width > 0.0 && width <= 1.0)) throw Error(ErrorKind::config, "kernel width must lie in (0, 1]");
  if (!(sinkhorn_tol > 0.0 && sinkhorn_tol <= 1e-8)) {
    throw Error(ErrorKind::config, "kernel normalization tolerance must lie in (0, 1e-8]");
  }
  if (sinkhorn_max_iter <= 0) throw Error(ErrorKind::config, "kernel normalization needs a positive iteration cap");
}

namespace {

double max_row_defect(const DenseMatrix& w) {
  double defect = 0.0;
  for (std::size_t i = 0; i < w.n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.n; ++j) s += w(i, j);
    defect = std::max(defect, std::abs(s - 1.0));
  }
  return defect;
}

DenseMatrix scaled(const DenseMatrix& m, const std::vector<double>& d) {
  DenseMatrix w(m.n);
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = i; j < m.n; ++j) {
      const double v = d[i] * m(i, j) * d[j];
      w(i, j) = v;
      w(j, i) = v;
    }
  }
  return w;
}

bool support_connected(const DenseMatrix& m) {
  if (m.n == 0) return true;
  std::vector<char> seen(m.n, 0);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const auto i = frontier.front();
    frontier.pop();
    for (std::size_t j = 0; j < m.n; ++j) {
      if (!seen[j] && m(i, j) > 0.0) {
        seen[j] = 1;
        ++reached;
        frontier.push(j);
      }
    }
  }
  return reached == m.n;
}

}  // namespace

DenseMatrix sinkhorn_normalize(const DenseMatrix& m, double tol, int max_iter) {
  const std::size_t n = m.n;
  std::vector<double> d(n, 1.0);
  std::vector<double> md(n);
  for (int iter = 0; iter < max_iter; ++iter) {
    double defect = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += m(i, j) * d[j];
      if (!(acc > 0.0) || !std::isfinite(acc)) {
        throw Error(ErrorKind::normalization,
                    "symmetric scaling broke down at row " + std::to_string(i) + " (zero or non-finite row mass)");
      }
      md[i] = acc;
      defect = std::max(defect, std::abs(d[i] * acc - 1.0));
    }
    if (defect <= 0.5 * tol) {
      DenseMatrix w = scaled(m, d);
      if (max_row_defect(w) <= tol) return w;
    }
    // Geometric-mean update keeps D M D symmetric and converges for
    // symmetric matrices with total support.
    for (std::size_t i = 0; i < n; ++i) d[i] = std::sqrt(d[i] / md[i]);
  }
  throw Error(ErrorKind::normalization,
              "symmetric scaling did not reach tolerance within " + std::to_string(max_iter) + " sweeps");
}

double DiscreteKernel::sup_density() const noexcept {
  const double vol = grid_.cell_volume();
  if (is_uniform()) return uniform_value_ / vol;
  return *std::max_element(dense_.data.begin(), dense_.data.end()) / vol;
}

void DiscreteKernel::apply(std::span<const double> x, std::span<double> y, Exec exec) const {
  if (is_uniform()) {
    const double total = uniform_value_ * kernels::sum(exec, x);
    std::fill(y.begin(), y.end(), total);
    return;
  }
  kernels::matvec(exec, dense_.data, size_, x, y);
}

void DiscreteKernel::finalize() {
  row_sums_.assign(size_, 0.0);
  row_sum_defect_ = 0.0;
  symmetry_defect_ = 0.0;
  for (std::size_t i = 0; i < size_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < size_; ++j) s += weight(i, j);
    row_sums_[i] = s;
    row_sum_defect_ = std::max(row_sum_defect_, std::abs(s - 1.0));
  }
  if (!is_uniform()) {
    for (std::size_t i = 0; i < size_; ++i) {
      for (std::size_t j = i + 1; j < size_; ++j) {
        symmetry_defect_ = std::max(symmetry_defect_, std::abs(dense_(i, j) - dense_(j, i)));
      }
    }
  }
}

DiscreteKernel discretize(const KernelSpec& spec, const Grid& grid) {
  spec.validate();
  DiscreteKernel k;
  k.spec_ = spec;
  k.grid_ = grid;
  k.size_ = grid.cell_count();
  if (spec.family == KernelFamily::constant) {
    k.uniform_value_ = grid.cell_volume();
    k.finalize();
    return k;
  }

  const int cap = grid.dim() == 1 ? dense_cap_1d : dense_cap_2d;
  if (grid.m() > cap) {
    throw Error(ErrorKind::config, std::string(to_string(spec.family)) + " kernels are stored densely; m = " +
                                       std::to_string(grid.m()) + " exceeds the cap of " + std::to_string(cap) +
                                       " cells per axis in " + std::to_string(grid.dim()) + "-d");
  }
  DenseMatrix raw(k.size_);
  const double width = spec.width;
  for (std::size_t i = 0; i < k.size_; ++i) {
    const Point pi = grid.center(i);
    for (std::size_t j = i; j < k.size_; ++j) {
      const Point pj = grid.center(j);
      const double dx = pi.x - pj.x;
      const double dy = pi.y - pj.y;
      const double r2 = dx * dx + dy * dy;
      double g = 0.0;
      if (spec.family == KernelFamily::gaussian) {
        g = std::exp(-r2 / (2.0 * width * width));
      } else {
        const double s = r2 / (width * width);
        g = s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
      }
      raw(i, j) = g;
      raw(j, i) = g;
    }
  }
  if (!support_connected(raw)) {
    throw Error(ErrorKind::normalization, std::string(to_string(spec.family)) + " kernel of width " +
                                              std::to_string(width) +
                                              " does not connect the grid cells; use a larger width (at least "
                                              "about one cell, h = " +
                                              std::to_string(grid.h()) + ")");
  }
  k.dense_ = sinkhorn_normalize(raw, spec.sinkhorn_tol, spec.sinkhorn_max_iter);
  k.finalize();
  return k;
}

Point uniform_in_cell(const Grid& grid, std::size_t cell, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Point p = grid.corner(cell);
  p.x += grid.h() * unit(rng);
  if (grid.dim() == 2) p.y += grid.h() * unit(rng);
  return p;
}

JumpTarget sample_target(const DiscreteKernel& kernel, std::size_t from_cell, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  const std::size_t n = kernel.size();
  std::size_t cell = from_cell;
  if (kernel.is_uniform()) {
    cell = std::min(n - 1, static_cast<std::size_t>(u * static_cast<double>(n)));
  } else {
    double cum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      cum += kernel.weight(from_cell, j);
      if (u < cum) {
        cell = j;
        break;
      }
    }
  }
  return {cell, uniform_in_cell(kernel.grid(), cell, rng)};
}

JumpSampler::JumpSampler(const DiscreteKernel& kernel) : kernel_(&kernel) {
  if (kernel.is_uniform()) return;
  const std::size_t n = kernel.size();
  cdf_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    double cum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      cum += kernel.weight(i, j);
      cdf_[i * n + j] = cum;
    }
  }
}

std::size_t JumpSampler::draw_cell(std::size_t from_cell, double u) const {
  const std::size_t n = kernel_->size();
  if (kernel_->is_uniform()) return std::min(n - 1, static_cast<std::size_t>(u * static_cast<double>(n)));
  const auto first = cdf_.begin() + static_cast<std::ptrdiff_t>(from_cell * n);
  const auto last = first + static_cast<std::ptrdiff_t>(n);
  const auto it = std::upper_bound(first, last, u);
  return it == last ? from_cell : static_cast<std::size_t>(it - first);
}

JumpTarget JumpSampler::operator()(std::size_t from_cell, Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t cell = draw_cell(from_cell, unit(rng));
  return {cell, uniform_in_cell(kernel_->grid(), cell, rng)};
}

}  // namespace mixhom
