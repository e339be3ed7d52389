#include "mixhom/coupled_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mixhom/error.hpp"

namespace mixhom {

CoupledOperator assemble(const Partition& partition, const DiscreteKernel& kernel, const Grid& grid) {
  if (!(partition.grid() == grid)) throw Error(ErrorKind::mismatch, "partition was built on a different grid");
  if (!(kernel.grid() == grid)) throw Error(ErrorKind::mismatch, "kernel was discretized on a different grid");

  CoupledOperator op;
  op.partition_ = &partition;
  op.kernel_ = &kernel;
  const std::size_t n = grid.cell_count();
  op.is_b_.resize(n);
  op.chi_a_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    op.is_b_[i] = partition.in_b(i) ? 1 : 0;
    op.chi_a_[i] = partition.in_b(i) ? 0.0 : 1.0;
  }
  op.a_count_ = partition.count(Region::A);

  op.diag_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!op.is_b_[i]) {
      op.diag_[i] = kernel.row_sums()[i];
      continue;
    }
    if (kernel.is_uniform()) {
      op.diag_[i] = kernel.uniform_value() * static_cast<double>(op.a_count_);
    } else {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += op.chi_a_[j] * kernel.weight(i, j);
      op.diag_[i] = acc;
    }
  }

  // Same-component neighbours; ghosts mirror the cell itself and drop out.
  op.offsets_.assign(n + 1, 0);
  const int m = grid.m();
  for (std::size_t i = 0; i < n; ++i) {
    op.offsets_[i + 1] = op.offsets_[i];
    if (!op.is_b_[i]) continue;
    const int ix = grid.ix(i);
    const int iy = grid.iy(i);
    auto try_add = [&](int jx, int jy) {
      if (jx < 0 || jx >= m || jy < 0 || jy >= m) return;
      const std::size_t j = grid.index(jx, jy);
      if (partition.component_of(j) == partition.component_of(i)) {
        op.neighbours_.push_back(j);
        ++op.offsets_[i + 1];
      }
    };
    try_add(ix - 1, iy);
    try_add(ix + 1, iy);
    if (grid.dim() == 2) {
      try_add(ix, iy - 1);
      try_add(ix, iy + 1);
    }
  }
  op.lap_coef_ = 0.5 / (grid.h() * grid.h());
  return op;
}

void CoupledOperator::apply(std::span<const double> u, std::span<double> out, Exec exec) const {
  const std::size_t n = size();
  if (u.size() != n || out.size() != n) throw Error(ErrorKind::mismatch, "field size does not match the operator");
  if (kernel_->is_uniform()) {
    const double c = kernel_->uniform_value();
    const double all = c * kernels::sum(exec, u);
    const double from_a = c * kernels::dot(exec, u, chi_a_);
    for (std::size_t i = 0; i < n; ++i) out[i] = (is_b_[i] ? from_a : all) - diag_[i] * u[i];
  } else {
    std::vector<double> ua(n);
    for (std::size_t i = 0; i < n; ++i) ua[i] = chi_a_[i] * u[i];
    kernels::select_matvec(exec, kernel_->dense(), n, u, ua, is_b_, out);
    for (std::size_t i = 0; i < n; ++i) out[i] -= diag_[i] * u[i];
  }
  kernels::stencil_add(exec, stencil(), lap_coef_, u, out);
}

Field apply_generator(const CoupledOperator& op, const Field& u, Exec exec) {
  if (!(u.grid == op.grid())) throw Error(ErrorKind::mismatch, "field lives on a different grid");
  Field out(u.grid, 0.0, u.t);
  op.apply(u.values, out.values, exec);
  return out;
}

namespace {

// sum_{i,j in S} (u_j - u_i)^2 = 2 |S| sum_{i in S} (u_i - mean_S)^2
double uniform_pair_sum(const std::vector<double>& u, const std::vector<std::uint8_t>& take, std::uint8_t flag) {
  double s = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (take[i] == flag) {
      s += u[i];
      ++count;
    }
  }
  if (count == 0) return 0.0;
  const double mean = s / static_cast<double>(count);
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (take[i] == flag) acc += (u[i] - mean) * (u[i] - mean);
  }
  return 2.0 * static_cast<double>(count) * acc;
}

}  // namespace

double energy(const CoupledOperator& op, const Field& u) {
  if (!(u.grid == op.grid())) throw Error(ErrorKind::mismatch, "field lives on a different grid");
  const Grid& g = op.grid();
  const auto& v = u.values;
  const std::size_t n = v.size();
  const Partition& p = op.partition();

  double grad = 0.0;
  const auto st = op.stencil();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t q = st.offsets[i]; q < st.offsets[i + 1]; ++q) {
      const std::size_t j = st.neighbours[q];
      if (j > i) {
        const double d = (v[j] - v[i]) / g.h();
        grad += d * d;
      }
    }
  }

  double aa = 0.0;
  double ab = 0.0;
  const DiscreteKernel& k = op.kernel();
  if (k.is_uniform()) {
    std::vector<std::uint8_t> label(n);
    for (std::size_t i = 0; i < n; ++i) label[i] = p.in_b(i) ? 1 : 0;
    aa = k.uniform_value() * uniform_pair_sum(v, label, 0);
    // sum_{A x B} (u_j - u_i)^2 = |B| sum_A u^2 + |A| sum_B u^2 - 2 sum_A u sum_B u,
    // written around the B mean to avoid cancellation
    double sb = 0.0;
    std::size_t nb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (p.in_b(i)) {
        sb += v[i];
        ++nb;
      }
    }
    const double mean_b = nb ? sb / static_cast<double>(nb) : 0.0;
    double var_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (p.in_b(i)) var_b += (v[i] - mean_b) * (v[i] - mean_b);
    }
    double cross = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!p.in_b(i)) cross += static_cast<double>(nb) * (v[i] - mean_b) * (v[i] - mean_b) + var_b;
    }
    ab = k.uniform_value() * cross;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (p.in_b(i)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const double d = v[j] - v[i];
        if (p.in_b(j)) ab += k.weight(i, j) * d * d;
        else aa += k.weight(i, j) * d * d;
      }
    }
  }
  return (0.25 * grad + 0.25 * aa + 0.5 * ab) * g.cell_volume();
}

std::vector<Field> integrate(const CoupledOperator& op, const Field& u0, const IntegrationOptions& options) {
  if (!(u0.grid == op.grid())) throw Error(ErrorKind::mismatch, "initial field lives on a different grid");
  const double h = op.grid().h();
  const double bound = options.cfl_factor * h * h;
  if (options.dt > bound * (1.0 + 1e-12)) {
    throw Error(ErrorKind::stability, "dt = " + std::to_string(options.dt) + " exceeds the stability bound " +
                                          std::to_string(options.cfl_factor) + " h^2 = " + std::to_string(bound));
  }
  std::vector<double> state = u0.values;
  std::vector<Field> out;
  out.reserve(options.snapshots.size());
  double last_l2 = l2_norm(u0);
  double last_e = energy(op, u0);
  integrate_rk4([&](std::span<const double> x, std::span<double> dx) { op.apply(x, dx, options.exec); }, state,
                options, [&](double t, std::span<const double> x) {
                  Field f(u0.grid, std::vector<double>(x.begin(), x.end()), t);
                  const double l2 = l2_norm(f);
                  const double e = energy(op, f);
                  if (l2 > last_l2 + 1e-12 * std::max(1.0, last_l2) || e > last_e + 1e-12 * std::max(1.0, last_e)) {
                    throw Error(ErrorKind::stability, "L2 norm or energy increased at t = " + std::to_string(t) +
                                                          "; reduce dt");
                  }
                  last_l2 = l2;
                  last_e = e;
                  out.push_back(std::move(f));
                });
  return out;
}

}  // namespace mixhom
