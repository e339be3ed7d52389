#include "mixhom/limit_solver.hpp"

#include <cmath>
#include <string>

#include "mixhom/error.hpp"

namespace mixhom {

LimitOperator make_limit_operator(std::vector<double> theta, const DiscreteKernel& kernel, StripMode strip) {
  const Grid& g = kernel.grid();
  const std::size_t n = g.cell_count();
  if (theta.size() != n) throw Error(ErrorKind::mismatch, "theta has the wrong number of cells for the kernel grid");
  for (double t : theta) {
    if (!(t > 0.0 && t < 1.0)) throw Error(ErrorKind::config, "theta must lie strictly inside (0,1)");
  }
  if (strip.enabled && g.dim() != 2) throw Error(ErrorKind::config, "strip mode needs a 2-d grid");
  if (strip.enabled && !(strip.coefficient > 0.0)) {
    throw Error(ErrorKind::config, "strip diffusion coefficient must be positive");
  }

  LimitOperator op;
  op.kernel_ = &kernel;
  op.theta_ = std::move(theta);
  op.strip_ = strip;
  op.one_minus_theta_.resize(n);
  for (std::size_t i = 0; i < n; ++i) op.one_minus_theta_[i] = 1.0 - op.theta_[i];
  op.loss_.resize(n);
  kernel.apply(op.one_minus_theta_, op.loss_, Exec::serial);

  if (strip.enabled) {
    const int m = g.m();
    op.y_offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      op.y_offsets_[i + 1] = op.y_offsets_[i];
      const int iy = g.iy(i);
      for (int jy : {iy - 1, iy + 1}) {
        if (jy < 0 || jy >= m) continue;
        op.y_neighbours_.push_back(g.index(g.ix(i), jy));
        ++op.y_offsets_[i + 1];
      }
    }
    op.y_coef_ = strip.coefficient / (g.h() * g.h());
  }
  return op;
}

LimitOperator make_limit_operator(const Partition& partition, const DiscreteKernel& kernel, StripMode strip) {
  if (!(partition.grid() == kernel.grid())) throw Error(ErrorKind::mismatch, "partition and kernel grids differ");
  return make_limit_operator(partition.theta(), kernel, strip);
}

void LimitOperator::apply(std::span<const double> state, std::span<double> out, Exec exec) const {
  const std::size_t n = size();
  if (state.size() != 2 * n || out.size() != 2 * n) {
    throw Error(ErrorKind::mismatch, "density pair size does not match the operator");
  }
  const auto a = state.first(n);
  const auto b = state.subspan(n, n);
  auto da = out.first(n);
  auto db = out.subspan(n, n);
  std::vector<double> wa(n), wb(n);
  kernel_->apply(a, wa, exec);
  kernel_->apply(b, wb, exec);
  const auto& r = kernel_->row_sums();
  for (std::size_t i = 0; i < n; ++i) {
    da[i] = wa[i] - r[i] * a[i] - theta_[i] * wa[i] + one_minus_theta_[i] * wb[i];
    db[i] = theta_[i] * wa[i] - b[i] * loss_[i];
  }
  if (strip_.enabled) kernels::stencil_add(exec, {y_offsets_, y_neighbours_}, y_coef_, b, db);
}

DensityPair split_initial(const LimitOperator& op, const Field& u0) {
  if (!(u0.grid == op.grid())) throw Error(ErrorKind::mismatch, "initial field lives on a different grid");
  DensityPair s{Field(u0.grid, 0.0, u0.t), Field(u0.grid, 0.0, u0.t), u0.t};
  for (std::size_t i = 0; i < op.size(); ++i) {
    s.a.values[i] = (1.0 - op.theta()[i]) * u0.values[i];
    s.b.values[i] = op.theta()[i] * u0.values[i];
  }
  return s;
}

namespace {

std::vector<double> pack(const DensityPair& s) {
  std::vector<double> x(s.a.values);
  x.insert(x.end(), s.b.values.begin(), s.b.values.end());
  return x;
}

DensityPair unpack(const Grid& g, std::span<const double> x, double t) {
  const std::size_t n = g.cell_count();
  return {Field(g, std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n)), t),
          Field(g, std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(n), x.end()), t), t};
}

void check_grid(const LimitOperator& op, const DensityPair& s) {
  if (!(s.a.grid == op.grid()) || !(s.b.grid == op.grid())) {
    throw Error(ErrorKind::mismatch, "density pair lives on a different grid");
  }
}

}  // namespace

DensityPair apply_limit_rhs(const LimitOperator& op, const DensityPair& s, Exec exec) {
  check_grid(op, s);
  const auto x = pack(s);
  std::vector<double> dx(x.size());
  op.apply(x, dx, exec);
  return unpack(op.grid(), dx, s.t);
}

std::vector<DensityPair> integrate_limit(const LimitOperator& op, const DensityPair& s0,
                                         const IntegrationOptions& options) {
  check_grid(op, s0);
  const double h = op.grid().h();
  const double bound = op.strip().enabled ? options.cfl_factor * h * h : 0.25;
  if (options.dt > bound * (1.0 + 1e-12)) {
    throw Error(ErrorKind::stability,
                "dt = " + std::to_string(options.dt) + " exceeds the limit-system stability bound " +
                    std::to_string(bound));
  }
  auto state = pack(s0);
  std::vector<DensityPair> out;
  out.reserve(options.snapshots.size());
  integrate_rk4([&](std::span<const double> x, std::span<double> dx) { op.apply(x, dx, options.exec); }, state,
                options, [&](double t, std::span<const double> x) { out.push_back(unpack(op.grid(), x, t)); });
  return out;
}

std::pair<double, double> mass_pair(const DensityPair& s) { return {total_mass(s.a), total_mass(s.b)}; }

double gronwall_rate(const LimitOperator& op) {
  const double j = op.kernel().sup_density();
  return 4.0 * (1.0 + j * j);
}

double pair_distance(const DensityPair& x, const DensityPair& y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.a.values.size(); ++i) {
    const double da = x.a.values[i] - y.a.values[i];
    const double db = x.b.values[i] - y.b.values[i];
    acc += da * da + db * db;
  }
  return std::sqrt(acc * x.a.grid.cell_volume());
}

}  // namespace mixhom
