#include "mixhom/homogenize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mixhom/error.hpp"

namespace mixhom {

namespace {

constexpr double pi = std::numbers::pi;

TestFunction make_test(std::string id, std::function<double(Point, double)> value,
                       std::function<double(Point, double)> dt, double lipschitz, bool uses_y) {
  return {std::move(id), std::move(value), std::move(dt), lipschitz, uses_y};
}

double zero(Point, double) { return 0.0; }

}  // namespace

std::vector<TestFunction> test_dictionary(int dim) {
  std::vector<TestFunction> d;
  d.push_back(make_test("1", [](Point, double) { return 1.0; }, zero, 0.0, false));
  d.push_back(make_test("x", [](Point p, double) { return p.x; }, zero, 1.0, false));
  if (dim == 2) d.push_back(make_test("y", [](Point p, double) { return p.y; }, zero, 1.0, true));
  d.push_back(make_test("x2", [](Point p, double) { return p.x * p.x; }, zero, 2.0, false));
  if (dim == 2) d.push_back(make_test("xy", [](Point p, double) { return p.x * p.y; }, zero, std::sqrt(2.0), true));
  d.push_back(make_test("cos_pi_x", [](Point p, double) { return std::cos(pi * p.x); }, zero, pi, false));
  if (dim == 2) {
    d.push_back(make_test("cos_pi_y", [](Point p, double) { return std::cos(pi * p.y); }, zero, pi, true));
    d.push_back(make_test(
        "cos_pi_x_cos_pi_y", [](Point p, double) { return std::cos(pi * p.x) * std::cos(pi * p.y); }, zero, pi, true));
  }
  d.push_back(make_test(
      "damped_cos_pi_x", [](Point p, double t) { return (1.0 - t) * std::cos(pi * p.x); },
      [](Point p, double) { return -std::cos(pi * p.x); }, pi, false));
  return d;
}

TestFunction find_test_function(int dim, const std::string& id) {
  for (auto& phi : test_dictionary(dim)) {
    if (phi.id == id) return phi;
  }
  throw Error(ErrorKind::config, "unknown test function '" + id + "' for a " + std::to_string(dim) + "-d grid");
}

TestFunction vanishing_at(const TestFunction& phi, double horizon) {
  TestFunction out = phi;
  out.id = phi.id + "@T";
  auto v = phi.value;
  auto dv = phi.time_derivative;
  out.value = [v, horizon](Point p, double t) { return v(p, t) * (horizon - t) / horizon; };
  out.time_derivative = [v, dv, horizon](Point p, double t) {
    return dv(p, t) * (horizon - t) / horizon - v(p, t) / horizon;
  };
  return out;
}

Field project_piecewise_constant(const TestFunction& phi, const Partition& partition, const Grid& grid, double t) {
  if (!(partition.grid() == grid)) throw Error(ErrorKind::mismatch, "partition was built on a different grid");
  Field out(grid, 0.0, t);
  for (std::size_t i = 0; i < grid.cell_count(); ++i) out.values[i] = phi(grid.center(i), t);
  for (const auto& c : partition.components()) {
    double acc = 0.0;
    for (auto cell : c.cells) acc += out.values[cell];
    const double mean = acc / static_cast<double>(c.cells.size());
    for (auto cell : c.cells) out.values[cell] = mean;
  }
  return out;
}

double projection_error(const TestFunction& phi, const Partition& partition, double t) {
  const Grid& g = partition.grid();
  const Field proj = project_piecewise_constant(phi, partition, g, t);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    worst = std::max(worst, std::abs(proj.values[i] - phi(g.center(i), t)));
  }
  return worst;
}

namespace {

double trapezoid(const std::vector<double>& times, const std::vector<double>& values) {
  double acc = 0.0;
  for (std::size_t s = 1; s < times.size(); ++s) acc += 0.5 * (times[s] - times[s - 1]) * (values[s] + values[s - 1]);
  return acc;
}

}  // namespace

WeakGaps weak_gap(const std::vector<Field>& u_traj, const std::vector<DensityPair>& limit_traj,
                  const TestFunction& phi, const Partition& partition) {
  if (u_traj.size() != limit_traj.size()) throw Error(ErrorKind::mismatch, "trajectories have different lengths");
  const Grid& g = partition.grid();
  const std::size_t n = g.cell_count();
  std::vector<double> times(u_traj.size()), pu(u_traj.size()), pa(u_traj.size()), pb(u_traj.size());
  for (std::size_t s = 0; s < u_traj.size(); ++s) {
    const Field& u = u_traj[s];
    const DensityPair& l = limit_traj[s];
    if (std::abs(u.t - l.t) > 1e-12 * std::max(1.0, std::abs(u.t))) {
      throw Error(ErrorKind::mismatch, "snapshot times differ between trajectories");
    }
    if (!(u.grid == g) || !(l.a.grid == g) || !(l.b.grid == g)) {
      throw Error(ErrorKind::mismatch, "trajectories live on different grids");
    }
    double su = 0.0, sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = phi(g.center(i), u.t);
      const double v = u.values[i];
      const bool b = partition.in_b(i);
      su += (v - (l.a.values[i] + l.b.values[i])) * w;
      sa += ((b ? 0.0 : v) - l.a.values[i]) * w;
      sb += ((b ? v : 0.0) - l.b.values[i]) * w;
    }
    times[s] = u.t;
    pu[s] = su * g.cell_volume();
    pa[s] = sa * g.cell_volume();
    pb[s] = sb * g.cell_volume();
  }
  return {std::abs(trapezoid(times, pu)), std::abs(trapezoid(times, pa)), std::abs(trapezoid(times, pb))};
}

double weak_form_residual(const std::vector<Field>& u_traj, const CoupledOperator& op, const TestFunction& phi) {
  if (u_traj.empty()) throw Error(ErrorKind::precondition, "empty trajectory");
  if (u_traj.front().t != 0.0) throw Error(ErrorKind::precondition, "trajectory must start at t = 0");
  const Grid& g = op.grid();
  const Partition& p = op.partition();
  const double horizon = u_traj.back().t;
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    if (std::abs(phi(g.center(i), horizon)) > 1e-12) {
      throw Error(ErrorKind::precondition, "test function '" + phi.id + "' does not vanish at T");
    }
  }
  const std::size_t n = g.cell_count();
  std::vector<double> times, drift, exchange;
  std::vector<double> lu(n);
  for (const auto& u : u_traj) {
    if (!(u.grid == g)) throw Error(ErrorKind::mismatch, "trajectory lives on a different grid");
    op.apply(u.values, lu);
    double sd = 0.0, se = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (p.in_b(i)) continue;
      const Point c = g.center(i);
      sd += phi.time_derivative(c, u.t) * u.values[i];
      se += phi(c, u.t) * lu[i];
    }
    times.push_back(u.t);
    drift.push_back(sd * g.cell_volume());
    exchange.push_back(se * g.cell_volume());
  }
  double initial = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!p.in_b(i)) initial += u_traj.front().values[i] * phi(g.center(i), 0.0);
  }
  initial *= g.cell_volume();
  return -trapezoid(times, drift) - initial - trapezoid(times, exchange);
}

std::string_view to_string(LimitVariant v) noexcept {
  switch (v) {
    case LimitVariant::standard: return "standard";
    case LimitVariant::strip: return "strip";
    case LimitVariant::strip_literal: return "strip-literal";
  }
  return "unknown";
}

int SweepSpec::dim() const noexcept { return family == PartitionFamily::alternating1d ? 1 : 2; }

int SweepSpec::resolution(int n) const noexcept { return (base > 0 ? base : (dim() == 1 ? 64 : 8)) * n; }

namespace {

Partition build_partition(const SweepSpec& spec, int n, const Grid& grid) {
  switch (spec.family) {
    case PartitionFamily::alternating1d: return make_alternating_1d(n, spec.k, grid);
    case PartitionFamily::chessboard: return make_chessboard(n, grid);
    case PartitionFamily::balls: return make_balls(n, spec.r, grid);
    case PartitionFamily::strips: return make_strips(n, grid);
  }
  throw Error(ErrorKind::config, "unknown partition family");
}

}  // namespace

void SweepSpec::validate() const {
  if (n_list.empty()) throw Error(ErrorKind::config, "sweep needs at least one n");
  if (!std::is_sorted(n_list.begin(), n_list.end()) ||
      std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end()) {
    throw Error(ErrorKind::config, "sweep n_list must be strictly increasing");
  }
  if (base < 0) throw Error(ErrorKind::config, "resolution base must be nonnegative");
  if (!(horizon > 0.0)) throw Error(ErrorKind::config, "horizon must be positive");
  if (snapshot_count < 2) throw Error(ErrorKind::config, "sweep needs at least two snapshots");
  if (!(cfl_factor > 0.0 && cfl_factor <= 0.5)) throw Error(ErrorKind::config, "cfl_factor must lie in (0, 0.5]");
  if (!(limit_dt > 0.0 && limit_dt <= 0.25)) throw Error(ErrorKind::config, "limit dt must lie in (0, 0.25]");
  if (!(strip_coefficient > 0.0)) throw Error(ErrorKind::config, "strip coefficient must be positive");
  kernel.validate();
  initial.validate(dim());
  for (const auto& id : tests) (void)find_test_function(dim(), id);
  // Build every partition on its grid up front so misalignment fails early.
  for (int n : n_list) {
    const Grid g = make_grid(dim(), resolution(n));
    (void)build_partition(*this, n, g);
  }
}

ConvergenceReport run_sweep(const SweepSpec& spec) {
  spec.validate();
  ConvergenceReport report;
  report.spec = spec;
  std::vector<TestFunction> tests;
  for (auto& phi : test_dictionary(spec.dim())) {
    if (spec.tests.empty() || std::find(spec.tests.begin(), spec.tests.end(), phi.id) != spec.tests.end()) {
      tests.push_back(std::move(phi));
    }
  }
  const auto times = uniform_snapshots(spec.horizon, spec.snapshot_count);

  for (int n : spec.n_list) {
    const int m = spec.resolution(n);
    report.resolutions.emplace_back(n, m);
    const Grid grid = make_grid(spec.dim(), m);
    const Partition partition = build_partition(spec, n, grid);
    const DiscreteKernel kernel = discretize(spec.kernel, grid);
    const Field u0 = make_initial(spec.initial, grid);

    const CoupledOperator op = assemble(partition, kernel, grid);
    IntegrationOptions coupled_opts;
    coupled_opts.horizon = spec.horizon;
    coupled_opts.snapshots = times;
    coupled_opts.cfl_factor = spec.cfl_factor;
    coupled_opts.dt = spec.cfl_factor * grid.h() * grid.h();
    coupled_opts.exec = spec.exec;
    const auto u_traj = integrate(op, u0, coupled_opts);

    std::vector<std::pair<LimitVariant, StripMode>> variants{{LimitVariant::standard, StripMode{}}};
    if (spec.family == PartitionFamily::strips) {
      variants.push_back({LimitVariant::strip, StripMode{true, spec.strip_coefficient}});
      variants.push_back({LimitVariant::strip_literal, StripMode{true, 0.25}});
    }
    std::vector<std::vector<DensityPair>> limits;
    for (const auto& [variant, strip] : variants) {
      const LimitOperator lop = make_limit_operator(partition, kernel, strip);
      IntegrationOptions lopts = coupled_opts;
      lopts.dt = strip.enabled ? spec.cfl_factor * grid.h() * grid.h() : spec.limit_dt;
      limits.push_back(integrate_limit(lop, split_initial(lop, u0), lopts));
    }

    for (const auto& phi : tests) {
      const double residual = weak_form_residual(u_traj, op, vanishing_at(phi, spec.horizon));
      for (std::size_t v = 0; v < variants.size(); ++v) {
        report.rows.push_back(
            {spec.family, n, phi.id, weak_gap(u_traj, limits[v], phi, partition), residual, variants[v].first});
      }
    }
  }
  return report;
}

RatioCheck end_to_end_ratio(const ConvergenceReport& report, const std::string& test_id, LimitVariant limit) {
  const ReportRow* first = nullptr;
  const ReportRow* last = nullptr;
  for (const auto& row : report.rows) {
    if (row.test_id != test_id || row.limit != limit) continue;
    if (!first || row.n < first->n) first = &row;
    if (!last || row.n > last->n) last = &row;
  }
  if (!first) {
    throw Error(ErrorKind::precondition,
                "report has no rows for test '" + test_id + "' and limit " + std::string(to_string(limit)));
  }
  RatioCheck r;
  r.gap_first = first->gaps.gap_u;
  r.gap_last = last->gaps.gap_u;
  r.ratio = r.gap_first > 0.0 ? r.gap_last / r.gap_first : (r.gap_last > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  r.at_floor = r.gap_last <= gap_floor;
  return r;
}

}  // namespace mixhom
