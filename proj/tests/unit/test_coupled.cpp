#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mixhom/coupled_solver.hpp"
#include "mixhom/error.hpp"

using namespace mixhom;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::diagnostic;
}

std::vector<double> random_values(std::size_t n, unsigned seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

bool adjacent(const Grid& g, std::size_t i, std::size_t j) {
  return std::abs(g.ix(i) - g.ix(j)) + std::abs(g.iy(i) - g.iy(j)) == 1;
}

// Generator matrix written straight from the definition, one entry at a time.
std::vector<double> naive_generator(const Partition& p, const DiscreteKernel& k) {
  const Grid& g = p.grid();
  const std::size_t n = g.cell_count();
  std::vector<double> gen(n * n, 0.0);
  const double lap = 0.5 / (g.h() * g.h());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double c = (p.in_b(i) && p.in_b(j)) ? 0.0 : k.weight(i, j);
      if (p.in_b(i) && p.in_b(j) && adjacent(g, i, j) && p.component_of(i) == p.component_of(j)) c += lap;
      gen[i * n + j] += c;
      gen[i * n + i] -= c;
    }
  }
  return gen;
}

double mass(std::span<const double> v, const Grid& g) {
  double s = 0.0;
  for (double x : v) s += x;
  return s * g.cell_volume();
}

struct Setup {
  Partition partition;
  DiscreteKernel kernel;
};

Setup setup_1d_alternating(int n, int m, KernelSpec spec = {}) {
  const Grid g = make_grid(1, m);
  return {make_alternating_1d(n, 0.5, g), discretize(spec, g)};
}

}  // namespace

TEST_CASE("two-cell example") {
  const Setup s = setup_1d_alternating(1, 2);
  const CoupledOperator op = assemble(s.partition, s.kernel, s.partition.grid());
  const Field lu = apply_generator(op, Field(s.partition.grid(), {1.0, 0.0}));
  CHECK(std::abs(lu.values[0] + 0.5) <= 1e-14);
  CHECK(std::abs(lu.values[1] - 0.5) <= 1e-14);
  CHECK(energy(op, Field(s.partition.grid(), {1.0, 0.0})) == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("generator matches the entrywise definition") {
  std::vector<Setup> cases;
  cases.push_back(setup_1d_alternating(2, 16));
  cases.push_back(setup_1d_alternating(4, 32, {KernelFamily::gaussian, 0.2}));
  {
    const Grid g = make_grid(2, 8);
    cases.push_back({make_chessboard(2, g), discretize({KernelFamily::gaussian, 0.3}, g)});
    cases.push_back({make_strips(2, g), discretize({}, g)});
    cases.push_back({make_balls(2, 0.4, g), discretize({KernelFamily::bump, 0.5}, g)});
  }
  for (const auto& s : cases) {
    const Grid& g = s.partition.grid();
    const std::size_t n = g.cell_count();
    const CoupledOperator op = assemble(s.partition, s.kernel, g);
    const auto gen = naive_generator(s.partition, s.kernel);
    const auto u = random_values(n, 3);
    std::vector<double> lu(n);
    op.apply(u, lu);
    double scale = 0.0;
    for (double x : gen) scale = std::max(scale, std::abs(x));
    for (std::size_t i = 0; i < n; ++i) {
      double want = 0.0;
      for (std::size_t j = 0; j < n; ++j) want += gen[i * n + j] * u[j];
      CHECK(std::abs(lu[i] - want) <= 1e-13 * scale);
    }
    // symmetric in the weighted product
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) CHECK(std::abs(gen[i * n + j] - gen[j * n + i]) <= 1e-15 * scale);
    }

    // constants are annihilated; mass is conserved
    std::vector<double> one(n, 1.0), out(n);
    op.apply(one, out);
    for (double v : out) CHECK(std::abs(v) <= 1e-12);
    CHECK(std::abs(mass(lu, g)) <= 1e-12 * scale);

    // serial and parallel apply agree bitwise
    std::vector<double> ls(n);
    op.apply(u, ls, Exec::serial);
    CHECK(ls == lu);

    // direct-sum energy equals -1/2 <u, L u>
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) quad += u[i] * lu[i];
    quad *= -0.5 * g.cell_volume();
    CHECK(energy(op, Field(g, u)) == doctest::Approx(quad).epsilon(1e-11));
  }
}

TEST_CASE("linearity") {
  const Setup s = setup_1d_alternating(2, 16, {KernelFamily::gaussian, 0.25});
  const CoupledOperator op = assemble(s.partition, s.kernel, s.partition.grid());
  const auto u = random_values(16, 1), v = random_values(16, 2);
  std::vector<double> w(16), lu(16), lv(16), lw(16);
  for (std::size_t i = 0; i < 16; ++i) w[i] = 2.0 * u[i] - 3.0 * v[i];
  op.apply(u, lu);
  op.apply(v, lv);
  op.apply(w, lw);
  for (std::size_t i = 0; i < 16; ++i) CHECK(lw[i] == doctest::Approx(2.0 * lu[i] - 3.0 * lv[i]).epsilon(1e-12));
}

TEST_CASE("grids must agree") {
  const Setup s = setup_1d_alternating(2, 16);
  CHECK(kind_of([&] { (void)assemble(s.partition, s.kernel, make_grid(1, 32)); }) == ErrorKind::mismatch);
  const DiscreteKernel other = discretize({}, make_grid(1, 32));
  CHECK(kind_of([&] { (void)assemble(s.partition, other, s.partition.grid()); }) == ErrorKind::mismatch);
}

TEST_CASE("one RK4 step on two cells") {
  const Setup s = setup_1d_alternating(1, 2);
  const Grid& g = s.partition.grid();
  const CoupledOperator op = assemble(s.partition, s.kernel, g);
  IntegrationOptions opt;
  opt.horizon = 0.01;
  opt.dt = 0.01;
  opt.snapshots = {0.0, 0.01};
  const auto traj = integrate(op, Field(g, {1.0, 0.0}), opt);
  REQUIRE(traj.size() == 2);
  // the difference u0 - u1 decays as d' = -d; RK4 applies the quartic Taylor factor
  const double dt = 0.01;
  const double factor = 1 - dt + dt * dt / 2 - dt * dt * dt / 6 + dt * dt * dt * dt / 24;
  CHECK(traj[1].values[0] == doctest::Approx(0.5 + 0.5 * factor).epsilon(1e-15));
  CHECK(traj[1].values[1] == doctest::Approx(0.5 - 0.5 * factor).epsilon(1e-15));
  CHECK(traj[1].t == 0.01);
}

TEST_CASE("integration invariants") {
  const Grid g = make_grid(2, 16);
  const Partition p = make_chessboard(4, g);
  const DiscreteKernel k = discretize({KernelFamily::gaussian, 0.2}, g);
  const CoupledOperator op = assemble(p, k, g);
  const Field u0(g, random_values(g.cell_count(), 9, 0.0, 2.0));
  IntegrationOptions opt;
  opt.horizon = 0.2;
  opt.dt = 0.2 * g.h() * g.h();
  opt.snapshots = uniform_snapshots(0.2, 11);
  const auto traj = integrate(op, u0, opt);
  REQUIRE(traj.size() == 11);
  const double m0 = total_mass(u0);
  for (std::size_t s = 0; s < traj.size(); ++s) {
    CHECK(traj[s].t == opt.snapshots[s]);
    CHECK(std::abs(total_mass(traj[s]) - m0) <= 1e-10);
    CHECK(min_value(traj[s]) >= 0.0);
    if (s > 0) {
      CHECK(l2_norm(traj[s]) <= l2_norm(traj[s - 1]) * (1 + 1e-12));
      CHECK(energy(op, traj[s]) <= energy(op, traj[s - 1]) * (1 + 1e-12));
    }
  }

  opt.exec = Exec::serial;
  const auto serial = integrate(op, u0, opt);
  CHECK(serial.back().values == traj.back().values);
}

TEST_CASE("constant data is stationary") {
  const Setup s = setup_1d_alternating(4, 64);
  const Grid& g = s.partition.grid();
  const CoupledOperator op = assemble(s.partition, s.kernel, g);
  IntegrationOptions opt;
  opt.horizon = 0.1;
  opt.dt = 0.2 * g.h() * g.h();
  opt.snapshots = {0.0, 0.05, 0.1};
  for (const auto& f : integrate(op, Field(g, 1.0), opt)) {
    for (double v : f.values) CHECK(std::abs(v - 1.0) <= 1e-13);
  }
  CHECK(energy(op, Field(g, 1.0)) == 0.0);
}

TEST_CASE("time step above the diffusion bound") {
  const Setup s = setup_1d_alternating(4, 64);
  const Grid& g = s.partition.grid();
  const CoupledOperator op = assemble(s.partition, s.kernel, g);
  IntegrationOptions opt;
  opt.horizon = 0.1;
  opt.dt = 0.3 * g.h() * g.h();
  opt.snapshots = {0.0, 0.1};
  CHECK(kind_of([&] { (void)integrate(op, Field(g, 1.0), opt); }) == ErrorKind::stability);

  opt.dt = -1.0;
  CHECK(kind_of([&] { (void)integrate(op, Field(g, 1.0), opt); }) == ErrorKind::precondition);
  opt.dt = 1e-5;
  opt.snapshots = {0.05, 0.0};
  CHECK(kind_of([&] { (void)integrate(op, Field(g, 1.0), opt); }) == ErrorKind::precondition);
}
