#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mixhom/error.hpp"
#include "mixhom/limit_solver.hpp"

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

std::vector<double> random_values(std::size_t n, unsigned seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

IntegrationOptions options(double horizon, double dt, std::vector<double> snaps) {
  IntegrationOptions o;
  o.horizon = horizon;
  o.dt = dt;
  o.snapshots = std::move(snaps);
  return o;
}

}  // namespace

TEST_CASE("constant kernel with constant data") {
  const Grid g = make_grid(1, 8);
  const DiscreteKernel k = discretize({}, g);
  const LimitOperator op = make_limit_operator(std::vector<double>(8, 0.5), k);
  const double a0 = 0.3, b0 = 0.9;
  const DensityPair d = apply_limit_rhs(op, {Field(g, a0), Field(g, b0), 0.0});
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(d.a.values[i] == doctest::Approx((b0 - a0) / 2).epsilon(1e-14));
    CHECK(d.b.values[i] == doctest::Approx((a0 - b0) / 2).epsilon(1e-14));
  }
  const DensityPair z = apply_limit_rhs(op, {Field(g, 0.0), Field(g, 0.0), 0.0});
  for (std::size_t i = 0; i < 8; ++i) CHECK((z.a.values[i] == 0.0 && z.b.values[i] == 0.0));
}

TEST_CASE("right-hand side conserves total mass") {
  const Grid g = make_grid(2, 10);
  const DiscreteKernel k = discretize({KernelFamily::gaussian, 0.25}, g);
  const std::size_t n = g.cell_count();
  for (bool strip : {false, true}) {
    const LimitOperator op = make_limit_operator(random_values(n, 1, 0.05, 0.95), k, {strip, 0.5});
    const DensityPair s{Field(g, random_values(n, 2, 0.0, 2.0)), Field(g, random_values(n, 3, 0.0, 2.0)), 0.0};
    const DensityPair d = apply_limit_rhs(op, s);
    const auto [ma, mb] = mass_pair(d);
    CHECK(std::abs(ma + mb) <= 1e-13);
    const DensityPair ds = apply_limit_rhs(op, s, Exec::serial);
    CHECK(ds.a.values == d.a.values);
    CHECK(ds.b.values == d.b.values);
  }
}

TEST_CASE("mass of each label follows the closed form") {
  const double theta = 0.5;
  for (KernelSpec spec : {KernelSpec{}, KernelSpec{KernelFamily::gaussian, 0.2}}) {
    const Grid g = make_grid(1, 64);
    const DiscreteKernel k = discretize(spec, g);
    const LimitOperator op = make_limit_operator(std::vector<double>(64, theta), k);
    // A(0) = 0.3 out of unit total mass, unevenly spread
    std::vector<double> a(64), b(64);
    for (std::size_t i = 0; i < 64; ++i) {
      const double x = g.center(i).x;
      a[i] = 0.3 * (1 + 0.5 * std::cos(std::numbers::pi * x));
      b[i] = 0.7 * (1 - 0.5 * std::cos(std::numbers::pi * x));
    }
    const DensityPair s0{Field(g, a), Field(g, b), 0.0};
    const auto traj = integrate_limit(op, s0, options(2.0, 1e-3, {0.0, 0.5, 1.0, 2.0}));
    const double a0 = mass_pair(s0).first;
    for (const auto& s : traj) {
      const double want = (1 - theta) + (a0 - (1 - theta)) * std::exp(-s.t);
      const auto [ma, mb] = mass_pair(s);
      CHECK(std::abs(ma - want) <= 1e-6);
      CHECK(std::abs(ma + mb - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("mass_pair and split") {
  const Grid g = make_grid(1, 4);
  const DiscreteKernel k = discretize({}, g);
  const auto [ma, mb] = mass_pair({Field(g, 1.0), Field(g, 2.0), 0.0});
  CHECK(ma == 1.0);
  CHECK(mb == 2.0);

  const Partition p = make_alternating_1d(1, 0.25, g);
  const LimitOperator op = make_limit_operator(p, k);
  const DensityPair s = split_initial(op, Field(g, 1.0));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(s.a.values[i] == 0.75);
    CHECK(s.b.values[i] == 0.25);
  }
}

TEST_CASE("equilibrium is stationary") {
  const Grid g = make_grid(1, 16);
  const DiscreteKernel k = discretize({KernelFamily::gaussian, 0.3}, g);
  const LimitOperator op = make_limit_operator(std::vector<double>(16, 0.5), k);
  const auto traj = integrate_limit(op, split_initial(op, Field(g, 1.0)), options(1.0, 0.01, {0.0, 1.0}));
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(std::abs(traj.back().a.values[i] - 0.5) <= 1e-12);
    CHECK(std::abs(traj.back().b.values[i] - 0.5) <= 1e-12);
  }
}

TEST_CASE("uniqueness and stability") {
  const Grid g = make_grid(1, 32);
  const DiscreteKernel k = discretize({KernelFamily::gaussian, 0.2}, g);
  const LimitOperator op = make_limit_operator(random_values(32, 4, 0.1, 0.9), k);
  const DensityPair s0 = split_initial(op, Field(g, random_values(32, 5, 0.5, 1.5)));
  const auto opt = options(1.0, 1e-2, uniform_snapshots(1.0, 5));
  const auto x = integrate_limit(op, s0, opt);
  const auto y = integrate_limit(op, s0, opt);
  for (std::size_t s = 0; s < x.size(); ++s) CHECK(pair_distance(x[s], y[s]) == 0.0);

  DensityPair p0 = s0;
  const auto noise = random_values(32, 6, -1e-3, 1e-3);
  for (std::size_t i = 0; i < 32; ++i) p0.a.values[i] += noise[i];
  const double d0 = pair_distance(s0, p0);
  const auto z = integrate_limit(op, p0, opt);
  const double rate = gronwall_rate(op);
  for (std::size_t s = 0; s < x.size(); ++s) CHECK(pair_distance(x[s], z[s]) <= d0 * std::exp(rate * x[s].t));
}

TEST_CASE("strip mode") {
  const Grid g = make_grid(2, 8);
  const DiscreteKernel k = discretize({}, g);
  const Partition p = make_strips(2, g);
  const LimitOperator op = make_limit_operator(p, k, {true, 0.5});
  InitialSpec init;
  init.kind = InitialKind::cosine_bump;
  init.modes = {"y", "xy"};
  const auto opt = options(0.2, 0.2 * g.h() * g.h(), {0.0, 0.1, 0.2});
  const auto traj = integrate_limit(op, split_initial(op, make_initial(init, g)), opt);
  for (const auto& s : traj) {
    const auto [ma, mb] = mass_pair(s);
    CHECK(std::abs(ma + mb - 1.0) <= 1e-12);
  }

  auto too_big = opt;
  too_big.dt = 0.3 * g.h() * g.h();
  CHECK(kind_of([&] { (void)integrate_limit(op, split_initial(op, Field(g, 1.0)), too_big); }) ==
        ErrorKind::stability);
  CHECK(kind_of([&] { (void)make_limit_operator(p, k, {true, 0.0}); }) == ErrorKind::config);

  const Grid g1 = make_grid(1, 8);
  const DiscreteKernel k1 = discretize({}, g1);
  CHECK(kind_of([&] { (void)make_limit_operator(std::vector<double>(8, 0.5), k1, {true, 0.5}); }) ==
        ErrorKind::config);
}

TEST_CASE("parameter checks") {
  const Grid g = make_grid(1, 8);
  const DiscreteKernel k = discretize({}, g);
  CHECK(kind_of([&] { (void)make_limit_operator(std::vector<double>(8, 1.0), k); }) == ErrorKind::config);
  CHECK(kind_of([&] { (void)make_limit_operator(std::vector<double>(4, 0.5), k); }) == ErrorKind::mismatch);
  const LimitOperator op = make_limit_operator(std::vector<double>(8, 0.5), k);
  CHECK(kind_of([&] { (void)integrate_limit(op, split_initial(op, Field(g, 1.0)), options(1.0, 0.5, {0.0, 1.0})); }) ==
        ErrorKind::stability);
}
